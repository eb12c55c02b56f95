#include "affqe/qe_solver.hpp"

#include "jet.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace affqe {

namespace {

using cd = std::complex<double>;
using Poly = std::vector<double>;  // ascending coefficients

constexpr double kClusterTol = 1e-6;
constexpr double kImagTol = 1e-9;

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly poly_add(Poly a, const Poly& b, double s = 1.0) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
    return a;
}

// Roots of a monic-or-not quadratic z^2 + b z + c (complex coefficients).
std::array<cd, 2> quadratic_roots(cd b, cd c) {
    const cd s = std::sqrt(b * b - 4.0 * c);
    const cd q1 = -(b + s) / 2.0, q2 = -(b - s) / 2.0;
    const cd q = std::abs(q1) >= std::abs(q2) ? q1 : q2;
    if (std::abs(q) == 0.0) return {cd{0.0}, cd{0.0}};
    return {q, c / q};
}

std::vector<cd> poly_roots(Poly c) {
    double scale = 0.0;
    for (double v : c) scale = std::max(scale, std::abs(v));
    while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * scale) c.pop_back();
    const int n = static_cast<int>(c.size()) - 1;
    if (n <= 0) return {};
    if (n == 1) return {cd{-c[0] / c[1]}};
    if (n == 2) {
        auto r = quadratic_roots(c[1] / c[2], c[0] / c[2]);
        return {r[0], r[1]};
    }
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    std::vector<cd> out;
    for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

// Greedy clustering; multiple roots come back from the eigen solver split by
// ~sqrt(eps), and the mean recovers them.
constexpr double kMultiRootTol = 1e-3;

std::vector<cd> cluster(const std::vector<cd>& zs, double tol = kClusterTol) {
    std::vector<cd> sum;
    std::vector<int> count;
    std::vector<cd> first;
    for (const cd& z : zs) {
        bool placed = false;
        for (size_t i = 0; i < first.size(); ++i)
            if (std::abs(z - first[i]) <= tol * (1.0 + std::abs(z))) {
                sum[i] += z;
                ++count[i];
                placed = true;
                break;
            }
        if (!placed) {
            first.push_back(z);
            sum.push_back(z);
            count.push_back(1);
        }
    }
    std::vector<cd> out;
    for (size_t i = 0; i < sum.size(); ++i) out.push_back(sum[i] / static_cast<double>(count[i]));
    return out;
}

double snap(double v) {
    for (int d : {1, 2, 3, 4, 6, 8, 12, 24}) {
        const double r = std::round(v * d) / d;
        if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return r == 0.0 ? 0.0 : r;
    }
    return v;
}

cd snap(cd z) { return {snap(z.real()), snap(z.imag())}; }

cd clean_imag(cd z) {
    if (std::abs(z.imag()) <= kImagTol * (1.0 + std::abs(z))) return {z.real(), 0.0};
    return z;
}

// Null space of a complex matrix, returned as rows.
Eigen::MatrixXcd null_rows(const Eigen::MatrixXcd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double top = sv.size() ? sv(0) : 0.0;
    const double tol = 1e-9 * std::max(1.0, top);
    std::vector<int> cols;
    for (Eigen::Index k = 0; k < M.cols(); ++k)
        if (k >= sv.size() || sv(k) <= tol) cols.push_back(static_cast<int>(k));
    Eigen::MatrixXcd out(cols.size(), M.cols());
    for (size_t i = 0; i < cols.size(); ++i) out.row(i) = svd.matrixV().col(cols[i]).transpose();
    return out;
}

// Reduced row echelon form; column order is the given one. Also returns the
// pivot column of each row.
Eigen::MatrixXcd rref(Eigen::MatrixXcd A, std::vector<int>* pivots) {
    const double tol = 1e-8 * std::max(1.0, A.size() ? A.cwiseAbs().maxCoeff() : 0.0);
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < A.cols() && r < A.rows(); ++c) {
        Eigen::Index p = r;
        for (Eigen::Index i = r; i < A.rows(); ++i)
            if (std::abs(A(i, c)) > std::abs(A(p, c))) p = i;
        if (std::abs(A(p, c)) <= tol) continue;
        A.row(p).swap(A.row(r));
        A.row(r) /= A(r, c);
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            if (i != r) A.row(i) -= A(i, c) * A.row(r);
        pivots->push_back(static_cast<int>(c));
        ++r;
    }
    A.conservativeResize(r, A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            cd v = A(i, j);
            double re = std::abs(v.real()) < 1e-11 ? 0.0 : snap(v.real());
            double im = std::abs(v.imag()) < 1e-11 ? 0.0 : snap(v.imag());
            A(i, j) = {re, im};
        }
    return A;
}

ClosedForm cos_axis(int axis, double b, bool log_arg = false) {
    if (b == 0.0) return ClosedForm::constant(1.0);
    Term t{1.0, {}};
    t.factors[axis].trig = Trig{b, 0.0, log_arg};
    return ClosedForm({t});
}

ClosedForm sin_axis(int axis, double b, bool log_arg = false) {
    if (b == 0.0) return {};
    Term t{1.0, {}};
    t.factors[axis].trig = Trig{b, -std::numbers::pi / 2.0, log_arg};
    return ClosedForm({t});
}

struct Candidate {
    int degree = 0;
    double key1 = 0.0, key2 = 0.0, key3 = 0.0;
    ClosedForm f;
};

void finish(SolutionBasis& out, std::vector<Candidate> cands, const SurfaceModel& m) {
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.degree != b.degree) return a.degree < b.degree;
        if (a.key1 != b.key1) return a.key1 < b.key1;
        if (a.key2 != b.key2) return a.key2 < b.key2;
        return a.key3 < b.key3;
    });
    out.residual = 0.0;
    for (auto& c : cands) {
        double r = 0.0;
        if (!residual_ok(m, out.mu, c.f, &r)) {
            std::ostringstream os;
            os << "solution " << to_string(c.f) << " fails the residual check (" << r << ")";
            throw ConsistencyError(os.str());
        }
        out.residual = std::max(out.residual, r);
        out.basis.push_back(c.f);
    }
    if (out.basis.size() > 3) throw ConsistencyError("more than 3 independent solutions");
    if (!out.basis.empty() && numeric_rank(out.basis, m.domain()) != static_cast<int>(out.basis.size()))
        throw ConsistencyError("solver produced dependent functions");
}

// ---- Type A ----

constexpr int kMono[10][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}};

int mono_index(int e1, int e2) {
    for (int i = 0; i < 10; ++i)
        if (kMono[i][0] == e1 && kMono[i][1] == e2) return i;
    return -1;
}

// Rows: entry (11, 12, 22) x monomial; columns: monomial of p. Encodes
// e^{-a.x} (Hess - mu S)(p e^{a.x}).
Eigen::MatrixXcd type_a_operator(const Christoffel& G, const Mat2& S, double mu, cd a1, cd a2) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(30, 10);
    const cd a[2] = {a1, a2};
    const int ent[3][2] = {{0, 0}, {0, 1}, {1, 1}};
    for (int col = 0; col < 10; ++col) {
        const int e[2] = {kMono[col][0], kMono[col][1]};
        for (int r = 0; r < 3; ++r) {
            const int i = ent[r][0], j = ent[r][1];
            auto add = [&](int f1, int f2, cd v) {
                if (f1 < 0 || f2 < 0) return;
                M(r * 10 + mono_index(f1, f2), col) += v;
            };
            // d_i d_j p
            {
                int f[2] = {e[0], e[1]};
                double c = f[i];
                f[i] -= 1;
                if (c != 0.0) {
                    double c2 = f[j];
                    f[j] -= 1;
                    if (c2 != 0.0) add(f[0], f[1], c * c2);
                }
            }
            // a_i d_j p + a_j d_i p - Gamma_ij^k d_k p
            for (int k = 0; k < 2; ++k) {
                if (e[k] == 0) continue;
                int f[2] = {e[0], e[1]};
                f[k] -= 1;
                cd w = -G.g[i][j][k];
                if (k == j) w += a[i];
                if (k == i) w += a[j];
                add(f[0], f[1], w * static_cast<double>(e[k]));
            }
            const cd q = a[i] * a[j] - G.g[i][j][0] * a1 - G.g[i][j][1] * a2 - mu * S[i][j];
            add(e[0], e[1], q);
        }
    }
    return M;
}

}  // namespace

const char* method_name(SolveMethod m) {
    switch (m) {
        case SolveMethod::ExponentialAnsatz: return "exponential_ansatz";
        case SolveMethod::PowerAnsatz: return "power_ansatz";
        case SolveMethod::RegistryLookup: return "registry_lookup";
    }
    return "?";
}

bool residual_ok(const SurfaceModel& m, double mu, const ClosedForm& f, double* residual) {
    const auto pts = standard_points(m);
    const double r = qe_residual(m, mu, f, pts);
    if (residual) *residual = r;
    if (r < kResidualTol) return true;
    double scale = 0.0;
    for (const auto& p : pts) {
        const Mat2 h = hessian(m, f, p);
        const Mat2 rs = ricci(m, p).rho_s;
        const double fv = std::abs(evaluate(f, p, m.domain()));
        double hn = 0.0, rn = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                hn += h[i][j] * h[i][j];
                rn += rs[i][j] * rs[i][j];
            }
        scale = std::max(scale, std::sqrt(hn) + std::abs(mu) * fv * std::sqrt(rn));
    }
    return r < 1e-11 * scale;
}

IndicialSystem indicial_system(const SurfaceModel& m, double mu) {
    IndicialSystem sys;
    if (m.family() == Family::TypeA) {
        sys.kind = IndicialSystem::Kind::TypeAQuadratics;
        const Christoffel G = m.christoffel({0.0, 0.0});
        const Mat2 S = ricci(m, {0.0, 0.0}).rho_s;
        const int ent[3][2] = {{0, 0}, {0, 1}, {1, 1}};
        for (int r = 0; r < 3; ++r) {
            const int i = ent[r][0], j = ent[r][1];
            std::vector<double> c{-mu * S[i][j], -G.g[i][j][0], -G.g[i][j][1], 0.0, 0.0, 0.0};
            c[3 + r] = 1.0;
            sys.coefficients.push_back(c);
        }
    } else if (m.family() == Family::TypeB) {
        sys.kind = IndicialSystem::Kind::TypeBQuadratic;
        const Christoffel C = m.christoffel({1.0, 0.0});
        const Mat2 s = ricci(m, {1.0, 0.0}).rho_s;
        sys.coefficients.push_back({-mu * s[0][0], -(1.0 + C.g[0][0][0]), 1.0});
        sys.coefficients.push_back({C.g[0][1][0], mu * s[0][1], C.g[1][1][0], mu * s[1][1]});
    } else {
        throw std::invalid_argument("indicial system is defined for Type A and Type B only");
    }
    return sys;
}

SolutionBasis solve_type_a(const SurfaceModel& m, double mu) {
    if (m.family() != Family::TypeA) throw std::invalid_argument("solve_type_a needs a Type A model");
    const Christoffel G = m.christoffel({0.0, 0.0});
    const Mat2 S = ricci(m, {0.0, 0.0}).rho_s;
    auto q = [&](int i, int j, cd a1, cd a2) {
        const cd a[2] = {a1, a2};
        return a[i] * a[j] - G.g[i][j][0] * a1 - G.g[i][j][1] * a2 - mu * S[i][j];
    };

    // Eliminate a2: q11 = alpha a2 + beta(a1), then Res_{a2}(q22, q11).
    const double alpha = -G.g[0][0][1];
    const Poly beta{-mu * S[0][0], -G.g[0][0][0], 1.0};
    Poly R = poly_mul(beta, beta);
    R = poly_add(R, beta, G.g[1][1][1] * alpha);
    R = poly_add(R, Poly{-mu * S[1][1] * alpha * alpha, -G.g[1][1][0] * alpha * alpha});

    double gscale = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) gscale += std::abs(G.g[i][j][k]);
            gscale += std::abs(mu * S[i][j]);
        }

    std::vector<std::array<cd, 2>> exps;
    // A k-fold root of R comes back split by ~eps^(1/k) (1e-4 for k = 4), but
    // the centroid is accurate. Bad merges fail the common-root test below.
    for (cd a1 : cluster(poly_roots(R), kMultiRootTol)) {
        auto r2 = quadratic_roots(-G.g[1][1][1], -(G.g[1][1][0] * a1 + mu * S[1][1]));
        for (cd a2 : cluster({r2[0], r2[1]})) {
            const double sc = 1.0 + std::norm(a1) + std::norm(a2) + gscale * (1.0 + std::abs(a1) + std::abs(a2));
            if (std::abs(q(0, 0, a1, a2)) > kClusterTol * sc || std::abs(q(0, 1, a1, a2)) > kClusterTol * sc ||
                std::abs(q(1, 1, a1, a2)) > kClusterTol * sc)
                continue;
            std::array<cd, 2> e{snap(clean_imag(a1)), snap(clean_imag(a2))};
            bool dup = false;
            for (const auto& o : exps) {
                const double d = std::abs(o[0] - e[0]) + std::abs(o[1] - e[1]);
                const double dc = std::abs(o[0] - std::conj(e[0])) + std::abs(o[1] - std::conj(e[1]));
                if (d <= kClusterTol * (1.0 + std::abs(e[0]) + std::abs(e[1])) ||
                    dc <= kClusterTol * (1.0 + std::abs(e[0]) + std::abs(e[1])))
                    dup = true;
            }
            if (!dup) exps.push_back(e);
        }
    }

    SolutionBasis out;
    out.mu = mu;
    out.method = SolveMethod::ExponentialAnsatz;
    std::vector<Candidate> cands;
    // RREF column order: highest degree first.
    std::vector<int> order;
    for (int i = 9; i >= 0; --i) order.push_back(i);
    for (const auto& e : exps) {
        // Choose the representative with positive imaginary part.
        cd a1 = e[0], a2 = e[1];
        const bool complex_exp = a1.imag() != 0.0 || a2.imag() != 0.0;
        if (complex_exp && (a1.imag() < 0.0 || (a1.imag() == 0.0 && a2.imag() < 0.0))) {
            a1 = std::conj(a1);
            a2 = std::conj(a2);
        }
        const Eigen::MatrixXcd N = null_rows(type_a_operator(G, S, mu, a1, a2));
        if (N.rows() == 0) continue;
        Eigen::MatrixXcd P(N.rows(), 10);
        for (int c = 0; c < 10; ++c) P.col(c) = N.col(order[c]);
        std::vector<int> piv;
        const Eigen::MatrixXcd B = rref(P, &piv);
        for (Eigen::Index r = 0; r < B.rows(); ++r) {
            const int lead = order[piv[r]];
            const int degree = kMono[lead][0] + kMono[lead][1];
            if (degree > 2) throw ConsistencyError("exponential solution with polynomial degree above 2");
            std::vector<Term> re, im;
            for (int c = 0; c < 10; ++c) {
                const cd v = B(r, c);
                const int mi = order[c];
                Term t{0.0, {}};
                t.factors[0].power = kMono[mi][0];
                t.factors[1].power = kMono[mi][1];
                if (v.real() != 0.0) re.push_back(Term{v.real(), t.factors});
                if (v.imag() != 0.0) im.push_back(Term{v.imag(), t.factors});
            }
            const ClosedForm Pr(re), Pi(im);
            const ClosedForm E = ClosedForm::exp_linear(a1.real(), a2.real());
            const double key3 = a1.imag() + 1e-3 * a2.imag();
            if (!complex_exp) {
                cands.push_back({degree, a1.real(), a2.real(), 0.0, (Pr * E).simplified()});
                continue;
            }
            const double b1 = a1.imag(), b2 = a2.imag();
            const ClosedForm C = cos_axis(0, b1) * cos_axis(1, b2) - sin_axis(0, b1) * sin_axis(1, b2);
            const ClosedForm Sn = sin_axis(0, b1) * cos_axis(1, b2) + cos_axis(0, b1) * sin_axis(1, b2);
            cands.push_back({degree, a1.real(), a2.real(), key3, (E * (Pr * C - Pi * Sn)).simplified()});
            cands.push_back({degree, a1.real(), a2.real(), key3 + 0.5, (E * (Pr * Sn + Pi * C)).simplified()});
        }
    }
    finish(out, std::move(cands), m);
    return out;
}

// ---- Type B ----

namespace {

constexpr int kTopN = 3;  // x2 powers 0..3; 3 only detects cap violations
constexpr int kTopK = 3;  // log powers 0..3; 3 only detects cap violations
constexpr int kNK = (kTopN + 1) * (kTopK + 1);

int nk(int n, int k) { return n * (kTopK + 1) + k; }

// Homogeneous block of degree beta: unknowns x1^{beta-n} x2^n log(x1)^k.
// Rows: entry x (m, j), coefficient of x1^{beta-2-m} x2^m log(x1)^j.
Eigen::MatrixXcd type_b_operator(const Christoffel& C, const Mat2& s, double mu, cd beta) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(3 * kNK, kNK);
    for (int n = 0; n <= kTopN; ++n)
        for (int k = 0; k <= kTopK; ++k) {
            const int col = nk(n, k);
            const cd g = beta - static_cast<double>(n);
            const double kk = k, nn = n;
            auto add = [&](int e, int m, int j, cd v) {
                if (m < 0 || j < 0) return;
                M(e * kNK + nk(m, j), col) += v;
            };
            // d_x phi / x^{-1}: g (n,k) + k (n,k-1); d_y phi * x: n (n-1,k)
            auto gamma_terms = [&](int e, int i, int j) {
                add(e, n, k, -C.g[i][j][0] * g);
                add(e, n, k - 1, -C.g[i][j][0] * kk);
                add(e, n - 1, k, -C.g[i][j][1] * nn);
                add(e, n, k, -mu * s[i][j]);
            };
            add(0, n, k, g * (g - 1.0));
            add(0, n, k - 1, g * kk + kk * (g - 1.0));
            add(0, n, k - 2, kk * (kk - 1.0));
            gamma_terms(0, 0, 0);
            add(1, n - 1, k, nn * g);
            add(1, n - 1, k - 1, nn * kk);
            gamma_terms(1, 0, 1);
            add(2, n - 2, k, nn * (nn - 1.0));
            gamma_terms(2, 1, 1);
        }
    return M;
}

// Common roots of the indicial system.
std::vector<cd> type_b_indices(const Christoffel& C, const Mat2& s, double mu) {
    const double tol = 1e-10 * (1.0 + std::abs(mu));
    std::vector<cd> forced;
    bool impossible = false;
    for (auto [c, v] : {std::pair{C.g[0][1][0], mu * s[0][1]}, std::pair{C.g[1][1][0], mu * s[1][1]}}) {
        if (std::abs(c) > tol)
            forced.push_back(cd{-v / c});
        else if (std::abs(v) > tol)
            impossible = true;
    }
    if (impossible) return {};
    const double b = -(1.0 + C.g[0][0][0]), c0 = -mu * s[0][0];
    auto quad = [&](cd g) { return g * g + b * g + c0; };
    if (!forced.empty()) {
        const cd g = forced[0];
        for (const cd& h : forced)
            if (std::abs(h - g) > kClusterTol * (1.0 + std::abs(g))) return {};
        if (std::abs(quad(g)) > kClusterTol * (1.0 + std::norm(g) + std::abs(b * g) + std::abs(c0))) return {};
        return {g};
    }
    auto r = quadratic_roots(cd{b}, cd{c0});
    return cluster({r[0], r[1]});
}

}  // namespace

SolutionBasis solve_type_b(const SurfaceModel& m, double mu) {
    if (m.family() != Family::TypeB) throw std::invalid_argument("solve_type_b needs a Type B model");
    const Christoffel C = m.christoffel({1.0, 0.0});
    const Mat2 s = ricci(m, {1.0, 0.0}).rho_s;

    std::vector<cd> betas;
    for (cd g : type_b_indices(C, s, mu)) {
        g = snap(clean_imag(g));
        if (g.imag() < 0.0) g = std::conj(g);
        for (int n = 0; n <= kTopN; ++n) {
            const cd b = g + static_cast<double>(n);
            bool dup = false;
            for (const cd& o : betas)
                if (std::abs(o - b) <= kClusterTol * (1.0 + std::abs(b))) dup = true;
            if (!dup) betas.push_back(b);
        }
    }

    SolutionBasis out;
    out.mu = mu;
    out.method = SolveMethod::PowerAnsatz;
    std::vector<Candidate> cands;
    std::vector<int> order;  // highest (n, k) first
    for (int i = kNK - 1; i >= 0; --i) order.push_back(i);
    for (const cd& beta : betas) {
        const Eigen::MatrixXcd N = null_rows(type_b_operator(C, s, mu, beta));
        if (N.rows() == 0) continue;
        Eigen::MatrixXcd P(N.rows(), kNK);
        for (int c = 0; c < kNK; ++c) P.col(c) = N.col(order[c]);
        std::vector<int> piv;
        const Eigen::MatrixXcd B = rref(P, &piv);
        const bool cplx = beta.imag() != 0.0;
        if (cplx) out.complex_indices = true;
        for (Eigen::Index r = 0; r < B.rows(); ++r) {
            const int lead = order[piv[r]];
            const int ln = lead / (kTopK + 1), lk = lead % (kTopK + 1);
            if (ln > 2 || lk > 1) throw ConsistencyError("power solution beyond the degree caps");
            std::vector<Term> re, im;
            for (int c = 0; c < kNK; ++c) {
                const cd v = B(r, c);
                if (v == cd{0.0}) continue;
                const int idx = order[c], n = idx / (kTopK + 1), k = idx % (kTopK + 1);
                if (n > 2 || k > 1) throw ConsistencyError("power solution beyond the degree caps");
                std::array<Factor, 2> f{};
                f[0].power = beta.real() - n;
                f[0].log_power = k;
                f[1].power = n;
                if (!cplx) {
                    re.push_back(Term{v.real(), f});
                    continue;
                }
                Factor fc = f[0], fs = f[0];
                fc.trig = Trig{beta.imag(), 0.0, true};
                fs.trig = Trig{beta.imag(), -std::numbers::pi / 2.0, true};
                // Re(v x^{i w}) = Re v cos(w L) - Im v sin(w L); Im = Re v sin + Im v cos
                re.push_back(Term{v.real(), {fc, f[1]}});
                re.push_back(Term{-v.imag(), {fs, f[1]}});
                im.push_back(Term{v.real(), {fs, f[1]}});
                im.push_back(Term{v.imag(), {fc, f[1]}});
            }
            cands.push_back({ln + lk, beta.real(), beta.imag(), 0.0, ClosedForm(re)});
            if (cplx) cands.push_back({ln + lk, beta.real(), beta.imag(), 0.5, ClosedForm(im)});
        }
    }
    if (out.complex_indices) out.notes.push_back("complex indices: basis uses cos/sin(b*log(x1)) factors");
    finish(out, std::move(cands), m);
    return out;
}

SolutionBasis solve_type_c(const SurfaceModel& m, double mu) {
    SolutionBasis out;
    out.mu = mu;
    out.method = SolveMethod::RegistryLookup;
    std::vector<Candidate> cands;
    auto push = [&](const char* text) { cands.push_back({static_cast<int>(cands.size()), 0, 0, 0, parse_closed_form(text)}); };
    if (m.family() == Family::TypeC_Sphere) {
        if (mu == 0.0)
            push("1");
        else if (mu == -1.0) {
            push("sin(1*x1)");
            push("cos(1*x1) * cos(1*x2)");
            push("cos(1*x1) * sin(1*x2)");
        }
    } else if (m.family() == Family::TypeC_HyperbolicPM) {
        const int sign = m.param("sign", 1.0) >= 0 ? 1 : -1;
        if (mu == 0.0)
            push("1");
        else if (mu == -1.0) {
            push("exp(1*x1)");
            push("x2 * exp(1*x1)");
            push(sign > 0 ? "exp(-1*x1) + (x2)^2 * exp(1*x1)" : "exp(-1*x1) - (x2)^2 * exp(1*x1)");
        }
    } else {
        throw std::invalid_argument("solve_type_c needs a Type C model");
    }
    if (cands.empty()) {
        for (const auto& p : generic_points(m))
            if (prolonged_eigenspace_dim(m, mu, p) != 0)
                throw ConsistencyError("prolongation finds solutions the Type C table does not list");
    }
    finish(out, std::move(cands), m);
    return out;
}

SolutionBasis solve(const SurfaceModel& m, double mu) {
    switch (m.family()) {
        case Family::TypeA: return solve_type_a(m, mu);
        case Family::TypeB: return solve_type_b(m, mu);
        case Family::TypeC_Sphere:
        case Family::TypeC_HyperbolicPM: return solve_type_c(m, mu);
        case Family::General: break;
    }
    throw std::invalid_argument("no closed-form solver for General models");
}

int eigenspace_dim(const SurfaceModel& m, double mu) {
    if (m.family() == Family::General) return prolonged_eigenspace_dim(m, mu, generic_points(m)[1]);
    return static_cast<int>(solve(m, mu).basis.size());
}

std::vector<SpecialEigenvalue> special_eigenvalues(const SurfaceModel& m) {
    if (m.family() != Family::TypeB) throw std::invalid_argument("special_eigenvalues needs a Type B model");
    const Christoffel C = m.christoffel({1.0, 0.0});
    const Mat2 s = ricci(m, {1.0, 0.0}).rho_s;
    const double tol = 1e-10;
    if (std::abs(s[0][0]) + std::abs(s[0][1]) + std::abs(s[1][1]) <= tol)
        return {{0.0, eigenspace_dim(m, 0.0), "rho_s = 0: E(mu) = E(0) for every mu"}};
    std::vector<std::pair<double, std::string>> cand{{0.0, ""}, {-1.0, ""}};
    std::vector<std::string> notes;

    bool zero_forced = false;
    std::vector<double> ts;
    for (auto [c, v] : {std::pair{C.g[0][1][0], s[0][1]}, std::pair{C.g[1][1][0], s[1][1]}}) {
        if (std::abs(c) > tol)
            ts.push_back(-v / c);
        else if (std::abs(v) > tol)
            zero_forced = true;
    }
    bool ts_agree = true;
    for (double t : ts)
        if (std::abs(t - ts[0]) > 1e-9 * (1.0 + std::abs(t))) ts_agree = false;
    if (!zero_forced && ts_agree) {
        const double a = 1.0 + C.g[0][0][0];
        if (!ts.empty()) {
            const double t = ts[0];
            if (std::abs(t) <= tol)
                notes.push_back("rho_s,22 = 0: forced index vanishes, no candidate besides 0");
            else
                cand.push_back({(a * t + s[0][0]) / (t * t), "forced by the linear indicial conditions"});
        } else {
            notes.push_back("linear indicial conditions vanish: E(mu) != 0 for every mu");
            if (std::abs(s[0][0]) > tol) cand.push_back({-a * a / (4.0 * s[0][0]), "double indicial root"});
        }
    }

    std::vector<SpecialEigenvalue> out;
    for (auto& [mu, note] : cand) {
        const double v = snap(mu);
        if (std::any_of(out.begin(), out.end(), [&](const SpecialEigenvalue& e) { return std::abs(e.mu - v) < 1e-9; }))
            continue;
        int dim = 0;
        std::string n = note;
        try {
            dim = eigenspace_dim(m, v);
        } catch (const ConsistencyError& e) {
            n = e.what();
            dim = prolonged_eigenspace_dim(m, v, generic_points(m)[1]);
        }
        if (dim > 0) out.push_back({v, dim, n});
    }
    if (!notes.empty() && !out.empty())
        for (auto& n : notes) out.front().note += (out.front().note.empty() ? "" : "; ") + n;
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.mu < b.mu; });
    return out;
}

int prolonged_eigenspace_dim(const SurfaceModel& m, double mu, const Point& p) {
    m.check_point(p);
    constexpr int kOrder = 4;
    const detail::GammaJet G = detail::gamma_jet(m.jet(p, kOrder + 1));
    const detail::RicciJet R = detail::ricci_jet(G);
    detail::JetMatrix b[2] = {detail::jet_matrix(3, 3, kOrder), detail::jet_matrix(3, 3, kOrder)};
    for (int i = 0; i < 2; ++i) {
        b[i][0][1 + i] = detail::Jet(kOrder, 1.0);
        for (int j = 0; j < 2; ++j) {
            b[i][1 + j][0] = (R.rho[i][j] + R.rho[j][i]) * (0.5 * mu);
            for (int k = 0; k < 2; ++k) b[i][1 + j][1 + k] = G.g[i][j][k].truncated(kOrder);
        }
    }
    const double ref = std::max(detail::max_abs(b[0]), detail::max_abs(b[1]));
    return detail::solution_dimension(detail::prolonged_constraints(b[0], b[1], 3), 3, 1e-8, ref);
}

}  // namespace affqe
