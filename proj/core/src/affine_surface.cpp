#include "affqe/affine_surface.hpp"

#include "jet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace affqe {

namespace {

constexpr int kIdx[6][3] = {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}, {1, 1, 0}, {1, 1, 1}};

ChristoffelJet empty_jet(int order) {
    ChristoffelJet j;
    j.order = order;
    j.d.resize((order + 1) * (order + 2) / 2);
    return j;
}

void set_sym(Christoffel& g, int i, int j, int k, double v) {
    g.g[i][j][k] = v;
    g.g[j][i][k] = v;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

class ConstantField final : public ConnectionField {
public:
    explicit ConstantField(Christoffel g) : g_(g) {}
    ChristoffelJet jet(const Point&, int order) const override {
        ChristoffelJet j = empty_jet(order);
        j.at(0, 0) = g_;
        return j;
    }

private:
    Christoffel g_;
};

// Gamma = C / x1.
class TypeBField final : public ConnectionField {
public:
    explicit TypeBField(Christoffel c) : c_(c) {}
    ChristoffelJet jet(const Point& p, int order) const override {
        ChristoffelJet j = empty_jet(order);
        for (int a = 0; a <= order; ++a) {
            // d^a/dx^a x^{-1} = (-1)^a a! x^{-(a+1)}
            const double s = (a % 2 ? -1.0 : 1.0) * factorial(a) / std::pow(p.x1, a + 1);
            Christoffel& g = j.at(a, 0);
            for (int i = 0; i < 2; ++i)
                for (int jj = 0; jj < 2; ++jj)
                    for (int k = 0; k < 2; ++k) g.g[i][jj][k] = a == 0 ? c_.g[i][jj][k] / p.x1 : c_.g[i][jj][k] * s;
        }
        return j;
    }

private:
    Christoffel c_;
};

// Round sphere dx1^2 + cos^2(x1) dx2^2.
class SphereField final : public ConnectionField {
public:
    ChristoffelJet jet(const Point& p, int order) const override {
        ChristoffelJet j = empty_jet(order);
        const double t = std::tan(p.x1);
        std::vector<double> poly{0.0, 1.0};  // d^n tan = P_n(tan)
        for (int a = 0; a <= order; ++a) {
            double tan_deriv = 0.0, tp = 1.0;
            for (double c : poly) {
                tan_deriv += c * tp;
                tp *= t;
            }
            // (sin x cos x)^{(a)} = 2^{a-1} sin(2x + a pi/2)
            const double sc = std::ldexp(1.0, a - 1) * std::sin(2.0 * p.x1 + a * std::numbers::pi / 2.0);
            Christoffel& g = j.at(a, 0);
            set_sym(g, 0, 1, 1, -tan_deriv);
            g.g[1][1][0] = sc;
            // P_{n+1} = P_n' (1 + t^2)
            std::vector<double> dp(poly.size() + 1, 0.0);
            for (size_t k = 1; k < poly.size(); ++k) {
                dp[k - 1] += k * poly[k];
                dp[k + 1] += k * poly[k];
            }
            poly = dp;
        }
        return j;
    }
};

// dx1^2 +- e^{2 x1} dx2^2.
class HyperbolicField final : public ConnectionField {
public:
    explicit HyperbolicField(int sign) : sign_(sign) {}
    ChristoffelJet jet(const Point& p, int order) const override {
        ChristoffelJet j = empty_jet(order);
        const double e = std::exp(2.0 * p.x1);
        for (int a = 0; a <= order; ++a) {
            Christoffel& g = j.at(a, 0);
            if (a == 0) set_sym(g, 0, 1, 1, 1.0);
            g.g[1][1][0] = -sign_ * std::ldexp(e, a);
        }
        return j;
    }

private:
    int sign_;
};

class ClosedFormField final : public ConnectionField {
public:
    static constexpr int kMaxOrder = 6;
    ClosedFormField(const std::array<ClosedForm, 6>& gamma, Domain domain) : domain_(domain) {
        derivs_.resize(ChristoffelJet::index(0, kMaxOrder) + 1);
        derivs_[0] = gamma;
        for (int t = 1; t <= kMaxOrder; ++t)
            for (int b = 0; b <= t; ++b) {
                const int a = t - b;
                const auto& src = a > 0 ? derivs_[ChristoffelJet::index(a - 1, b)] : derivs_[ChristoffelJet::index(a, b - 1)];
                auto& dst = derivs_[ChristoffelJet::index(a, b)];
                for (int e = 0; e < 6; ++e) dst[e] = differentiate(src[e], a > 0 ? 0 : 1);
            }
    }
    ChristoffelJet jet(const Point& p, int order) const override {
        if (order > kMaxOrder) throw std::invalid_argument("jet order too large for closed-form field");
        ChristoffelJet j = empty_jet(order);
        for (int t = 0; t <= order; ++t)
            for (int b = 0; b <= t; ++b) {
                const auto& forms = derivs_[ChristoffelJet::index(t - b, b)];
                Christoffel& g = j.at(t - b, b);
                for (int e = 0; e < 6; ++e)
                    set_sym(g, kIdx[e][0], kIdx[e][1], kIdx[e][2], evaluate(forms[e], p, domain_));
            }
        return j;
    }

private:
    Domain domain_;
    std::vector<std::array<ClosedForm, 6>> derivs_;
};

}  // namespace

Christoffel from_constants(const ChristoffelConstants& c, double scale) {
    Christoffel g;
    for (int e = 0; e < 6; ++e) set_sym(g, kIdx[e][0], kIdx[e][1], kIdx[e][2], c[e] * scale);
    return g;
}

ChristoffelConstants to_constants(const Christoffel& g) {
    ChristoffelConstants c{};
    for (int e = 0; e < 6; ++e) c[e] = g.g[kIdx[e][0]][kIdx[e][1]][kIdx[e][2]];
    return c;
}

const char* family_name(Family f) {
    switch (f) {
        case Family::TypeA: return "TypeA";
        case Family::TypeB: return "TypeB";
        case Family::TypeC_Sphere: return "TypeC_Sphere";
        case Family::TypeC_HyperbolicPM: return "TypeC_HyperbolicPM";
        case Family::General: return "General";
    }
    return "?";
}

SurfaceModel::SurfaceModel(Family family, Domain domain, std::shared_ptr<const ConnectionField> field,
                           std::optional<ChristoffelConstants> constants, std::map<std::string, double> params)
    : family_(family), domain_(domain), field_(std::move(field)), constants_(constants), params_(std::move(params)) {}

double SurfaceModel::param(const std::string& name, double fallback) const {
    auto it = params_.find(name);
    return it == params_.end() ? fallback : it->second;
}

void SurfaceModel::check_point(const Point& p) const {
    if (!in_domain(domain_, p))
        throw DomainError(std::string("point outside ") + domain_name(domain_) + " domain of " + family_name(family_) +
                          " model");
}

ChristoffelJet SurfaceModel::jet(const Point& p, int order) const {
    check_point(p);
    return field_->jet(p, order);
}

Christoffel SurfaceModel::christoffel(const Point& p) const { return jet(p, 0).at(0, 0); }

std::array<Christoffel, 2> SurfaceModel::christoffel_derivative(const Point& p) const {
    ChristoffelJet j = jet(p, 1);
    return {j.at(1, 0), j.at(0, 1)};
}

SurfaceModel make_type_a(const ChristoffelConstants& gamma, std::map<std::string, double> params) {
    return SurfaceModel(Family::TypeA, Domain::FullPlane, std::make_shared<ConstantField>(from_constants(gamma)), gamma,
                        std::move(params));
}

SurfaceModel make_type_b(const ChristoffelConstants& c, std::map<std::string, double> params) {
    return SurfaceModel(Family::TypeB, Domain::RightHalf, std::make_shared<TypeBField>(from_constants(c)), c,
                        std::move(params));
}

SurfaceModel make_sphere() {
    return SurfaceModel(Family::TypeC_Sphere, Domain::SphereChart, std::make_shared<SphereField>());
}

SurfaceModel make_hyperbolic(int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("hyperbolic sign must be +1 or -1");
    return SurfaceModel(Family::TypeC_HyperbolicPM, Domain::FullPlane, std::make_shared<HyperbolicField>(sign), {},
                        {{"sign", static_cast<double>(sign)}});
}

SurfaceModel make_general(const std::array<ClosedForm, 6>& gamma, Domain domain) {
    return SurfaceModel(Family::General, domain, std::make_shared<ClosedFormField>(gamma, domain));
}

// ---------------------------------------------------------------------------

namespace {

Riemann riemann_from_jet(const ChristoffelJet& j) {
    const Christoffel& G = j.at(0, 0);
    const Christoffel* dG[2] = {&j.at(1, 0), &j.at(0, 1)};
    Riemann R;
    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int jj = 0; jj < 2; ++jj) {
                    double v = dG[i]->g[jj][k][l] - dG[jj]->g[i][k][l];
                    for (int m = 0; m < 2; ++m) v += G.g[i][m][l] * G.g[jj][k][m] - G.g[jj][m][l] * G.g[i][k][m];
                    R.r[l][k][i][jj] = v;
                }
    return R;
}

}  // namespace

Riemann curvature(const SurfaceModel& m, const Point& p) { return riemann_from_jet(m.jet(p, 1)); }

RicciData ricci(const SurfaceModel& m, const Point& p) {
    const Riemann R = curvature(m, p);
    RicciData d;
    d.evaluated_at = p;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            double s = 0.0;
            for (int l = 0; l < 2; ++l) s += R.r[l][k][l][j];
            d.rho[j][k] = s;
        }
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            d.rho_s[j][k] = 0.5 * (d.rho[j][k] + d.rho[k][j]);
            d.rho_a[j][k] = d.rho[j][k] - d.rho_s[j][k];
        }
    return d;
}

NablaRicci nabla_ricci(const SurfaceModel& m, const Point& p) {
    const ChristoffelJet cj = m.jet(p, 2);
    const detail::RicciJet rj = detail::ricci_jet(detail::gamma_jet(cj));
    const Christoffel& G = cj.at(0, 0);
    NablaRicci nr{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                double v = k == 0 ? rj.rho[i][j](1, 0) : rj.rho[i][j](0, 1);
                for (int mm = 0; mm < 2; ++mm)
                    v -= G.g[k][i][mm] * rj.rho[mm][j].value() + G.g[k][j][mm] * rj.rho[i][mm].value();
                nr[i][j][k] = v;
            }
    return nr;
}

namespace {

struct Derivs {
    ClosedForm d1, d2, d11, d12, d22;
    explicit Derivs(const ClosedForm& f)
        : d1(differentiate(f, 0)),
          d2(differentiate(f, 1)),
          d11(differentiate(d1, 0)),
          d12(differentiate(d1, 1)),
          d22(differentiate(d2, 1)) {}
};

Mat2 hessian_with(const Derivs& D, const Christoffel& G, const Point& p, Domain dom) {
    const double g1 = evaluate(D.d1, p, dom), g2 = evaluate(D.d2, p, dom);
    const double second[2][2] = {{evaluate(D.d11, p, dom), evaluate(D.d12, p, dom)},
                                 {evaluate(D.d12, p, dom), evaluate(D.d22, p, dom)}};
    Mat2 h{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) h[i][j] = second[i][j] - G.g[i][j][0] * g1 - G.g[i][j][1] * g2;
    return h;
}

}  // namespace

Mat2 hessian(const SurfaceModel& m, const ClosedForm& f, const Point& p) {
    m.check_point(p);
    return hessian_with(Derivs(f), m.christoffel(p), p, m.domain());
}

double qe_residual(const SurfaceModel& m, double mu, const ClosedForm& f, const std::vector<Point>& points) {
    if (points.size() < 5) throw std::invalid_argument("qe_residual needs at least 5 points");
    const Derivs D(f);
    double worst = 0.0;
    for (const auto& p : points) {
        m.check_point(p);
        const Mat2 h = hessian_with(D, m.christoffel(p), p, m.domain());
        const Mat2 rs = ricci(m, p).rho_s;
        const double fv = evaluate(f, p, m.domain());
        double s = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double r = h[i][j] - mu * fv * rs[i][j];
                s += r * r;
            }
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

double qe_residual(const SurfaceModel& m, double mu, const ClosedForm& f) {
    return qe_residual(m, mu, f, standard_points(m));
}

std::vector<Point> standard_points(const SurfaceModel& m) {
    std::vector<double> xs1, xs2{-0.7, 0.3, 1.2};
    switch (m.domain()) {
        case Domain::FullPlane:
            if (m.family() == Family::TypeC_HyperbolicPM)
                xs1 = {0.5, 1.0, 2.0};
            else {
                xs1 = {-0.5, 0.3, 1.1};
                xs2 = {-0.7, 0.4, 0.9};
            }
            break;
        case Domain::RightHalf: xs1 = {0.5, 1.0, 2.0}; break;
        case Domain::SphereChart: xs1 = {-0.5, 0.3, 1.0}; break;
    }
    std::vector<Point> pts;
    for (double a : xs1)
        for (double b : xs2) pts.push_back({a, b});
    return pts;
}

std::vector<Point> generic_points(const SurfaceModel& m) {
    switch (m.domain()) {
        case Domain::FullPlane:
            if (m.family() == Family::TypeC_HyperbolicPM) return {{0.5, -0.7}, {1.0, 0.3}, {2.0, 1.2}};
            return {{0.3, -0.7}, {1.1, 0.4}, {-0.5, 0.9}};
        case Domain::RightHalf: return {{0.5, -0.7}, {1.0, 0.3}, {2.0, 1.2}};
        case Domain::SphereChart: return {{-0.5, -0.7}, {0.3, 0.3}, {1.0, 1.2}};
    }
    return {};
}

namespace {

double homogeneity_scale(const SurfaceModel& m, const Point& p, int weight) {
    return m.family() == Family::TypeB ? std::pow(p.x1, weight) : 1.0;
}

}  // namespace

bool is_flat(const SurfaceModel& m) {
    for (const auto& p : generic_points(m)) {
        const Riemann R = curvature(m, p);
        const double s = homogeneity_scale(m, p, 2);
        for (int l = 0; l < 2; ++l)
            for (int k = 0; k < 2; ++k)
                if (std::abs(R.r[l][k][0][1]) * s > 1e-10) return false;
    }
    return true;
}

bool is_strongly_projectively_flat(const SurfaceModel& m) {
    constexpr double tol = 1e-10;
    for (const auto& p : generic_points(m)) {
        const RicciData rd = ricci(m, p);
        if (std::abs(rd.rho_a[0][1]) * homogeneity_scale(m, p, 2) > tol) return false;
        const NablaRicci nr = nabla_ricci(m, p);
        const double s3 = homogeneity_scale(m, p, 3);
        // totally symmetric: compare every permutation with the sorted index triple
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) {
                    int idx[3] = {i, j, k};
                    std::sort(idx, idx + 3);
                    if (std::abs(nr[i][j][k] - nr[idx[0]][idx[1]][idx[2]]) * s3 > tol) return false;
                }
    }
    return true;
}

std::optional<Mat2> kahler_structure(const SurfaceModel& m) {
    if (!m.constants() || (m.family() != Family::TypeA && m.family() != Family::TypeB)) return std::nullopt;
    const Christoffel G = from_constants(*m.constants());
    // Column convention: (G_k)^i_c = Gamma_kc^i; a parallel constant J commutes
    // with both, and then each G_k lies in span{I, J}.
    Mat2 T[2];
    double norm = 0.0;
    int pick = -1;
    for (int k = 0; k < 2; ++k) {
        Mat2 g{};
        for (int i = 0; i < 2; ++i)
            for (int c = 0; c < 2; ++c) g[i][c] = G.g[k][c][i];
        const double half_tr = 0.5 * (g[0][0] + g[1][1]);
        g[0][0] -= half_tr;
        g[1][1] -= half_tr;
        T[k] = g;
        const double n = std::hypot(std::hypot(g[0][0], g[0][1]), std::hypot(g[1][0], g[1][1]));
        if (n > norm) {
            norm = n;
            pick = k;
        }
    }
    Mat2 A{{{0.0, -1.0}, {1.0, 0.0}}};
    if (norm > 1e-12) {
        const double d = det(T[pick]);
        if (d <= 1e-12 * norm * norm) return std::nullopt;
        const double s = std::sqrt(d);
        for (auto& row : T[pick])
            for (auto& v : row) v /= s;
        A = T[pick];
        if (A[1][0] < 0.0)
            for (auto& row : A)
                for (auto& v : row) v = -v;
        for (int k = 0; k < 2; ++k) {
            // beta = -tr(T_k A)/2 ; T_k - beta A must vanish
            double tr = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int c = 0; c < 2; ++c) tr += T[k][i][c] * A[c][i];
            const double beta = -0.5 * tr;
            for (int i = 0; i < 2; ++i)
                for (int c = 0; c < 2; ++c)
                    if (std::abs(T[k][i][c] - beta * A[i][c]) > 1e-10 * std::max(1.0, norm)) return std::nullopt;
        }
    }
    Mat2 J{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) J[i][j] = A[j][i];
    return J;
}

double det(const Mat2& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

Mat2 inverse(const Mat2& a) {
    const double d = det(a);
    if (d == 0.0) throw std::invalid_argument("singular 2x2 matrix");
    return {{{a[1][1] / d, -a[0][1] / d}, {-a[1][0] / d, a[0][0] / d}}};
}

Christoffel linear_change(const Christoffel& g, const Mat2& P) {
    const Mat2 Q = inverse(P);  // Q[i][a] = dx^i/du^a
    Christoffel out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                double s = 0.0;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        for (int k = 0; k < 2; ++k) s += Q[i][a] * Q[j][b] * P[c][k] * g.g[i][j][k];
                out.g[a][b][c] = s;
            }
    return out;
}

}  // namespace affqe
