#include "affqe/extension.hpp"

#include "affqe/qe_solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace affqe {

double Point4::operator[](int a) const {
    switch (a) {
        case 0: return x1;
        case 1: return x2;
        case 2: return y1;
        default: return y2;
    }
}

double& Point4::operator[](int a) {
    switch (a) {
        case 0: return x1;
        case 1: return x2;
        case 2: return y1;
        default: return y2;
    }
}

ExtensionMetric::ExtensionMetric(SurfaceModel base, SymmetricField phi) : base_(std::move(base)), phi_(std::move(phi)) {}

Mat2 ExtensionMetric::phi(const Point& p) const { return phi_ ? phi_(p) : Mat2{}; }

Mat4 ExtensionMetric::operator()(const Point4& p) const {
    const Point b = p.base();
    const Christoffel G = base_.christoffel(b);
    const Mat2 f = phi(b);
    Mat4 g{};
    for (int i = 0; i < 2; ++i) {
        g[i][2 + i] = g[2 + i][i] = 1.0;
        for (int j = 0; j < 2; ++j) g[i][j] = f[i][j] - 2.0 * (p.y1 * G.g[i][j][0] + p.y2 * G.g[i][j][1]);
    }
    return g;
}

Mat4 ExtensionMetric::inverse(const Point4& p) const {
    const Mat4 g = (*this)(p);
    Mat4 r{};
    for (int i = 0; i < 2; ++i) {
        r[i][2 + i] = r[2 + i][i] = 1.0;
        for (int j = 0; j < 2; ++j) r[2 + i][2 + j] = -g[i][j];
    }
    return r;
}

ExtensionMetric build_extension(const SurfaceModel& base, SymmetricField phi) { return {base, std::move(phi)}; }

SymmetricField ricci_phi(const SurfaceModel& base) {
    return [base](const Point& p) { return ricci(base, p).rho_s; };
}

namespace {

using Gamma4 = std::array<double, 64>;

// Central difference of F along coordinate c, optionally Richardson
// extrapolated from steps h and h/2.
template <class F>
auto derivative(const F& fn, const Point4& p, int c, const FiniteDifference& fd) {
    auto step = [&](double h) {
        Point4 a = p, b = p;
        a[c] += h;
        b[c] -= h;
        auto fa = fn(a);
        const auto fb = fn(b);
        for (size_t i = 0; i < fa.size(); ++i) fa[i] = (fa[i] - fb[i]) / (2.0 * h);
        return fa;
    };
    auto d1 = step(fd.h);
    if (!fd.richardson) return d1;
    const auto d2 = step(fd.h / 2.0);
    for (size_t i = 0; i < d1.size(); ++i) d1[i] = (4.0 * d2[i] - d1[i]) / 3.0;
    return d1;
}

std::array<double, 16> flat(const Mat4& m) {
    std::array<double, 16> out{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) out[4 * a + b] = m[a][b];
    return out;
}

Mat4 checked_inverse(const Mat4& g) {
    Eigen::Matrix4d m;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) m(a, b) = g[a][b];
    const double d = m.determinant();
    if (std::abs(d) < 1e-10) {
        std::ostringstream os;
        os << "metric determinant " << d << " is near zero";
        throw SingularMetricError(os.str());
    }
    const Eigen::Matrix4d inv = m.inverse();
    Mat4 r{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) r[a][b] = inv(a, b);
    return r;
}

Gamma4 christoffels(const ExtensionMetric& g, const Point4& p, const FiniteDifference& fd) {
    const Mat4 gi = checked_inverse(g(p));
    std::array<std::array<double, 16>, 4> dg;
    for (int c = 0; c < 4; ++c) dg[c] = derivative([&](const Point4& q) { return flat(g(q)); }, p, c, fd);
    auto d = [&](int c, int a, int b) { return dg[c][4 * a + b]; };
    Gamma4 out{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                double v = 0.0;
                for (int e = 0; e < 4; ++e) v += gi[c][e] * (d(a, b, e) + d(b, a, e) - d(e, a, b));
                out[16 * a + 4 * b + c] = 0.5 * v;
            }
    return out;
}

}  // namespace

Geometry4D geometry_4d(const ExtensionMetric& g, const Point4& p, FiniteDifference fd) {
    g.base().check_point(p.base());
    Geometry4D out;
    out.at = p;
    out.metric = g(p);
    const Gamma4 G = christoffels(g, p, fd);
    std::array<Gamma4, 4> dG;
    for (int c = 0; c < 4; ++c) dG[c] = derivative([&](const Point4& q) { return christoffels(g, q, fd); }, p, c, fd);
    auto gam = [&](int a, int b, int c) { return G[16 * a + 4 * b + c]; };
    auto dgam = [&](int e, int a, int b, int c) { return dG[e][16 * a + 4 * b + c]; };
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) out.gamma[a][b][c] = gam(a, b, c);
    // R^a_{bcd} = d_c G_db^a - d_d G_cb^a + G_ce^a G_db^e - G_de^a G_cb^e
    for (int b = 0; b < 4; ++b)
        for (int d = 0; d < 4; ++d) {
            double v = 0.0;
            for (int a = 0; a < 4; ++a) {
                v += dgam(a, d, b, a) - dgam(d, a, b, a);
                for (int e = 0; e < 4; ++e) v += gam(a, e, a) * gam(d, b, e) - gam(d, e, a) * gam(a, b, e);
            }
            out.ricci[b][d] = v;
        }
    return out;
}

Mat4 Geometry4D::hessian(const std::array<double, 2>& dh, const Mat2& ddh) const {
    Mat4 H{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            double v = (a < 2 && b < 2) ? ddh[a][b] : 0.0;
            for (int c = 0; c < 2; ++c) v -= gamma[a][b][c] * dh[c];
            H[a][b] = v;
        }
    return H;
}

std::vector<Point4> sample_points_4d(const SurfaceModel& base) {
    const auto grid = standard_points(base);
    std::vector<Point4> out;
    for (const Point& b : {grid[1], grid[5]})
        for (double y1 : {-0.5, 0.4})
            for (double y2 : {-0.5, 0.4}) out.push_back({b.x1, b.x2, y1, y2});
    return out;
}

IsotropicCheck verify_isotropic_qe(const ExtensionMetric& g, const ClosedForm& f, double mu) {
    const SurfaceModel& m = g.base();
    const Domain dom = m.domain();
    if (mu != 0.0) {
        double r = 0.0;
        if (!residual_ok(m, mu, f, &r)) {
            std::ostringstream os;
            os << "f is not in E(" << mu << "): residual " << r;
            throw PreconditionError(os.str());
        }
    }
    const ClosedForm d[2] = {differentiate(f, 0), differentiate(f, 1)};
    const ClosedForm dd[2][2] = {{differentiate(d[0], 0), differentiate(d[0], 1)},
                                 {differentiate(d[1], 0), differentiate(d[1], 1)}};
    IsotropicCheck out;
    out.mu = mu;
    for (const Point4& p : sample_points_4d(m)) {
        const Point b = p.base();
        std::array<double, 2> dh{};
        Mat2 ddh{};
        for (int i = 0; i < 2; ++i) dh[i] = evaluate(d[i], b, dom);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) ddh[i][j] = evaluate(dd[i][j], b, dom);
        if (mu != 0.0) {
            // h = -(2/mu) log f
            const double v = evaluate(f, b, dom);
            if (!(v > 0.0)) {
                std::ostringstream os;
                os << "f = " << v << " <= 0 at (" << b.x1 << ", " << b.x2 << ")";
                throw PreconditionError(os.str());
            }
            const double k = -2.0 / mu;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) ddh[i][j] = k * (ddh[i][j] / v - dh[i] * dh[j] / (v * v));
            for (double& x : dh) x = k * x / v;
        }
        const Geometry4D geo = geometry_4d(g, p);
        const Mat4 H = geo.hessian(dh, ddh);
        const Mat4 gi = g.inverse(p);
        double null = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b2 = 0; b2 < 2; ++b2) null += gi[a][b2] * dh[a] * dh[b2];
        out.residual_null = std::max(out.residual_null, std::abs(null));
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) {
                const double da = a < 2 ? dh[a] : 0.0, dc = c < 2 ? dh[c] : 0.0;
                const double e = H[a][c] + geo.ricci[a][c] - 0.5 * mu * da * dc;
                out.residual_qe = std::max(out.residual_qe, std::abs(e));
            }
    }
    return out;
}

Mat4 walker_structure(const ExtensionMetric& g, const Point4& p) {
    const Mat4 m = g(p);
    const double g12 = m[0][1], half = 0.5 * (m[0][0] - m[1][1]);
    Mat4 J{};
    // J d_x1 = d_x2 - g12 d_y1 + half d_y2
    J[1][0] = 1.0;
    J[2][0] = -g12;
    J[3][0] = half;
    // J d_x2 = -d_x1 + half d_y1 + g12 d_y2
    J[0][1] = -1.0;
    J[2][1] = half;
    J[3][1] = g12;
    // J d_y1 = d_y2, J d_y2 = -d_y1
    J[3][2] = 1.0;
    J[2][3] = -1.0;
    return J;
}

WalkerKahlerCheck walker_kahler_check(const ExtensionMetric& g, const std::optional<Mat2>& J_base) {
    if (!J_base) throw PreconditionError("base surface has no Kahler structure");
    const Mat2& J = *J_base;
    if (std::abs(J[0][0]) > 1e-9 || std::abs(J[0][1] - 1.0) > 1e-9 || std::abs(J[1][0] + 1.0) > 1e-9 ||
        std::abs(J[1][1]) > 1e-9)
        throw PreconditionError("base chart does not satisfy J d1 = d2");
    const FiniteDifference fd;
    WalkerKahlerCheck out;
    for (const Point4& p : sample_points_4d(g.base())) {
        const Mat4 W = walker_structure(g, p);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double v = a == b ? 1.0 : 0.0;
                for (int e = 0; e < 4; ++e) v += W[a][e] * W[e][b];
                out.J_squared_residual = std::max(out.J_squared_residual, std::abs(v));
            }
        const Geometry4D geo = geometry_4d(g, p, fd);
        for (int c = 0; c < 4; ++c) {
            const auto dW = derivative([&](const Point4& q) { return flat(walker_structure(g, q)); }, p, c, fd);
            // (nabla_c J)^a_b = d_c J^a_b + G_ce^a J^e_b - G_cb^e J^a_e
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    double v = dW[4 * a + b];
                    for (int e = 0; e < 4; ++e) v += geo.gamma[c][e][a] * W[e][b] - geo.gamma[c][b][e] * W[a][e];
                    out.nabla_J_residual = std::max(out.nabla_J_residual, std::abs(v));
                }
        }
    }
    return out;
}

WalkerKahlerCheck walker_kahler_check(const ExtensionMetric& g) {
    return walker_kahler_check(g, kahler_structure(g.base()));
}

}  // namespace affqe
