#include "affqe/affine_surface.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace affqe;

namespace {

// Constants in key order 111, 112, 121, 122, 221, 222.
SurfaceModel M1() { return make_type_a({-1, 0, 1, 0, 0, 2}); }
SurfaceModel M2(double c) { return make_type_a({-1, 0, c, 0, 0, 1 + 2 * c}); }
SurfaceModel N4() { return make_type_b({-1, 0, 0, -1, 1, 0}); }
SurfaceModel Qc(double c) { return make_type_b({0, c, 1, 0, 0, 1}); }

// Independent oracle: central differences of Gamma, Riemann from the
// coordinate formula.
double fd_riemann(const SurfaceModel& m, const Point& p, int l, int k, int i, int j, double h) {
    auto dG = [&](int axis, int a, int b, int c) {
        Point pp = p, pm = p;
        (axis == 0 ? pp.x1 : pp.x2) += h;
        (axis == 0 ? pm.x1 : pm.x2) -= h;
        return (m.christoffel(pp).g[a][b][c] - m.christoffel(pm).g[a][b][c]) / (2 * h);
    };
    const Christoffel G = m.christoffel(p);
    double v = dG(i, j, k, l) - dG(j, i, k, l);
    for (int q = 0; q < 2; ++q) v += G.g[i][q][l] * G.g[j][k][q] - G.g[j][q][l] * G.g[i][k][q];
    return v;
}

double fd_ricci(const SurfaceModel& m, const Point& p, int j, int k, double h) {
    double s = 0.0;
    for (int l = 0; l < 2; ++l) s += fd_riemann(m, p, l, k, l, j, h);
    return s;
}

}  // namespace

TEST(Curvature, FlatIsZero) {
    const Riemann R = curvature(make_type_a({0, 0, 0, 0, 0, 0}), {0.2, 0.1});
    for (auto& a : R.r)
        for (auto& b : a)
            for (auto& c : b)
                for (double v : c) EXPECT_EQ(v, 0.0);
}

TEST(Curvature, AntisymmetricInLastPair) {
    for (const auto& m : {M1(), N4(), make_sphere(), make_hyperbolic(-1)}) {
        const Riemann R = curvature(m, {0.7, 0.2});
        for (int l = 0; l < 2; ++l)
            for (int k = 0; k < 2; ++k)
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) EXPECT_EQ(R.r[l][k][i][j], -R.r[l][k][j][i]);
    }
}

TEST(Curvature, N4MatchesFiniteDifferenceOracle) {
    const SurfaceModel m = N4();
    const Point p{1, 0};
    const Riemann R = curvature(m, p);
    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) EXPECT_NEAR(R.r[l][k][i][j], fd_riemann(m, p, l, k, i, j, 1e-5), 1e-8);
}

TEST(Ricci, PaperValues) {
    const RicciData r1 = ricci(M1(), {0.3, -0.7});
    EXPECT_NEAR(r1.rho[1][1], 1.0, 1e-15);
    EXPECT_NEAR(r1.rho[0][0], 0.0, 1e-15);
    EXPECT_NEAR(r1.rho[0][1], 0.0, 1e-15);
    EXPECT_NEAR(ricci(M2(1), {0, 0}).rho[1][1], 2.0, 1e-15);
    const RicciData q = ricci(Qc(2), {1.3, 0.2});
    EXPECT_NEAR(q.rho_s[0][1], 0.0, 1e-15);
    EXPECT_NEAR(q.rho_s[0][0], 0.0, 1e-15);
    EXPECT_NEAR(q.rho_s[1][1], 0.0, 1e-15);
    EXPECT_GT(std::abs(q.rho_a[0][1]), 0.1);
}

TEST(Ricci, TypeBSkewPartFormula) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int rep = 0; rep < 10; ++rep) {
        ChristoffelConstants c{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        const SurfaceModel m = make_type_b(c);
        const Point p{1.7, -0.4};
        const RicciData r = ricci(m, p);
        EXPECT_NEAR(r.rho_a[0][1], 0.5 * (c[2] + c[5]) / (p.x1 * p.x1), 1e-12);
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                EXPECT_NEAR(r.rho[j][k], fd_ricci(m, p, j, k, 1e-5), 1e-7);
                EXPECT_EQ(r.rho_s[j][k] + r.rho_a[j][k], r.rho[j][k]);
            }
        // (x1)^2 rho is point independent
        const RicciData r2 = ricci(m, {0.5, 1.2});
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) EXPECT_NEAR(r2.rho[j][k] * 0.25, r.rho[j][k] * p.x1 * p.x1, 1e-12);
    }
}

TEST(Ricci, TypeAIsPointIndependent) {
    const SurfaceModel m = M2(2);
    const RicciData a = ricci(m, {0.3, -0.7}), b = ricci(m, {-5, 8});
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) EXPECT_EQ(a.rho[j][k], b.rho[j][k]);
}

TEST(Ricci, GeneralFieldAgreesWithTypeB) {
    // Same connection, derivatives through the term algebra instead of the
    // closed formula for 1/x1.
    std::array<ClosedForm, 6> g;
    const ChristoffelConstants c{-1, 0, 0, -1, 1, 0};
    for (int e = 0; e < 6; ++e) g[e] = c[e] * ClosedForm::power(0, -1.0);
    const SurfaceModel gen = make_general(g, Domain::RightHalf);
    const Point p{0.8, 0.3};
    const NablaRicci a = nabla_ricci(gen, p), b = nabla_ricci(N4(), p);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) EXPECT_NEAR(a[i][j][k], b[i][j][k], 1e-12);
}

TEST(Ricci, SphereJetMatchesFiniteDifferences) {
    const SurfaceModel s = make_sphere();
    const Point p{0.4, 0.1};
    const ChristoffelJet j = s.jet(p, 4);
    const double h = 1e-4;
    for (int a = 1; a <= 4; ++a) {
        const double fd = (s.jet({p.x1 + h, p.x2}, a - 1).at(a - 1, 0).g[0][1][1] -
                           s.jet({p.x1 - h, p.x2}, a - 1).at(a - 1, 0).g[0][1][1]) /
                          (2 * h);
        EXPECT_NEAR(j.at(a, 0).g[0][1][1], fd, 1e-5 * (1 + std::abs(fd)));
        const double fd2 = (s.jet({p.x1 + h, p.x2}, a - 1).at(a - 1, 0).g[1][1][0] -
                            s.jet({p.x1 - h, p.x2}, a - 1).at(a - 1, 0).g[1][1][0]) /
                           (2 * h);
        EXPECT_NEAR(j.at(a, 0).g[1][1][0], fd2, 1e-5 * (1 + std::abs(fd2)));
    }
    // Gauss curvature 1: rho = g
    const RicciData r = ricci(s, p);
    EXPECT_NEAR(r.rho[0][0], 1.0, 1e-12);
    EXPECT_NEAR(r.rho[1][1], std::cos(p.x1) * std::cos(p.x1), 1e-12);
}

TEST(NablaRicci, LemmaModelRecurrence) {
    // Gamma_11^1 = 1, Gamma_11^2 = a, Gamma_12^2 = b, Gamma_22^2 = d
    const double a = 0.7, b = -0.4, d = 1.3;
    const SurfaceModel m = make_type_a({1, a, 0, b, 0, d});
    const Point p{0.1, 0.2};
    const RicciData r = ricci(m, p);
    EXPECT_NEAR(r.rho[0][0], a * d - b * b + b, 1e-14);
    EXPECT_NEAR(nabla_ricci(m, p)[0][0][0], -2 * r.rho[0][0], 1e-14);
}

TEST(NablaRicci, SymmetricSpaceAndFlat) {
    const NablaRicci n = nabla_ricci(M2(-0.5), {0.3, 0.3});
    for (auto& a : n)
        for (auto& b : a)
            for (double v : b) EXPECT_NEAR(v, 0.0, 1e-15);
    EXPECT_NEAR(ricci(M2(-0.5), {0, 0}).rho[1][1], -0.25, 1e-15);
    const NablaRicci z = nabla_ricci(make_type_b({0, 0, 0, 0, 0, 0}), {1, 1});
    EXPECT_EQ(z[0][0][0], 0.0);
}

TEST(Predicates, StronglyProjectivelyFlat) {
    EXPECT_TRUE(is_strongly_projectively_flat(make_type_b({3, 0, 0, 1, 1, 0})));
    EXPECT_TRUE(is_strongly_projectively_flat(make_type_b({3, 0, 0, 1, -1, 0})));
    EXPECT_FALSE(is_strongly_projectively_flat(Qc(2)));
    EXPECT_TRUE(is_strongly_projectively_flat(make_type_a({0, 0, 0, 0, 1, 0})));
    EXPECT_TRUE(is_flat(make_type_b({1, 0, 0, 0, 1, 0})));
    EXPECT_FALSE(is_flat(M1()));
}

TEST(Hessian, Examples) {
    const SurfaceModel flat = make_type_a({0, 0, 0, 0, 0, 0});
    const Mat2 h = hessian(flat, ClosedForm::coordinate(0) * ClosedForm::coordinate(1), {0.4, -1});
    EXPECT_EQ(h[0][0], 0.0);
    EXPECT_EQ(h[0][1], 1.0);
    EXPECT_EQ(h[1][0], 1.0);
    EXPECT_EQ(h[1][1], 0.0);

    const ClosedForm e = ClosedForm::exp_linear(0, 1);
    const Point p{0.3, 0.5};
    const Mat2 h1 = hessian(M1(), e, p);
    EXPECT_NEAR(h1[1][1], -std::exp(0.5), 1e-14);
    EXPECT_NEAR(h1[1][1], -1.0 * evaluate(e, p, Domain::FullPlane) * ricci(M1(), p).rho[1][1], 1e-14);

    const ClosedForm f = ClosedForm::power(0, -1) * ClosedForm::coordinate(1);
    const Point q{2, 3};
    const Mat2 h4 = hessian(N4(), f, q);
    const Mat2 rs = ricci(N4(), q).rho_s;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(h4[i][j], -evaluate(f, q, Domain::RightHalf) * rs[i][j], 1e-14);
}

TEST(QeResidual, Examples) {
    const SurfaceModel m5 = make_type_a({-1, 0, 1, 0, -1, 2});
    const ClosedForm f = ClosedForm::exp_linear(0, 1) * parse_closed_form("cos(1*x2)");
    EXPECT_LT(qe_residual(m5, -1, f), 1e-10);
    EXPECT_EQ(qe_residual(make_type_a({0, 0, 0, 0, 0, 0}), 7, ClosedForm::coordinate(0)), 0.0);
    EXPECT_GT(qe_residual(M1(), 0, ClosedForm::coordinate(1)), 0.1);
    EXPECT_THROW(qe_residual(M1(), 0, ClosedForm::constant(1), {{0, 0}}), std::invalid_argument);
    EXPECT_THROW(qe_residual(N4(), 0, ClosedForm::constant(1), std::vector<Point>(5, Point{-1, 0})), DomainError);
}

TEST(QeResidual, ConstantSolvesMuZeroExactly) {
    for (const auto& m : {M1(), N4(), Qc(2), make_sphere(), make_hyperbolic(1)})
        EXPECT_EQ(qe_residual(m, 0, ClosedForm::constant(1)), 0.0);
}

TEST(QeResidual, Subadditive) {
    const SurfaceModel m = M2(1);
    const ClosedForm f = ClosedForm::exp_linear(0, 1), g = ClosedForm::exp_linear(0.3, -0.2);
    const double a = 2.5, b = -1.5;
    EXPECT_LE(qe_residual(m, 0.7, a * f + b * g),
              std::abs(a) * qe_residual(m, 0.7, f) + std::abs(b) * qe_residual(m, 0.7, g) + 1e-12);
}

TEST(Kahler, Structures) {
    const auto j = kahler_structure(make_type_b({2, 0, 0, 2, -2, 0}));
    ASSERT_TRUE(j.has_value());
    EXPECT_NEAR((*j)[0][0], 0.0, 1e-15);
    EXPECT_NEAR((*j)[0][1], 1.0, 1e-15);
    EXPECT_NEAR((*j)[1][0], -1.0, 1e-15);
    EXPECT_NEAR((*j)[1][1], 0.0, 1e-15);
    EXPECT_FALSE(kahler_structure(M1()).has_value());
    // Q_c: constant J exists exactly when c < 0
    const auto jq = kahler_structure(Qc(-1));
    ASSERT_TRUE(jq.has_value());
    Mat2 sq{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) sq[a][b] = (*jq)[a][0] * (*jq)[0][b] + (*jq)[a][1] * (*jq)[1][b];
    EXPECT_NEAR(sq[0][0], -1, 1e-14);
    EXPECT_NEAR(sq[1][1], -1, 1e-14);
    EXPECT_NEAR(sq[0][1], 0, 1e-14);
    EXPECT_FALSE(kahler_structure(Qc(2)).has_value());
    EXPECT_TRUE(kahler_structure(make_type_a({0, 0, 0, 0, 0, 0})).has_value());
}

TEST(LinearChange, RoundTrip) {
    const Christoffel g = from_constants({0.3, -1, 2, 0.5, 1.5, -0.2});
    const Mat2 P{{{2, 1}, {-0.5, 3}}};
    const Christoffel back = linear_change(linear_change(g, P), inverse(P));
    const auto a = to_constants(g), b = to_constants(back);
    for (int e = 0; e < 6; ++e) EXPECT_NEAR(a[e], b[e], 1e-14);
}
