#include "affqe/qe_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace affqe;

namespace {

ClosedForm P(const char* s) { return parse_closed_form(s); }

// Same span: ranks of A, B and A u B agree.
void expect_span(const std::vector<ClosedForm>& got, const std::vector<ClosedForm>& want, Domain d) {
    ASSERT_EQ(got.size(), want.size());
    std::vector<ClosedForm> all = got;
    all.insert(all.end(), want.begin(), want.end());
    EXPECT_EQ(numeric_rank(all, d), static_cast<int>(want.size()));
}

SurfaceModel m1() { return make_type_a({-1, 0, 1, 0, 0, 2}); }
SurfaceModel m4(double c) { return make_type_a({0, 0, 1, 0, c, 2}); }
SurfaceModel m5(double c) { return make_type_a({-1, 0, c, 0, -1, 2 * c}); }

}  // namespace

TEST(SolveTypeA, M1AtMinusOne) {
    auto s = solve_type_a(m1(), -1.0);
    expect_span(s.basis, {P("exp(-1*x1) * exp(1*x2)"), P("exp(1*x2)"), P("x2 * exp(1*x2)")}, Domain::FullPlane);
    EXPECT_LT(s.residual, kResidualTol);
    EXPECT_EQ(s.method, SolveMethod::ExponentialAnsatz);
}

TEST(SolveTypeA, M1AtThree) {
    auto s = solve_type_a(m1(), 3.0);
    expect_span(s.basis, {P("exp(-1*x2)"), P("exp(3*x2)")}, Domain::FullPlane);
}

TEST(SolveTypeA, M1ComplexExponents) {
    // a2 = 1 +- sqrt(1 + mu) with mu = -2
    auto s = solve_type_a(m1(), -2.0);
    expect_span(s.basis, {P("exp(1*x2) * cos(1*x2)"), P("exp(1*x2) * sin(1*x2)")}, Domain::FullPlane);
}

TEST(SolveTypeA, M5DoubleRoot) {
    auto s = solve_type_a(m5(1.0), -0.5);
    expect_span(s.basis, {P("exp(1*x2)"), P("x2 * exp(1*x2)")}, Domain::FullPlane);
}

TEST(SolveTypeA, FourFoldResultantRoot) {
    // Gamma_11^2 = 0 makes the a1-resultant a perfect square with a 4-fold root
    auto s = solve_type_a(make_type_a({2, 0, 0, 1, 1, 0}), -1.0);
    expect_span(s.basis, {P("exp(1*x1)"), P("x2 * exp(1*x1)"), P("2 * x1 * exp(1*x1) + (x2)^2 * exp(1*x1)")},
                Domain::FullPlane);
    EXPECT_LT(s.residual, kResidualTol);
}

TEST(SolveTypeA, M5AtMinusOneHasComplexPair) {
    auto s = solve_type_a(m5(1.0), -1.0);
    expect_span(s.basis,
                {P("exp(-1*x1) * exp(1*x2)"), P("exp(1*x2) * cos(1*x2)"), P("exp(1*x2) * sin(1*x2)")},
                Domain::FullPlane);
}

TEST(SolveTypeA, M4CanonicalForm) {
    auto s = solve_type_a(m4(1.0), -1.0);
    ASSERT_EQ(s.basis.size(), 3u);
    const ClosedForm e = ClosedForm::exp_linear(0, 1);
    EXPECT_EQ(s.basis[0], e);
    EXPECT_EQ(s.basis[1], (ClosedForm::coordinate(1) * e).simplified());
    EXPECT_EQ(s.basis[2], ((2.0 * ClosedForm::coordinate(0) + ClosedForm::power(1, 2)) * e).simplified());
}

TEST(SolveTypeA, FlatModels) {
    auto g0 = solve_type_a(make_type_a({0, 0, 0, 0, 0, 0}), 0.7);
    expect_span(g0.basis, {P("1"), P("x1"), P("x2")}, Domain::FullPlane);
    auto g4 = solve_type_a(make_type_a({0, 0, 0, 0, 1, 0}), -3.0);
    expect_span(g4.basis, {P("1"), P("x2"), P("(x2)^2 + 2 * x1")}, Domain::FullPlane);
}

TEST(SolveTypeA, ModuleOverTranslations) {
    for (double mu : {-1.0, 3.0, -2.0}) {
        auto s = solve_type_a(m1(), mu);
        for (const auto& f : s.basis)
            for (int axis = 0; axis < 2; ++axis) {
                auto ext = s.basis;
                ext.push_back(differentiate(f, axis));
                EXPECT_EQ(numeric_rank(ext, Domain::FullPlane), static_cast<int>(s.basis.size()));
            }
    }
}

TEST(SolveTypeB, Z1AtMinusOne) {
    auto s = solve_type_b(make_type_b({2, 1, 0, 1, 0, 0}), -1.0);
    expect_span(s.basis, {P("x1"), P("(x1)^2"), P("x1 * x2 + (x1)^2 * log(x1)^1")}, Domain::RightHalf);
    EXPECT_EQ(s.method, SolveMethod::PowerAnsatz);
}

TEST(SolveTypeB, N1PlusQuarter) {
    // Symbolic check gives (x1)^(-1/2){1, x2}; see notes on the printed exponent.
    auto s = solve_type_b(make_type_b({-1.5, 0, 0, -0.5, -0.5, 0}), -0.25);
    expect_span(s.basis, {P("(x1)^-0.5"), P("(x1)^-0.5 * x2")}, Domain::RightHalf);
}

TEST(SolveTypeB, LogSolutionAtZero) {
    auto s = solve_type_b(make_type_b({-1, 0, 0, 0, 0, 1}), 0.0);
    expect_span(s.basis, {P("1"), P("log(x1)^1")}, Domain::RightHalf);
}

TEST(SolveTypeB, ProjectivelyFlatFamily) {
    const auto m = make_type_b({5, 0, 0, 2, 1, 0});
    expect_span(solve_type_b(m, -1.0).basis, {P("(x1)^2"), P("(x1)^2 * x2"), P("(x1)^4 + (x1)^2 * (x2)^2")},
                Domain::RightHalf);
    expect_span(solve_type_b(m, 0.0).basis, {P("1")}, Domain::RightHalf);
    EXPECT_TRUE(solve_type_b(m, 0.7).basis.empty());
}

TEST(SolveTypeB, FlatLogModel) {
    const auto m = make_type_b({0, 1, 0, 0, 0, 0});
    for (double mu : {-1.0, 0.0, 2.5})
        expect_span(solve_type_b(m, mu).basis, {P("1"), P("x1"), P("x1 * log(x1)^1 + x2")}, Domain::RightHalf);
}

TEST(SolveTypeB, ComplexIndices) {
    // rho-tilde_11 = kappa^2 and indices kappa +- sqrt(kappa^2 (1 + mu)); kappa = 1, mu = -2
    auto s = solve_type_b(make_type_b({1, 0, 0, 1, 0, 0}), -2.0);
    EXPECT_TRUE(s.complex_indices);
    expect_span(s.basis, {P("x1 * cos(1*log(x1))"), P("x1 * sin(1*log(x1))")}, Domain::RightHalf);
    EXPECT_FALSE(s.notes.empty());
}

TEST(SolveTypeC, Sphere) {
    const auto m = make_sphere();
    expect_span(solve_type_c(m, -1.0).basis,
                {P("sin(1*x1)"), P("cos(1*x1) * cos(1*x2)"), P("cos(1*x1) * sin(1*x2)")}, Domain::SphereChart);
    EXPECT_TRUE(solve_type_c(m, 0.5).basis.empty());
    EXPECT_EQ(solve_type_c(m, 0.0).basis.size(), 1u);
}

TEST(SolveTypeC, Hyperbolic) {
    for (int sign : {1, -1}) {
        auto s = solve_type_c(make_hyperbolic(sign), -1.0);
        EXPECT_EQ(s.basis.size(), 3u);
        EXPECT_LT(s.residual, kResidualTol);
    }
}

TEST(IndicialSystem, TypeBQuadraticMatchesClosedForm) {
    // C12^1 = C22^1 = 0, C22^2 = 0
    const double a = 0.7, b = -0.4, d = 1.3, mu = -0.8;
    auto sys = indicial_system(make_type_b({a, b, 0, d, 0, 0}), mu);
    ASSERT_EQ(sys.kind, IndicialSystem::Kind::TypeBQuadratic);
    EXPECT_NEAR(sys.coefficients[0][2], 1.0, 1e-14);
    EXPECT_NEAR(sys.coefficients[0][1], -(1 + a), 1e-14);
    EXPECT_NEAR(sys.coefficients[0][0], -(d + a * d - d * d) * mu, 1e-12);
}

TEST(SpecialEigenvalues, FamilyWithHalfShift) {
    for (double s : {1.0, -1.0}) {
        auto ev = special_eigenvalues(make_type_b({1, 0, 0, 2, s, 0}));
        bool found = false;
        for (const auto& e : ev)
            if (std::abs(e.mu - 1.0) < 1e-12) {
                found = true;
                EXPECT_EQ(e.dim, 2);
            }
        EXPECT_TRUE(found);
        auto b = solve_type_b(make_type_b({1, 0, 0, 2, s, 0}), 1.0);
        expect_span(b.basis, {P("(x1)^2"), P("(x1)^2 * x2")}, Domain::RightHalf);
    }
}

TEST(SpecialEigenvalues, QuadraticFamily) {
    // c = 1, upper signs
    auto ev = special_eigenvalues(make_type_b({-10.5, 1, 0, -5.5, 1, 2}));
    bool found = false;
    for (const auto& e : ev)
        if (std::abs(e.mu + 11.0 / 12.0) < 1e-10) {
            found = true;
            EXPECT_EQ(e.dim, 2);
        }
    EXPECT_TRUE(found);
}

TEST(SpecialEigenvalues, SkewRicciOnlyConstants) {
    const double c = 0.8;
    for (double s : {1.0, -1.0}) {
        auto m = make_type_b({1 - s * c * c, c, 0, -s * c * c, s, s * 2 * c});
        auto ev = special_eigenvalues(m);
        ASSERT_EQ(ev.size(), 1u);
        EXPECT_EQ(ev[0].mu, 0.0);
        EXPECT_EQ(ev[0].dim, 1);
        EXPECT_EQ(eigenspace_dim(m, 3.3), 1);
    }
}

TEST(EigenspaceDim, Examples) {
    EXPECT_EQ(eigenspace_dim(make_type_b({-1, 0, 0, -1, -1, 0}), -1.0), 3);
    EXPECT_EQ(eigenspace_dim(make_type_b({-1, 0, 0, -1, 1, 0}), -1.0), 3);
    // C22^1 = 0, C22^2 = C12^1 != 0; E(-1) = (x1)^{C12^2}
    auto m = make_type_b({0.3, 0.2, 1, 0.5, 0, 1});
    auto s = solve_type_b(m, -1.0);
    expect_span(s.basis, {P("(x1)^0.5")}, Domain::RightHalf);
    for (double mu : {-1.0, 0.0, 1.7}) EXPECT_EQ(eigenspace_dim(make_type_b({0, 1, 0, 0, 0, 0}), mu), 3);
}

TEST(EigenspaceDim, ProlongationAgrees) {
    const std::vector<SurfaceModel> models = {m1(), m4(1.0), m5(1.0), make_type_b({2, 1, 0, 1, 0, 0}),
                                              make_type_b({5, 0, 0, 2, 1, 0}), make_type_b({-1, 0, 0, 0, 0, 1}),
                                              make_type_b({1, 0, 0, 2, 1, 0}), make_sphere(), make_hyperbolic(1)};
    for (const auto& m : models)
        for (double mu : {-1.0, 0.0, 1.0, -0.5, 3.0, -2.0}) {
            const int d = eigenspace_dim(m, mu);
            for (const auto& p : generic_points(m)) EXPECT_EQ(prolonged_eigenspace_dim(m, mu, p), d) << family_name(m.family()) << " mu=" << mu;
        }
}

TEST(Solve, GeneralModelsUnsupported) {
    std::array<ClosedForm, 6> g{};
    auto m = make_general(g, Domain::FullPlane);
    EXPECT_THROW(solve(m, 0.0), std::invalid_argument);
    EXPECT_EQ(eigenspace_dim(m, 0.0), 3);
}
