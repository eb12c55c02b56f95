#include "affqe/term_algebra.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace affqe;

namespace {

ClosedForm x1() { return ClosedForm::coordinate(0); }
ClosedForm x2() { return ClosedForm::coordinate(1); }

Factor make_factor(double power, int logp, double e, std::optional<Trig> trig = {}) {
    Factor f;
    f.power = power;
    f.log_power = logp;
    f.exp_coeff = e;
    f.trig = trig;
    return f;
}

// Random form on the right half plane with every factor kind present.
ClosedForm random_form(std::mt19937& rng, int nterms) {
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::uniform_int_distribution<int> k(0, 2);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<Term> ts;
    for (int i = 0; i < nterms; ++i) {
        Term t;
        t.coeff = u(rng);
        std::optional<Trig> tr1, tr2;
        if (coin(rng)) tr1 = Trig{u(rng) + 2.0, u(rng), coin(rng) == 1};
        if (coin(rng)) tr2 = Trig{u(rng) - 2.0, u(rng), false};
        t.factors[0] = make_factor(u(rng), k(rng), u(rng), tr1);
        t.factors[1] = make_factor(static_cast<double>(k(rng)), 0, u(rng), tr2);
        ts.push_back(t);
    }
    return ClosedForm(ts);
}

}  // namespace

TEST(Evaluate, CoordinateFunction) { EXPECT_DOUBLE_EQ(evaluate(x2(), {1, 5}, Domain::FullPlane), 5.0); }

TEST(Evaluate, PowerTimesCoordinate) {
    ClosedForm f = ClosedForm::power(0, 2.0) * x2();
    EXPECT_DOUBLE_EQ(evaluate(f, {3, 4}, Domain::RightHalf), 36.0);
}

TEST(Evaluate, CosProductAtOrigin) {
    ClosedForm f = parse_closed_form("cos(1*x1) * cos(1*x2)");
    EXPECT_DOUBLE_EQ(evaluate(f, {0, 0}, Domain::FullPlane), 1.0);
}

TEST(Evaluate, DomainViolationsThrow) {
    ClosedForm f = parse_closed_form("log(x1)^1");
    EXPECT_THROW(evaluate(f, {-1, 0}, Domain::FullPlane), DomainError);
    EXPECT_THROW(evaluate(f, {-1, 0}, Domain::RightHalf), DomainError);
    EXPECT_THROW(evaluate(ClosedForm::power(0, -1.0), {0, 1}, Domain::FullPlane), DomainError);
    EXPECT_THROW(evaluate(x1(), {1.5, 0}, Domain::SphereChart), DomainError);
    EXPECT_NO_THROW(evaluate(ClosedForm::power(0, -1.0), {-2, 1}, Domain::FullPlane));
}

TEST(Differentiate, PowerTimesLog) {
    const double a = 1.7;
    ClosedForm f = ClosedForm::power(0, a) * parse_closed_form("log(x1)^1");
    ClosedForm expect = a * ClosedForm::power(0, a - 1) * parse_closed_form("log(x1)^1") + ClosedForm::power(0, a - 1);
    EXPECT_EQ(to_string(differentiate(f, 0)), to_string(expect));
}

TEST(Differentiate, ExpTimesCoordinate) {
    ClosedForm f = ClosedForm::exp_linear(0, 1) * x2();
    EXPECT_EQ(differentiate(f, 1), f + ClosedForm::exp_linear(0, 1));
}

TEST(Differentiate, CosAtHalfPi) {
    ClosedForm f = parse_closed_form("cos(1*x1)");
    EXPECT_NEAR(evaluate(differentiate(f, 0), {std::numbers::pi / 2, 0}, Domain::FullPlane), -1.0, 1e-15);
    EXPECT_EQ(to_string(differentiate(f, 0)), "-sin(1*x1)");
}

TEST(Simplify, MergesAndDrops) {
    EXPECT_EQ(to_string(x1() + x1()), "2 * x1");
    EXPECT_TRUE((x2() - x2()).is_zero());
    ClosedForm e = ClosedForm::exp_linear(0, 1);
    EXPECT_EQ(e + 0.0 * x1(), e);
}

TEST(Simplify, SinCosPhaseIdentities) {
    // cos(t + pi) = -cos(t); cos(-t) = cos(t)
    Factor a = make_factor(0, 0, 0, Trig{1.0, std::numbers::pi, false});
    Factor b = make_factor(0, 0, 0, Trig{-1.0, 0.0, false});
    ClosedForm sum = ClosedForm::monomial(1.0, a, {}) + ClosedForm::monomial(1.0, b, {});
    EXPECT_TRUE(sum.is_zero());
}

TEST(Simplify, PreservesEvaluation) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.3, 2.0), v(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<Term> raw;
        ClosedForm f = random_form(rng, 4);
        for (int i = 0; i < 3; ++i) raw.insert(raw.end(), f.terms().begin(), f.terms().end());
        ClosedForm tripled = ClosedForm(raw);
        for (int k = 0; k < 20; ++k) {
            Point p{u(rng), v(rng)};
            double direct = 0.0;
            for (const auto& t : raw) direct += evaluate(ClosedForm::monomial(t.coeff, t.factors[0], t.factors[1]), p,
                                                         Domain::RightHalf);
            EXPECT_NEAR(evaluate(tripled, p, Domain::RightHalf), direct, 1e-12 * (1 + std::abs(direct)));
        }
    }
}

TEST(Differentiate, ClosureAndRichardson) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.6, 1.8), v(-0.8, 0.8);
    int checked = 0;
    for (int rep = 0; rep < 40; ++rep) {
        ClosedForm f = random_form(rng, 2);
        for (int axis = 0; axis < 2; ++axis) {
            ClosedForm d = differentiate(f, axis);
            for (const auto& t : d.terms())
                for (const auto& fa : t.factors) EXPECT_LE(fa.log_power, 2);
            const long double x = u(rng), y = v(rng);
            const long double exact = evaluate_ld(d, x, y, Domain::RightHalf);
            auto fd = [&](long double h) {
                long double xp = x, yp = y, xm = x, ym = y;
                (axis == 0 ? xp : yp) += h;
                (axis == 0 ? xm : ym) -= h;
                return (evaluate_ld(f, xp, yp, Domain::RightHalf) - evaluate_ld(f, xm, ym, Domain::RightHalf)) /
                       (2 * h);
            };
            const long double e1 = std::abs(fd(1e-4L) - exact);
            const long double e2 = std::abs(fd(1e-5L) - exact);
            if (e1 < 1e-12L) continue;  // third derivative vanishes here
            const double ratio = static_cast<double>(e1 / e2);
            EXPECT_NEAR(ratio, 100.0, 10.0) << to_string(f);
            ++checked;
        }
    }
    EXPECT_GT(checked, 40);
}

TEST(Text, CanonicalForm) {
    ClosedForm f = parse_closed_form("3.0 * (x1)^-1.5 * log(x1)^1 * exp(2.0*x2)");
    EXPECT_EQ(to_string(f), "3 * (x1)^-1.5 * log(x1)^1 * exp(2*x2)");
    EXPECT_EQ(to_string(parse_closed_form("sin(1*x2) * exp(1*x2)")), "exp(1*x2) * sin(1*x2)");
    EXPECT_EQ(to_string(ClosedForm()), "0");
    EXPECT_EQ(to_string(-x1() + 2.5 * x2()), "-x1 + 2.5 * x2");
}

TEST(Text, RoundTripBitIdentical) {
    std::mt19937 rng(3);
    for (int rep = 0; rep < 200; ++rep) {
        ClosedForm f = random_form(rng, 3);
        const std::string s = to_string(f);
        ClosedForm g = parse_closed_form(s);
        ASSERT_EQ(to_string(g), s);
        ASSERT_EQ(f.terms().size(), g.terms().size());
        for (size_t i = 0; i < f.terms().size(); ++i) {
            EXPECT_EQ(f.terms()[i].coeff, g.terms()[i].coeff);
            for (int a = 0; a < 2; ++a) {
                EXPECT_EQ(f.terms()[i].factors[a].power, g.terms()[i].factors[a].power);
                EXPECT_EQ(f.terms()[i].factors[a].exp_coeff, g.terms()[i].factors[a].exp_coeff);
            }
        }
    }
}

TEST(Text, RejectsGarbage) {
    EXPECT_THROW(parse_closed_form("x3"), ParseError);
    EXPECT_THROW(parse_closed_form("x1 +"), ParseError);
    EXPECT_THROW(parse_closed_form("log(x1)^4"), ParseError);
    EXPECT_THROW(parse_closed_form(""), ParseError);
}

TEST(Product, TrigProductToSum) {
    ClosedForm c = parse_closed_form("cos(1*x1)");
    ClosedForm s = parse_closed_form("sin(1*x1)");
    // 2 sin cos = sin 2x
    EXPECT_EQ(to_string(2.0 * s * c), "sin(2*x1)");
}

TEST(NumericRank, Examples) {
    ClosedForm one = ClosedForm::constant(1);
    EXPECT_EQ(numeric_rank({one, x1(), x2()}, Domain::FullPlane), 3);
    EXPECT_EQ(numeric_rank({x1(), 2.0 * x1()}, Domain::FullPlane), 1);
    ClosedForm e = ClosedForm::exp_linear(0, 1);
    EXPECT_EQ(numeric_rank({e, x2() * e, ClosedForm::exp_linear(-1, 1)}, Domain::FullPlane), 3);
    EXPECT_EQ(numeric_rank({}, Domain::FullPlane), 0);
    EXPECT_EQ(numeric_rank({ClosedForm()}, Domain::FullPlane), 0);
}

TEST(NumericRank, DegenerateSampleSignals) {
    // On the line x2 = 0 the functions 1 and exp(1e-8 x2)-like perturbations
    // cannot be told apart; a rank-1 sample of independent functions is flagged
    // only when it lands in the ambiguous band.
    std::vector<Point> pts(12, Point{0.5, 0.25});
    for (int i = 0; i < 12; ++i) pts[i].x2 = 0.25 + 1e-9 * i;
    EXPECT_THROW(numeric_rank({ClosedForm::constant(1), x2()}, pts, Domain::FullPlane), DegenerateSampleError);
}
