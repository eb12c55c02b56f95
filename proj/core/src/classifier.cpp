#include "affqe/classifier.hpp"

#include "affqe/killing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace affqe {

namespace {

using Consts = ChristoffelConstants;
using Params = std::map<std::string, double>;

constexpr double kMatchTol = 1e-8;

double frob(const Mat2& a) {
    double s = 0.0;
    for (const auto& r : a)
        for (double v : r) s += v * v;
    return std::sqrt(s);
}

Point invariant_point(const SurfaceModel& m) { return generic_points(m)[1]; }

struct Template {
    std::string name;
    bool type_b;
    bool flat;
    std::function<std::optional<Params>(const Consts&)> guess;
    std::function<Consts(const Params&)> build;
};

bool matches(const Consts& a, const Consts& b) {
    double scale = 1.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > kMatchTol * scale) return false;
    return true;
}

Template fixed(std::string name, bool type_b, bool flat, Consts c) {
    return {std::move(name), type_b, flat, [](const Consts&) { return std::optional<Params>(Params{}); },
            [c](const Params&) { return c; }};
}

Template one_param(std::string name, bool type_b, bool flat, const char* p, int index,
                   std::function<Consts(double)> build, std::function<bool(double)> admissible = {}) {
    return {std::move(name), type_b, flat,
            [=](const Consts& c) -> std::optional<Params> {
                if (admissible && !admissible(c[index])) return std::nullopt;
                return Params{{p, c[index]}};
            },
            [=](const Params& ps) { return build(ps.at(p)); }};
}

bool nonzero(double v) { return std::abs(v) > kMatchTol; }

std::vector<Template> make_templates() {
    std::vector<Template> t;
    // flat Type A
    t.push_back(fixed("FlatA0", false, true, {0, 0, 0, 0, 0, 0}));
    t.push_back(fixed("FlatA1", false, true, {1, 0, 0, 1, 0, 0}));
    t.push_back(fixed("FlatA2", false, true, {-1, 0, 0, 0, 0, 1}));
    t.push_back(fixed("FlatA3", false, true, {0, 0, 0, 0, 0, 1}));
    t.push_back(fixed("FlatA4", false, true, {0, 0, 0, 0, 1, 0}));
    t.push_back(fixed("FlatA5", false, true, {1, 0, 0, 1, -1, 0}));
    // flat Type B
    t.push_back(fixed("FlatB0", true, true, {0, 0, 0, 0, 0, 0}));
    t.push_back(fixed("FlatB2", true, true, {1, 0, 0, 0, 1, 0}));
    t.push_back(fixed("FlatB4", true, true, {0, 1, 0, 0, 0, 0}));
    t.push_back(fixed("FlatB5", true, true, {1, 0, 0, 0, -1, 0}));
    t.push_back(fixed("FlatB6", true, true, {-2, 1, 0, -1, 0, 0}));
    t.push_back(one_param("FlatB1", true, true, "c", 3, [](double c) { return Consts{c - 1, 0, 0, c, 0, 0}; }, nonzero));
    t.push_back(one_param("FlatB3", true, true, "c", 0, [](double c) { return Consts{c, 0, 0, 0, 0, 0}; }, nonzero));

    // Type A, Killing dimension 4
    t.push_back(fixed("M1", false, false, {-1, 0, 1, 0, 0, 2}));
    t.push_back(one_param("M2", false, false, "c", 2, [](double c) { return Consts{-1, 0, c, 0, 0, 1 + 2 * c}; }));
    t.push_back(one_param("M3", false, false, "c", 2, [](double c) { return Consts{0, 0, c, 0, 0, 1 + 2 * c}; }));
    t.push_back(one_param("M4", false, false, "c", 4, [](double c) { return Consts{0, 0, 1, 0, c, 2}; }));
    t.push_back(one_param("M5", false, false, "c", 2, [](double c) { return Consts{-1, 0, c, 0, -1, 2 * c}; }));

    // Type A, rank 2 parametrizations
    auto uv = [](const char* name, std::function<std::optional<Consts>(double, double)> f, int iu, int iv) {
        return Template{name, false, false,
                        [=](const Consts& c) -> std::optional<Params> {
                            if (!f(c[iu], c[iv])) return std::nullopt;
                            return Params{{"u", c[iu]}, {"v", c[iv]}};
                        },
                        [=](const Params& p) { return *f(p.at("u"), p.at("v")); }};
    };
    t.push_back(uv(
        "M02",
        [](double u, double v) -> std::optional<Consts> {
            if (u <= 0) return std::nullopt;
            return Consts{u + 1 / u, 0, 0, u, u, v};
        },
        3, 5));
    t.push_back(uv(
        "M20",
        [](double u, double v) -> std::optional<Consts> {
            if (u <= 0) return std::nullopt;
            return Consts{u - 1 / u, 0, 0, u, u, v};
        },
        3, 5));
    t.push_back(uv(
        "M11",
        [](double u, double v) -> std::optional<Consts> {
            if (u * v <= 1) return std::nullopt;
            const double s = std::sqrt(u * v - 1);
            return Consts{u, s, v, u, s, v};
        },
        0, 2));
    t.push_back(uv(
        "M11~",
        [](double u, double v) -> std::optional<Consts> {
            if (u * v >= 1) return std::nullopt;
            const double s = std::sqrt(1 - u * v);
            return Consts{u, s, v, u, -s, v};
        },
        0, 2));
    t.push_back(uv(
        "M11^",
        [](double u, double w) -> std::optional<Consts> {
            if (u == 0) return std::nullopt;
            return Consts{u, 0, 1 / u, u, w, 1 / u};
        },
        0, 4));

    // Type B, Killing dimension 4 and 3
    t.push_back(one_param("Z1", true, false, "kappa", 3, [](double k) { return Consts{2 * k, 1, 0, k, 0, 0}; }));
    t.push_back(one_param("Z3", true, false, "kappa", 3, [](double k) { return Consts{2 * k - 1, 0, 0, k, 0, 0}; }));
    t.push_back(Template{"Z2", true, false,
                         [](const Consts& c) -> std::optional<Params> {
                             return Params{{"kappa", c[3]}, {"theta", c[0] - 2 * c[3] + 1}};
                         },
                         [](const Params& p) {
                             const double k = p.at("kappa"), th = p.at("theta");
                             return Consts{2 * k + th - 1, 0, 0, k, 0, 0};
                         }});
    t.push_back(fixed("N1+", true, false, {-1.5, 0, 0, -0.5, -0.5, 0}));
    t.push_back(fixed("N1-", true, false, {-1.5, 0, 0, -0.5, 0.5, 0}));
    t.push_back(one_param("N2", true, false, "c", 4, [](double c) { return Consts{-1.5, 0, 1, -0.5, c, 2}; }));
    t.push_back(fixed("N3", true, false, {-1, 0, 0, -1, -1, 0}));
    t.push_back(fixed("N4", true, false, {-1, 0, 0, -1, 1, 0}));

    // Type B, Killing dimension 2
    t.push_back(one_param("Q_c", true, false, "c", 1, [](double c) { return Consts{0, c, 1, 0, 0, 1}; }));
    t.push_back(one_param("Kahler", true, false, "c", 0, [](double c) { return Consts{c, 0, 0, c, -c, 0}; }, nonzero));
    for (int s : {1, -1}) {
        const std::string sg = s > 0 ? "+" : "-";
        auto sign_ok = [s](const Consts& c) { return std::abs(c[4] - s) <= kMatchTol; };
        t.push_back(Template{"P0" + sg, true, false,
                             [=](const Consts& c) -> std::optional<Params> {
                                 if (!sign_ok(c) || c[1] <= 0) return std::nullopt;
                                 return Params{{"c", c[1]}};
                             },
                             [=](const Params& p) {
                                 const double c = p.at("c");
                                 return Consts{1 - s * c * c, c, 0, -s * c * c, double(s), 2.0 * s * c};
                             }});
        t.push_back(Template{"Pa" + sg, true, false,
                             [=](const Consts& c) -> std::optional<Params> {
                                 if (!sign_ok(c)) return std::nullopt;
                                 const double a = c[0] - c[3] - 1;
                                 if (!nonzero(a)) return std::nullopt;
                                 return Params{{"a", a}, {"c", c[1]}};
                             },
                             [=](const Params& p) {
                                 const double a = p.at("a"), c = p.at("c");
                                 return Consts{0.5 * (a * a + 4 * a - 2 * s * c * c + 2), c, 0,
                                               0.5 * (a * a + 2 * a - 2 * s * c * c), double(s), 2.0 * s * c};
                             }});
        t.push_back(Template{"ProjFlat" + sg, true, false,
                             [=](const Consts& c) -> std::optional<Params> {
                                 if (!sign_ok(c)) return std::nullopt;
                                 return Params{{"c", c[3]}};
                             },
                             [=](const Params& p) {
                                 const double c = p.at("c");
                                 return Consts{1 + 2 * c, 0, 0, c, double(s), 0};
                             }});
        t.push_back(Template{"SpecialMuQuad" + sg, true, false,
                             [=](const Consts& c) -> std::optional<Params> {
                                 if (!sign_ok(c) || !nonzero(c[1])) return std::nullopt;
                                 return Params{{"c", c[1]}};
                             },
                             [=](const Params& p) {
                                 const double c = p.at("c");
                                 return Consts{-s * 8 * c * c - 2.5, c, 0, 0.5 * (-s * 8 * c * c - 3), double(s),
                                               2.0 * s * c};
                             }});
        t.push_back(Template{"SpecialMuLin" + sg, true, false,
                             [=](const Consts& c) -> std::optional<Params> {
                                 if (!sign_ok(c)) return std::nullopt;
                                 return Params{{"c", c[0]}};
                             },
                             [=](const Params& p) {
                                 const double c = p.at("c");
                                 return Consts{c, 0, 0, c + 1, double(s), 0};
                             }});
        t.push_back(Template{"SingleExp2" + sg, true, false,
                             [=](const Consts& c) -> std::optional<Params> {
                                 if (!sign_ok(c) || !nonzero(c[1])) return std::nullopt;
                                 return Params{{"b", c[1]}, {"d", c[3]}};
                             },
                             [=](const Params& p) {
                                 const double b = p.at("b"), d = p.at("d");
                                 return Consts{1 + 2 * d + s * b * b, b, 0, d, double(s), 2.0 * s * b};
                             }});
        // x1^(mu Delta) solves for one mu
        t.push_back(Template{"PowerFamily" + sg, true, false,
                             [=](const Consts& c) -> std::optional<Params> {
                                 if (!sign_ok(c) || std::abs(c[0] - c[3] - 1) <= kMatchTol) return std::nullopt;
                                 return Params{{"C111", c[0]}, {"C112", c[1]}, {"C122", c[3]}};
                             },
                             [=](const Params& p) {
                                 const double b = p.at("C112");
                                 return Consts{p.at("C111"), b, 0, p.at("C122"), double(s), 2.0 * s * b};
                             }});
    }
    auto free4 = [](const char* name, std::function<bool(const Consts&)> cond,
                    std::function<Consts(const Consts&)> proj) {
        return Template{name, true, false,
                        [=](const Consts& c) -> std::optional<Params> {
                            if (!cond(c)) return std::nullopt;
                            Params p;
                            for (int i = 0; i < 6; ++i) p[std::string("C") + kChristoffelKeys[i]] = c[i];
                            return p;
                        },
                        [=](const Params& p) {
                            Consts c{};
                            for (int i = 0; i < 6; ++i) c[i] = p.at(std::string("C") + kChristoffelKeys[i]);
                            return proj(c);
                        }};
    };
    t.push_back(free4(
        "SingleExp1", [](const Consts& c) { return nonzero(c[2]); },
        [](Consts c) {
            c[4] = 0;
            c[5] = c[2];
            return c;
        }));
    t.push_back(free4(
        "Soliton1", [](const Consts& c) { return nonzero(c[5]); },
        [](Consts c) {
            c[0] = -1;
            c[2] = c[4] = 0;
            return c;
        }));
    t.push_back(free4(
        "Soliton4", [](const Consts& c) { return nonzero(c[5]) && std::abs(c[0] + 1) > kMatchTol; },
        [](Consts c) {
            c[2] = c[4] = 0;
            return c;
        }));
    t.push_back(free4("Soliton2", [](const Consts&) { return true; },
                      [](Consts c) {
                          c[1] = c[3] = c[5] = 0;
                          return c;
                      }));
    t.push_back(Template{"Soliton3", true, false,
                         [](const Consts& c) -> std::optional<Params> {
                             const double n = c[0] * c[0] + c[2] * c[2] + c[4] * c[4];
                             if (n <= kMatchTol) return std::nullopt;
                             const double c1 = -(c[1] * c[0] + c[3] * c[2] + c[5] * c[4]) / n;
                             if (!nonzero(c1)) return std::nullopt;
                             return Params{{"c1", c1}, {"C111", c[0]}, {"C121", c[2]}, {"C221", c[4]}};
                         },
                         [](const Params& p) {
                             const double c1 = p.at("c1"), a = p.at("C111"), b = p.at("C121"), d = p.at("C221");
                             return Consts{a, -c1 * a, b, -c1 * b, d, -c1 * d};
                         }});
    return t;
}

const std::vector<Template>& templates() {
    static const std::vector<Template> t = make_templates();
    return t;
}

std::optional<ModelLabel> match(const Consts& c, bool type_b, bool flat) {
    for (const auto& t : templates()) {
        if (t.type_b != type_b || t.flat != flat) continue;
        auto p = t.guess(c);
        if (!p) continue;
        if (!matches(t.build(*p), c)) continue;
        ModelLabel l;
        l.family = t.name;
        l.params = *p;
        return l;
    }
    return std::nullopt;
}

Consts shear_constants(const Consts& c, const ShearTransform& t) {
    const Mat2 P{{{1.0, 0.0}, {t.a, t.b}}};
    Consts out = to_constants(linear_change(from_constants(c), P));
    for (auto& v : out)
        if (std::abs(v) < 1e-13) v = 0.0;
    return out;
}

ShearTransform normal_shear(const Consts& c) {
    const double c221 = c[4], c121 = c[2];
    if (c221 == 0.0) return {};
    const double b = std::sqrt(std::abs(c221));
    return {b * c121 / c221, b};
}

// The special-mu line family at c = -3/2 is N1 with x2 rescaled by sqrt(2).
void relabel_overlaps(ModelLabel& l, const ShearTransform& applied) {
    if ((l.family == "SpecialMuLin+" || l.family == "SpecialMuLin-") && std::abs(l.params["c"] + 1.5) < kMatchTol) {
        l.family = l.family.back() == '+' ? "N1-" : "N1+";
        l.params.clear();
        const double r = std::sqrt(2.0);
        l.transform = ShearTransform{r * applied.a, r * applied.b};
    } else if (!applied.is_identity()) {
        l.transform = applied;
    }
}

ModelLabel affine_class_rank1(const InvariantSignature& s) {
    ModelLabel l;
    l.note = "affine class from (alpha_X, eps_X); not a linear match";
    const double a = *s.alpha_X;
    const int e = *s.eps_X;
    if (e > 0 && std::abs(a - 16.0) < 1e-8) {
        l.family = "M1";
    } else if (e > 0 && a < 16.0) {
        l.family = "M5";
        l.params["c"] = std::sqrt(std::max(0.0, a) / (16.0 - a));
    } else {
        const double t = 4.0 / (a - 16.0);
        if (1.0 + 4.0 * t < -1e-12) return {};
        l.family = "M2";
        l.params["c"] = (-1.0 + std::sqrt(std::max(0.0, 1.0 + 4.0 * t))) / 2.0;
    }
    return l;
}

}  // namespace

const char* signature_name(RicciSignature s) {
    switch (s) {
        case RicciSignature::Positive: return "positive";
        case RicciSignature::Negative: return "negative";
        case RicciSignature::Indefinite: return "indefinite";
        case RicciSignature::Rank1: return "rank1";
        case RicciSignature::Zero: return "zero";
    }
    return "?";
}

InvariantSignature invariants(const SurfaceModel& m) {
    InvariantSignature s;
    const Point p = invariant_point(m);
    const RicciData rd = ricci(m, p);
    const Christoffel G = m.christoffel(p);
    double gs = 0.0;
    for (auto& a : G.g)
        for (auto& b : a)
            for (double v : b) gs += v * v;
    const double tol = 1e-10 * std::max(1.0, gs);

    s.flat = is_flat(m);
    s.spf = is_strongly_projectively_flat(m);
    s.killing_dim = killing_dimension(m);

    // rank of rho from its singular values
    const double nrm = frob(rd.rho), dt = std::abs(det(rd.rho));
    if (nrm <= tol)
        s.ricci_rank = 0;
    else if (dt <= tol * nrm)
        s.ricci_rank = 1;
    else
        s.ricci_rank = 2;
    if (s.ricci_rank == 0 && !s.flat) throw std::logic_error("rho = 0 on a non-flat surface");

    {
        const Mat2& r = rd.rho_s;
        const double tr = r[0][0] + r[1][1], d = det(r);
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - d));
        const double l1 = tr / 2 + disc, l2 = tr / 2 - disc;
        auto sg = [&](double v) { return v > tol ? 1 : (v < -tol ? -1 : 0); };
        const int a = sg(l1), b = sg(l2);
        if (a == 0 && b == 0)
            s.ricci_signature = RicciSignature::Zero;
        else if (a == 0 || b == 0)
            s.ricci_signature = RicciSignature::Rank1;
        else if (a > 0 && b > 0)
            s.ricci_signature = RicciSignature::Positive;
        else if (a < 0 && b < 0)
            s.ricci_signature = RicciSignature::Negative;
        else
            s.ricci_signature = RicciSignature::Indefinite;
    }

    if (s.ricci_rank == 2) {
        Mat2 rt{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) rt[i][j] += G.g[i][k][l] * G.g[j][l][k];
        const Mat2 ri = inverse(rd.rho);
        double psi = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) psi += ri[i][j] * rt[j][i];
        s.psi = psi;
        s.Psi = det(rt) / det(rd.rho);
    } else if (s.ricci_rank == 1) {
        const NablaRicci nr = nabla_ricci(m, p);
        const double cand[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
        int best = 0;
        double bestv = -1.0;
        auto rxx = [&](const double* X) {
            double v = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) v += rd.rho[i][j] * X[i] * X[j];
            return v;
        };
        for (int c = 0; c < 4; ++c)
            if (std::abs(rxx(cand[c])) > bestv + tol) {
                bestv = std::abs(rxx(cand[c]));
                best = c;
            }
        const double* X = cand[best];
        double n = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) n += nr[i][j][k] * X[i] * X[j] * X[k];
        const double r = rxx(X);
        s.alpha_X = n * n / (r * r * r);
        s.eps_X = r > 0 ? 1 : -1;
    }
    return s;
}

bool on_line_L(double psi, double Psi) { return std::abs(Psi - 10.0 - 4.0 * (psi - 7.0)) < 1e-9; }

NormalizedModel normalize_type_b(const SurfaceModel& m) {
    if (m.family() != Family::TypeB || !m.constants()) throw std::invalid_argument("normalize_type_b needs a Type B model");
    const Consts& c = *m.constants();
    if (c[4] == 0.0) return {m, {}, "C22^1 = 0: no shear target, unchanged"};
    const ShearTransform t = normal_shear(c);
    if (t.is_identity()) return {m, t, "already normal"};
    return {make_type_b(shear_constants(c, t), m.params()), t, ""};
}

ClosedForm pull_back(const ClosedForm& g, const ShearTransform& t) {
    if (t.is_identity()) return g;
    const ClosedForm u2 = t.a * ClosedForm::coordinate(0) + t.b * ClosedForm::coordinate(1);
    ClosedForm out;
    for (const Term& term : g.terms()) {
        const Factor& f2 = term.factors[1];
        if (f2.trig || f2.log_power != 0 || f2.power < 0 || std::floor(f2.power) != f2.power)
            throw std::invalid_argument("pull_back: unsupported x2 factor in " + to_string(g));
        ClosedForm piece = ClosedForm::monomial(term.coeff, term.factors[0], Factor{});
        for (int i = 0; i < static_cast<int>(f2.power); ++i) piece = piece * u2;
        if (f2.exp_coeff != 0.0) piece = piece * ClosedForm::exp_linear(f2.exp_coeff * t.a, f2.exp_coeff * t.b);
        out = out + piece;
    }
    return out.simplified();
}

ModelLabel classify(const SurfaceModel& m) {
    ModelLabel l;
    switch (m.family()) {
        case Family::TypeC_Sphere: l.family = "S2"; return l;
        case Family::TypeC_HyperbolicPM: l.family = m.param("sign", 1.0) > 0 ? "H2+" : "H2-"; return l;
        case Family::General: l.note = "no constant Christoffel data"; return l;
        default: break;
    }
    const bool type_b = m.family() == Family::TypeB;
    const Consts& c = *m.constants();
    const bool flat = is_flat(m);

    if (auto r = match(c, type_b, flat)) {
        relabel_overlaps(*r, {});
        return *r;
    }
    if (type_b && c[4] != 0.0) {
        const ShearTransform t = normal_shear(c);
        const Consts n = shear_constants(c, t);
        if (auto r = match(n, true, flat)) {
            relabel_overlaps(*r, t);
            return *r;
        }
        // N2^c normalizes to C22^1 = 1, C22^2 = 3/sqrt(c)
        if (std::abs(n[4] - 1.0) < kMatchTol && std::abs(n[5]) > kMatchTol) {
            const double cc = 9.0 / (n[5] * n[5]);
            const Consts n2{-1.5, 0, 1, -0.5, cc, 2};
            if (matches(shear_constants(n2, normal_shear(n2)), n)) {
                ModelLabel r;
                r.family = "N2";
                r.params["c"] = cc;
                // x -> N2 coordinates: compose the input shear with the inverse of N2's.
                const ShearTransform s2 = normal_shear(n2);
                r.transform = ShearTransform{(t.a - s2.a) / s2.b, t.b / s2.b};
                return r;
            }
        }
    }
    if (flat) {
        l.note = "flat, no linear match";
        return l;
    }
    const InvariantSignature s = invariants(m);
    if (s.killing_dim == 4 && s.ricci_rank == 1) return affine_class_rank1(s);
    if (!type_b && s.ricci_rank == 2 && s.psi) {
        l.family = "TypeA_Rank2";
        l.params["psi"] = *s.psi;
        l.params["Psi"] = *s.Psi;
        const bool corner = std::abs(*s.psi - 7.0) < 1e-9 && std::abs(*s.Psi - 10.0) < 1e-9;
        l.params["case"] = !on_line_L(*s.psi, *s.Psi) ? 1 : (corner ? 3 : 2);
        return l;
    }
    l.note = "outside the catalog";
    return l;
}

std::string to_string(const ModelLabel& l) {
    std::ostringstream os;
    os << l.family;
    if (!l.params.empty()) {
        os << " {";
        bool first = true;
        for (const auto& [k, v] : l.params) {
            os << (first ? "" : ", ") << k << "=" << v;
            first = false;
        }
        os << "}";
    }
    if (l.transform) os << " via u2 = " << l.transform->a << "*x1 + " << l.transform->b << "*x2";
    return os.str();
}

const std::vector<std::string>& label_families() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& t : templates()) n.push_back(t.name);
        for (const char* s : {"S2", "H2+", "H2-", "TypeA_Rank2"}) n.push_back(s);
        return n;
    }();
    return names;
}

std::optional<FamilyConstants> family_constants(const std::string& family, const std::map<std::string, double>& params) {
    for (const auto& t : templates())
        if (t.name == family) return FamilyConstants{t.build(params), t.type_b};
    return std::nullopt;
}

}  // namespace affqe
