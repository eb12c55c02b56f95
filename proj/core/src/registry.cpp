#include "affqe/registry.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>

namespace affqe {

namespace {

using Consts = ChristoffelConstants;

const Consts kCornerPos{2, 0, 0, 1, 1, 0};
const Consts kCornerInd{-3, 1, -3, -3, 1, -3};

Consts line_l(double c) { return {1 - c, -c, c, c, 1 - c, 2 - c}; }

std::vector<ModelFactory> make_factories() {
    std::vector<ModelFactory> f;
    auto add = [&](std::string name, std::string kind, Params d, std::string summary) {
        f.push_back({std::move(name), std::move(kind), std::move(d), std::move(summary)});
    };
    for (int i = 0; i <= 5; ++i) add("FlatA" + std::to_string(i), "typeA", {}, "flat Type A normal form");
    add("M1", "typeA", {}, "rank-1 Ricci, Killing dim 4");
    for (const char* m : {"M2", "M3", "M4", "M5"}) add(m, "typeA", {{"c", 1}}, "rank-1 Ricci, Killing dim 4");
    add("M02", "typeA", {{"u", 2}, {"v", 2}}, "rank-2 Ricci, positive definite");
    add("M20", "typeA", {{"u", 1}, {"v", 1}}, "rank-2 Ricci, negative definite");
    add("M11", "typeA", {{"u", 2}, {"v", 1}}, "rank-2 Ricci, indefinite, uv > 1");
    add("M11~", "typeA", {{"u", 0.5}, {"v", 1}}, "rank-2 Ricci, indefinite, uv < 1");
    add("M11^", "typeA", {{"u", 1}, {"v", 2}}, "rank-2 Ricci, indefinite, uv = 1");
    add("CornerPos", "typeA", {}, "rank-2 Ricci, (psi, Psi) = (7, 10)");
    add("CornerInd", "typeA", {}, "rank-2 indefinite Ricci, (psi, Psi) = (7, 10)");
    add("LineL", "typeA", {{"c", 1}}, "rank-2 Ricci on the line L, (psi, Psi) = (7 - 1/c, 10 - 4/c)");

    for (int i : {0, 2, 4, 5, 6}) add("FlatB" + std::to_string(i), "typeB", {}, "flat Type B normal form");
    add("FlatB1", "typeB", {{"c", 2}}, "flat Type B normal form");
    add("FlatB3", "typeB", {{"c", 1.5}}, "flat Type B normal form");
    add("Z1", "typeB", {{"kappa", 1}}, "Type B, Killing dim 4");
    add("Z2", "typeB", {{"kappa", 1}, {"theta", 2}}, "Type B, Killing dim 4");
    add("Z3", "typeB", {{"kappa", 2}}, "Type B, Killing dim 4");
    add("N1+", "typeB", {}, "Type B, Killing dim 3");
    add("N1-", "typeB", {}, "Type B, Killing dim 3");
    add("N2", "typeB", {{"c", 1}}, "Type B, Killing dim 3");
    add("N3", "typeB", {}, "Type B, Killing dim 3");
    add("N4", "typeB", {}, "Type B, Killing dim 3, Levi-Civita of the hyperbolic plane");
    add("Q_c", "typeB", {{"c", 2}}, "Type B with skew Ricci (rho_s = 0)");
    add("Kahler", "typeB", {{"c", 1}}, "Type B admitting a parallel complex structure");
    for (const char* s : {"+", "-"}) {
        const std::string sg = s;
        add("P0" + sg, "typeB", {{"c", 1}}, "Type B soliton family");
        add("Pa" + sg, "typeB", {{"a", 1}, {"c", 1}}, "Type B soliton family");
        add("ProjFlat" + sg, "typeB", {{"c", 1}}, "strongly projectively flat, dim E(-1) = 3");
        add("SpecialMuQuad" + sg, "typeB", {{"c", 1}}, "two-dimensional eigenspace at one mu");
        add("SpecialMuLin" + sg, "typeB", {{"c", 1}}, "two-dimensional eigenspace at mu = 1 + 1/(2c)");
        add("SingleExp2" + sg, "typeB", {{"b", 1}, {"d", 0.5}}, "single-power E(-1)");
        add("PowerFamily" + sg, "typeB", {{"C111", 0}, {"C112", 1}, {"C122", 0}}, "single power at one mu");
    }
    auto cparams = [](Consts c) {
        Params p;
        for (int i = 0; i < 6; ++i) p[std::string("C") + kChristoffelKeys[i]] = c[i];
        return p;
    };
    add("SingleExp1", "typeB", cparams({0.5, 0.3, 1, 0.7, 0, 1}), "single-power E(-1), C22^1 = 0");
    add("Soliton1", "typeB", cparams({-1, 0.5, 0, 1, 0, 1}), "E(0) contains log x1");
    add("Soliton2", "typeB", cparams({1, 0, 1, 0, 2, 0}), "E(0) contains x2");
    add("Soliton3", "typeB", {{"c1", 1}, {"C111", 1}, {"C121", 1}, {"C221", 1}}, "E(0) contains x2 + c1 x1");
    add("Soliton4", "typeB", cparams({1, 0, 0, 0.5, 0, 1}), "E(0) contains a power of x1");
    add("S2", "sphere", {}, "round sphere chart");
    add("H2+", "hyperbolic+", {}, "Lorentzian constant curvature, sign +");
    add("H2-", "hyperbolic-", {}, "Lorentzian constant curvature, sign -");
    return f;
}

// Parameter constraints outside which the family formula degenerates.
std::string violation(const std::string& name, const Params& p) {
    auto get = [&](const char* k) { return p.at(k); };
    if ((name == "M02" || name == "M20") && !(get("u") > 0)) return "u must be positive";
    if (name == "M11" && !(get("u") * get("v") > 1)) return "needs uv > 1";
    if (name == "M11~" && !(get("u") * get("v") < 1)) return "needs uv < 1";
    if (name == "M11^" && get("u") == 0) return "u must be nonzero";
    if ((name == "LineL" || name == "Kahler" || name == "FlatB1" || name == "FlatB3") && get("c") == 0)
        return "c must be nonzero";
    if (name.rfind("P0", 0) == 0 && !(get("c") > 0)) return "c must be positive";
    if (name.rfind("Pa", 0) == 0 && get("a") == 0) return "a must be nonzero";
    if (name == "Soliton3" && get("c1") == 0) return "c1 must be nonzero";
    return {};
}

size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<size_t> row(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
        size_t diag = row[0];
        row[0] = i;
        for (size_t j = 1; j <= b.size(); ++j) {
            const size_t up = row[j];
            const bool same = std::tolower(static_cast<unsigned char>(a[i - 1])) ==
                              std::tolower(static_cast<unsigned char>(b[j - 1]));
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (same ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

}  // namespace

const std::vector<ModelFactory>& model_factories() {
    static const std::vector<ModelFactory> f = make_factories();
    return f;
}

UnknownModelError::UnknownModelError(const std::string& name, std::string suggestion)
    : std::invalid_argument("unknown model '" + name + "'" +
                            (suggestion.empty() ? std::string() : "; did you mean '" + suggestion + "'?")),
      suggestion_(std::move(suggestion)) {}

std::string nearest_name(const std::string& name, const std::vector<std::string>& candidates) {
    std::string best;
    size_t bd = std::string::npos;
    for (const auto& c : candidates) {
        const size_t d = edit_distance(name, c);
        if (d < bd) {
            bd = d;
            best = c;
        }
    }
    return best;
}

SurfaceModel load_model(const std::string& name, const Params& params) {
    const auto& fs = model_factories();
    const auto it = std::find_if(fs.begin(), fs.end(), [&](const ModelFactory& f) { return f.name == name; });
    if (it == fs.end()) {
        std::vector<std::string> names;
        for (const auto& f : fs) names.push_back(f.name);
        throw UnknownModelError(name, nearest_name(name, names));
    }
    Params p = it->defaults;
    for (const auto& [k, v] : params) {
        if (!p.count(k)) throw SchemaError("model " + name + " has no parameter '" + k + "'");
        if (!std::isfinite(v)) throw SchemaError("parameter '" + k + "' is not finite");
        p[k] = v;
    }
    if (const std::string why = violation(name, p); !why.empty()) throw SchemaError(name + ": " + why);
    if (it->kind == "sphere") return make_sphere();
    if (it->kind == "hyperbolic+") return make_hyperbolic(1);
    if (it->kind == "hyperbolic-") return make_hyperbolic(-1);
    if (name == "CornerPos") return make_type_a(kCornerPos, p);
    if (name == "CornerInd") return make_type_a(kCornerInd, p);
    if (name == "LineL") return make_type_a(line_l(p.at("c")), p);
    const auto fc = family_constants(name, p);
    if (!fc) throw std::logic_error("factory " + name + " has no constant parametrization");
    return fc->type_b ? make_type_b(fc->constants, p) : make_type_a(fc->constants, p);
}

SurfaceModel load_model_json(const std::string& document) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(document);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("model document must be an object");
    for (const auto& [k, v] : j.items())
        if (k != "kind" && k != "Gamma" && k != "C" && k != "params")
            throw SchemaError("unexpected field '" + k + "'");
    if (!j.contains("kind") || !j["kind"].is_string()) throw SchemaError("missing string field 'kind'");
    const std::string kind = j["kind"];
    Params params;
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw SchemaError("'params' must be an object");
        for (const auto& [k, v] : j["params"].items()) {
            if (!v.is_number()) throw SchemaError("param '" + k + "' must be a number");
            params[k] = v.get<double>();
        }
    }
    auto constants = [&](const char* field) {
        if (!j.contains(field) || !j[field].is_object())
            throw SchemaError(std::string("kind ") + kind + " needs an object field '" + field + "'");
        const json& o = j[field];
        Consts c{};
        for (int i = 0; i < 6; ++i) {
            const char* key = kChristoffelKeys[i];
            if (!o.contains(key) || !o[key].is_number())
                throw SchemaError(std::string(field) + " is missing numeric key '" + key + "'");
            c[i] = o[key].get<double>();
        }
        for (const auto& [k, v] : o.items())
            if (std::find(kChristoffelKeys.begin(), kChristoffelKeys.end(), k) == kChristoffelKeys.end())
                throw SchemaError(std::string(field) + " has unexpected key '" + k + "'");
        return c;
    };
    const bool has_a = j.contains("Gamma"), has_b = j.contains("C");
    if (kind == "typeA") {
        if (has_b) throw SchemaError("typeA takes 'Gamma', not 'C'");
        return make_type_a(constants("Gamma"), params);
    }
    if (kind == "typeB") {
        if (has_a) throw SchemaError("typeB takes 'C', not 'Gamma'");
        return make_type_b(constants("C"), params);
    }
    if (has_a || has_b) throw SchemaError("kind " + kind + " takes no Christoffel constants");
    if (kind == "sphere") return make_sphere();
    if (kind == "hyperbolic+") return make_hyperbolic(1);
    if (kind == "hyperbolic-") return make_hyperbolic(-1);
    throw SchemaError("unknown kind '" + kind + "'");
}

// ---- catalog ----

namespace {

struct Spec {
    std::string family;
    Params params;
    std::string classified;  // empty: same as family
    int kdim;
    std::string kcite;
    std::vector<ExpectedSpace> expected;
    std::optional<std::pair<double, double>> inv = {};
    std::optional<ExtensionCase> ext = {};
    std::string xref = {};
};

std::string entry_name(const std::string& family, const Params& p) {
    if (p.empty()) return family;
    std::string s = family + "{";
    bool first = true;
    for (const auto& [k, v] : p) {
        if (!first) s += ",";
        first = false;
        s += k + "=" + format_number(v);
    }
    return s + "}";
}

// e * (basis...) with e a common factor, as canonical text.
std::vector<std::string> times(const std::string& e, const std::vector<std::string>& fs) {
    std::vector<std::string> out;
    const ClosedForm E = parse_closed_form(e);
    for (const auto& f : fs) out.push_back(to_string(E * parse_closed_form(f)));
    return out;
}

std::vector<Spec> specs() {
    using V = std::vector<std::string>;
    std::vector<Spec> s;
    // Type A, rank-1 Ricci
    s.push_back({"M1", {}, "", 4, "Def 3.1",
                 {{-1, {"exp(-1*x1) * exp(1*x2)", "exp(1*x2)", "x2 * exp(1*x2)"}, "§3 Case 1"},
                  {3, {"exp(3*x2)", "exp(-1*x2)"}, "§3 Case 1"},
                  {-2, {"exp(1*x2) * cos(1*x2)", "exp(1*x2) * sin(1*x2)"}, "§3 Case 1"},
                  {0, {"1", "exp(2*x2)"}, "§3 Case 1"}},
                 {}, ExtensionCase{3, "exp(3*x2)", false, "§6.3"}});
    s.push_back({"M2", {{"c", 1}}, "", 4, "Def 3.1",
                 {{-1, {"exp(1*x2)", "exp(2*x2)", "exp(-1*x1) * exp(1*x2)"}, "§3 Case 2"},
                  {-9.0 / 8, {"exp(1.5*x2)", "x2 * exp(1.5*x2)"}, "§3 Case 2"},
                  {2, {"exp(4*x2)", "exp(-1*x2)"}, "§3 Case 2"}},
                 {}, {}, "M3{c=1}"});
    s.push_back({"M2", {{"c", 2}}, "", 4, "Def 3.1",
                 {{-1, {"exp(2*x2)", "exp(3*x2)", "exp(-1*x1) * exp(2*x2)"}, "§3 Case 2"},
                  {-25.0 / 24, {"exp(2.5*x2)", "x2 * exp(2.5*x2)"}, "§3 Case 2"}},
                 {}, {}, "M3{c=2}"});
    s.push_back({"M3", {{"c", 1}}, "", 4, "Def 3.1",
                 {{-1, {"exp(1*x2)", "x1 * exp(1*x2)", "exp(2*x2)"}, "§3 Case 3"},
                  {-9.0 / 8, {"exp(1.5*x2)", "x2 * exp(1.5*x2)"}, "§3 Case 3"},
                  {2, {"exp(4*x2)", "exp(-1*x2)"}, "§3 Case 3"}},
                 {}, {}, "M2{c=1}"});
    s.push_back({"M3", {{"c", 2}}, "", 4, "Def 3.1",
                 {{-1, {"exp(2*x2)", "x1 * exp(2*x2)", "exp(3*x2)"}, "§3 Case 3"},
                  {-25.0 / 24, {"exp(2.5*x2)", "x2 * exp(2.5*x2)"}, "§3 Case 3"}},
                 {}, {}, "M2{c=2}"});
    s.push_back({"M4", {{"c", 1}}, "", 4, "Def 3.1",
                 {{-1, {"exp(1*x2)", "x2 * exp(1*x2)", "2 * x1 * exp(1*x2) + (x2)^2 * exp(1*x2)"}, "§3 Case 4"},
                  {3, {"exp(3*x2)", "exp(-1*x2)"}, "§3 Case 4"}},
                 {}, {}, "M1"});
    s.push_back({"M5", {{"c", 1}}, "", 4, "Def 3.1",
                 {{-1, {"exp(-1*x1) * exp(1*x2)", "exp(1*x2) * cos(1*x2)", "exp(1*x2) * sin(1*x2)"}, "§3 Case 5"},
                  {-0.5, {"exp(1*x2)", "x2 * exp(1*x2)"}, "§3 Case 5"},
                  {4, {"exp(4*x2)", "exp(-2*x2)"}, "§3 Case 5"}}});
    s.push_back({"M5", {{"c", 0}}, "", 4, "Def 3.1",
                 {{-1, {"exp(-1*x1)", "cos(1*x2)", "sin(1*x2)"}, "§3 Case 5"},
                  {0, {"1", "x2"}, "§3 Case 5"}}});

    // flat Type A: E(mu) independent of mu
    const std::vector<std::pair<std::string, V>> thga = {
        {"FlatA0", {"1", "x1", "x2"}},
        {"FlatA1", {"1", "exp(1*x1)", "x2 * exp(1*x1)"}},
        {"FlatA2", {"1", "exp(-1*x1)", "exp(1*x2)"}},
        {"FlatA3", {"1", "x1", "exp(1*x2)"}},
        {"FlatA4", {"1", "x2", "2 * x1 + (x2)^2"}},
        {"FlatA5", {"1", "exp(1*x1) * cos(1*x2)", "exp(1*x1) * sin(1*x2)"}},
    };
    for (const auto& [name, basis] : thga)
        s.push_back({name, {}, "", 6, "THGA", {{-1, basis, "THGA"}, {1.5, basis, "THGA"}}});

    // flat Type B
    const std::vector<std::tuple<std::string, Params, V>> thg = {
        {"FlatB0", {}, {"1", "x1", "x2"}},
        {"FlatB1", {{"c", 2}}, {"1", "(x1)^2", "(x1)^2 * x2"}},
        {"FlatB2", {}, {"1", "x2", "(x1)^2 + (x2)^2"}},
        {"FlatB3", {{"c", 1.5}}, {"1", "(x1)^2.5", "x2"}},
        {"FlatB4", {}, {"1", "x1", "x1 * log(x1)^1 + x2"}},
        {"FlatB5", {}, {"1", "x2", "(x1)^2 - (x2)^2"}},
        {"FlatB6", {}, {"1", "(x1)^-1", "log(x1)^1 + (x1)^-1 * x2"}},
    };
    for (const auto& [name, p, basis] : thg)
        s.push_back({name, p, "", 6, "THG", {{-1, basis, "THG"}, {1.5, basis, "THG"}}});

    // Type B, Killing dim 4
    s.push_back({"Z1", {{"kappa", 1}}, "", 4, "Def 3.6",
                 {{-1, {"x1", "(x1)^2", "x1 * x2 + (x1)^2 * log(x1)^1"}, "Thm 3.8(1)"},
                  {0, {"(x1)^3", "1"}, "Thm 3.8(1a)"},
                  {-9.0 / 8, {"(x1)^1.5", "(x1)^1.5 * log(x1)^1"}, "Thm 3.8(1b)"},
                  {2, {"(x1)^4", "(x1)^-1"}, "Thm 3.8(1a)"}},
                 {}, {}, "M2"});
    s.push_back({"Z2", {{"kappa", 1}, {"theta", 2}}, "", 4, "Def 3.6",
                 {{-1, {"x1", "x1 * x2", "(x1)^3"}, "Thm 3.8(2)"},
                  {0, {"(x1)^4", "1"}, "Thm 3.8(2a)"},
                  {-4.0 / 3, {"(x1)^2", "(x1)^2 * log(x1)^1"}, "Thm 3.8(2b)"}},
                 {}, {}, "M2"});
    s.push_back({"Z3", {{"kappa", 2}}, "", 4, "Def 3.6",
                 {{-1, {"(x1)^2", "(x1)^2 * x2", "(x1)^2 * log(x1)^1"}, "Thm 3.8(3)"},
                  {0, {"(x1)^4", "1"}, "Thm 3.8(3)"},
                  {-0.75, {"(x1)^3", "x1"}, "Thm 3.8(3)"}},
                 {}, {}, "M1"});

    // Type B and C, Killing dim 3
    const V n1 = {"(x1)^-0.5", "(x1)^-0.5 * x2"};
    for (const char* n : {"N1+", "N1-"})
        s.push_back({n, {}, "", 3, "Def 4.1", {{-0.25, n1, "Thm 4.4(4)"}, {0, {"1"}, "Thm 4.4(1)"}, {-1, {}, "Thm 4.4"}}});
    s.push_back({"N2", {{"c", 1}}, "", 3, "Def 4.1",
                 {{0, {"1"}, "Thm 4.4(1)"}, {-1, {}, "Thm 4.4"}, {0.5, {}, "Thm 4.4"}}});
    s.push_back({"N3", {}, "", 3, "Def 4.1",
                 {{-1, times("(x1)^-1", {"1", "x2", "(x2)^2 - (x1)^2"}), "Thm 4.4(2)"}, {0, {"1"}, "Thm 4.4(1)"}}});
    s.push_back({"N4", {}, "", 3, "Def 4.1",
                 {{-1, times("(x1)^-1", {"1", "x2", "(x2)^2 + (x1)^2"}), "Thm 4.4(2)"}, {0, {"1"}, "Thm 4.4(1)"}},
                 {}, ExtensionCase{-1, "(x1)^-1", false, "§6.3"}});
    s.push_back({"S2", {}, "", 3, "Def 4.5",
                 {{-1, {"sin(1*x1)", "cos(1*x1) * cos(1*x2)", "cos(1*x1) * sin(1*x2)"}, "Thm 4.7"},
                  {0, {"1"}, "Thm 4.7"},
                  {2, {}, "Thm 4.7"}}});
    s.push_back({"H2+", {}, "", 3, "Def 4.5",
                 {{-1, {"exp(1*x1)", "x2 * exp(1*x1)", "exp(-1*x1) + (x2)^2 * exp(1*x1)"}, "Thm 4.7"},
                  {0, {"1"}, "Thm 4.7"}}});
    s.push_back({"H2-", {}, "", 3, "Def 4.5",
                 {{-1, {"exp(1*x1)", "x2 * exp(1*x1)", "exp(-1*x1) - (x2)^2 * exp(1*x1)"}, "Thm 4.7"},
                  {0, {"1"}, "Thm 4.7"}}});

    // Type A, rank-2 Ricci
    s.push_back({"CornerPos", {}, "M02", 2, "§5.1",
                 {{-1, times("exp(1*x1)", {"1", "x2", "2 * x1 + (x2)^2"}), "§5 Step 1(2)"}, {0, {"1"}, "Thm 1.3"}},
                 std::pair{7.0, 10.0}});
    s.push_back({"CornerInd", {}, "TypeA_Rank2", 2, "§5.1",
                 {{-1,
                   times("exp(-2*x1) * exp(-2*x2)",
                         {"1", "x1 - x2", "2 * x1 + (x1)^2 - 2 * x1 * x2 + (x2)^2"}),
                   "§5 Step 1(3)"},
                  {0, {"1"}, "Thm 1.3"}},
                 std::pair{7.0, 10.0}});
    for (double c : {1.0, 2.0, -1.0}) {
        const std::string k = format_number(1 / c - 1);
        s.push_back({"LineL", {{"c", c}}, "TypeA_Rank2", 2, "§5.1",
                     {{-1, {"exp(1*x1)", "exp(1*x2)", "x1 * exp(1*x2) + " + k + " * x2 * exp(1*x2)"}, "§5 Step 1(1)"},
                      {0, {"1"}, "Thm 1.3"}},
                     std::pair{7 - 1 / c, 10 - 4 / c}});
    }
    s.push_back({"M02", {{"u", 2}, {"v", 2}}, "", 2, "§5.1",
                 {{-1, {"exp(0.5*x1)", "exp(2*x1) * exp(3*x2)", "exp(2*x1) * exp(-1*x2)"}, "§5 Step 2"},
                  {0, {"1"}, "Thm 1.3"}}});
    s.push_back({"M20", {{"u", 1}, {"v", 1}}, "", 2, "§5.1",
                 {{-1, {"exp(-1*x1)", "exp(1*x1) * exp(2*x2)", "exp(1*x1) * exp(-1*x2)"}, "§5 Step 3"},
                  {0, {"1"}, "Thm 1.3"}}});
    s.push_back({"M11^", {{"u", 1}, {"v", 2}}, "", 2, "§5.1",
                 {{-1, {"exp(1*x2)", "exp(1*x1) * exp(2*x2)", "exp(1*x1) * exp(-1*x2)"}, "§5 Step 4.3"},
                  {0, {"1"}, "Thm 1.3"}}});

    // Type B, Killing dim 2
    s.push_back({"Q_c", {{"c", 2}}, "", 2, "Thm 5.5",
                 {{0, {"1"}, "Thm 5.5(3)"}, {-1, {"1"}, "Thm 5.5(3)"}, {2, {"1"}, "Thm 5.5(3)"}}});
    s.push_back({"P0+", {{"c", 1}}, "", 2, "Thm 5.5", {{0, {"1"}, "Thm 5.6"}}});
    s.push_back({"P0-", {{"c", 1}}, "", 2, "Thm 5.5", {{0, {"1"}, "Thm 5.6"}}});
    s.push_back({"P0+", {{"c", 3 / std::sqrt(2.0)}}, "", 3, "Thm 5.5", {{0, {"1"}, "Thm 5.6"}}, {}, {}, "N2{c=0.5}"});
    s.push_back({"Pa+", {{"a", 1}, {"c", 1}}, "", 2, "Thm 5.5", {{0, {"1"}, "Thm 5.6"}}});
    s.push_back({"Soliton1", Params{}, "", 2, "Thm 5.6", {{0, {"1", "log(x1)^1"}, "Thm 5.6(1)"}}});
    s.push_back({"Soliton2", Params{}, "", 2, "Thm 5.6", {{0, {"1", "x2"}, "Thm 5.6(2)"}}});
    s.push_back({"Soliton3", Params{}, "", 2, "Thm 5.6", {{0, {"1", "x1 + x2"}, "Thm 5.6(3)"}}});
    s.push_back({"Soliton4", Params{}, "", 2, "Thm 5.6", {{0, {"1", "(x1)^2"}, "Thm 5.6(4)"}}});
    s.push_back({"ProjFlat+", {{"c", 1}}, "", 2, "Thm 5.7",
                 {{-1, times("x1", {"1", "x2", "(x1)^2 + (x2)^2"}), "Thm 5.7"}, {0, {"1"}, "Thm 1.3"}}});
    s.push_back({"ProjFlat-", {{"c", 2}}, "", 2, "Thm 5.7",
                 {{-1, times("(x1)^2", {"1", "x2", "(x2)^2 - (x1)^2"}), "Thm 5.7"}, {0, {"1"}, "Thm 1.3"}}});
    s.push_back({"ProjFlat+", {{"c", -2}}, "", 2, "Thm 5.7",
                 {{-1, times("(x1)^-2", {"1", "x2", "(x2)^2 + (x1)^2"}), "Thm 5.7"}, {0, {"1"}, "Thm 1.3"}}});
    s.push_back({"SingleExp1", Params{}, "", 2, "Thm 5.9", {{-1, {"(x1)^0.7"}, "Thm 5.9(1)"}}});
    s.push_back({"SingleExp2+", {{"b", 1}, {"d", 0.5}}, "", 2, "Thm 5.9", {{-1, {"(x1)^1.5"}, "Thm 5.9(2)"}}});
    s.push_back({"SingleExp2-", {{"b", 1}, {"d", 0.5}}, "", 2, "Thm 5.9", {{-1, {"(x1)^-0.5"}, "Thm 5.9(2)"}}});
    s.push_back({"SpecialMuQuad+", {{"c", 1}}, "", 2, "Thm 5.10",
                 {{-11.0 / 12, times("(x1)^-5.5", {"1", "x2 - 2 * x1"}), "Thm 5.10(1)"}}});
    s.push_back({"SpecialMuQuad-", {{"c", 1}}, "", 2, "Thm 5.10",
                 {{-1.25, times("(x1)^2.5", {"1", "x2 - 2 * x1"}), "Thm 5.10(1)"}}});
    s.push_back({"SpecialMuLin+", {{"c", 1}}, "", 2, "Thm 5.10", {{1, times("(x1)^2", {"1", "x2"}), "Thm 5.10(2)"}}});
    s.push_back({"SpecialMuLin-", {{"c", 2}}, "", 2, "Thm 5.10", {{1.5, times("(x1)^3", {"1", "x2"}), "Thm 5.10(2)"}}});
    s.push_back({"SpecialMuLin+", {{"c", -1.5}}, "N1-", 3, "Thm 5.10(2)", {{-0.25, n1, "Thm 5.10(2)"}}, {}, {}, "N1-"});
    s.push_back({"PowerFamily+", {{"C111", 0}, {"C112", 1}, {"C122", 0}}, "", 2, "Thm 5.10",
                 {{3, {"(x1)^3"}, "Thm 5.10"}}});
    s.push_back({"Kahler", {{"c", 1}}, "", 2, "Thm 6.8", {{3, {"(x1)^3"}, "Thm 6.8"}},
                 {}, ExtensionCase{3, "(x1)^3", true, "Thm 6.8"}});
    s.push_back({"Kahler", {{"c", 2}}, "", 2, "Thm 6.8", {{5, {"(x1)^5"}, "Thm 6.8"}}});
    return s;
}

}  // namespace

std::vector<RegistryEntry> build_registry() {
    std::vector<RegistryEntry> out;
    for (auto& sp : specs()) {
        const auto& fs = model_factories();
        const auto f = std::find_if(fs.begin(), fs.end(), [&](const ModelFactory& m) { return m.name == sp.family; });
        Params full = f->defaults;
        for (const auto& [k, v] : sp.params) full[k] = v;
        std::optional<double> psi, Psi;
        if (sp.inv) {
            psi = sp.inv->first;
            Psi = sp.inv->second;
        }
        RegistryEntry e{entry_name(sp.family, sp.params),
                        ModelLabel{sp.family, full, {}, ""},
                        load_model(sp.family, sp.params),
                        sp.classified.empty() ? sp.family : sp.classified,
                        std::move(sp.expected),
                        sp.kdim,
                        sp.kcite,
                        psi,
                        Psi,
                        sp.ext,
                        sp.xref};
        out.push_back(std::move(e));
    }
    return out;
}

void self_check(const std::vector<RegistryEntry>& entries) {
    for (const auto& e : entries)
        for (const auto& x : e.expected)
            for (const auto& text : x.basis) {
                double r = 0.0;
                bool ok = false;
                try {
                    ok = residual_ok(e.model, x.mu, parse_closed_form(text), &r);
                } catch (const std::exception& ex) {
                    throw RegistryError(e.name + " [" + x.cite + "]: " + text + ": " + ex.what());
                }
                if (!ok) {
                    std::ostringstream os;
                    os << e.name << " [" << x.cite << "]: " << text << " has residual " << format_number(r)
                       << " at mu = " << format_number(x.mu);
                    throw RegistryError(os.str());
                }
            }
}

const std::vector<RegistryEntry>& registry() {
    static const std::vector<RegistryEntry> r = [] {
        auto e = build_registry();
        self_check(e);
        return e;
    }();
    return r;
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace affqe
