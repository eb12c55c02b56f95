#include "affqe/registry.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

using namespace affqe;
using nlohmann::json;

namespace {

// +0.1 on the coefficient of the first term.
std::string perturb(const std::string& text) {
    auto terms = parse_closed_form(text).terms();
    terms.front().coeff += 0.1;
    return to_string(ClosedForm(terms));
}

std::vector<RegistryEntry> with_fault(const std::string& name, double mu, size_t element) {
    auto es = build_registry();
    for (auto& e : es)
        if (e.name == name)
            for (auto& x : e.expected)
                if (x.mu == mu) x.basis.at(element) = perturb(x.basis.at(element));
    return es;
}

// Numbers and free-text details blanked out; everything else kept.
json skeleton(const json& j) {
    if (j.is_number()) return "<number>";
    if (j.is_array()) {
        json out = json::array();
        for (const auto& v : j) out.push_back(skeleton(v));
        return out;
    }
    if (j.is_object()) {
        json out = json::object();
        for (const auto& [k, v] : j.items()) out[k] = k == "detail" ? json("<text>") : skeleton(v);
        return out;
    }
    return j;
}

const std::string kMinimal = R"({"kind":"typeB","C":{"111":-1,"112":0,"121":0,"122":-1,"221":-1,"222":0}})";

}  // namespace

TEST(LoadModel, ByNameWithParameter) {
    const SurfaceModel m = load_model("M5", {{"c", 1}});
    EXPECT_EQ(m.family(), Family::TypeA);
    const ChristoffelConstants want{-1, 0, 1, 0, -1, 2};
    EXPECT_EQ(*m.constants(), want);
    EXPECT_EQ(m.param("c"), 1.0);
}

TEST(LoadModel, JsonTypeB) {
    const SurfaceModel m = load_model_json(kMinimal);
    EXPECT_EQ(m.family(), Family::TypeB);
    EXPECT_EQ(m.domain(), Domain::RightHalf);
    EXPECT_EQ(classify(m).family, "N3");
}

TEST(LoadModel, JsonOtherKinds) {
    EXPECT_EQ(load_model_json(R"({"kind":"sphere"})").family(), Family::TypeC_Sphere);
    EXPECT_EQ(load_model_json(R"({"kind":"hyperbolic-"})").param("sign"), -1.0);
    const auto a = load_model_json(
        R"({"kind":"typeA","Gamma":{"111":-1,"112":0,"121":1,"122":0,"221":0,"222":2},"params":{"tag":3}})");
    EXPECT_EQ(classify(a).family, "M1");
    EXPECT_EQ(a.param("tag"), 3.0);
}

TEST(LoadModel, SphereByName) { EXPECT_EQ(load_model("S2").domain(), Domain::SphereChart); }

TEST(LoadModel, UnknownNameSuggests) {
    try {
        load_model("Kahlr");
        FAIL();
    } catch (const UnknownModelError& e) {
        EXPECT_EQ(e.suggestion(), "Kahler");
        EXPECT_NE(std::string(e.what()).find("did you mean 'Kahler'"), std::string::npos);
    }
    try {
        load_model("q_C");
        FAIL();
    } catch (const UnknownModelError& e) {
        EXPECT_EQ(e.suggestion(), "Q_c");
    }
}

TEST(LoadModel, ParameterErrors) {
    EXPECT_THROW(load_model("M5", {{"kappa", 1}}), SchemaError);
    EXPECT_THROW(load_model("M11", {{"u", 0.5}, {"v", 1}}), SchemaError);
    EXPECT_THROW(load_model("P0+", {{"c", -1}}), SchemaError);
    EXPECT_THROW(load_model("LineL", {{"c", 0}}), SchemaError);
}

TEST(LoadModel, SchemaViolations) {
    for (const char* bad : {
             "not json",
             "[]",
             R"({"C":{"111":0,"112":0,"121":0,"122":0,"221":0,"222":0}})",
             R"({"kind":"typeB","C":{"111":0,"112":0,"121":0,"122":0,"221":0}})",
             R"({"kind":"typeB","C":{"111":0,"112":0,"121":0,"122":0,"221":0,"222":0,"211":1}})",
             R"({"kind":"typeB","C":{"111":"x","112":0,"121":0,"122":0,"221":0,"222":0}})",
             R"({"kind":"typeB","Gamma":{"111":0,"112":0,"121":0,"122":0,"221":0,"222":0}})",
             R"({"kind":"typeC"})",
             R"({"kind":"sphere","C":{}})",
             R"({"kind":"sphere","extra":1})",
             R"({"kind":"sphere","params":{"a":"b"}})",
         })
        EXPECT_THROW(load_model_json(bad), SchemaError) << bad;
}

TEST(LoadModel, EveryFactoryBuilds) {
    for (const auto& f : model_factories()) EXPECT_NO_THROW(load_model(f.name)) << f.name;
}

TEST(Registry, SelfCheckedAndLargeEnough) {
    const auto& r = registry();
    size_t triples = 0;
    std::set<std::string> names;
    for (const auto& e : r) {
        triples += e.expected.size();
        EXPECT_TRUE(names.insert(e.name).second) << "duplicate " << e.name;
        EXPECT_FALSE(e.killing_cite.empty());
        for (const auto& x : e.expected) EXPECT_FALSE(x.cite.empty());
    }
    EXPECT_GE(triples, 40u);
}

TEST(Registry, Deterministic) {
    const auto a = build_registry(), b = build_registry();
    ASSERT_EQ(a.size(), b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].name, b[i].name);
        ASSERT_EQ(a[i].expected.size(), b[i].expected.size());
        for (size_t k = 0; k < a[i].expected.size(); ++k) EXPECT_EQ(a[i].expected[k].basis, b[i].expected[k].basis);
    }
}

TEST(Registry, SelfCheckNamesCitation) {
    const auto es = with_fault("N4", -1, 2);
    try {
        self_check(es);
        FAIL();
    } catch (const RegistryError& e) {
        const std::string w = e.what();
        EXPECT_NE(w.find("N4"), std::string::npos) << w;
        EXPECT_NE(w.find("Thm 4.4(2)"), std::string::npos) << w;
    }
}

TEST(VerifyPaper, AllPass) {
    const Report r = verify_paper();
    EXPECT_EQ(r.entries.size(), registry().size());
    for (const auto& e : r.entries)
        for (const auto& c : e.checks) EXPECT_TRUE(c.pass) << e.label << " " << c.name << ": " << c.detail;
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(std::is_sorted(r.entries.begin(), r.entries.end(),
                               [](const EntryReport& a, const EntryReport& b) { return a.label < b.label; }));
}

TEST(VerifyPaper, FaultInjectionFailsOnlyThatEntry) {
    const Report r = verify_entries(with_fault("N4", -1, 2));
    EXPECT_EQ(r.failed(), 1);
    for (const auto& e : r.entries) {
        if (e.label != "N4") {
            EXPECT_TRUE(e.pass()) << e.label;
            continue;
        }
        EXPECT_FALSE(e.pass());
        bool seen = false;
        for (const auto& c : e.checks)
            if (c.name == "basis mu=-1") {
                seen = true;
                EXPECT_FALSE(c.pass);
                EXPECT_GT(c.residual, 1e-3);
            }
        EXPECT_TRUE(seen);
    }
}

TEST(VerifyPaper, FaultInjectionTypeA) {
    const Report r = verify_entries(with_fault("M4{c=1}", -1, 2), "M4*");
    ASSERT_EQ(r.entries.size(), 1u);
    EXPECT_FALSE(r.ok());
}

TEST(VerifyPaper, GlobFilter) {
    const Report r = verify_paper("N[0-9]*");
    std::vector<std::string> labels;
    for (const auto& e : r.entries) labels.push_back(e.label);
    EXPECT_EQ(labels, (std::vector<std::string>{"N1+", "N1-", "N2{c=1}", "N3", "N4"}));
    EXPECT_TRUE(r.warnings.empty());
}

TEST(VerifyPaper, EmptyFilterWarns) {
    const Report r = verify_paper("nonexistent");
    EXPECT_TRUE(r.entries.empty());
    EXPECT_TRUE(r.ok());
    ASSERT_EQ(r.warnings.size(), 1u);
    const json j = json::parse(r.to_json());
    EXPECT_EQ(j["summary"]["entries"], 0);
    EXPECT_EQ(j["summary"]["warnings"].size(), 1u);
}

TEST(VerifyPaper, JsonMatchesGoldenSchema) {
    const json j = json::parse(verify_paper().to_json(false));
    std::ifstream in(std::string(AFFQE_GOLDEN_DIR) + "/verify_paper_schema.json");
    ASSERT_TRUE(in.good());
    const json golden = json::parse(in);
    EXPECT_EQ(skeleton(j), golden);
}

TEST(VerifyPaper, JsonNumbersHaveTwelveDigits) {
    Report r;
    r.entries.push_back({"x", {{"c", true, 1.0 / 3.0, "cite", ""}}, 0.0});
    const json j = json::parse(r.to_json(false));
    EXPECT_EQ(j["entries"][0]["checks"][0]["residual"].dump(), "0.333333333333");
    EXPECT_EQ(format_number(2.0 / 3.0), "0.666666666667");
}

TEST(SolveOutput, RoundTripsThroughParser) {
    for (const auto& e : registry())
        for (const auto& x : e.expected)
            for (const auto& f : solve(e.model, x.mu).basis) {
                const std::string text = to_string(f);
                const ClosedForm back = parse_closed_form(text);
                EXPECT_EQ(back, f) << e.name << ": " << text;
                EXPECT_EQ(to_string(back), text);
                for (const Point& p : standard_points(e.model)) {
                    const double a = evaluate(f, p, e.model.domain()), b = evaluate(back, p, e.model.domain());
                    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a))) << text;
                }
            }
}
