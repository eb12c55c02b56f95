#include "affqe/extension.hpp"
#include "affqe/killing.hpp"
#include "affqe/registry.hpp"

#include <nlohmann/json.hpp>

#include <fnmatch.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>

namespace affqe {

namespace {

std::string mu_tag(double mu) { return "mu=" + format_number(mu); }

std::vector<ClosedForm> parse_all(const std::vector<std::string>& texts) {
    std::vector<ClosedForm> out;
    for (const auto& t : texts) out.push_back(parse_closed_form(t));
    return out;
}

int rank_of(const std::vector<ClosedForm>& fs, Domain d) { return fs.empty() ? 0 : numeric_rank(fs, d); }

template <class F>
Check guarded(std::string name, std::string cite, F&& body) {
    Check c{std::move(name), false, 0.0, std::move(cite), ""};
    try {
        body(c);
    } catch (const std::exception& e) {
        c.pass = false;
        c.detail = std::string("error: ") + e.what();
    }
    return c;
}

void basis_checks(const RegistryEntry& e, std::vector<Check>& out) {
    const Domain dom = e.model.domain();
    for (const auto& x : e.expected) {
        out.push_back(guarded("basis " + mu_tag(x.mu), x.cite, [&](Check& c) {
            const auto fs = parse_all(x.basis);
            bool ok = true;
            for (const auto& f : fs) {
                double r = 0.0;
                ok = residual_ok(e.model, x.mu, f, &r) && ok;
                c.residual = std::max(c.residual, r);
            }
            const int rank = rank_of(fs, dom);
            c.pass = ok && rank == static_cast<int>(fs.size());
            c.detail = "rank " + std::to_string(rank) + " of " + std::to_string(fs.size());
        }));
        out.push_back(guarded("solver " + mu_tag(x.mu), x.cite, [&](Check& c) {
            const auto fs = parse_all(x.basis);
            const SolutionBasis sol = solve(e.model, x.mu);
            auto all = fs;
            all.insert(all.end(), sol.basis.begin(), sol.basis.end());
            const int re = rank_of(fs, dom), rs = rank_of(sol.basis, dom), ru = rank_of(all, dom);
            c.residual = sol.residual;
            c.pass = re == rs && ru == re && rs == static_cast<int>(sol.basis.size());
            c.detail = "solver dim " + std::to_string(rs) + ", expected " + std::to_string(re) + ", joint " +
                       std::to_string(ru);
        }));
    }
}

// dim E(mu) <= 3; non-flat: dim E(-1) != 2 and dim E(-1) = 3 iff strongly
// projectively flat; that plus rank-2 Ricci forces E(0) = {1}, E(mu) = 0 else.
Check global_check(const RegistryEntry& e) {
    return guarded("global_invariants", "Thm 1.2", [&](Check& c) {
        const SurfaceModel& m = e.model;
        const bool flat = is_flat(m), spf = is_strongly_projectively_flat(m);
        std::map<double, int> dims;
        for (double mu : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0}) dims[mu] = eigenspace_dim(m, mu);
        std::vector<std::string> bad;
        for (const auto& [mu, d] : dims)
            if (d > 3) bad.push_back("dim E(" + format_number(mu) + ") = " + std::to_string(d));
        if (!flat) {
            if (dims[-1.0] == 2) bad.push_back("dim E(-1) = 2");
            if ((dims[-1.0] == 3) != spf) bad.push_back(spf ? "projectively flat but dim E(-1) < 3" : "dim E(-1) = 3 without projective flatness");
            const Mat2 r = ricci(m, generic_points(m)[1]).rho;
            const bool rank2 = std::abs(r[0][0] * r[1][1] - r[0][1] * r[1][0]) > 1e-9;
            if (spf && rank2) {
                if (dims[0.0] != 1) bad.push_back("dim E(0) != 1");
                for (const auto& [mu, d] : dims)
                    if (mu != 0.0 && mu != -1.0 && d != 0) bad.push_back("dim E(" + format_number(mu) + ") != 0");
            }
        }
        c.pass = bad.empty();
        c.residual = static_cast<double>(bad.size());
        std::string d;
        for (const auto& [mu, k] : dims) d += (d.empty() ? "" : " ") + format_number(mu) + ":" + std::to_string(k);
        for (const auto& b : bad) d += "; " + b;
        c.detail = d;
    });
}

EntryReport verify_one(const RegistryEntry& e) {
    const auto t0 = std::chrono::steady_clock::now();
    EntryReport r;
    r.label = e.name;
    basis_checks(e, r.checks);
    r.checks.push_back(guarded("killing_dim", e.killing_cite, [&](Check& c) {
        const int k = killing_dimension(e.model);
        c.pass = k == e.expected_killing_dim;
        c.residual = std::abs(k - e.expected_killing_dim);
        c.detail = "computed " + std::to_string(k) + ", expected " + std::to_string(e.expected_killing_dim);
    }));
    r.checks.push_back(guarded("classifier", e.killing_cite, [&](Check& c) {
        const ModelLabel l = classify(e.model);
        c.pass = l.family == e.classified_as;
        c.residual = c.pass ? 0.0 : 1.0;
        c.detail = to_string(l);
    }));
    r.checks.push_back(global_check(e));
    if (e.psi && e.Psi)
        r.checks.push_back(guarded("psi_Psi", "Thm 5.1", [&](Check& c) {
            const InvariantSignature s = invariants(e.model);
            if (!s.psi || !s.Psi) throw std::runtime_error("psi/Psi undefined");
            c.residual = std::max(std::abs(*s.psi - *e.psi), std::abs(*s.Psi - *e.Psi));
            c.pass = c.residual < 1e-9 * std::max(1.0, std::abs(*e.Psi));
            c.detail = "(" + format_number(*s.psi) + ", " + format_number(*s.Psi) + ")";
        }));
    if (e.extension) {
        const ExtensionCase& x = *e.extension;
        const ClosedForm f = parse_closed_form(x.f);
        for (const bool with_phi : {false, true}) {
            const std::string tag = with_phi ? " phi=ricci" : " phi=zero";
            const ExtensionMetric g = build_extension(e.model, with_phi ? ricci_phi(e.model) : SymmetricField{});
            r.checks.push_back(guarded("isotropic_qe" + tag, x.cite, [&](Check& c) {
                const IsotropicCheck ic = verify_isotropic_qe(g, f, x.mu);
                c.residual = ic.residual_qe;
                c.pass = ic.residual_qe < 1e-5 && ic.residual_null < 1e-8;
                c.detail = "null " + format_number(ic.residual_null);
            }));
            if (x.walker)
                r.checks.push_back(guarded("walker_kahler" + tag, x.cite, [&](Check& c) {
                    const WalkerKahlerCheck w = walker_kahler_check(g);
                    c.residual = std::max(w.nabla_J_residual, w.J_squared_residual);
                    c.pass = c.residual < 1e-5;
                    c.detail = "nabla J " + format_number(w.nabla_J_residual);
                }));
        }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

double rounded(double v) { return std::isfinite(v) ? std::stod(format_number(v)) : v; }

}  // namespace

bool EntryReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

int Report::passed() const {
    return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const EntryReport& e) { return e.pass(); }));
}

int Report::failed() const { return static_cast<int>(entries.size()) - passed(); }

std::string Report::to_json(bool with_timing) const {
    using nlohmann::json;
    json es = json::array();
    for (const auto& e : entries) {
        json cs = json::array();
        for (const auto& c : e.checks)
            cs.push_back({{"name", c.name}, {"pass", c.pass}, {"residual", rounded(c.residual)}, {"cite", c.cite},
                          {"detail", c.detail}});
        json je = {{"label", e.label}, {"pass", e.pass()}, {"checks", cs}};
        if (with_timing) je["seconds"] = rounded(e.seconds);
        es.push_back(je);
    }
    json summary = {{"entries", entries.size()}, {"passed", passed()}, {"failed", failed()}, {"warnings", warnings}};
    return json{{"entries", es}, {"summary", summary}}.dump(2);
}

Report verify_entries(const std::vector<RegistryEntry>& entries, const std::string& only) {
    Report rep;
    std::vector<const RegistryEntry*> picked;
    for (const auto& e : entries)
        if (only.empty() || fnmatch(only.c_str(), e.name.c_str(), 0) == 0) picked.push_back(&e);
    if (picked.empty() && !only.empty()) rep.warnings.push_back("no registry entry matches '" + only + "'");
    std::vector<std::future<EntryReport>> jobs;
    for (const auto* e : picked) jobs.push_back(std::async(std::launch::async, [e] { return verify_one(*e); }));
    for (auto& j : jobs) rep.entries.push_back(j.get());
    std::sort(rep.entries.begin(), rep.entries.end(),
              [](const EntryReport& a, const EntryReport& b) { return a.label < b.label; });
    return rep;
}

Report verify_paper(const std::string& only) { return verify_entries(registry(), only); }

}  // namespace affqe
