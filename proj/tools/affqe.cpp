// affqe command-line front end.
#include "affqe/extension.hpp"
#include "affqe/killing.hpp"
#include "affqe/registry.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace affqe;

namespace {

constexpr int kUsage = 2;
constexpr int kFailed = 1;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

const std::string& fmt_ok(bool b) {
    static const std::string y = "yes", n = "no";
    return b ? y : n;
}

std::string num(double v) { return format_number(v); }

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream os;
        os << std::cin.rdbuf();
        return os.str();
    }
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Model selection shared by the per-model subcommands.
struct ModelArgs {
    std::string name;
    std::map<std::string, std::optional<double>> shortcuts{{"c", {}},     {"kappa", {}}, {"theta", {}},
                                                           {"u", {}},     {"v", {}},     {"w", {}},
                                                           {"a", {}},     {"b", {}},     {"d", {}}};
    std::vector<std::string> extra;

    void attach(CLI::App* app) {
        app->add_option("model", name, "family name (see `list`) or a model .json file")->required();
        for (auto& [k, v] : shortcuts) app->add_option("--" + k, v, "family parameter " + k);
        app->add_option("--param", extra, "other family parameter, as name=value");
    }

    Params params() const {
        Params p;
        for (const auto& [k, v] : shortcuts)
            if (v) p[k] = *v;
        for (const auto& kv : extra) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw UsageError("--param expects name=value, got " + kv);
            try {
                p[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
            } catch (const std::exception&) {
                throw UsageError("bad number in --param " + kv);
            }
        }
        return p;
    }

    SurfaceModel load() const {
        const Params p = params();
        if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
            if (!p.empty()) throw UsageError("parameters go inside the JSON document");
            return load_model_json(read_file(name));
        }
        return load_model(name, p);
    }
};

std::string ricci_line(const SurfaceModel& m) {
    const Point p = generic_points(m)[1];
    const RicciData r = ricci(m, p);
    double s = 0.0, a = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            s += std::abs(r.rho_s[i][j]);
            a += std::abs(r.rho_a[i][j]);
        }
    if (s <= 1e-12 && a <= 1e-12) return "zero";
    if (s <= 1e-12) return "skew (rho_s=0)";
    return a <= 1e-12 ? "symmetric" : "mixed (rho_a != 0)";
}

int cmd_info(const ModelArgs& args) {
    const SurfaceModel m = args.load();
    std::cout << "family: " << family_name(m.family()) << "\n";
    std::cout << "domain: " << domain_name(m.domain()) << "\n";
    if (m.constants()) {
        std::cout << "constants:";
        for (int i = 0; i < 6; ++i) std::cout << " " << kChristoffelKeys[i] << "=" << num((*m.constants())[i]);
        std::cout << "\n";
    }
    std::cout << "label: " << to_string(classify(m)) << "\n";
    std::cout << "ricci: " << ricci_line(m) << "\n";
    std::cout << "flat: " << fmt_ok(is_flat(m)) << "\n";
    std::cout << "strongly_projectively_flat: " << fmt_ok(is_strongly_projectively_flat(m)) << "\n";
    std::cout << "kahler: " << fmt_ok(kahler_structure(m).has_value()) << "\n";
    std::cout << "killing_dim: " << killing_dimension(m) << "\n";
    try {
        const InvariantSignature s = invariants(m);
        std::cout << "ricci_rank: " << s.ricci_rank << "\n";
        std::cout << "ricci_signature: " << signature_name(s.ricci_signature) << "\n";
        if (s.psi && s.Psi) std::cout << "psi: " << num(*s.psi) << "\nPsi: " << num(*s.Psi) << "\n";
        if (s.alpha_X) std::cout << "alpha_X: " << num(*s.alpha_X) << "\n";
        if (s.eps_X) std::cout << "eps_X: " << *s.eps_X << "\n";
    } catch (const std::exception& e) {
        std::cout << "invariants: unavailable (" << e.what() << ")\n";
    }
    return 0;
}

int cmd_solve(const ModelArgs& args, double mu) {
    const SurfaceModel m = args.load();
    const SolutionBasis s = solve(m, mu);
    std::cout << "# mu=" << num(mu) << " dim=" << s.basis.size() << " method=" << method_name(s.method)
              << " residual=" << num(s.residual) << "\n";
    for (const auto& n : s.notes) std::cout << "# " << n << "\n";
    for (const auto& f : s.basis) std::cout << to_string(f) << "\n";
    return 0;
}

int cmd_special(const ModelArgs& args) {
    const SurfaceModel m = args.load();
    if (m.family() != Family::TypeB) throw UsageError("special-mu needs a Type B model");
    for (const auto& e : special_eigenvalues(m))
        std::cout << "mu=" << num(e.mu) << " dim=" << e.dim << (e.note.empty() ? "" : "  # " + e.note) << "\n";
    return 0;
}

int cmd_extend(const ModelArgs& args, double mu, const std::string& phi, const std::string& f_text) {
    if (phi != "zero" && phi != "ricci") throw UsageError("--phi must be zero or ricci");
    const SurfaceModel m = args.load();
    const ExtensionMetric g = build_extension(m, phi == "ricci" ? ricci_phi(m) : SymmetricField{});
    std::vector<ClosedForm> candidates;
    if (!f_text.empty()) {
        candidates.push_back(parse_closed_form(f_text));
    } else {
        for (const auto& f : solve(m, mu).basis) {
            candidates.push_back(f);
            candidates.push_back(-f);
        }
    }
    std::optional<IsotropicCheck> r;
    std::string used, why;
    for (const auto& f : candidates) {
        try {
            r = verify_isotropic_qe(g, f, mu);
            used = to_string(f);
            break;
        } catch (const PreconditionError& e) {
            why = e.what();
        }
    }
    if (!r) {
        std::cout << "no usable f at mu=" << num(mu) << (why.empty() ? "" : ": " + why) << "\n";
        return kFailed;
    }
    const bool ok = r->residual_qe < 1e-5 && r->residual_null < 1e-8;
    std::cout << "f: " << used << "\nphi: " << phi << "\nmu: " << num(mu) << "\nresidual_qe: " << num(r->residual_qe)
              << "\nresidual_null: " << num(r->residual_null) << "\nlambda: " << num(r->lambda) << "\n";
    bool walker_ok = true;
    if (kahler_structure(m)) {
        try {
            const WalkerKahlerCheck w = walker_kahler_check(g);
            walker_ok = w.nabla_J_residual < 1e-5 && w.J_squared_residual < 1e-5;
            std::cout << "walker_nabla_J: " << num(w.nabla_J_residual) << "\nwalker_J_squared: "
                      << num(w.J_squared_residual) << "\n";
        } catch (const PreconditionError& e) {
            std::cout << "walker: skipped (" << e.what() << ")\n";
        }
    }
    std::cout << "status: " << (ok && walker_ok ? "pass" : "FAIL") << "\n";
    return ok && walker_ok ? 0 : kFailed;
}

int cmd_classify(const std::string& path) {
    const SurfaceModel m = load_model_json(read_file(path));
    const ModelLabel l = classify(m);
    std::cout << to_string(l) << "\n";
    return 0;
}

int cmd_verify(const std::string& only, const std::string& json_path) {
    const Report r = verify_paper(only);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& e : r.entries) {
        std::cout << (e.pass() ? "PASS " : "FAIL ") << e.label << " (" << e.checks.size() << " checks, "
                  << num(e.seconds) << " s)\n";
        for (const auto& c : e.checks)
            if (!c.pass)
                std::cout << "    " << c.name << " [" << c.cite << "] residual=" << num(c.residual) << " " << c.detail
                          << "\n";
    }
    std::cout << "summary: " << r.passed() << " passed, " << r.failed() << " failed\n";
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw UsageError("cannot write " + json_path);
        out << r.to_json() << "\n";
    }
    return r.ok() ? 0 : kFailed;
}

int cmd_list(bool entries) {
    if (entries) {
        for (const auto& e : registry()) {
            std::cout << e.name << "  killing_dim=" << e.expected_killing_dim;
            for (const auto& x : e.expected) std::cout << "  E(" << num(x.mu) << ")=" << x.basis.size();
            if (!e.xref.empty()) std::cout << "  see " << e.xref;
            std::cout << "\n";
        }
        return 0;
    }
    for (const auto& f : model_factories()) {
        std::cout << f.name << "  [" << f.kind << "]";
        for (const auto& [k, v] : f.defaults) std::cout << " " << k << "=" << num(v);
        std::cout << "  " << f.summary << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Affine quasi-Einstein equation on homogeneous surfaces"};
    app.require_subcommand(1);

    ModelArgs info_args, solve_args, special_args, killing_args, extend_args;
    double solve_mu = 0.0, extend_mu = 0.0;
    std::string phi = "zero", f_text, classify_path, only, json_path;
    bool list_entries = false;

    auto* info = app.add_subcommand("info", "invariants, Killing dimension and flags of a model");
    info_args.attach(info);
    auto* solve_cmd = app.add_subcommand("solve", "basis of E(mu) in canonical text form");
    solve_args.attach(solve_cmd);
    solve_cmd->add_option("--mu", solve_mu, "eigenvalue parameter")->required();
    auto* special = app.add_subcommand("special-mu", "candidate eigenvalues with their dimensions (Type B)");
    special_args.attach(special);
    auto* kd = app.add_subcommand("killing-dim", "dimension of the affine Killing algebra");
    killing_args.attach(kd);
    auto* extend = app.add_subcommand("extend", "isotropic check on the modified Riemannian extension");
    extend_args.attach(extend);
    extend->add_option("--mu", extend_mu, "eigenvalue parameter")->required();
    extend->add_option("--phi", phi, "deformation tensor: zero or ricci")->check(CLI::IsMember({"zero", "ricci"}));
    extend->add_option("--f", f_text, "solution to use (default: from the solver)");
    auto* cls = app.add_subcommand("classify", "label a model given as JSON");
    cls->add_option("file", classify_path, "model .json file, or - for stdin")->required();
    auto* verify = app.add_subcommand("verify-paper", "run the registry verification harness");
    verify->add_option("--only", only, "glob on entry labels");
    verify->add_option("--json", json_path, "write the JSON report here");
    auto* list = app.add_subcommand("list", "model families (or registry entries with --entries)");
    list->add_flag("--entries", list_entries, "list registry entries instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (*info) return cmd_info(info_args);
        if (*solve_cmd) return cmd_solve(solve_args, solve_mu);
        if (*special) return cmd_special(special_args);
        if (*kd) {
            std::cout << killing_dimension(killing_args.load()) << "\n";
            return 0;
        }
        if (*extend) return cmd_extend(extend_args, extend_mu, phi, f_text);
        if (*cls) return cmd_classify(classify_path);
        if (*verify) return cmd_verify(only, json_path);
        if (*list) return cmd_list(list_entries);
    } catch (const UnknownModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kUsage;
}
