#pragma once

#include "affqe/classifier.hpp"
#include "affqe/qe_solver.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace affqe {

using Params = std::map<std::string, double>;

// A named model family: parameter names with their defaults.
struct ModelFactory {
    std::string name;
    std::string kind;  // typeA, typeB, sphere, hyperbolic+, hyperbolic-
    Params defaults;
    std::string summary;
};

const std::vector<ModelFactory>& model_factories();

class UnknownModelError : public std::invalid_argument {
public:
    UnknownModelError(const std::string& name, std::string suggestion);
    const std::string& suggestion() const { return suggestion_; }

private:
    std::string suggestion_;
};

class SchemaError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Closest candidate by edit distance (ties: first in order).
std::string nearest_name(const std::string& name, const std::vector<std::string>& candidates);

// By family name; params override defaults, unknown params are rejected.
SurfaceModel load_model(const std::string& name, const Params& params = {});
// {"kind": ..., "Gamma" | "C": {"111": r, ...}, "params": {...}}
SurfaceModel load_model_json(const std::string& document);

struct ExpectedSpace {
    double mu = 0.0;
    std::vector<std::string> basis;  // canonical text, parsed on load
    std::string cite;
};

struct ExtensionCase {
    double mu = 0.0;
    std::string f;
    bool walker = false;
    std::string cite;
};

struct RegistryEntry {
    std::string name;  // unique, e.g. "M2{c=1}"
    ModelLabel label;  // factory family and params
    SurfaceModel model;
    std::string classified_as;
    std::vector<ExpectedSpace> expected;
    int expected_killing_dim = 0;
    std::string killing_cite;
    std::optional<double> psi, Psi;
    std::optional<ExtensionCase> extension;
    std::string xref;
};

class RegistryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unchecked construction of the built-in catalog.
std::vector<RegistryEntry> build_registry();
// Throws RegistryError naming the citation of the first bad basis element.
void self_check(const std::vector<RegistryEntry>& entries);
// Built and self-checked once.
const std::vector<RegistryEntry>& registry();

struct Check {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    std::string cite;
    std::string detail;
};

struct EntryReport {
    std::string label;
    std::vector<Check> checks;
    double seconds = 0.0;
    bool pass() const;
};

struct Report {
    std::vector<EntryReport> entries;  // sorted by label
    std::vector<std::string> warnings;
    int passed() const;
    int failed() const;
    bool ok() const { return failed() == 0; }
    // 12 significant digits; timing is left out when with_timing is false.
    std::string to_json(bool with_timing = true) const;
};

// only: shell-style glob on entry names; empty means all.
Report verify_entries(const std::vector<RegistryEntry>& entries, const std::string& only = "");
Report verify_paper(const std::string& only = "");

// 12 significant digits.
std::string format_number(double v);

}  // namespace affqe
