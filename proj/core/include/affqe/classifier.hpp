#pragma once

#include "affqe/affine_surface.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace affqe {

enum class RicciSignature { Positive, Negative, Indefinite, Rank1, Zero };
const char* signature_name(RicciSignature s);

struct InvariantSignature {
    int ricci_rank = 0;
    RicciSignature ricci_signature = RicciSignature::Zero;
    std::optional<double> psi, Psi;        // rank 2
    std::optional<double> alpha_X;         // rank 1
    std::optional<int> eps_X;              // rank 1
    bool flat = false;
    bool spf = false;
    int killing_dim = 0;
};

// rho-tilde_ij = Gamma_ik^l Gamma_jl^k; psi = tr(rho^-1 rho-tilde),
// Psi = det(rho-tilde) / det(rho); alpha_X = nabla rho(X,X;X)^2 / rho(X,X)^3.
InvariantSignature invariants(const SurfaceModel& m);

bool on_line_L(double psi, double Psi);

// u1 = x1, u2 = a x1 + b x2.
struct ShearTransform {
    double a = 0.0;
    double b = 1.0;
    bool is_identity() const { return a == 0.0 && b == 1.0; }
};

struct NormalizedModel {
    SurfaceModel model;
    ShearTransform transform;
    std::string note;
};

// Shear and rescale x2 so that C22^1 is in {0, +1, -1} and C12^1 = 0 when
// C22^1 != 0.
NormalizedModel normalize_type_b(const SurfaceModel& m);

// f(x) = g(x1, a x1 + b x2) for g written in the normalized coordinates.
// Supports x2 dependence through integer powers and exponentials.
ClosedForm pull_back(const ClosedForm& g, const ShearTransform& t);

inline constexpr const char* kUnrecognized = "UNRECOGNIZED";

struct ModelLabel {
    std::string family = kUnrecognized;
    std::map<std::string, double> params;
    std::optional<ShearTransform> transform;  // set when matched after normalization
    std::string note;
    bool recognized() const { return family != kUnrecognized; }
};

ModelLabel classify(const SurfaceModel& m);
std::string to_string(const ModelLabel& l);

// All family names classify can return (besides UNRECOGNIZED).
const std::vector<std::string>& label_families();

// Constants of a catalog family with constant Christoffels, built from the
// same parametrization classify matches. nullopt for unknown names; throws
// std::out_of_range when a parameter is missing.
struct FamilyConstants {
    ChristoffelConstants constants{};
    bool type_b = false;
};
std::optional<FamilyConstants> family_constants(const std::string& family, const std::map<std::string, double>& params);

}  // namespace affqe
