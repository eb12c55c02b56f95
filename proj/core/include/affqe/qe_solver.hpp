#pragma once

#include "affqe/affine_surface.hpp"
#include "affqe/term_algebra.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace affqe {

enum class SolveMethod { ExponentialAnsatz, PowerAnsatz, RegistryLookup };
const char* method_name(SolveMethod m);

// A basis that failed its own residual check, or a solution beyond the degree
// caps. Never returned silently.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kResidualTol = 1e-9;

struct SolutionBasis {
    double mu = 0.0;
    std::vector<ClosedForm> basis;
    double residual = 0.0;
    SolveMethod method = SolveMethod::ExponentialAnsatz;
    // Type B: some indices were complex; those basis elements carry
    // cos/sin(b log x1) factors.
    bool complex_indices = false;
    std::vector<std::string> notes;
};

struct IndicialSystem {
    enum class Kind { TypeAQuadratics, TypeBQuadratic } kind = Kind::TypeAQuadratics;
    // TypeA: for each entry ij in (11, 12, 22), the coefficients of
    //   q_ij(a) = a_i a_j - Gamma_ij^1 a_1 - Gamma_ij^2 a_2 - mu S_ij
    // stored as {const, a1, a2, a1^2, a1 a2, a2^2}.
    // TypeB: {c0, c1, c2} of c2 g^2 + c1 g + c0 (the 11 entry), followed by the
    // linear conditions {c12, m12, c22, m22}: c12 g + m12 = 0, c22 g + m22 = 0.
    std::vector<std::vector<double>> coefficients;
};

IndicialSystem indicial_system(const SurfaceModel& m, double mu);

SolutionBasis solve_type_a(const SurfaceModel& m, double mu);
SolutionBasis solve_type_b(const SurfaceModel& m, double mu);
SolutionBasis solve_type_c(const SurfaceModel& m, double mu);
// Dispatch on family; General models are not supported.
SolutionBasis solve(const SurfaceModel& m, double mu);

struct SpecialEigenvalue {
    double mu = 0.0;
    int dim = 0;
    std::string note;
};

// Eigenvalues with E(mu) != 0 worth reporting for a Type B model: 0, -1, the
// value forced by the linear indicial conditions, and the double-root value
// when every mu admits solutions.
std::vector<SpecialEigenvalue> special_eigenvalues(const SurfaceModel& m);

int eigenspace_dim(const SurfaceModel& m, double mu);

// Independent dimension count: prolongation of d_i f = v_i,
// d_i v_j = Gamma_ij^k v_k + mu rho_s,ij f at a point.
int prolonged_eigenspace_dim(const SurfaceModel& m, double mu, const Point& p);

// Residual check used by the solvers: absolute kResidualTol, or 1e-11
// relative to the size of the Hessian and mu f rho_s terms.
bool residual_ok(const SurfaceModel& m, double mu, const ClosedForm& f, double* residual = nullptr);

}  // namespace affqe
