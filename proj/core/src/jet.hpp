#pragma once

// Truncated two-variable jets: all partial derivatives d1^a d2^b f(P) with
// a + b <= order. Used to prolong finite-type linear PDE systems at a point.

#include "affqe/affine_surface.hpp"

#include <Eigen/Dense>

#include <vector>

namespace affqe::detail {

class Jet {
public:
    Jet() = default;
    explicit Jet(int order, double value = 0.0);

    int order() const { return order_; }
    static int index(int a, int b) { return (a + b) * (a + b + 1) / 2 + b; }
    static int size(int order) { return (order + 1) * (order + 2) / 2; }
    double operator()(int a, int b) const { return c_[index(a, b)]; }
    double& operator()(int a, int b) { return c_[index(a, b)]; }
    double value() const { return c_[0]; }
    double max_abs() const;

    Jet derivative(int axis) const;
    Jet truncated(int order) const;

    Jet operator+(const Jet& o) const;
    Jet operator-(const Jet& o) const;
    Jet operator*(const Jet& o) const;
    Jet operator*(double s) const;
    Jet& operator+=(const Jet& o);

private:
    int order_ = -1;  // -1: empty (acts as zero of unbounded order)
    std::vector<double> c_;
};

// Gamma_ij^k as jets.
struct GammaJet {
    Jet g[2][2][2];
};

GammaJet gamma_jet(const ChristoffelJet& cj);

// rho_jk as jets (order reduced by one).
struct RicciJet {
    Jet rho[2][2];
};

RicciJet ricci_jet(const GammaJet& g);

using JetMatrix = std::vector<std::vector<Jet>>;

JetMatrix jet_matrix(int rows, int cols, int order);
JetMatrix multiply(const JetMatrix& a, const JetMatrix& b);
JetMatrix subtract(const JetMatrix& a, const JetMatrix& b);
JetMatrix add(const JetMatrix& a, const JetMatrix& b);
JetMatrix derivative(const JetMatrix& a, int axis);
double max_abs(const JetMatrix& a);

// For a linear system d_i w = B_i(x) w, returns the stacked integrability
// constraints A_0, ..., A_{depth-1} evaluated at the point.
Eigen::MatrixXd prolonged_constraints(const JetMatrix& b1, const JetMatrix& b2, int depth);

// Dimension of the solution space: n - rank, with rows scaled to unit
// max-norm and singular-value cutoff `cutoff` relative to the largest one.
// Rows below 1e-11 * max(largest entry, reference) count as zero; pass the
// size of the system coefficients as reference so pure roundoff is dropped.
int solution_dimension(const Eigen::MatrixXd& constraints, int n, double cutoff, double reference = 0.0);

}  // namespace affqe::detail
