#pragma once

#include "affqe/affine_surface.hpp"

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

namespace affqe {

using Mat4 = std::array<std::array<double, 4>, 4>;

// (x1, x2, y1, y2) on T*M; index 0, 1 are base, 2, 3 are fibre.
struct Point4 {
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
    double operator[](int a) const;
    double& operator[](int a);
    Point base() const { return {x1, x2}; }
};

using SymmetricField = std::function<Mat2(const Point&)>;

// g = dx^i (x) dy_i + dy_i (x) dx^i + (phi_ij - 2 y_k Gamma_ij^k) dx^i (x) dx^j
class ExtensionMetric {
public:
    ExtensionMetric(SurfaceModel base, SymmetricField phi);

    const SurfaceModel& base() const { return base_; }
    bool has_phi() const { return static_cast<bool>(phi_); }
    Mat2 phi(const Point& p) const;

    Mat4 operator()(const Point4& p) const;
    // Exact: [[A, I], [I, 0]]^-1 = [[0, I], [I, -A]].
    Mat4 inverse(const Point4& p) const;

private:
    SurfaceModel base_;
    SymmetricField phi_;
};

ExtensionMetric build_extension(const SurfaceModel& base, SymmetricField phi = {});
// phi = rho_s of the base.
SymmetricField ricci_phi(const SurfaceModel& base);

class SingularMetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FiniteDifference {
    double h = 1e-4;
    bool richardson = true;
};

// gamma[a][b][c] = Gamma_ab^c, ricci[b][d] = R^a_{bad} with
// R(d_c, d_d) d_b = R^a_{bcd} d_a.
struct Geometry4D {
    Point4 at;
    Mat4 metric{};
    double gamma[4][4][4] = {};
    Mat4 ricci{};

    // H(h)_ab = d_a d_b h - Gamma_ab^c d_c h for a y-independent h, from its
    // exact base gradient and Hessian.
    Mat4 hessian(const std::array<double, 2>& dh, const Mat2& ddh) const;
};

Geometry4D geometry_4d(const ExtensionMetric& g, const Point4& p, FiniteDifference fd = {});

// Base points from the standard grid crossed with y in {-0.5, 0.4}^2.
std::vector<Point4> sample_points_4d(const SurfaceModel& base);

struct IsotropicCheck {
    double mu = 0.0;
    double residual_qe = 0.0;
    double residual_null = 0.0;
    double lambda = 0.0;
};

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// mu != 0: f must solve the base equation and be positive; h = -(2/mu) log f.
// mu == 0: f is taken as h itself and the check is H(h) + rho = 0.
IsotropicCheck verify_isotropic_qe(const ExtensionMetric& g, const ClosedForm& f, double mu);

struct WalkerKahlerCheck {
    double nabla_J_residual = 0.0;
    double J_squared_residual = 0.0;
};

// Column convention J4[a][b] = (J d_b)^a. Built from the metric; needs the
// base chart to satisfy J d1 = d2.
Mat4 walker_structure(const ExtensionMetric& g, const Point4& p);
WalkerKahlerCheck walker_kahler_check(const ExtensionMetric& g, const std::optional<Mat2>& J_base);
WalkerKahlerCheck walker_kahler_check(const ExtensionMetric& g);

}  // namespace affqe
