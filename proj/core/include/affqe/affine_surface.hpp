#pragma once

#include "affqe/term_algebra.hpp"

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace affqe {

using Mat2 = std::array<std::array<double, 2>, 2>;

// g[i][j][k] = Gamma_ij^k (0-based indices), symmetric in i, j.
struct Christoffel {
    double g[2][2][2] = {};
};

// Six independent symbols in the order 111, 112, 121, 122, 221, 222
// (key "ijk" means Gamma_ij^k).
using ChristoffelConstants = std::array<double, 6>;
inline constexpr std::array<const char*, 6> kChristoffelKeys = {"111", "112", "121", "122", "221", "222"};

Christoffel from_constants(const ChristoffelConstants& c, double scale = 1.0);
ChristoffelConstants to_constants(const Christoffel& g);

// All partial derivatives d1^a d2^b of the Christoffel symbols at a point,
// a + b <= order.
struct ChristoffelJet {
    int order = 0;
    std::vector<Christoffel> d;
    static int index(int a, int b) { return (a + b) * (a + b + 1) / 2 + b; }
    const Christoffel& at(int a, int b) const { return d[index(a, b)]; }
    Christoffel& at(int a, int b) { return d[index(a, b)]; }
};

class ConnectionField {
public:
    virtual ~ConnectionField() = default;
    virtual ChristoffelJet jet(const Point& p, int order) const = 0;
};

enum class Family { TypeA, TypeB, TypeC_Sphere, TypeC_HyperbolicPM, General };
const char* family_name(Family f);

class SurfaceModel {
public:
    SurfaceModel(Family family, Domain domain, std::shared_ptr<const ConnectionField> field,
                 std::optional<ChristoffelConstants> constants = {}, std::map<std::string, double> params = {});

    Family family() const { return family_; }
    Domain domain() const { return domain_; }
    // Gamma (TypeA) or C (TypeB) constants; empty for TypeC and General.
    const std::optional<ChristoffelConstants>& constants() const { return constants_; }
    const std::map<std::string, double>& params() const { return params_; }
    double param(const std::string& name, double fallback = 0.0) const;

    Christoffel christoffel(const Point& p) const;
    // d[l] = d_l Gamma
    std::array<Christoffel, 2> christoffel_derivative(const Point& p) const;
    ChristoffelJet jet(const Point& p, int order) const;

    void check_point(const Point& p) const;

private:
    Family family_;
    Domain domain_;
    std::shared_ptr<const ConnectionField> field_;
    std::optional<ChristoffelConstants> constants_;
    std::map<std::string, double> params_;
};

SurfaceModel make_type_a(const ChristoffelConstants& gamma, std::map<std::string, double> params = {});
SurfaceModel make_type_b(const ChristoffelConstants& c, std::map<std::string, double> params = {});
SurfaceModel make_sphere();
// sign = +1: Gamma_22^1 = -e^{2 x1}; sign = -1: Gamma_22^1 = +e^{2 x1}.
SurfaceModel make_hyperbolic(int sign);
// Arbitrary closed-form Christoffels (entries in the constants key order).
SurfaceModel make_general(const std::array<ClosedForm, 6>& gamma, Domain domain);

// R[l][k][i][j] = R^l_{kij}, R(d_i, d_j) d_k = R^l_{kij} d_l.
struct Riemann {
    double r[2][2][2][2] = {};
};

struct RicciData {
    Mat2 rho{};
    Mat2 rho_s{};
    Mat2 rho_a{};
    Point evaluated_at{};
};

// nr[i][j][k] = (nabla_k rho)_ij = nabla rho(d_i, d_j; d_k)
using NablaRicci = std::array<std::array<std::array<double, 2>, 2>, 2>;

Riemann curvature(const SurfaceModel& m, const Point& p);
RicciData ricci(const SurfaceModel& m, const Point& p);
NablaRicci nabla_ricci(const SurfaceModel& m, const Point& p);
Mat2 hessian(const SurfaceModel& m, const ClosedForm& f, const Point& p);

double qe_residual(const SurfaceModel& m, double mu, const ClosedForm& f, const std::vector<Point>& points);
// Same, on the model's standard grid.
double qe_residual(const SurfaceModel& m, double mu, const ClosedForm& f);

// 9-point grid used for residual checks and 3 generic points for predicates.
std::vector<Point> standard_points(const SurfaceModel& m);
std::vector<Point> generic_points(const SurfaceModel& m);

bool is_flat(const SurfaceModel& m);
bool is_strongly_projectively_flat(const SurfaceModel& m);

// Constant complex structure J with nabla J = 0, J^2 = -Id, if one exists.
// Row convention: J d_i = sum_j J[i][j] d_j. Normalized so J d_1 has a
// positive d_2 component. Only constant-coefficient structures on Type A and
// Type B models are detected.
std::optional<Mat2> kahler_structure(const SurfaceModel& m);

// Christoffels in linear coordinates u = P x (P constant).
Christoffel linear_change(const Christoffel& g, const Mat2& P);

Mat2 inverse(const Mat2& a);
double det(const Mat2& a);

}  // namespace affqe
