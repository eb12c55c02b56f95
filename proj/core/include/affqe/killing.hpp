#pragma once

#include "affqe/affine_surface.hpp"
#include "affqe/term_algebra.hpp"

#include <stdexcept>
#include <vector>

namespace affqe {

struct KillingField {
    ClosedForm x1;
    ClosedForm x2;
};

// Rank of the prolonged Killing system differs between two base points.
class RankInstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// max |(L_X nabla)_ij^k| over the points, with
// (L_X nabla)_ij^k = d_i d_j X^k + X^l d_l G_ij^k - G_ij^l d_l X^k + G_lj^k d_i X^l + G_il^k d_j X^l.
double lie_derivative_residual(const SurfaceModel& m, const KillingField& X, const std::vector<Point>& points);
double lie_derivative_residual(const SurfaceModel& m, const KillingField& X);

// dim of the affine Killing algebra from the jet (X(P), dX(P)) prolonged to
// order 3. Checked against a second generic point.
int killing_dimension(const SurfaceModel& m, const Point& base);
int killing_dimension(const SurfaceModel& m);

// Single-point count, no cross-check.
int killing_dimension_at(const SurfaceModel& m, const Point& p);

// Type A: d1, d2. Type B: x1 d1 + x2 d2, d2. Type C charts: d2.
std::vector<KillingField> standard_generators(const SurfaceModel& m);

}  // namespace affqe
