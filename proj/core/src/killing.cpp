#include "affqe/killing.hpp"

#include "jet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace affqe {

double lie_derivative_residual(const SurfaceModel& m, const KillingField& X, const std::vector<Point>& points) {
    const ClosedForm* comp[2] = {&X.x1, &X.x2};
    ClosedForm d[2][2], dd[2][2][2];
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i) {
            d[k][i] = differentiate(*comp[k], i);
            for (int j = 0; j < 2; ++j) dd[k][i][j] = differentiate(d[k][i], j);
        }
    const Domain dom = m.domain();
    double worst = 0.0;
    for (const auto& p : points) {
        m.check_point(p);
        const Christoffel G = m.christoffel(p);
        const auto dG = m.christoffel_derivative(p);
        double x[2], dx[2][2];  // dx[k][i] = d_i X^k
        for (int k = 0; k < 2; ++k) {
            x[k] = evaluate(*comp[k], p, dom);
            for (int i = 0; i < 2; ++i) dx[k][i] = evaluate(d[k][i], p, dom);
        }
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) {
                    double v = evaluate(dd[k][i][j], p, dom);
                    for (int l = 0; l < 2; ++l)
                        v += x[l] * dG[l].g[i][j][k] - G.g[i][j][l] * dx[k][l] + G.g[l][j][k] * dx[l][i] +
                             G.g[i][l][k] * dx[l][j];
                    worst = std::max(worst, std::abs(v));
                }
    }
    return worst;
}

double lie_derivative_residual(const SurfaceModel& m, const KillingField& X) {
    return lie_derivative_residual(m, X, standard_points(m));
}

int killing_dimension_at(const SurfaceModel& m, const Point& p) {
    m.check_point(p);
    using detail::Jet;
    constexpr int kOrder = 4;
    const detail::GammaJet G = detail::gamma_jet(m.jet(p, kOrder + 1));
    auto g = [&](int i, int j, int k) { return G.g[i][j][k].truncated(kOrder); };
    // w = (X^1, X^2, Y^k_i = d_i X^k at 2 + 2k + i)
    auto y = [](int k, int i) { return 2 + 2 * k + i; };
    detail::JetMatrix b[2] = {detail::jet_matrix(6, 6, kOrder), detail::jet_matrix(6, 6, kOrder)};
    for (int j = 0; j < 2; ++j) {
        auto& B = b[j];
        for (int k = 0; k < 2; ++k) B[k][y(k, j)] = Jet(kOrder, 1.0);
        // d_j Y^k_i = -X^l d_l G_ij^k + G_ij^l Y^k_l - G_lj^k Y^l_i - G_il^k Y^l_j
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i) {
                auto& row = B[y(k, i)];
                for (int l = 0; l < 2; ++l) {
                    row[l] += G.g[i][j][k].derivative(l) * -1.0;
                    row[y(k, l)] += g(i, j, l);
                    row[y(l, i)] += g(l, j, k) * -1.0;
                    row[y(l, j)] += g(i, l, k) * -1.0;
                }
            }
    }
    const double ref = std::max(detail::max_abs(b[0]), detail::max_abs(b[1]));
    return detail::solution_dimension(detail::prolonged_constraints(b[0], b[1], 3), 6, 1e-8, ref);
}

int killing_dimension(const SurfaceModel& m, const Point& base) {
    const int d = killing_dimension_at(m, base);
    const auto pts = generic_points(m);
    const Point other = (std::abs(pts[1].x1 - base.x1) + std::abs(pts[1].x2 - base.x2) > 1e-12) ? pts[1] : pts[2];
    const int d2 = killing_dimension_at(m, other);
    if (d != d2) {
        std::ostringstream os;
        os << "Killing rank differs between base points (" << base.x1 << ", " << base.x2 << "): " << d << " and ("
           << other.x1 << ", " << other.x2 << "): " << d2;
        throw RankInstabilityError(os.str());
    }
    return d;
}

int killing_dimension(const SurfaceModel& m) { return killing_dimension(m, generic_points(m)[0]); }

std::vector<KillingField> standard_generators(const SurfaceModel& m) {
    const ClosedForm one = ClosedForm::constant(1.0);
    switch (m.family()) {
        case Family::TypeA: return {{one, {}}, {{}, one}};
        case Family::TypeB: return {{ClosedForm::coordinate(0), ClosedForm::coordinate(1)}, {{}, one}};
        case Family::TypeC_Sphere:
        case Family::TypeC_HyperbolicPM: return {{{}, one}};
        case Family::General: break;
    }
    return {};
}

}  // namespace affqe
