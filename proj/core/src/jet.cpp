#include "jet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace affqe::detail {

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

Jet::Jet(int order, double value) : order_(order), c_(size(order), 0.0) {
    if (order < 0) throw std::invalid_argument("jet order must be nonnegative");
    c_[0] = value;
}

Jet Jet::derivative(int axis) const {
    if (order_ < 0) return {};
    if (order_ == 0) throw std::logic_error("jet order exhausted by differentiation");
    Jet out(order_ - 1);
    for (int t = 0; t <= order_ - 1; ++t)
        for (int b = 0; b <= t; ++b) {
            const int a = t - b;
            out(a, b) = axis == 0 ? (*this)(a + 1, b) : (*this)(a, b + 1);
        }
    return out;
}

double Jet::max_abs() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

Jet Jet::truncated(int order) const {
    if (order_ < 0) return {};
    if (order > order_) throw std::logic_error("cannot extend a jet");
    Jet out(order);
    std::copy(c_.begin(), c_.begin() + size(order), out.c_.begin());
    return out;
}

Jet Jet::operator+(const Jet& o) const {
    if (order_ < 0) return o;
    if (o.order_ < 0) return *this;
    const int n = std::min(order_, o.order_);
    Jet out(n);
    for (int i = 0; i < size(n); ++i) out.c_[i] = c_[i] + o.c_[i];
    return out;
}

Jet Jet::operator-(const Jet& o) const { return *this + o * -1.0; }

Jet& Jet::operator+=(const Jet& o) { return *this = *this + o; }

Jet Jet::operator*(double s) const {
    Jet out = *this;
    for (auto& v : out.c_) v *= s;
    return out;
}

Jet Jet::operator*(const Jet& o) const {
    if (order_ < 0 || o.order_ < 0) return {};
    const int n = std::min(order_, o.order_);
    Jet out(n);
    for (int t = 0; t <= n; ++t)
        for (int b = 0; b <= t; ++b) {
            const int a = t - b;
            double s = 0.0;
            for (int i = 0; i <= a; ++i)
                for (int j = 0; j <= b; ++j)
                    s += binomial(a, i) * binomial(b, j) * (*this)(i, j) * o(a - i, b - j);
            out(a, b) = s;
        }
    return out;
}

GammaJet gamma_jet(const ChristoffelJet& cj) {
    GammaJet g;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                Jet jt(cj.order);
                for (int t = 0; t <= cj.order; ++t)
                    for (int b = 0; b <= t; ++b) jt(t - b, b) = cj.at(t - b, b).g[i][j][k];
                g.g[i][j][k] = jt;
            }
    return g;
}

RicciJet ricci_jet(const GammaJet& G) {
    // rho_jk = sum_l R^l_{k l j}
    //        = sum_l [d_l G_jk^l - d_j G_lk^l + sum_m (G_lm^l G_jk^m - G_jm^l G_lk^m)]
    RicciJet r;
    const int n = G.g[0][0][0].order() - 1;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            Jet s(n);
            for (int l = 0; l < 2; ++l) {
                s += G.g[j][k][l].derivative(l) - G.g[l][k][l].derivative(j);
                for (int m = 0; m < 2; ++m)
                    s += (G.g[l][m][l] * G.g[j][k][m] - G.g[j][m][l] * G.g[l][k][m]).truncated(n);
            }
            r.rho[j][k] = s;
        }
    return r;
}

JetMatrix jet_matrix(int rows, int cols, int order) {
    return JetMatrix(rows, std::vector<Jet>(cols, Jet(order)));
}

JetMatrix multiply(const JetMatrix& a, const JetMatrix& b) {
    const size_t n = a.size(), m = b.size(), p = b.empty() ? 0 : b[0].size();
    JetMatrix out(n, std::vector<Jet>(p));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < p; ++j) {
            Jet s;
            for (size_t k = 0; k < m; ++k) s += a[i][k] * b[k][j];
            out[i][j] = s;
        }
    return out;
}

JetMatrix add(const JetMatrix& a, const JetMatrix& b) {
    JetMatrix out = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) out[i][j] = a[i][j] + b[i][j];
    return out;
}

JetMatrix subtract(const JetMatrix& a, const JetMatrix& b) {
    JetMatrix out = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) out[i][j] = a[i][j] - b[i][j];
    return out;
}

JetMatrix derivative(const JetMatrix& a, int axis) {
    JetMatrix out = a;
    for (auto& row : out)
        for (auto& e : row) e = e.derivative(axis);
    return out;
}

double max_abs(const JetMatrix& a) {
    double m = 0.0;
    for (const auto& row : a)
        for (const auto& e : row) m = std::max(m, e.max_abs());
    return m;
}

Eigen::MatrixXd prolonged_constraints(const JetMatrix& b1, const JetMatrix& b2, int depth) {
    // d1 d2 w = d2 d1 w  =>  (d1 B2 - d2 B1 + B2 B1 - B1 B2) w = 0
    JetMatrix a = add(subtract(derivative(b2, 0), derivative(b1, 1)), subtract(multiply(b2, b1), multiply(b1, b2)));
    std::vector<JetMatrix> levels{a};
    for (int t = 1; t < depth; ++t) {
        const JetMatrix& prev = levels.back();
        JetMatrix next = add(derivative(prev, 0), multiply(prev, b1));
        JetMatrix second = add(derivative(prev, 1), multiply(prev, b2));
        next.insert(next.end(), second.begin(), second.end());
        levels.push_back(std::move(next));
    }
    size_t rows = 0;
    for (const auto& l : levels) rows += l.size();
    const size_t cols = b1.size();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
    size_t r = 0;
    for (const auto& l : levels)
        for (const auto& row : l) {
            for (size_t c = 0; c < cols; ++c) out(r, c) = row[c].order() < 0 ? 0.0 : row[c].value();
            ++r;
        }
    return out;
}

int solution_dimension(const Eigen::MatrixXd& constraints, int n, double cutoff, double reference) {
    const double global = std::max(constraints.size() ? constraints.cwiseAbs().maxCoeff() : 0.0, reference);
    if (global == 0.0) return n;
    std::vector<Eigen::VectorXd> kept;
    for (Eigen::Index i = 0; i < constraints.rows(); ++i) {
        const double m = constraints.row(i).cwiseAbs().maxCoeff();
        if (m > 1e-11 * global) kept.push_back(constraints.row(i).transpose() / m);
    }
    if (kept.empty()) return n;
    Eigen::MatrixXd s(kept.size(), n);
    for (size_t i = 0; i < kept.size(); ++i) s.row(i) = kept[i].transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > cutoff * sv(0)) ++rank;
    return n - rank;
}

}  // namespace affqe::detail
