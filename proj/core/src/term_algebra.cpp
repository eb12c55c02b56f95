#include "affqe/term_algebra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

namespace affqe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

bool is_integer(double v) { return std::floor(v) == v; }

bool close(double a, double b) { return std::abs(a - b) <= kMergeTol; }

// Reduce phase to [0, pi), freq > 0. Returns the sign to fold into the
// coefficient, or 0 if the trig factor collapsed to a constant (written to
// *constant).
double canonicalize_trig(Factor& f, double* constant) {
    if (!f.trig) return 1.0;
    Trig& t = *f.trig;
    if (t.freq == 0.0) {
        *constant = std::cos(t.phase);
        f.trig.reset();
        return 0.0;
    }
    if (t.freq < 0.0) {
        t.freq = -t.freq;
        t.phase = -t.phase;
    }
    double ph = std::fmod(t.phase, 2.0 * kPi);
    if (ph < 0.0) ph += 2.0 * kPi;
    double sign = 1.0;
    if (ph >= kPi) {
        ph -= kPi;
        sign = -1.0;
    }
    // Snap rounding noise so that derivatives of cos print as sin again.
    if (kPi - ph < 1e-15) {
        ph = 0.0;
        sign = -sign;
    }
    if (ph < 1e-15) ph = 0.0;
    if (std::abs(ph - kHalfPi) < 1e-15) ph = kHalfPi;
    t.phase = ph;
    return sign;
}

// Returns false if the term vanished.
bool canonicalize_term(Term& t) {
    for (auto& f : t.factors) {
        if (f.log_power < 0 || f.log_power > kMaxLogPower)
            throw std::invalid_argument("log power outside [0, 2]");
        double constant = 1.0;
        double s = canonicalize_trig(f, &constant);
        if (s == 0.0)
            t.coeff *= constant;
        else
            t.coeff *= s;
    }
    return t.coeff != 0.0;
}

bool same_trig(const std::optional<Trig>& a, const std::optional<Trig>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->log_arg == b->log_arg && close(a->freq, b->freq) && close(a->phase, b->phase);
}

bool same_factor(const Factor& a, const Factor& b) {
    return close(a.power, b.power) && a.log_power == b.log_power && close(a.exp_coeff, b.exp_coeff) &&
           same_trig(a.trig, b.trig);
}

bool same_profile(const Term& a, const Term& b) {
    return same_factor(a.factors[0], b.factors[0]) && same_factor(a.factors[1], b.factors[1]);
}

auto factor_key(const Factor& f) {
    const bool has = f.trig.has_value();
    return std::make_tuple(f.power, f.log_power, f.exp_coeff, has, has && f.trig->log_arg,
                           has ? f.trig->freq : 0.0, has ? f.trig->phase : 0.0);
}

bool term_less(const Term& a, const Term& b) {
    auto ka = std::make_tuple(factor_key(a.factors[1]), factor_key(a.factors[0]));
    auto kb = std::make_tuple(factor_key(b.factors[1]), factor_key(b.factors[0]));
    return ka < kb;
}

// Product of two factors on the same axis: one or two factors with weights.
std::vector<std::pair<double, Factor>> multiply_factors(const Factor& a, const Factor& b) {
    Factor base;
    base.power = a.power + b.power;
    base.log_power = a.log_power + b.log_power;
    if (base.log_power > kMaxLogPower) throw std::invalid_argument("log power cap exceeded in product");
    base.exp_coeff = a.exp_coeff + b.exp_coeff;
    if (!a.trig || !b.trig) {
        base.trig = a.trig ? a.trig : b.trig;
        return {{1.0, base}};
    }
    if (a.trig->log_arg != b.trig->log_arg)
        throw std::invalid_argument("cannot multiply trig factors with different arguments");
    // cos A cos B = (cos(A+B) + cos(A-B)) / 2
    Factor sum = base, diff = base;
    sum.trig = Trig{a.trig->freq + b.trig->freq, a.trig->phase + b.trig->phase, a.trig->log_arg};
    diff.trig = Trig{a.trig->freq - b.trig->freq, a.trig->phase - b.trig->phase, a.trig->log_arg};
    return {{0.5, sum}, {0.5, diff}};
}

// d/dx of a single-axis factor.
std::vector<std::pair<double, Factor>> differentiate_factor(const Factor& f) {
    std::vector<std::pair<double, Factor>> out;
    if (f.power != 0.0) {
        Factor g = f;
        g.power = f.power - 1.0;
        out.emplace_back(f.power, g);
    }
    if (f.log_power > 0) {
        Factor g = f;
        g.power = f.power - 1.0;
        g.log_power = f.log_power - 1;
        out.emplace_back(static_cast<double>(f.log_power), g);
    }
    if (f.exp_coeff != 0.0) out.emplace_back(f.exp_coeff, f);
    if (f.trig) {
        Factor g = f;
        g.trig->phase = f.trig->phase - kHalfPi;
        if (f.trig->log_arg) g.power = f.power - 1.0;
        out.emplace_back(-f.trig->freq, g);
    }
    return out;
}

template <class T>
T eval_factor(const Factor& f, T x) {
    T v = 1;
    if (f.power != 0.0) {
        if (is_integer(f.power) && std::abs(f.power) < 64)
            v *= std::pow(x, static_cast<int>(f.power));
        else
            v *= std::pow(x, static_cast<T>(f.power));
    }
    if (f.log_power > 0) {
        T l = std::log(x);
        for (int i = 0; i < f.log_power; ++i) v *= l;
    }
    if (f.exp_coeff != 0.0) v *= std::exp(static_cast<T>(f.exp_coeff) * x);
    if (f.trig) {
        T arg = f.trig->log_arg ? std::log(x) : x;
        v *= std::cos(static_cast<T>(f.trig->freq) * arg + static_cast<T>(f.trig->phase));
    }
    return v;
}

template <class T>
T eval_form(const ClosedForm& f, T x1, T x2, Domain domain) {
    Point p{static_cast<double>(x1), static_cast<double>(x2)};
    if (!in_domain(domain, p))
        throw DomainError(std::string("point outside ") + domain_name(domain) + " domain");
    const T xs[2] = {x1, x2};
    T sum = 0;
    for (const auto& t : f.terms()) {
        T v = static_cast<T>(t.coeff);
        for (int a = 0; a < 2; ++a) {
            const Factor& fa = t.factors[a];
            if (fa.is_identity()) continue;
            if (fa.needs_positive() && !(xs[a] > 0))
                throw DomainError("log or fractional power needs x" + std::to_string(a + 1) + " > 0");
            if (fa.needs_nonzero() && xs[a] == 0)
                throw DomainError("negative power at x" + std::to_string(a + 1) + " = 0");
            v *= eval_factor<T>(fa, xs[a]);
        }
        sum += v;
    }
    return sum;
}

}  // namespace

const char* domain_name(Domain d) {
    switch (d) {
        case Domain::FullPlane: return "FULL_PLANE";
        case Domain::RightHalf: return "RIGHT_HALF";
        case Domain::SphereChart: return "SPHERE_CHART";
    }
    return "?";
}

bool in_domain(Domain d, const Point& p) {
    if (!std::isfinite(p.x1) || !std::isfinite(p.x2)) return false;
    switch (d) {
        case Domain::FullPlane: return true;
        case Domain::RightHalf: return p.x1 > 0.0;
        case Domain::SphereChart: return std::abs(p.x1) < kHalfPi - kSphereMargin;
    }
    return false;
}

bool Factor::is_identity() const { return power == 0.0 && log_power == 0 && exp_coeff == 0.0 && !trig; }

bool Factor::needs_positive() const {
    return (power != 0.0 && !is_integer(power)) || log_power > 0 || (trig && trig->log_arg);
}

bool Factor::needs_nonzero() const { return power < 0.0 && is_integer(power); }

ClosedForm::ClosedForm(std::vector<Term> terms) : terms_(std::move(terms)) { *this = simplified(); }

ClosedForm ClosedForm::constant(double c) {
    ClosedForm f;
    if (c != 0.0) f.terms_.push_back(Term{c, {}});
    return f;
}

ClosedForm ClosedForm::coordinate(int axis) { return power(axis, 1.0); }

ClosedForm ClosedForm::monomial(double coeff, const Factor& f1, const Factor& f2) {
    return ClosedForm({Term{coeff, {f1, f2}}});
}

ClosedForm ClosedForm::power(int axis, double alpha) {
    Term t{1.0, {}};
    t.factors[axis].power = alpha;
    return ClosedForm({t});
}

ClosedForm ClosedForm::exp_linear(double a1, double a2) {
    Term t{1.0, {}};
    t.factors[0].exp_coeff = a1;
    t.factors[1].exp_coeff = a2;
    return ClosedForm({t});
}

ClosedForm ClosedForm::simplified() const {
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (Term t : terms_) {
        if (!canonicalize_term(t)) continue;
        auto it = std::find_if(merged.begin(), merged.end(), [&](const Term& m) { return same_profile(m, t); });
        if (it == merged.end())
            merged.push_back(t);
        else
            it->coeff += t.coeff;
    }
    double scale = 0.0;
    for (const auto& t : merged) scale = std::max(scale, std::abs(t.coeff));
    std::erase_if(merged, [&](const Term& t) { return t.coeff == 0.0 || std::abs(t.coeff) < 1e-14 * scale; });
    std::stable_sort(merged.begin(), merged.end(), term_less);
    ClosedForm out;
    out.terms_ = std::move(merged);
    return out;
}

ClosedForm ClosedForm::operator+(const ClosedForm& o) const {
    std::vector<Term> ts = terms_;
    ts.insert(ts.end(), o.terms_.begin(), o.terms_.end());
    return ClosedForm(std::move(ts));
}

ClosedForm ClosedForm::operator-() const { return *this * -1.0; }

ClosedForm ClosedForm::operator-(const ClosedForm& o) const { return *this + (-o); }

ClosedForm ClosedForm::operator*(double s) const {
    std::vector<Term> ts = terms_;
    for (auto& t : ts) t.coeff *= s;
    return ClosedForm(std::move(ts));
}

ClosedForm ClosedForm::operator*(const ClosedForm& o) const {
    std::vector<Term> ts;
    for (const auto& a : terms_) {
        for (const auto& b : o.terms_) {
            auto p1 = multiply_factors(a.factors[0], b.factors[0]);
            auto p2 = multiply_factors(a.factors[1], b.factors[1]);
            for (const auto& [w1, f1] : p1)
                for (const auto& [w2, f2] : p2) ts.push_back(Term{a.coeff * b.coeff * w1 * w2, {f1, f2}});
        }
    }
    return ClosedForm(std::move(ts));
}

bool ClosedForm::needs_positive_x1() const {
    return std::any_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.factors[0].needs_positive(); });
}

bool ClosedForm::needs_positive_x2() const {
    return std::any_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.factors[1].needs_positive(); });
}

bool ClosedForm::operator==(const ClosedForm& o) const { return to_string(*this) == to_string(o); }

double evaluate(const ClosedForm& f, const Point& p, Domain domain) {
    return eval_form<double>(f, p.x1, p.x2, domain);
}

long double evaluate_ld(const ClosedForm& f, long double x1, long double x2, Domain domain) {
    return eval_form<long double>(f, x1, x2, domain);
}

ClosedForm differentiate(const ClosedForm& f, int axis) {
    std::vector<Term> ts;
    for (const auto& t : f.terms()) {
        for (const auto& [w, g] : differentiate_factor(t.factors[axis])) {
            Term d = t;
            d.coeff = t.coeff * w;
            d.factors[axis] = g;
            ts.push_back(d);
        }
    }
    return ClosedForm(std::move(ts));
}

ClosedForm simplify(const ClosedForm& f) { return f.simplified(); }

// ---------------------------------------------------------------------------
// Text form

namespace {

std::string num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string axis_name(int a) { return a == 0 ? "x1" : "x2"; }

// Appends printed factors; returns the sign flip caused by sin rendering.
double print_factor(const Factor& f, int axis, std::vector<std::string>& parts) {
    const std::string x = axis_name(axis);
    if (f.power == 1.0)
        parts.push_back(x);
    else if (f.power != 0.0)
        parts.push_back("(" + x + ")^" + num(f.power));
    if (f.log_power > 0) parts.push_back("log(" + x + ")^" + std::to_string(f.log_power));
    if (f.exp_coeff != 0.0) parts.push_back("exp(" + num(f.exp_coeff) + "*" + x + ")");
    double flip = 1.0;
    if (f.trig) {
        const std::string arg = num(f.trig->freq) + "*" + (f.trig->log_arg ? "log(" + x + ")" : x);
        if (f.trig->phase == kHalfPi) {
            parts.push_back("sin(" + arg + ")");
            flip = -1.0;
        } else if (f.trig->phase == 0.0) {
            parts.push_back("cos(" + arg + ")");
        } else {
            parts.push_back("cos(" + arg + "+" + num(f.trig->phase) + ")");
        }
    }
    return flip;
}

}  // namespace

std::string to_string(const ClosedForm& f) {
    if (f.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : f.terms()) {
        std::vector<std::string> parts;
        double c = t.coeff;
        for (int a = 0; a < 2; ++a) c *= print_factor(t.factors[a], a, parts);
        const bool neg = c < 0.0;
        const double mag = std::abs(c);
        if (mag != 1.0 || parts.empty()) parts.insert(parts.begin(), num(mag));
        std::string body;
        for (size_t i = 0; i < parts.size(); ++i) body += (i ? " * " : "") + parts[i];
        if (first)
            out += (neg ? "-" : "") + body;
        else
            out += (neg ? " - " : " + ") + body;
        first = false;
    }
    return out;
}

namespace {

struct Cursor {
    std::string_view s;
    size_t i = 0;
    bool eat(std::string_view lit) {
        if (s.substr(i, lit.size()) == lit) {
            i += lit.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view lit) {
        if (!eat(lit)) throw ParseError("expected '" + std::string(lit) + "' in '" + std::string(s) + "'");
    }
    double number() {
        double v = 0.0;
        auto res = std::from_chars(s.data() + i, s.data() + s.size(), v);
        if (res.ec != std::errc()) throw ParseError("expected number in '" + std::string(s) + "'");
        i = static_cast<size_t>(res.ptr - s.data());
        return v;
    }
    int axis() {
        if (eat("x1")) return 0;
        if (eat("x2")) return 1;
        throw ParseError("expected x1 or x2 in '" + std::string(s) + "'");
    }
    bool done() const { return i == s.size(); }
};

ClosedForm single(int axis, const Factor& f, double coeff = 1.0) {
    Term t{coeff, {}};
    t.factors[axis] = f;
    return ClosedForm({t});
}

ClosedForm parse_trig(Cursor& c, bool is_sin) {
    const double b = c.number();
    c.expect("*");
    bool log_arg = false;
    int axis = 0;
    if (c.eat("log(")) {
        log_arg = true;
        axis = c.axis();
        c.expect(")");
    } else {
        axis = c.axis();
    }
    double phase = 0.0;
    if (c.eat("+"))
        phase = c.number();
    else if (c.eat("-"))
        phase = -c.number();
    c.expect(")");
    Factor f;
    // sin(t) = -cos(t + pi/2)
    f.trig = Trig{b, is_sin ? phase + kHalfPi : phase, log_arg};
    return single(axis, f, is_sin ? -1.0 : 1.0);
}

ClosedForm parse_atom(std::string_view tok) {
    if (tok.empty()) throw ParseError("empty factor");
    {
        double v = 0.0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec == std::errc() && res.ptr == tok.data() + tok.size()) return ClosedForm::constant(v);
    }
    if (tok.front() == '-') return -parse_atom(tok.substr(1));
    Cursor c{tok};
    ClosedForm out;
    if (c.eat("(")) {
        int axis = c.axis();
        c.expect(")^");
        Factor f;
        f.power = c.number();
        out = single(axis, f);
    } else if (c.eat("log(")) {
        int axis = c.axis();
        c.expect(")^");
        Factor f;
        f.log_power = static_cast<int>(c.number());
        if (f.log_power < 1 || f.log_power > kMaxLogPower) throw ParseError("log power out of range");
        out = single(axis, f);
    } else if (c.eat("exp(")) {
        Factor f;
        f.exp_coeff = c.number();
        c.expect("*");
        int axis = c.axis();
        c.expect(")");
        out = single(axis, f);
    } else if (c.eat("cos(")) {
        out = parse_trig(c, false);
    } else if (c.eat("sin(")) {
        out = parse_trig(c, true);
    } else {
        Factor f;
        f.power = 1.0;
        out = single(c.axis(), f);
    }
    if (!c.done()) throw ParseError("trailing characters in factor '" + std::string(tok) + "'");
    return out;
}

}  // namespace

ClosedForm parse_closed_form(std::string_view text) {
    std::vector<std::string_view> toks;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && text[i] == ' ') ++i;
        size_t j = i;
        while (j < text.size() && text[j] != ' ') ++j;
        if (j > i) toks.push_back(text.substr(i, j - i));
        i = j;
    }
    if (toks.empty()) throw ParseError("empty expression");
    if (toks.size() == 1 && toks[0] == "0") return {};

    ClosedForm sum;
    ClosedForm term;
    double sign = 1.0;
    bool expect_atom = true;
    bool have_term = false;
    for (auto tok : toks) {
        if (expect_atom) {
            ClosedForm a = parse_atom(tok);
            term = have_term ? term * a : a * sign;
            have_term = true;
            expect_atom = false;
        } else if (tok == "*") {
            expect_atom = true;
        } else if (tok == "+" || tok == "-") {
            sum = sum + term;
            sign = tok == "+" ? 1.0 : -1.0;
            have_term = false;
            expect_atom = true;
        } else {
            throw ParseError("unexpected token '" + std::string(tok) + "'");
        }
    }
    if (expect_atom) throw ParseError("expression ends with an operator");
    return (sum + term).simplified();
}

// ---------------------------------------------------------------------------
// Numeric rank

std::vector<Point> halton_points(Domain domain, int count, int skip) {
    auto radical_inverse = [](int n, int base) {
        double inv = 1.0 / base, f = inv, r = 0.0;
        while (n > 0) {
            r += f * (n % base);
            n /= base;
            f *= inv;
        }
        return r;
    };
    double lo1 = -1.0, hi1 = 1.0;
    if (domain == Domain::RightHalf) {
        lo1 = 0.3;
        hi1 = 2.3;
    } else if (domain == Domain::SphereChart) {
        lo1 = -1.3;
        hi1 = 1.3;
    }
    std::vector<Point> pts;
    pts.reserve(count);
    for (int k = 0; k < count; ++k) {
        const int n = 1 + k + 17 * skip;
        pts.push_back({lo1 + (hi1 - lo1) * radical_inverse(n, 2), -1.0 + 2.0 * radical_inverse(n, 3)});
    }
    return pts;
}

int numeric_rank(const std::vector<ClosedForm>& fs, const std::vector<Point>& points, Domain domain) {
    if (fs.empty()) return 0;
    Eigen::MatrixXd m(points.size(), fs.size());
    for (size_t j = 0; j < fs.size(); ++j)
        for (size_t i = 0; i < points.size(); ++i) m(i, j) = evaluate(fs[j], points[i], domain);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double n = m.col(j).norm();
        if (n > 0.0) m.col(j) /= n;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        const double r = sv(k) / sv(0);
        if (r > kRankCutoff) ++rank;
        if (r >= 1e-11 && r <= 1e-7)
            throw DegenerateSampleError("singular value ratio " + num(r) + " near the rank cutoff");
    }
    return rank;
}

int numeric_rank(const std::vector<ClosedForm>& fs, Domain domain) {
    for (int attempt = 0;; ++attempt) {
        try {
            return numeric_rank(fs, halton_points(domain, 12, attempt), domain);
        } catch (const DegenerateSampleError&) {
            if (attempt >= 3) throw;
        }
    }
}

}  // namespace affqe
