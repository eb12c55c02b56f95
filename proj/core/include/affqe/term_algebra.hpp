#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace affqe {

struct Point {
    double x1 = 0.0;
    double x2 = 0.0;
    double operator[](int axis) const { return axis == 0 ? x1 : x2; }
};

enum class Domain { FullPlane, RightHalf, SphereChart };

inline constexpr double kSphereMargin = 0.1;
inline constexpr double kMergeTol = 1e-12;
inline constexpr int kMaxLogPower = 2;

const char* domain_name(Domain d);
bool in_domain(Domain d, const Point& p);

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised by numeric_rank when the singular values sit in the ambiguous band;
// callers retry with a different sample set.
class DegenerateSampleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// cos(freq * arg + phase), arg = x or log(x).
struct Trig {
    double freq = 1.0;
    double phase = 0.0;
    bool log_arg = false;
};

// (x)^power * log(x)^log_power * exp(exp_coeff * x) * cos(...)
struct Factor {
    double power = 0.0;
    int log_power = 0;
    double exp_coeff = 0.0;
    std::optional<Trig> trig;

    bool is_identity() const;
    // True if evaluation needs x > 0.
    bool needs_positive() const;
    // True if evaluation needs x != 0 (negative integer power).
    bool needs_nonzero() const;
};

struct Term {
    double coeff = 0.0;
    std::array<Factor, 2> factors{};  // index 0 -> x1, 1 -> x2
};

class ClosedForm {
public:
    ClosedForm() = default;
    explicit ClosedForm(std::vector<Term> terms);

    static ClosedForm constant(double c);
    static ClosedForm coordinate(int axis);  // axis 0 or 1
    static ClosedForm monomial(double coeff, const Factor& f1, const Factor& f2);
    static ClosedForm power(int axis, double alpha);
    static ClosedForm exp_linear(double a1, double a2);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Merge like terms, drop zero coefficients, canonical ordering.
    ClosedForm simplified() const;

    ClosedForm operator+(const ClosedForm& o) const;
    ClosedForm operator-(const ClosedForm& o) const;
    ClosedForm operator-() const;
    ClosedForm operator*(const ClosedForm& o) const;
    ClosedForm operator*(double s) const;
    friend ClosedForm operator*(double s, const ClosedForm& f) { return f * s; }

    // Domain the expression itself requires (RightHalf when any x1 factor
    // needs x1 > 0). Axis-2 positivity is never required by solver output.
    bool needs_positive_x1() const;
    bool needs_positive_x2() const;

    // Exact equality of canonical text (used for round-trip checks).
    bool operator==(const ClosedForm& o) const;

private:
    std::vector<Term> terms_;
};

double evaluate(const ClosedForm& f, const Point& p, Domain domain);
long double evaluate_ld(const ClosedForm& f, long double x1, long double x2, Domain domain);

ClosedForm differentiate(const ClosedForm& f, int axis);
ClosedForm simplify(const ClosedForm& f);

// Canonical text, e.g. "3 * (x1)^-1.5 * log(x1)^1 * exp(2*x2)".
std::string to_string(const ClosedForm& f);
ClosedForm parse_closed_form(std::string_view text);

// Rank of the evaluation matrix [f_j(p_i)] with unit-norm columns; singular
// values above kRankCutoff * sigma_max count. Throws DegenerateSampleError if
// some singular value lies in the ambiguous band.
inline constexpr double kRankCutoff = 1e-9;
int numeric_rank(const std::vector<ClosedForm>& fs, const std::vector<Point>& points,
                 Domain domain);

// 12 quasi-random (Halton) points in the domain; retried with shifted
// sequences on DegenerateSampleError.
int numeric_rank(const std::vector<ClosedForm>& fs, Domain domain);

std::vector<Point> halton_points(Domain domain, int count, int skip = 0);

}  // namespace affqe
