#pragma once

#include <gmpxx.h>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

namespace distsec {

/// Exact rational scalar; every algorithm is instantiated for Rational and double.
using Rational = mpq_class;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

/// Nearest double to q (mpq_get_d truncates, so this corrects the last ulp).
double to_double(const Rational& q);
inline double to_double(double x) { return x; }

template <class T>
T from_double(double x);
template <>
inline double from_double<double>(double x) { return x; }
template <>
inline Rational from_double<Rational>(double x) { return Rational(x); }

template <class T>
T from_integer(long v) { return T(v); }

inline Rational abs_value(const Rational& q) { return abs(q); }
inline double abs_value(double x) { return std::fabs(x); }

std::string to_string(const Rational& q);

/// Absolute/relative tolerance used for equality and bound checks on the float path.
/// The exact path ignores it.
struct Tolerance {
    double rel = 1e-9;
    double abs = 1e-12;
};

inline bool approx_equal(const Rational& a, const Rational& b, const Tolerance& = {}) { return a == b; }
inline bool approx_equal(double a, double b, const Tolerance& tol = {})
{
    return std::fabs(a - b) <= tol.abs + tol.rel * std::fmax(std::fabs(a), std::fabs(b));
}

/// a <= b, allowing slack proportional to `scale` on the float path.
inline bool leq_within(const Rational& a, const Rational& b, const Rational&, const Tolerance& = {})
{
    return a <= b;
}
inline bool leq_within(double a, double b, double scale, const Tolerance& tol = {})
{
    return a <= b + tol.abs + tol.rel * std::fabs(scale);
}

/// Literal kinds accepted for alphabet values and probabilities.
enum class LiteralKind {
    integer,   // "-12"
    fraction,  // "3/7"
    decimal,   // "2.5", "1e-3"
    invalid,
};

LiteralKind classify_literal(std::string_view text);

/// Parses integer, fraction or decimal (with optional exponent) literals exactly.
std::optional<Rational> parse_rational(std::string_view text);

/// Parses any literal accepted by parse_rational into the nearest double.
std::optional<double> parse_real(std::string_view text);

} // namespace distsec
