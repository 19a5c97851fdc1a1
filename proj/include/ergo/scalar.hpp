#pragma once

// Arithmetic modes. Every numeric routine is a template over the scalar type S,
// instantiated for `double` (float mode, absolute tolerance 1e-9) and
// `Rational` (exact mode, GMP rationals).

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace ergo {

using Rational = mpq_class;

/// Occurrence counts of empirical measures over summation boxes.
using Count = unsigned __int128;

enum class Mode { Float, Rational };

inline constexpr double kFloatTolerance = 1e-9;
/// Zero test on pre-root seminorm integrals in float mode.
inline constexpr double kSeminormZeroTolerance = 1e-12;

template <class S>
inline constexpr bool is_exact_v = false;
template <>
inline constexpr bool is_exact_v<Rational> = true;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& q) { return q.get_d(); }

/// "%.17g" for doubles, "p/q" (or "p") for rationals.
std::string format_scalar(double x);
std::string format_scalar(const Rational& q);

/// Parses "p/q", an integer, or a decimal such as "0.75" into an exact rational.
/// Throws Error(ParseError) on malformed text.
Rational parse_rational(std::string_view text);

template <class S>
S from_rational(const Rational& q);
template <>
inline double from_rational<double>(const Rational& q) { return q.get_d(); }
template <>
inline Rational from_rational<Rational>(const Rational& q) { return q; }

template <class S>
S from_count(Count c);
template <>
double from_count<double>(Count c);
template <>
Rational from_count<Rational>(Count c);

inline double abs_value(double x) { return std::fabs(x); }
inline Rational abs_value(const Rational& q) { return abs(q); }

inline bool is_zero(double x, double tol = kFloatTolerance) { return std::fabs(x) <= tol; }
inline bool is_zero(const Rational& q, double = 0.0) { return sgn(q) == 0; }

inline bool approx_equal(double a, double b, double tol = kFloatTolerance) {
  return std::fabs(a - b) <= tol;
}
inline bool approx_equal(const Rational& a, const Rational& b, double = 0.0) { return a == b; }

/// a <= b, with slack `tol` in float mode.
inline bool approx_le(double a, double b, double tol = kFloatTolerance) { return a <= b + tol; }
inline bool approx_le(const Rational& a, const Rational& b, double = 0.0) { return a <= b; }

template <class S>
S power(const S& base, unsigned exponent) {
  S result = 1;
  for (unsigned i = 0; i < exponent; ++i) result *= base;
  return result;
}

std::string format_count(Count c);

}  // namespace ergo
