#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/gmp.hpp>

namespace windtree {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

/// Parses "p/q", an integer, or a terminating decimal ("0.25", "-3e-2") into an
/// exact rational. Throws std::invalid_argument naming the offending text.
Rational parse_rational(std::string_view text);

/// "p/q" in lowest terms, or "n" for integers.
std::string to_string(const Rational& q);

inline double to_double(double v) { return v; }
inline double to_double(const Rational& q) { return q.convert_to<double>(); }

std::int64_t floor_int(const Rational& q);
std::int64_t ceil_int(const Rational& q);
inline std::int64_t floor_int(double v) { return static_cast<std::int64_t>(std::floor(v)); }
inline std::int64_t ceil_int(double v) { return static_cast<std::int64_t>(std::ceil(v)); }

/// Converts a double to the scalar type S (exact binary value for Rational).
template <class S>
S scalar_from(double v) {
  return S(v);
}

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, Rational>;

}  // namespace windtree
