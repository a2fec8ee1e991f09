#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace halflab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Canonical wire form "p/q": reduced, q > 0, the slash always present.
std::string format_rational(const Rat& value);

// Accepts "p/q" or a bare integer "p"; optional leading minus on p.
// Throws parse_error on malformed text or a zero denominator.
Rat parse_rational(const std::string& text);

inline Rat rational_abs(const Rat& value) { return value < 0 ? Rat(-value) : value; }

inline bool in_open_interval(const Rat& value, const Rat& lo, const Rat& hi) {
  return lo < value && value < hi;
}

// Exact ratio helper for counts: num / den with den > 0.
Rat ratio_of(const Int& num, const Int& den);

// 2^(-k) as an exact rational.
Rat pow2_inverse(std::size_t k);

// Floor/ceiling as exact integers (cpp_int division truncates toward zero,
// which differs from floor on negatives).
Int floor_rat(const Rat& value);
Int ceil_rat(const Rat& value);

}  // namespace halflab
