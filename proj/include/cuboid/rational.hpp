#pragma once

// Exact arithmetic carrier. Every coefficient, DOF value and matrix entry in
// the library is a GMP rational kept in canonical (reduced) form.

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace cuboid {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p", "-p" or "p/q" (q > 0 after normalization). Throws
/// std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// "p" when the denominator is 1, otherwise "p/q".
std::string to_string(const Rational& value);

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace cuboid
