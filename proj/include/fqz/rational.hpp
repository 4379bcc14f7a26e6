#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace fqz {

// Exact rational backend (GMP).
using Rational = mpq_class;

// Parses "a/b", an integer, or a decimal literal ("0.25", "-1.5e-3") into an
// exact rational. Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

// Exact rational value of the shortest decimal that round-trips `x`.
Rational rational_from_double(double x);

Rational pow(const Rational& base, int exponent);

inline double to_double(const Rational& q) { return q.get_d(); }

// "a/b", or "a" when the denominator is 1.
std::string to_string(const Rational& q);

}  // namespace fqz
