#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace kt {

/// Arbitrary precision rational, always kept canonical (lowest terms,
/// positive denominator).
using Rational = mpq_class;
using Integer = mpz_class;

/// num / den in lowest terms. Throws InputError when den is zero.
Rational fraction(long num, long den);

/// Parses "7", "-3/4", "0.125" or "1e-3" exactly.
Rational parse_rational(std::string_view text);

/// Exact conversion of a finite double.
Rational rational_from_double(double value);

std::string to_string(const Rational& q);

/// Pivot cost used by exact elimination: |numerator * denominator|.
Integer height(const Rational& q);

} // namespace kt
