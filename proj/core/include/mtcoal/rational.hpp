#pragma once

#include <gmpxx.h>

#include <string>

namespace mtcoal {

// Exact arithmetic for all finite-N laws. Limits use plain doubles.
using Rational = mpq_class;
using Integer = mpz_class;

// Descending factorial (x)_n = x (x-1) ... (x-n+1), with (x)_0 = 1.
// For integer x with 0 <= x < n the product contains a zero factor.
Integer falling_factorial(long x, long n);

Integer binomial_coeff(unsigned long n, unsigned long k);

Integer integer_pow(long base, unsigned long exp);

// Canonicalized num/den; mpq_class leaves construction uncanonicalized.
inline Rational ratio(const Integer& num, const Integer& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational ratio(long num, long den) { return ratio(Integer(num), Integer(den)); }

// "3/8" for proper fractions, "2" when the denominator is 1.
std::string to_fraction_string(const Rational& q);

Rational rational_from_string(const std::string& s);

}  // namespace mtcoal
