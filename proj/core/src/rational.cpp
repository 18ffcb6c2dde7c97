#include "mtcoal/rational.hpp"

#include <stdexcept>

namespace mtcoal {

Integer falling_factorial(long x, long n) {
  if (n < 0) throw std::invalid_argument("falling_factorial: negative order");
  Integer result = 1;
  for (long i = 0; i < n; ++i) result *= Integer(x - i);
  return result;
}

Integer binomial_coeff(unsigned long n, unsigned long k) {
  Integer result;
  mpz_bin_uiui(result.get_mpz_t(), n, k);
  return result;
}

Integer integer_pow(long base, unsigned long exp) {
  Integer result;
  mpz_ui_pow_ui(result.get_mpz_t(), static_cast<unsigned long>(base >= 0 ? base : -base), exp);
  if (base < 0 && exp % 2 == 1) result = -result;
  return result;
}

std::string to_fraction_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational rational_from_string(const std::string& s) {
  Rational q;
  if (q.set_str(s, 10) != 0) {
    throw std::invalid_argument("not a rational: '" + s + "'");
  }
  q.canonicalize();
  return q;
}

}  // namespace mtcoal
