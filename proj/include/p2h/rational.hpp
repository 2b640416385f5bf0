#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <string>

namespace p2h {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string num_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str();
}
inline std::string den_string(const Rational& r) {
  return boost::multiprecision::denominator(r).str();
}

// (2n-1)!! = 1*3*...*(2n-1)
inline Integer double_factorial_odd(int n) {
  Integer v = 1;
  for (int k = 1; k <= 2 * n - 1; k += 2) v *= k;
  return v;
}

inline Integer factorial(int n) {
  Integer v = 1;
  for (int k = 2; k <= n; ++k) v *= k;
  return v;
}

// c_n = 2^{2n-1} Gamma(n+1/2) / (Gamma(n+1) Gamma(1/2)) = 2^{n-1}(2n-1)!!/n!
inline Rational c_constant(int n) {
  Integer num = double_factorial_odd(n);
  for (int k = 0; k < n - 1; ++k) num *= 2;
  return Rational(num, factorial(n));
}

// beta_n = (-1)^{n+1} 2^{2n} Gamma(n+1/2)/(Gamma(n+1) Gamma(1/2)) = (-1)^{n+1} 2 c_n
inline Rational beta_constant(int n) {
  Rational b = 2 * c_constant(n);
  return (n % 2 == 0) ? -b : b;
}

}  // namespace p2h
