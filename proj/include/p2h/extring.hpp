#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>

#include "p2h/rational.hpp"

namespace p2h {

// Element of Q[alpha][A] / (A^{2n} - rel): finite map from
// (alpha exponent, A exponent) to rational coefficient, A exponent < 2n.
struct ExtElem {
  std::map<std::pair<int, int>, Rational> c;
  bool is_zero() const { return c.empty(); }
  std::string to_string() const;
};

// Ring context; carries the reduction A^{two_n} = rel.
class ExtRing {
 public:
  using Elem = ExtElem;

  ExtRing(int two_n, Rational rel) : two_n_(two_n), rel_(std::move(rel)) {}

  int root_degree() const { return two_n_; }
  const Rational& relation() const { return rel_; }

  Elem zero() const { return {}; }
  Elem one() const { return from_rational(1); }
  Elem from_rational(const Rational& r) const;
  Elem alpha_gen(int e = 1) const;
  Elem root_gen(int e = 1) const;  // A^e, reduced

  bool is_zero(const Elem& a) const { return a.is_zero(); }
  Elem add(const Elem& a, const Elem& b) const;
  Elem sub(const Elem& a, const Elem& b) const;
  Elem neg(const Elem& a) const;
  Elem mul(const Elem& a, const Elem& b) const;
  Elem scal(const Rational& r, const Elem& a) const;
  // True when a is a plain rational multiple of 1.
  bool rational_part(const Elem& a, Rational* out) const;
  // a / L for scalar L; throws ResonanceError when L is zero or not a
  // plain rational.
  Elem solve(const Elem& a, const Elem& L) const;

  // Substitute numeric alpha and a numeric 2n-th root of the relation.
  std::complex<double> substitute(const Elem& a, std::complex<double> alpha,
                                  std::complex<double> A) const;

 private:
  void insert(Elem& e, int ae, int Ae, const Rational& v) const;
  int two_n_;
  Rational rel_;
};

// Numeric counterpart used by the float-mode series driver.
struct NumRing {
  using Elem = std::complex<double>;
  std::complex<double> alpha_val{};
  std::complex<double> A_val{};

  Elem zero() const { return {}; }
  Elem one() const { return {1.0, 0.0}; }
  Elem from_rational(const Rational& r) const { return {to_double(r), 0.0}; }
  Elem alpha_gen(int e = 1) const;
  Elem root_gen(int e = 1) const;
  bool is_zero(const Elem& a) const { return a == Elem{}; }
  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem neg(const Elem& a) const { return -a; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem scal(const Rational& r, const Elem& a) const { return to_double(r) * a; }
  bool rational_part(const Elem& a, Rational* /*out*/) const { return a != Elem{}; }
  Elem solve(const Elem& a, const Elem& L) const;
};

}  // namespace p2h
