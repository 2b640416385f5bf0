#pragma once

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "p2h/errors.hpp"
#include "p2h/rational.hpp"

namespace p2h {

// Monomial in the jet variables u_0..u_M, the independent variable x and
// the formal parameter alpha. The x exponent may be negative (Laurent
// monomials in z appear in the Boutroux frame); jet and alpha exponents
// are non-negative.
struct Monomial {
  std::vector<int> jets;  // jets[i] = exponent of u_i, trailing zeros trimmed
  int x = 0;
  int alpha = 0;

  void trim();
  int jet_exp(int i) const {
    return (i >= 0 && i < static_cast<int>(jets.size())) ? jets[i] : 0;
  }
  int max_order() const { return static_cast<int>(jets.size()) - 1; }
  // <k> = sum_p (p+1) k_p
  long norm() const;
  long total_degree() const;
  bool operator==(const Monomial& o) const {
    return x == o.x && alpha == o.alpha && jets == o.jets;
  }
};

// Graded lexicographic on (e_x, e_alpha, e_0, e_1, ...).
struct MonoLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class JetPolynomial {
 public:
  using TermMap = std::map<Monomial, Rational, MonoLess>;

  JetPolynomial() = default;
  static JetPolynomial zero() { return {}; }
  static JetPolynomial constant(const Rational& c);
  static JetPolynomial jet(int i, int exp = 1);
  static JetPolynomial x_power(int e);
  static JetPolynomial alpha_power(int e);

  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }
  int max_order() const;
  bool has_explicit_x() const;
  bool has_alpha() const;
  const TermMap& terms() const { return terms_; }

  Rational coefficient(const Monomial& m) const;

  JetPolynomial& operator+=(const JetPolynomial& o);
  JetPolynomial& operator-=(const JetPolynomial& o);
  friend JetPolynomial operator+(JetPolynomial a, const JetPolynomial& b) {
    return a += b;
  }
  friend JetPolynomial operator-(JetPolynomial a, const JetPolynomial& b) {
    return a -= b;
  }
  JetPolynomial operator-() const;
  friend JetPolynomial operator*(const JetPolynomial& a, const JetPolynomial& b);
  friend JetPolynomial operator*(const Rational& c, JetPolynomial p);
  JetPolynomial pow(int e) const;
  bool operator==(const JetPolynomial& o) const { return terms_ == o.terms_; }

  // Total derivative D = d/dx + sum_i u_{i+1} d/du_i.
  JetPolynomial total_derivative() const;
  // Euler operator E = sum_i (-D)^i d/du_i. Throws ExplicitVariableError
  // when explicit x-dependence is present.
  JetPolynomial variational_derivative() const;
  // Inverse of D on exact polynomials, normalized to zero constant term.
  // Throws NotExactError when E(p) != 0.
  JetPolynomial integrate_total_derivative() const;
  // Prolonged substitution u_0 -> image, u_i -> D^i(image).
  JetPolynomial substitute_jets(const JetPolynomial& image) const;
  // Partial derivative with respect to the jet variable u_i.
  JetPolynomial partial_jet(int i) const;

  // Numeric evaluation; `jets[i]` supplies u_i. Missing entries count as 0.
  template <typename Scalar>
  Scalar evaluate(const std::vector<Scalar>& jets, Scalar x, Scalar alpha) const;

  // Canonical JSON: array of {exponents, x, alpha, num, den} in canonical
  // term order.
  nlohmann::json to_json() const;
  static JetPolynomial from_json(const nlohmann::json& j);
  // LaTeX rendering with the given base symbol (V_0 -> "V", V_1 -> "V_x",
  // V_m -> "V_{mx}"); `var` names the independent variable.
  std::string to_latex(const std::string& symbol = "V",
                       const std::string& var = "x") const;

  void insert_term(Monomial m, const Rational& c);

 private:
  TermMap terms_;
};

template <typename Scalar>
Scalar JetPolynomial::evaluate(const std::vector<Scalar>& jets, Scalar x,
                               Scalar alpha) const {
  Scalar acc{};
  for (const auto& [m, c] : terms_) {
    Scalar t = static_cast<Scalar>(to_double(c));
    for (size_t i = 0; i < m.jets.size(); ++i)
      for (int e = 0; e < m.jets[i]; ++e)
        t *= (i < jets.size()) ? jets[i] : Scalar{};
    if (m.x > 0)
      for (int e = 0; e < m.x; ++e) t *= x;
    else
      for (int e = 0; e < -m.x; ++e) t /= x;
    for (int e = 0; e < m.alpha; ++e) t *= alpha;
    acc += t;
  }
  return acc;
}

}  // namespace p2h
