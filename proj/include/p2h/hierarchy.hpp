#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "p2h/jetpoly.hpp"

namespace p2h {

// Normal form of the n-th hierarchy member:
//   V_{2n} = P_{2n-1}(V_0..V_{2n-2}) + x V_0 + alpha + beta_n V_0^{2n+1}.
struct HierarchyEquation {
  int n = 0;
  JetPolynomial rhs_poly;  // P_{2n-1}
  Rational beta;           // beta_n
  Rational c;              // c_n
  JetPolynomial lenard_L;  // L_n{U} in the u-jet variables

  // Full right-hand side P + x v_0 + alpha + beta v_0^{2n+1}.
  JetPolynomial rhs_full() const;

  nlohmann::json to_json() const;
  static HierarchyEquation from_json(const nlohmann::json& j);
  std::string to_latex() const;
};

// One Lenard step: L' with D(L') = D^3(L) + 4 u_0 D(L) + 2 u_1 L,
// normalized with zero integration constant.
JetPolynomial lenard_next(const JetPolynomial& L);

// L_n by iterated lenard_next from L_1 = u_0 (memoized per process).
JetPolynomial build_L(int n);

// The unintegrated Lenard image for L_{n+1}; exposed so exactness can be
// certified independently of the integration step.
JetPolynomial lenard_image(const JetPolynomial& L);

// Assemble the n-th member and verify Proposition-1 structure on
// construction (norm grading, k_0 bound, extracted beta_n).
HierarchyEquation build_p2n(int n);

// Report on the intermediate form L_n{v_1 - v_0^2} = V_{2n-1}
// + beta~_n V_0^{2n} + (norm-2n terms with k_0 <= 2n-2).
struct IntermediateFormReport {
  int n = 0;
  Rational beta_tilde;
  bool beta_tilde_matches = false;  // against -beta_n/2
  std::vector<Monomial> violations;
  bool ok() const { return beta_tilde_matches && violations.empty(); }
};
IntermediateFormReport verify_intermediate_form(int n);

}  // namespace p2h
