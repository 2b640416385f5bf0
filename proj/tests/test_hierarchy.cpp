#include <doctest.h>

#include <nlohmann/json.hpp>

#include "p2h/hierarchy.hpp"
#include "p2h/rational.hpp"

using namespace p2h;

namespace {
JetPolynomial u(int i, int e = 1) { return JetPolynomial::jet(i, e); }
}

TEST_SUITE("hierarchy") {

TEST_CASE("Lenard chain closed forms") {
  CHECK(build_L(1) == u(0));
  CHECK(build_L(2) == u(2) + Rational(3) * u(0, 2));
  CHECK(build_L(3) == u(4) + Rational(10) * (u(0) * u(2)) +
                          Rational(5) * u(1, 2) + Rational(10) * u(0, 3));
}

TEST_CASE("Lenard images are exact derivatives") {
  for (int n = 1; n <= 4; ++n) {
    JetPolynomial L = build_L(n);
    JetPolynomial img = lenard_image(L);
    CHECK(img.variational_derivative().is_zero());
    // and each L_n is x/alpha-free, homogeneous of weight 2n under the
    // scaling that gives u_i weight i+2
    for (const auto& [m, c] : L.terms()) {
      CHECK(m.x == 0);
      CHECK(m.alpha == 0);
      CHECK(m.norm() + m.total_degree() == 2 * n);
    }
  }
}

TEST_CASE("leading constants") {
  CHECK(c_constant(1) == 1);
  CHECK(c_constant(2) == 3);
  CHECK(c_constant(3) == 10);
  CHECK(beta_constant(1) == 2);
  CHECK(beta_constant(2) == -6);
  CHECK(beta_constant(3) == 20);
  // recurrence beta_{n+1} = -2 beta_n (2n+1)/(n+1)
  for (int n = 1; n <= 6; ++n)
    CHECK(beta_constant(n + 1) ==
          Rational(-2) * beta_constant(n) * (2 * n + 1) / (n + 1));
}

TEST_CASE("first member is the classical equation") {
  HierarchyEquation eq = build_p2n(1);
  CHECK(eq.beta == 2);
  CHECK(eq.rhs_poly.is_zero());
  JetPolynomial expect = Rational(2) * u(0, 3) +
                         JetPolynomial::x_power(1) * u(0) +
                         JetPolynomial::alpha_power(1);
  CHECK(eq.rhs_full() == expect);
}

TEST_CASE("second member matches an independent expansion") {
  // Expand D(L_2{v_1 - v_0^2}) + 2 v_0 L_2{v_1 - v_0^2} by hand:
  // V_4 = 10 V^2 V_2 + 10 V V_1^2 - 6 V^5 + x V + alpha.
  HierarchyEquation eq = build_p2n(2);
  CHECK(eq.beta == -6);
  JetPolynomial P = Rational(10) * (u(0, 2) * u(2)) +
                    Rational(10) * (u(0) * u(1, 2));
  CHECK(eq.rhs_poly == P);
}

TEST_CASE("structure constraints hold for n = 1..4") {
  for (int n = 1; n <= 4; ++n) {
    HierarchyEquation eq = build_p2n(n);
    CHECK(eq.n == n);
    CHECK(eq.beta == beta_constant(n));
    CHECK(eq.rhs_poly.max_order() <= 2 * n - 2);
    for (const auto& [m, c] : eq.rhs_poly.terms()) {
      CHECK(m.x == 0);
      CHECK(m.alpha == 0);
      CHECK(m.norm() == 2 * n + 1);
      CHECK(m.jet_exp(0) <= 2 * n - 1);
    }
  }
}

TEST_CASE("intermediate substitution form") {
  for (int n = 1; n <= 4; ++n) {
    IntermediateFormReport rep = verify_intermediate_form(n);
    CHECK(rep.ok());
    CHECK(rep.beta_tilde == -beta_constant(n) / 2);
  }
  CHECK(verify_intermediate_form(2).beta_tilde == 3);
}

TEST_CASE("JSON round trip") {
  for (int n = 1; n <= 3; ++n) {
    HierarchyEquation eq = build_p2n(n);
    nlohmann::json j = eq.to_json();
    HierarchyEquation back = HierarchyEquation::from_json(j);
    CHECK(back.n == eq.n);
    CHECK(back.beta == eq.beta);
    CHECK(back.rhs_poly == eq.rhs_poly);
    CHECK(back.rhs_full() == eq.rhs_full());
    CHECK(j.dump() == back.to_json().dump());
  }
}

TEST_CASE("latex rendering mentions the normal form pieces") {
  std::string s = build_p2n(2).to_latex();
  CHECK(s.find("V_{4x}") != std::string::npos);
  CHECK(s.find("\\alpha") != std::string::npos);
}

}  // TEST_SUITE
