#include <doctest.h>

#include <complex>
#include <random>

#include <nlohmann/json.hpp>

#include "p2h/jetpoly.hpp"

using namespace p2h;

namespace {

JetPolynomial u(int i, int e = 1) { return JetPolynomial::jet(i, e); }

// Deterministic random polynomial in the jets u_0..u_3, no explicit x.
JetPolynomial random_poly(std::mt19937& rng, bool allow_alpha = false) {
  std::uniform_int_distribution<int> nterms(2, 5), order(0, 3), expo(0, 2),
      coeff(-4, 4), aexp(0, 1);
  JetPolynomial p;
  int m = nterms(rng);
  for (int t = 0; t < m; ++t) {
    Monomial mo;
    mo.jets.assign(4, 0);
    for (int i = 0; i < 4; ++i)
      if (order(rng) == 0) mo.jets[i] = expo(rng);
    if (allow_alpha) mo.alpha = aexp(rng);
    mo.trim();
    int c = coeff(rng);
    if (c == 0) c = 1;
    p.insert_term(mo, Rational(c));
  }
  return p;
}

}  // namespace

TEST_SUITE("jetpoly") {

TEST_CASE("total derivative of basic expressions") {
  CHECK(u(0, 2).total_derivative() == Rational(2) * (u(0) * u(1)));
  CHECK((u(0) * u(1)).total_derivative() == u(1, 2) + u(0) * u(2));
  // d/dx acts on explicit x too
  JetPolynomial xv = JetPolynomial::x_power(1) * u(0);
  CHECK(xv.total_derivative() == u(0) + JetPolynomial::x_power(1) * u(1));
}

TEST_CASE("variational derivative oracles") {
  // E(u_1^2) = -2 u_2, E(u_0^3) = 3 u_0^2
  CHECK(u(1, 2).variational_derivative() == Rational(-2) * u(2));
  CHECK(u(0, 3).variational_derivative() == Rational(3) * u(0, 2));
  CHECK_THROWS_AS((JetPolynomial::x_power(1) * u(0)).variational_derivative(),
                  ExplicitVariableError);
}

TEST_CASE("E annihilates total derivatives (property)") {
  std::mt19937 rng(20240817);
  for (int trial = 0; trial < 25; ++trial) {
    JetPolynomial p = random_poly(rng);
    CHECK(p.total_derivative().variational_derivative().is_zero());
  }
}

TEST_CASE("integration inverts the total derivative (property)") {
  std::mt19937 rng(977);
  for (int trial = 0; trial < 25; ++trial) {
    JetPolynomial p = random_poly(rng, /*allow_alpha=*/true);
    // D kills every jet-free term (constants and pure alpha powers), so
    // only the jet-bearing part can be recovered
    JetPolynomial nc;
    for (const auto& [m, c] : p.terms())
      if (!m.jets.empty()) nc.insert_term(m, c);
    CHECK(p.total_derivative().integrate_total_derivative() == nc);
  }
}

TEST_CASE("non-exact polynomials are rejected") {
  CHECK_THROWS_AS(u(0).integrate_total_derivative(), NotExactError);
  CHECK_THROWS_AS((u(0) * u(2)).integrate_total_derivative(), NotExactError);
  // u_0 u_1 = D(u_0^2)/2 is exact
  CHECK((u(0) * u(1)).integrate_total_derivative() ==
        Rational(1, 2) * u(0, 2));
}

TEST_CASE("prolonged substitution commutes with D (property)") {
  std::mt19937 rng(31337);
  JetPolynomial image = u(1) - u(0, 2);  // the Miura-type image
  for (int trial = 0; trial < 15; ++trial) {
    JetPolynomial p = random_poly(rng);
    CHECK(p.total_derivative().substitute_jets(image) ==
          p.substitute_jets(image).total_derivative());
  }
}

TEST_CASE("numeric evaluation matches hand computation") {
  // p = 3 u_0^2 u_1 - x u_2 + alpha
  JetPolynomial p = Rational(3) * (u(0, 2) * u(1)) -
                    JetPolynomial::x_power(1) * u(2) +
                    JetPolynomial::alpha_power(1);
  std::vector<double> jets = {2.0, -1.5, 0.5};
  double v = p.evaluate(jets, 4.0, 7.0);
  CHECK(v == doctest::Approx(3 * 4 * (-1.5) - 4.0 * 0.5 + 7.0));
  // complex scalars with negative x exponent
  JetPolynomial q = JetPolynomial::x_power(-2) * u(0);
  std::vector<std::complex<double>> cj = {{1.0, 1.0}};
  std::complex<double> cx{0.0, 2.0};
  auto w = q.evaluate(cj, cx, std::complex<double>{});
  CHECK(std::abs(w - std::complex<double>(1.0, 1.0) / (cx * cx)) < 1e-15);
}

TEST_CASE("JSON round trip is canonical and stable") {
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 10; ++trial) {
    JetPolynomial p = random_poly(rng, true);
    nlohmann::json j = p.to_json();
    CHECK(JetPolynomial::from_json(j) == p);
    CHECK(j.dump() == JetPolynomial::from_json(j).to_json().dump());
  }
  // schema spot check
  JetPolynomial p = Rational(-3, 2) * (u(1) * JetPolynomial::x_power(2));
  nlohmann::json j = p.to_json();
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 1);
  CHECK(j[0]["exponents"] == nlohmann::json::array({0, 1}));
  CHECK(j[0]["x"] == 2);
  CHECK(j[0]["alpha"] == 0);
  CHECK(j[0]["num"] == "-3");
  CHECK(j[0]["den"] == "2");
}

TEST_CASE("latex rendering") {
  JetPolynomial p = Rational(2) * u(0, 3) + JetPolynomial::x_power(1) * u(0) +
                    JetPolynomial::alpha_power(1);
  std::string s = p.to_latex("V");
  CHECK(s.find("V^{3}") != std::string::npos);
  CHECK(s.find("\\alpha") != std::string::npos);
}

}  // TEST_SUITE
