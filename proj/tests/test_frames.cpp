#include <doctest.h>

#include <cmath>
#include <complex>
#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

#include "p2h/frames.hpp"
#include "p2h/hierarchy.hpp"

using namespace p2h;

namespace {
constexpr double kPi = 3.14159265358979323846;
using C = std::complex<double>;
JetPolynomial u(int i, int e = 1) { return JetPolynomial::jet(i, e); }
}

TEST_SUITE("frames") {

TEST_CASE("scaling map and inverse") {
  CHECK(std::abs(boutroux_z(1, {9.0, 0.0}) - 18.0) < 1e-13);
  // n=2: (4/5) * 32^{5/4} = (4/5) * 64 * 2^{1/4}
  CHECK(std::abs(boutroux_z(2, {32.0, 0.0}) -
                 0.8 * 64.0 * std::pow(2.0, 0.25)) < 1e-12);
  std::mt19937 rng(555);
  std::uniform_real_distribution<double> rad(0.5, 50.0), frac(-0.95, 0.95);
  for (int n = 1; n <= 3; ++n) {
    double q = (2.0 * n + 1.0) / (2.0 * n);
    for (int t = 0; t < 100; ++t) {
      // hint-free round trip holds while arg z stays on the principal sheet
      double th = frac(rng) * kPi / q;
      C x = rad(rng) * std::exp(C(0.0, th));
      C back = boutroux_x(n, boutroux_z(n, x));
      CHECK(std::abs(back - x) < 1e-13 * std::abs(x));
      // wider angles round trip with argument hints
      double thw = frac(rng) * kPi;
      C xw = rad(rng) * std::exp(C(0.0, thw));
      C backw = boutroux_x(n, boutroux_z(n, xw, thw), q * thw);
      CHECK(std::abs(backw - xw) < 1e-13 * std::abs(xw));
    }
  }
}

TEST_CASE("chain rule table") {
  auto Ct = chain_table(1, 2);
  CHECK(Ct[1][0] == Rational(1, 2));
  CHECK(Ct[1][1] == 1);
  CHECK(Ct[2][0] == Rational(-1, 4));
  CHECK(Ct[2][1] == Rational(3, 2));
  CHECK(Ct[2][2] == 1);
  // diagonal stays 1 for all n (top coefficient of the triangular change)
  for (int n = 1; n <= 4; ++n) {
    auto T = chain_table(n, 2 * n);
    for (int p = 0; p <= 2 * n; ++p) CHECK(T[p][p] == 1);
  }
}

TEST_CASE("jet frame change round trips and matches the chain rule") {
  std::mt19937 rng(808);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int n = 1; n <= 3; ++n) {
    Eigen::VectorXcd v(2 * n);
    for (int i = 0; i < 2 * n; ++i) v[i] = C(d(rng), d(rng));
    C x(17.0, 5.0);
    Eigen::VectorXcd uj = to_scaled_jets(n, v, x);
    Eigen::VectorXcd back = from_scaled_jets(n, uj, x);
    CHECK((back - v).norm() < 1e-12 * v.norm());
  }
  // n=1, p=1: V_x = x * u'(z) + (1/2) x^{-1/2} u
  {
    Eigen::VectorXcd uj(2);
    uj << C(0.7, 0.0), C(-0.3, 0.0);
    double x = 4.0;
    Eigen::VectorXcd v = from_scaled_jets(1, uj, {x, 0.0});
    CHECK(std::abs(v[0] - std::sqrt(x) * uj[0]) < 1e-14);
    CHECK(std::abs(v[1] - (x * uj[1] + 0.5 / std::sqrt(x) * uj[0])) < 1e-14);
  }
  CHECK_THROWS_AS(to_scaled_jets(1, Eigen::VectorXcd::Zero(2), {0.0, 0.0}),
                  SingularError);
}

TEST_CASE("scaled equation golden for the first member") {
  ScaledEquation se = transform_equation(build_p2n(1));
  // u'' = 2u^3 + u + (2 alpha/3 - u') / z + u / (9 z^2)
  JetPolynomial expect =
      Rational(2) * u(0, 3) + u(0) +
      Rational(2, 3) * (JetPolynomial::alpha_power(1) *
                        JetPolynomial::x_power(-1)) -
      JetPolynomial::x_power(-1) * u(1) +
      Rational(1, 9) * (JetPolynomial::x_power(-2) * u(0));
  CHECK(se.rhs_z == expect);
  Monomial uz2;  // u / z^2 coefficient is 1/9
  uz2.jets = {1};
  uz2.x = -2;
  CHECK(se.rhs_z.coefficient(uz2) == Rational(1, 9));
}

TEST_CASE("scaled equation structure for n <= 4") {
  for (int n = 1; n <= 4; ++n) {
    HierarchyEquation eq = build_p2n(n);
    ScaledEquation se = transform_equation(eq);
    // coefficient z-degrees within [-2n, 0]
    for (const auto& [m, c] : se.rhs_z.terms()) {
      CHECK(m.x <= 0);
      CHECK(m.x >= -2 * n);
    }
    // autonomous limit: P(u jets) + u + beta u^{2n+1}
    JetPolynomial expect = eq.rhs_poly + u(0) + eq.beta * u(0, 2 * n + 1);
    CHECK(se.autonomous() == expect);
  }
}

TEST_CASE("scaled equation agrees with the numeric frame change") {
  // Substitute a frame-changed jet vector numerically: if V-jets satisfy
  // the original equation at x, the u-jets satisfy the scaled one at z.
  std::mt19937 rng(4711);
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  for (int n = 1; n <= 2; ++n) {
    HierarchyEquation eq = build_p2n(n);
    ScaledEquation se = transform_equation(eq);
    C x(21.0, 8.0), alpha(0.3, -0.2);
    C z = boutroux_z(n, x);
    // random V-jets; define V^{(2n)} from the equation itself
    std::vector<C> vj(static_cast<size_t>(2 * n) + 1);
    Eigen::VectorXcd v(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
      vj[static_cast<size_t>(i)] = C(d(rng), d(rng));
      v[i] = vj[static_cast<size_t>(i)];
    }
    vj[static_cast<size_t>(2 * n)] = eq.rhs_full().evaluate(vj, x, alpha);
    // u-jets including the 2n-th: extend the triangular change one row
    auto Ct = chain_table(n, 2 * n);
    Eigen::VectorXcd uj = to_scaled_jets(n, v, x);
    std::vector<C> ujets(static_cast<size_t>(2 * n) + 1);
    for (int i = 0; i < 2 * n; ++i) ujets[static_cast<size_t>(i)] = uj[i];
    C acc = vj[static_cast<size_t>(2 * n)];
    for (int l = 0; l < 2 * n; ++l) {
      double e = static_cast<double>(l + 1 + 2 * n * (l - 2 * n)) / (2 * n);
      acc -= to_double(Ct[static_cast<size_t>(2 * n)][static_cast<size_t>(l)]) *
             complex_power(x, e) * uj[l];
    }
    double etop = static_cast<double>(2 * n + 1) / (2 * n);
    ujets[static_cast<size_t>(2 * n)] = acc / complex_power(x, etop);
    CHECK(std::abs(se.residual(ujets, z, alpha)) < 1e-12);
  }
}

TEST_CASE("sector geometry") {
  SectorGeometry g1 = sectors(1, Kind::Infty);
  CHECK(g1.S.half_width == doctest::Approx(kPi / 3.0));
  CHECK(g1.Sigma.half_width == doctest::Approx(2.0 * kPi / 3.0));
  REQUIRE(g1.rays.size() == 3);
  CHECK(g1.rays[0] == doctest::Approx(-kPi / 3.0));
  CHECK(g1.rays[1] == doctest::Approx(kPi / 3.0));
  CHECK(g1.rays[2] == doctest::Approx(kPi));
  SectorGeometry g2 = sectors(2, Kind::Zero);
  REQUIRE(g2.rays.size() == 5);
  for (size_t i = 0; i < 5; ++i)
    CHECK(std::abs(normalize_angle(g2.rays[i] -
                                   normalize_angle(kPi + (2.0 * i + 1) * kPi /
                                                   5.0))) > -1.0);
  // the ray set equals {pi + (2j+1)pi/5} as a set
  for (int j = 0; j <= 4; ++j) {
    double want = normalize_angle(kPi + (2 * j + 1) * kPi / 5.0);
    bool found = false;
    for (double r : g2.rays) found = found || std::abs(r - want) < 1e-12;
    CHECK(found);
  }
  // S inside Sigma pointwise
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> rad(11.0, 80.0), ang(-kPi, kPi);
  for (int t = 0; t < 200; ++t) {
    C x = rad(rng) * std::exp(C(0.0, ang(rng)));
    if (g1.S.contains(x)) CHECK(g1.Sigma.contains(x));
  }
  // overlap strips stay inside the union geometry and are centered on rays
  for (const auto& ov : g1.overlaps)
    CHECK(ov.half_width == doctest::Approx(kPi / 24.0));
}

TEST_CASE("characteristic roots and companion condition") {
  // growing kind: mu^2 = (1-2n)z; n=1, z=1 gives +-i
  ExponentSet es = stokes_exponents(1, Kind::Infty, {1.0, 0.0});
  REQUIRE(es.mu.size() == 2);
  CHECK(std::abs(es.mu[0] - C(0.0, 1.0)) < 1e-14);
  CHECK(std::abs(es.mu[1] - C(0.0, -1.0)) < 1e-14);
  CHECK(std::abs(es.nu[0] - C(0.0, 2.0 / 3.0)) < 1e-14);
  // decaying kind: mu^2 = z
  ExponentSet ez = stokes_exponents(1, Kind::Zero, {1.0, 0.0});
  CHECK(std::abs(ez.mu[0] - 1.0) < 1e-14);
  CHECK(std::abs(ez.nu[0] - 2.0 / 3.0) < 1e-14);
  // all roots satisfy mu^{2n} = f(z), successive roots rotated by e^{i pi/n}
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int n = 1; n <= 4; ++n)
    for (Kind kind : {Kind::Infty, Kind::Zero}) {
      C z(d(rng), 1.0 + std::abs(d(rng)));
      ExponentSet e = stokes_exponents(n, kind, z);
      C f = (kind == Kind::Infty ? C(1.0 - 2 * n, 0.0) : C(1.0, 0.0)) * z;
      C rot = std::exp(C(0.0, kPi / n));
      for (int k = 0; k < 2 * n; ++k) {
        CHECK(std::abs(std::pow(e.mu[k], 2 * n) - f) < 1e-12 * std::abs(f));
        // rot^{2n} = 1, so the rotation closes up around the circle
        CHECK(std::abs(e.mu[(k + 1) % (2 * n)] - rot * e.mu[k]) < 1e-12);
      }
    }
}

TEST_CASE("ray rates: oscillatory directions") {
  // decaying kind, n=1: rates ~ Re(e^{i 3 theta/2}) vanish at theta = pi/3
  RayRates osc = ray_rate_profile(1, Kind::Zero, kPi / 3.0);
  CHECK(osc.oscillatory);
  CHECK(osc.min_abs_rate < 1e-12);
  RayRates off = ray_rate_profile(1, Kind::Zero, 0.0);
  CHECK_FALSE(off.oscillatory);
  REQUIRE(off.re_rates.size() == 2);
  CHECK(off.re_rates[0] == doctest::Approx(-off.re_rates[1]));
  CHECK(off.max_rate == doctest::Approx(1.0));
  // 2 pi periodicity holds at the level of the rate set (the extra
  // phase 2 pi (2n+1)/(2n) permutes the root family by one step)
  RayRates a = ray_rate_profile(2, Kind::Infty, 0.4);
  RayRates b = ray_rate_profile(2, Kind::Infty, 0.4 + 2.0 * kPi);
  std::vector<double> as = a.re_rates, bs = b.re_rates;
  std::sort(as.begin(), as.end());
  std::sort(bs.begin(), bs.end());
  for (size_t k = 0; k < as.size(); ++k)
    CHECK(as[k] == doctest::Approx(bs[k]).epsilon(1e-10));
}

TEST_CASE("sector JSON") {
  nlohmann::json j = sectors(2, Kind::Infty).to_json();
  CHECK(j["rays"].size() == 5);
  CHECK(j["S"]["half_width"] == doctest::Approx(2.0 * kPi / 5.0));
}

}  // TEST_SUITE
