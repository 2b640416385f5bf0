#include <doctest.h>

#include <cmath>
#include <complex>

#include "p2h/hierarchy.hpp"
#include "p2h/series.hpp"

using namespace p2h;

namespace {
constexpr double kPi = 3.14159265358979323846;
using C = std::complex<double>;
}

TEST_SUITE("series") {

TEST_CASE("complex powers and branch control") {
  CHECK(std::abs(complex_power({4.0, 0.0}, 0.5) - 2.0) < 1e-15);
  CHECK_THROWS_AS(complex_power({-4.0, 0.0}, 0.5), BranchError);
  // integer exponents never need a hint
  CHECK(std::abs(complex_power({-4.0, 0.0}, -1.0) + 0.25) < 1e-15);
  // hint selects the sheet
  auto up = complex_power({-4.0, 0.0}, 0.5, kPi);
  auto dn = complex_power({-4.0, 0.0}, 0.5, -kPi);
  CHECK(std::abs(up - C(0.0, 2.0)) < 1e-14);
  CHECK(std::abs(dn - C(0.0, -2.0)) < 1e-14);
}

TEST_CASE("growing branch leading term for the first member") {
  HierarchyEquation eq = build_p2n(1);
  FormalSeries s = series_coefficients(eq, Kind::Infty, 8, true, 0.0);
  // A^2 = -1/2 and on the lower sheet of the negative axis the leading
  // term is sqrt(-x/2)
  CHECK(s.A_relation == Rational(-1, 2));
  C lead = s.term(0, {-50.0, 0.0}, -kPi);
  CHECK(std::abs(lead - 5.0) < 1e-13);
  SeriesEvaluation ev = evaluate_series(s, {-50.0, 0.0}, -1, -kPi);
  CHECK(std::abs(ev.value - 5.0) < 0.01);
  CHECK(std::abs(ev.value) > 4.9);
  CHECK(ev.error_estimate < 1e-3);
}

TEST_CASE("leading balance identity in the coefficient ring") {
  for (int n = 1; n <= 3; ++n) {
    HierarchyEquation eq = build_p2n(n);
    FormalSeries s = series_coefficients(eq, Kind::Infty, 2, true, 0.0);
    ExtRing R = s.ring();
    CHECK(R.scal(eq.beta, R.root_gen(2 * n)).c == R.from_rational(-1).c);
    // numeric branch root satisfies the relation too
    C rel = std::pow(s.A_value, 2 * n);
    CHECK(std::abs(rel - to_double(s.A_relation)) < 1e-14);
  }
}

TEST_CASE("branch ids rotate the leading coefficient by exp(i pi / n)") {
  for (int n = 1; n <= 3; ++n) {
    HierarchyEquation eq = build_p2n(n);
    FormalSeries s0 = series_coefficients(eq, Kind::Infty, 3, true, 0.5, 0);
    FormalSeries s1 = series_coefficients(eq, Kind::Infty, 3, true, 0.5, 1);
    C rot = std::exp(C(0.0, kPi / n));
    CHECK(std::abs(s1.A_value - rot * s0.A_value) < 1e-14);
  }
}

TEST_CASE("decaying branch leading term and alpha = 1 collapse") {
  HierarchyEquation eq = build_p2n(1);
  FormalSeries s = series_coefficients(eq, Kind::Zero, 6, true, {2.0, 0.0});
  // V ~ -alpha/x, next nonzero term (2 alpha^3 - 2 alpha) x^{-4}
  CHECK(std::abs(s.coeffs[0] + 2.0) < 1e-15);
  CHECK(std::abs(s.coeffs[1]) < 1e-15);
  CHECK(std::abs(s.coeffs[2] - (2.0 * 8.0 - 2.0 * 2.0)) < 1e-12);
  // alpha = 1 makes V = -1/x an exact solution: all corrections vanish
  FormalSeries s1 = series_coefficients(eq, Kind::Zero, 8, true, {1.0, 0.0});
  for (int k = 1; k <= 8; ++k) CHECK(std::abs(s1.coeffs[k]) < 1e-15);
  CHECK_THROWS_AS(series_coefficients(eq, Kind::Zero, 4, false, 0.0),
                  ZeroAlphaError);
}

TEST_CASE("dominant balance of the decaying branch") {
  for (int n = 1; n <= 3; ++n) {
    ZeroBalanceReport r = zero_balance_report(n);
    CHECK(r.matches_primary);
    CHECK_FALSE(r.matches_alternate);
  }
}

TEST_CASE("exact and float drivers agree") {
  for (int n = 1; n <= 3; ++n) {
    HierarchyEquation eq = build_p2n(n);
    int K = (n == 3) ? 8 : 10;
    for (Kind kind : {Kind::Infty, Kind::Zero}) {
      C alpha{0.3, 0.1};
      FormalSeries ex = series_coefficients(eq, kind, K, true, alpha);
      FormalSeries fl = series_coefficients(eq, kind, K, false, alpha);
      double scale = 1.0;
      for (int k = 0; k <= K; ++k) {
        scale = std::max(scale, std::abs(ex.coeffs[k]));
        CHECK(std::abs(ex.coeffs[k] - fl.coeffs[k]) <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("residual of the truncation decays at the predicted rate") {
  HierarchyEquation eq = build_p2n(2);
  FormalSeries s = series_coefficients(eq, Kind::Infty, 5, true, {0.25, 0.0});
  ResidualExpansion R = residual_expansion(eq, s);
  int predicted = s.j0 + (s.K + 1) * s.step - 2 * s.n;
  CHECK(R.lowest_grade >= predicted);
  CHECK(R.lowest_grade == s.residual_order);
  // slope of log|R| against log|x| approaches -lowest_grade/(2n)
  double r1 = std::abs(R.eval({200.0, 0.0}));
  double r2 = std::abs(R.eval({800.0, 0.0}));
  double slope = (std::log(r2) - std::log(r1)) / std::log(4.0);
  CHECK(slope == doctest::Approx(-R.lowest_grade / 4.0).epsilon(0.02));
  // the direct numeric residual agrees where cancellation is mild
  C direct = residual(eq, s, s.K, {200.0, 0.0});
  CHECK(std::abs(direct - R.eval({200.0, 0.0})) <
        1e-6 * std::max(1.0, std::abs(direct)));
}

TEST_CASE("optimal truncation bookkeeping") {
  HierarchyEquation eq = build_p2n(1);
  FormalSeries s = series_coefficients(eq, Kind::Infty, 10, true, {0.5, 0.0});
  SeriesEvaluation ev = evaluate_series(s, {40.0, 0.0});
  // k_star minimizes the nonzero term magnitudes
  for (int k = 0; k <= s.K; ++k) {
    double m = std::abs(s.term(k, {40.0, 0.0}));
    if (m > 0.0) CHECK(m >= std::abs(s.term(ev.k_star, {40.0, 0.0})));
  }
  // fixed truncation sums exactly the first terms
  SeriesEvaluation e2 = evaluate_series(s, {40.0, 0.0}, 2);
  C expect = s.term(0, {40.0, 0.0}) + s.term(1, {40.0, 0.0}) +
             s.term(2, {40.0, 0.0});
  CHECK(std::abs(e2.value - expect) < 1e-15 * std::abs(expect));
}

TEST_CASE("seed jets match termwise derivatives") {
  HierarchyEquation eq = build_p2n(1);
  FormalSeries s = series_coefficients(eq, Kind::Infty, 10, true, 0.0);
  double err = 0.0;
  auto jets = seed_jets(s, {60.0, 0.0}, {}, &err);
  REQUIRE(jets.size() == 2);
  CHECK(err < 1e-10);
  // first entry equals the optimally truncated value
  SeriesEvaluation ev = evaluate_series(s, {60.0, 0.0});
  CHECK(std::abs(jets[0] - ev.value) < 1e-14 * std::abs(ev.value));
  // derivative entry against a central difference of the evaluation
  double h = 1e-4;
  SeriesEvaluation ep = evaluate_series(s, {60.0 + h, 0.0}, ev.k_star);
  SeriesEvaluation em = evaluate_series(s, {60.0 - h, 0.0}, ev.k_star);
  C fd = (ep.value - em.value) / (2.0 * h);
  CHECK(std::abs(jets[1] - fd) < 1e-6);
}

}  // TEST_SUITE
