#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "p2h/frames.hpp"
#include "p2h/integrate.hpp"

namespace p2h {

// Linearization of the hierarchy equation about a base trajectory: a
// first-order companion system with ones on the superdiagonal and the
// Jacobian row of the highest derivative along the bottom.
struct LinearSystem {
  int n = 0;
  std::vector<std::complex<double>> xs;     // sample abscissae of the base
  std::vector<Eigen::MatrixXcd> companions;  // 2n x 2n per sample
};

// Requires a Completed base trajectory (ValidationError otherwise).
LinearSystem linearize(const HierarchyEquation& eq, const Trajectory& base);

// Constant companion matrix of the scaled, frozen-coefficient system:
// superdiagonal ones and f(z) in the bottom-left corner, where
// f(z) = (1-2n) z for the growing kind and f(z) = z for the decaying kind.
struct CompanionA0 {
  int n = 0;
  Kind kind = Kind::Infty;
  std::complex<double> z{};
  Eigen::MatrixXcd matrix;
  // explicit 2n-th-root family of f(z), same convention as stokes_exponents
  std::vector<std::complex<double>> mu;
  // cross-check from a generic dense eigensolver, sorted to match mu
  std::vector<std::complex<double>> mu_numeric;
};
CompanionA0 companion_a0(int n, Kind kind, std::complex<double> z,
                         std::optional<double> arg_hint = {});

// Measured exponential separation of perturbations about a series-seeded
// base solution along the ray arg x = angle, |x| in [r_lo, r_hi].
// fitted_slopes are d log|W| / d xi with xi = (2n/(2n+1)) |x|^{(2n+1)/(2n)},
// one per renormalized mode; predicted_rates come from ray_rate_profile.
struct SeparationReport {
  int n = 0;
  Kind kind = Kind::Infty;
  double angle = 0.0;
  double r_lo = 0.0, r_hi = 0.0;
  std::vector<double> fitted_slopes;
  std::vector<double> predicted_rates;
  double fit_condition = 0.0;
  TrajStatus base_status = TrajStatus::Completed;
};
SeparationReport separation_rate(const HierarchyEquation& eq, Kind kind,
                                 double angle, double r_lo, double r_hi,
                                 std::complex<double> alpha, double tol,
                                 const IntegrateOptions& opts = {});

}  // namespace p2h
