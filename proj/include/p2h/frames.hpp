#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "p2h/hierarchy.hpp"
#include "p2h/series.hpp"

namespace p2h {

// Normalize an angle to (-pi, pi].
double normalize_angle(double a);

struct SectorSpec {
  int n = 0;
  Kind kind = Kind::Infty;
  double center_angle = 0.0;
  double half_width = 0.0;
  double inner_radius = 0.0;
  std::string label;

  // Membership per arg(x - x0) with x0 on the center ray at inner_radius.
  bool contains(std::complex<double> x) const;
  nlohmann::json to_json() const;
};

struct SectorGeometry {
  int n = 0;
  Kind kind = Kind::Infty;
  double epsilon = 0.0;
  double inner_radius = 0.0;
  std::vector<double> rays;          // the 2n+1 oscillatory rays, normalized
  SectorSpec S;                      // half-width n pi/(2n+1)
  SectorSpec Sigma;                  // half-width 2n pi/(2n+1)
  std::vector<SectorSpec> overlaps;  // S_eps strips around each ray
  nlohmann::json to_json() const;
};

// Ray set and sector geometry; pass negative epsilon/inner_radius for the
// defaults (pi/(8(2n+1)) and 10 for n <= 2, 20 otherwise).
SectorGeometry sectors(int n, Kind kind, double epsilon = -1.0,
                       double inner_radius = -1.0);

// z = (2n/(2n+1)) x^{(2n+1)/(2n)} and its inverse.
std::complex<double> boutroux_z(int n, std::complex<double> x,
                                std::optional<double> arg_hint = {});
std::complex<double> boutroux_x(int n, std::complex<double> z,
                                std::optional<double> arg_hint = {});

// Chain-rule coefficients: d^p V / dx^p = sum_l C[p][l] x^{((l+1)+2n(l-p))/(2n)} u^{(l)}(z).
std::vector<std::vector<Rational>> chain_table(int n, int pmax);

// Jet change of coordinates between the two frames (vectors of length 2n:
// value and first 2n-1 derivatives).
Eigen::VectorXcd to_scaled_jets(int n, const Eigen::VectorXcd& v_jets,
                                std::complex<double> x,
                                std::optional<double> arg_hint = {});
Eigen::VectorXcd from_scaled_jets(int n, const Eigen::VectorXcd& u_jets,
                                  std::complex<double> x,
                                  std::optional<double> arg_hint = {});

// The scaled equation u^{(2n)} = rhs_z(u, ..., u^{(2n-2)}; z) with Laurent
// polynomial coefficients in z (the x slot of each monomial holds the z
// exponent, in [-2n, 0]).
struct ScaledEquation {
  int n = 0;
  JetPolynomial rhs_z;

  // z-degree-0 part: (2n/(2n+1))-free autonomous limit equation.
  JetPolynomial autonomous() const;
  // u^{(2n)} - rhs_z at numeric jets (u, ..., u^{(2n)}).
  std::complex<double> residual(const std::vector<std::complex<double>>& jets,
                                std::complex<double> z,
                                std::complex<double> alpha) const;
  nlohmann::json to_json() const;
  std::string to_latex() const;
};
ScaledEquation transform_equation(const HierarchyEquation& eq);

// Characteristic roots mu_k of mu^{2n} = f(z) with f(z) = (1-2n)z for the
// growing kind and f(z) = z for the decaying kind, plus their
// antiderivative scalings nu_k = (2n/(2n+1)) z mu_k.
struct ExponentSet {
  int n = 0;
  Kind kind = Kind::Infty;
  std::complex<double> z{};
  std::vector<std::complex<double>> mu;
  std::vector<std::complex<double>> nu;
};
ExponentSet stokes_exponents(int n, Kind kind, std::complex<double> z,
                             std::optional<double> arg_hint = {});

// Re nu_k per unit (2n/(2n+1)) |x|^{(2n+1)/(2n)} along arg x = angle.
struct RayRates {
  int n = 0;
  Kind kind = Kind::Infty;
  double angle = 0.0;
  std::vector<double> re_rates;
  double max_rate = 0.0;      // max_k Re
  double min_abs_rate = 0.0;  // min_k |Re|
  bool oscillatory = false;   // some rate vanishes (to 1e-12)
};
RayRates ray_rate_profile(int n, Kind kind, double angle);

}  // namespace p2h
