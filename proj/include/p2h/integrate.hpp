#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "p2h/hierarchy.hpp"
#include "p2h/series.hpp"

namespace p2h {

// First-order complex system y' = f(y, x): f_j = y_{j+1} for j < 2n,
// f_{2n} = rhs_full(y_1, ..., y_{2n}; x, alpha). Coefficients flattened
// from the exact equation at compile time.
struct ODESystem {
  struct Term {
    std::complex<long double> c;  // rational coefficient times alpha^e
    std::vector<std::pair<int, int>> jet_pows;  // (index, exponent)
    int x_exp = 0;
  };
  int n = 0;
  std::complex<double> alpha{};
  std::vector<Term> terms;

  int dimension() const { return 2 * n; }
  template <typename Real>
  void eval(const Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>& y,
            std::complex<Real> x,
            Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>& f) const;
  // Jacobian row of f_{2n} with respect to y (used by the linearization).
  Eigen::VectorXcd gradient_last(const Eigen::VectorXcd& y,
                                 std::complex<double> x) const;
};

ODESystem compile_system(const HierarchyEquation& eq,
                         std::complex<double> alpha);

struct Segment {
  enum class Type { Line, Arc };
  Type type = Type::Line;
  std::complex<double> a{}, b{};  // line endpoints
  std::complex<double> center{};  // arc data
  double radius = 0.0, theta0 = 0.0, theta1 = 0.0;

  std::complex<double> point(double s) const;   // s in [0,1]
  std::complex<double> tangent(double s) const;  // dx/ds
  std::complex<double> start() const { return point(0.0); }
  std::complex<double> end() const { return point(1.0); }
};

struct PathSpec {
  std::vector<Segment> segments;

  static PathSpec line(std::complex<double> a, std::complex<double> b);
  PathSpec& then_line(std::complex<double> b);
  PathSpec& then_arc(std::complex<double> center, double radius,
                     double theta0, double theta1);
  void validate() const;  // contiguity, no passage through 0
  nlohmann::json to_json() const;
  static PathSpec from_json(const nlohmann::json& j);
};

enum class TrajStatus { Completed, PoleDetected, ToleranceFailure };
enum class PoleTrigger { MagnitudeBlowup, StepCollapse };

const char* status_name(TrajStatus s);
const char* trigger_name(PoleTrigger t);

struct PoleEvent {
  std::complex<double> x_p{};  // extrapolated location
  PoleTrigger trigger = PoleTrigger::MagnitudeBlowup;
  double last_abs_v = 0.0;
  double fitted_q = 0.0;  // |V| ~ C |x - x_p|^{-q}
};

struct TrajectorySample {
  std::complex<double> x{};
  Eigen::VectorXcd y;
  double err = 0.0;  // local error estimate of the step ending here
};

struct Trajectory {
  TrajStatus status = TrajStatus::Completed;
  std::vector<TrajectorySample> samples;
  std::optional<PoleEvent> pole;

  const TrajectorySample& back() const { return samples.back(); }
};

enum class Precision { Double, Extended };
// Reads P2H_PRECISION ("double" | "extended"); defaults to double.
Precision precision_from_env();

struct IntegrateOptions {
  double blowup_threshold = 1e8;
  double step_floor = 1e-12;  // times |x|, in x-plane units
  long max_steps = 2000000;
  Precision precision = precision_from_env();
};

// Adaptive integration along the path; tol in [1e-13, 1e-6] is both the
// absolute and relative local error target.
Trajectory integrate_path(const ODESystem& sys, const Eigen::VectorXcd& y0,
                          const PathSpec& path, double tol,
                          const IntegrateOptions& opts = {});

// State vector from the optimally truncated series; error estimate of the
// truncation returned through err.
Eigen::VectorXcd seed_from_series(const FormalSeries& s,
                                  std::complex<double> x0,
                                  std::optional<double> arg_hint = {},
                                  double* err = nullptr);

struct PoleScanRow {
  double angle = 0.0;
  TrajStatus status = TrajStatus::Completed;
  std::optional<double> pole_radius;
  std::optional<PoleTrigger> trigger;
  double fitted_q = 0.0;
};

// Seed each ray of the fan at r_seed from the series (argument continued,
// not normalized) and integrate inward to r_min. Rays run in parallel;
// rows come back sorted by angle.
std::vector<PoleScanRow> pole_map(const ODESystem& sys,
                                  const FormalSeries& series,
                                  double angle_start, double angle_end,
                                  int count, double r_seed, double r_min,
                                  double tol,
                                  const IntegrateOptions& opts = {});

}  // namespace p2h
