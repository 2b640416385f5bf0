#include "p2h/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>

#include <nlohmann/json.hpp>

#include "p2h/errors.hpp"
#include "p2h/rk.hpp"

namespace p2h {

namespace {

template <typename Real>
bool finite_vec(
    const Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>& y) {
  for (int i = 0; i < y.size(); ++i)
    if (!std::isfinite(static_cast<double>(y[i].real())) ||
        !std::isfinite(static_cast<double>(y[i].imag())))
      return false;
  return true;
}

}  // namespace

ODESystem compile_system(const HierarchyEquation& eq,
                         std::complex<double> alpha) {
  ODESystem sys;
  sys.n = eq.n;
  sys.alpha = alpha;
  JetPolynomial rhs = eq.rhs_full();
  std::complex<long double> al(alpha.real(), alpha.imag());
  for (const auto& [m, c] : rhs.terms()) {
    ODESystem::Term t;
    t.c = static_cast<long double>(c.convert_to<long double>());
    for (int e = 0; e < m.alpha; ++e) t.c *= al;
    if (t.c == std::complex<long double>{}) continue;
    for (size_t i = 0; i < m.jets.size(); ++i)
      if (m.jets[i] > 0)
        t.jet_pows.emplace_back(static_cast<int>(i), m.jets[i]);
    t.x_exp = m.x;
    sys.terms.push_back(std::move(t));
  }
  return sys;
}

template <typename Real>
void ODESystem::eval(
    const Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>& y,
    std::complex<Real> x,
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>& f) const {
  const int dim = 2 * n;
  f.resize(dim);
  for (int j = 0; j + 1 < dim; ++j) f[j] = y[j + 1];
  std::complex<Real> acc{};
  for (const auto& t : terms) {
    std::complex<Real> v(static_cast<Real>(t.c.real()),
                         static_cast<Real>(t.c.imag()));
    for (const auto& [i, e] : t.jet_pows)
      for (int k = 0; k < e; ++k) v *= y[i];
    if (t.x_exp > 0)
      for (int k = 0; k < t.x_exp; ++k) v *= x;
    else
      for (int k = 0; k < -t.x_exp; ++k) v /= x;
    acc += v;
  }
  f[dim - 1] = acc;
}

template void ODESystem::eval<double>(
    const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1>&,
    std::complex<double>,
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1>&) const;
template void ODESystem::eval<long double>(
    const Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 1>&,
    std::complex<long double>,
    Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 1>&) const;

Eigen::VectorXcd ODESystem::gradient_last(const Eigen::VectorXcd& y,
                                          std::complex<double> x) const {
  const int dim = 2 * n;
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(dim);
  for (const auto& t : terms) {
    std::complex<double> base(static_cast<double>(t.c.real()),
                              static_cast<double>(t.c.imag()));
    if (t.x_exp > 0)
      for (int k = 0; k < t.x_exp; ++k) base *= x;
    else
      for (int k = 0; k < -t.x_exp; ++k) base /= x;
    for (size_t d = 0; d < t.jet_pows.size(); ++d) {
      std::complex<double> v = base;
      v *= static_cast<double>(t.jet_pows[d].second);
      for (int k = 0; k < t.jet_pows[d].second - 1; ++k)
        v *= y[t.jet_pows[d].first];
      for (size_t o = 0; o < t.jet_pows.size(); ++o) {
        if (o == d) continue;
        for (int k = 0; k < t.jet_pows[o].second; ++k)
          v *= y[t.jet_pows[o].first];
      }
      g[t.jet_pows[d].first] += v;
    }
  }
  return g;
}

std::complex<double> Segment::point(double s) const {
  if (type == Type::Line) return a + s * (b - a);
  double th = theta0 + s * (theta1 - theta0);
  return center + radius * std::exp(std::complex<double>(0.0, th));
}

std::complex<double> Segment::tangent(double s) const {
  if (type == Type::Line) return b - a;
  double th = theta0 + s * (theta1 - theta0);
  return radius * (theta1 - theta0) *
         std::complex<double>(0.0, 1.0) *
         std::exp(std::complex<double>(0.0, th));
}

PathSpec PathSpec::line(std::complex<double> a, std::complex<double> b) {
  PathSpec p;
  Segment s;
  s.type = Segment::Type::Line;
  s.a = a;
  s.b = b;
  p.segments.push_back(s);
  return p;
}

PathSpec& PathSpec::then_line(std::complex<double> b) {
  if (segments.empty()) throw ValidationError("path has no starting segment");
  Segment s;
  s.type = Segment::Type::Line;
  s.a = segments.back().end();
  s.b = b;
  segments.push_back(s);
  return *this;
}

PathSpec& PathSpec::then_arc(std::complex<double> center, double radius,
                             double theta0, double theta1) {
  Segment s;
  s.type = Segment::Type::Arc;
  s.center = center;
  s.radius = radius;
  s.theta0 = theta0;
  s.theta1 = theta1;
  if (!segments.empty() &&
      std::abs(segments.back().end() - s.start()) >
          1e-9 * (1.0 + std::abs(s.start())))
    throw ValidationError("arc does not continue the previous segment");
  segments.push_back(s);
  return *this;
}

void PathSpec::validate() const {
  if (segments.empty()) throw ValidationError("empty path");
  for (size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    if (i > 0 && std::abs(segments[i - 1].end() - s.start()) >
                     1e-9 * (1.0 + std::abs(s.start())))
      throw ValidationError("path segments are not contiguous");
    for (int k = 0; k <= 32; ++k)
      if (std::abs(s.point(k / 32.0)) < 1e-12)
        throw ValidationError("path passes through the origin");
  }
}

nlohmann::json PathSpec::to_json() const {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : segments) {
    if (s.type == Segment::Type::Line)
      segs.push_back({{"type", "line"},
                      {"a", {s.a.real(), s.a.imag()}},
                      {"b", {s.b.real(), s.b.imag()}}});
    else
      segs.push_back({{"type", "arc"},
                      {"center", {s.center.real(), s.center.imag()}},
                      {"radius", s.radius},
                      {"theta0", s.theta0},
                      {"theta1", s.theta1}});
  }
  return {{"segments", segs}};
}

PathSpec PathSpec::from_json(const nlohmann::json& j) {
  PathSpec p;
  if (!j.contains("segments") || !j["segments"].is_array())
    throw ValidationError("path JSON must contain a segments array");
  for (const auto& js : j["segments"]) {
    Segment s;
    std::string type = js.at("type").get<std::string>();
    if (type == "line") {
      s.type = Segment::Type::Line;
      s.a = {js.at("a")[0].get<double>(), js.at("a")[1].get<double>()};
      s.b = {js.at("b")[0].get<double>(), js.at("b")[1].get<double>()};
    } else if (type == "arc") {
      s.type = Segment::Type::Arc;
      s.center = {js.at("center")[0].get<double>(),
                  js.at("center")[1].get<double>()};
      s.radius = js.at("radius").get<double>();
      s.theta0 = js.at("theta0").get<double>();
      s.theta1 = js.at("theta1").get<double>();
    } else {
      throw ValidationError("unknown path segment type: " + type);
    }
    p.segments.push_back(s);
  }
  p.validate();
  return p;
}

const char* status_name(TrajStatus s) {
  switch (s) {
    case TrajStatus::Completed: return "completed";
    case TrajStatus::PoleDetected: return "pole";
    default: return "tolerance_failure";
  }
}

const char* trigger_name(PoleTrigger t) {
  return t == PoleTrigger::MagnitudeBlowup ? "magnitude_blowup"
                                           : "step_collapse";
}

Precision precision_from_env() {
  const char* v = std::getenv("P2H_PRECISION");
  if (v && std::string(v) == "extended") return Precision::Extended;
  return Precision::Double;
}

namespace {

// Least-squares fit of |V| ~ C |x - x_p|^{-q} over the trailing samples,
// scanning the pole offset along the local path direction.
PoleEvent fit_pole(const std::vector<TrajectorySample>& samples,
                   std::complex<double> direction, PoleTrigger trigger) {
  PoleEvent ev;
  ev.trigger = trigger;
  size_t m = std::min<size_t>(samples.size(), 10);
  const TrajectorySample& last = samples.back();
  ev.last_abs_v = std::abs(last.y[0]);
  ev.x_p = last.x;
  if (m < 4) return ev;
  std::complex<double> dir = direction / std::abs(direction);
  double span = std::abs(samples[samples.size() - m].x - last.x);
  if (span == 0.0) return ev;
  double best_res = std::numeric_limits<double>::infinity();
  for (int gi = 0; gi < 80; ++gi) {
    double d = span * std::pow(10.0, -3.0 + 4.0 * gi / 79.0);
    std::complex<double> xp = last.x + d * dir;
    // regress log|V| on log|x - xp|
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = samples.size() - m; i < samples.size(); ++i) {
      double lx = std::log(std::abs(samples[i].x - xp));
      double ly = std::log(std::abs(samples[i].y[0]));
      sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    double denom = m * sxx - sx * sx;
    if (std::abs(denom) < 1e-30) continue;
    double slope = (m * sxy - sx * sy) / denom;
    double icept = (sy - slope * sx) / m;
    double res = 0;
    for (size_t i = samples.size() - m; i < samples.size(); ++i) {
      double lx = std::log(std::abs(samples[i].x - xp));
      double ly = std::log(std::abs(samples[i].y[0]));
      res += (ly - (icept + slope * lx)) * (ly - (icept + slope * lx));
    }
    if (res < best_res) {
      best_res = res;
      ev.x_p = xp;
      ev.fitted_q = -slope;
    }
  }
  return ev;
}

template <typename Real>
Trajectory run_path(const ODESystem& sys, const Eigen::VectorXcd& y0,
                    const PathSpec& path, double tol,
                    const IntegrateOptions& opts) {
  using Vec = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
  Trajectory traj;
  Vec y = y0.cast<std::complex<Real>>();
  traj.samples.push_back({path.segments.front().start(), y0, 0.0});
  long steps = 0;
  for (const Segment& seg : path.segments) {
    if (std::abs(seg.start() - seg.end()) == 0.0 &&
        seg.type == Segment::Type::Line)
      continue;
    auto F = [&](double s, const Vec& yy) -> Vec {
      std::complex<double> xd = seg.point(s);
      std::complex<double> td = seg.tangent(s);
      std::complex<Real> x(static_cast<Real>(xd.real()),
                           static_cast<Real>(xd.imag()));
      std::complex<Real> t(static_cast<Real>(td.real()),
                           static_cast<Real>(td.imag()));
      Vec f;
      sys.eval(yy, x, f);
      return Vec(f * t);
    };
    double s = 0.0, h = 1e-3;
    while (s < 1.0) {
      if (++steps > opts.max_steps) {
        traj.status = TrajStatus::ToleranceFailure;
        return traj;
      }
      h = std::min(h, 1.0 - s);
      Vec y5;
      double errn = 0.0;
      dp54_step(F, s, y, h, y5, errn, tol, tol);
      bool ok = std::isfinite(errn) && errn <= 1.0 && finite_vec(y5);
      if (!ok) {
        // reject; check for step collapse before retrying
        double xabs = std::abs(seg.point(s));
        double hx = h * std::abs(seg.tangent(s));
        if (hx < opts.step_floor * xabs) {
          double y0abs = std::abs(traj.samples.front().y[0]);
          if (std::abs(std::complex<double>(
                  static_cast<double>(y[0].real()),
                  static_cast<double>(y[0].imag()))) >
              100.0 * std::max(1.0, y0abs)) {
            traj.status = TrajStatus::PoleDetected;
            traj.pole = fit_pole(traj.samples, seg.tangent(s),
                                 PoleTrigger::StepCollapse);
          } else {
            traj.status = TrajStatus::ToleranceFailure;
          }
          return traj;
        }
        double shrink =
            std::isfinite(errn) && errn > 0.0
                ? std::max(0.1, 0.9 * std::pow(errn, -0.2))
                : 0.1;
        h *= std::min(shrink, 0.9);
        continue;
      }
      s += h;
      y = y5;
      TrajectorySample smp;
      smp.x = seg.point(s);
      smp.y = Eigen::VectorXcd(y.size());
      for (int i = 0; i < y.size(); ++i)
        smp.y[i] = std::complex<double>(static_cast<double>(y[i].real()),
                                        static_cast<double>(y[i].imag()));
      smp.err = errn * tol;
      traj.samples.push_back(std::move(smp));
      if (std::abs(traj.samples.back().y[0]) > opts.blowup_threshold) {
        traj.status = TrajStatus::PoleDetected;
        traj.pole = fit_pole(traj.samples, seg.tangent(s),
                             PoleTrigger::MagnitudeBlowup);
        return traj;
      }
      h *= (errn > 0.0)
               ? std::clamp(0.9 * std::pow(errn, -0.2), 0.3, 5.0)
               : 5.0;
    }
  }
  traj.status = TrajStatus::Completed;
  return traj;
}

}  // namespace

Trajectory integrate_path(const ODESystem& sys, const Eigen::VectorXcd& y0,
                          const PathSpec& path, double tol,
                          const IntegrateOptions& opts) {
  if (y0.size() != sys.dimension())
    throw ValidationError("state vector dimension mismatch");
  if (!(tol >= 1e-13 && tol <= 1e-6))
    throw ValidationError("tolerance must lie in [1e-13, 1e-6]");
  path.validate();
  if (opts.precision == Precision::Extended)
    return run_path<long double>(sys, y0, path, tol, opts);
  return run_path<double>(sys, y0, path, tol, opts);
}

Eigen::VectorXcd seed_from_series(const FormalSeries& s,
                                  std::complex<double> x0,
                                  std::optional<double> arg_hint,
                                  double* err) {
  auto jets = seed_jets(s, x0, arg_hint, err);
  Eigen::VectorXcd y(static_cast<int>(jets.size()));
  for (size_t i = 0; i < jets.size(); ++i) y[static_cast<int>(i)] = jets[i];
  return y;
}

std::vector<PoleScanRow> pole_map(const ODESystem& sys,
                                  const FormalSeries& series,
                                  double angle_start, double angle_end,
                                  int count, double r_seed, double r_min,
                                  double tol, const IntegrateOptions& opts) {
  if (count < 1) throw ValidationError("ray count must be positive");
  if (!(r_seed > r_min && r_min > 0))
    throw ValidationError("need r_seed > r_min > 0");
  std::vector<double> angles;
  for (int i = 0; i < count; ++i)
    angles.push_back(count == 1 ? angle_start
                                : angle_start + (angle_end - angle_start) *
                                                    i / (count - 1));
  auto scan_ray = [&](double th) -> PoleScanRow {
    PoleScanRow row;
    row.angle = th;
    std::complex<double> dir = std::exp(std::complex<double>(0.0, th));
    try {
      Eigen::VectorXcd y0 = seed_from_series(series, r_seed * dir, th);
      Trajectory t = integrate_path(sys, y0,
                                    PathSpec::line(r_seed * dir, r_min * dir),
                                    tol, opts);
      row.status = t.status;
      if (t.pole) {
        row.pole_radius = std::abs(t.pole->x_p);
        row.trigger = t.pole->trigger;
        row.fitted_q = t.pole->fitted_q;
      }
    } catch (const std::exception&) {
      row.status = TrajStatus::ToleranceFailure;
    }
    return row;
  };
  std::vector<std::future<PoleScanRow>> futs;
  for (double th : angles)
    futs.push_back(std::async(std::launch::async, scan_ray, th));
  std::vector<PoleScanRow> rows;
  for (auto& f : futs) rows.push_back(f.get());
  std::sort(rows.begin(), rows.end(),
            [](const PoleScanRow& a, const PoleScanRow& b) {
              return a.angle < b.angle;
            });
  return rows;
}

}  // namespace p2h
