#include "p2h/variational.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "p2h/errors.hpp"
#include "p2h/rk.hpp"

namespace p2h {

namespace {
using C = std::complex<double>;
}  // namespace

LinearSystem linearize(const HierarchyEquation& eq, const Trajectory& base) {
  if (base.status != TrajStatus::Completed)
    throw ValidationError("linearize: base trajectory did not complete");
  if (base.samples.empty())
    throw ValidationError("linearize: base trajectory has no samples");
  ODESystem sys = compile_system(eq, 0.0);  // the Jacobian is alpha-free
  const int d = sys.dimension();
  LinearSystem ls;
  ls.n = eq.n;
  ls.xs.reserve(base.samples.size());
  ls.companions.reserve(base.samples.size());
  for (const auto& s : base.samples) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i + 1 < d; ++i) m(i, i + 1) = 1.0;
    m.row(d - 1) = sys.gradient_last(s.y, s.x).transpose();
    ls.xs.push_back(s.x);
    ls.companions.push_back(std::move(m));
  }
  return ls;
}

CompanionA0 companion_a0(int n, Kind kind, std::complex<double> z,
                         std::optional<double> arg_hint) {
  if (n < 1) throw ValidationError("companion_a0: n must be >= 1");
  if (z == 0.0) throw ValidationError("companion_a0: z must be nonzero");
  CompanionA0 out;
  out.n = n;
  out.kind = kind;
  out.z = z;
  const int d = 2 * n;
  out.matrix = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) out.matrix(i, i + 1) = 1.0;
  const C f = (kind == Kind::Infty) ? C(1.0 - 2.0 * n) * z : z;
  out.matrix(d - 1, 0) = f;
  out.mu = stokes_exponents(n, kind, z, arg_hint).mu;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(out.matrix);
  std::vector<C> ev(es.eigenvalues().data(), es.eigenvalues().data() + d);
  // greedy nearest-match so mu_numeric[k] pairs with mu[k]
  out.mu_numeric.resize(static_cast<size_t>(d));
  std::vector<bool> used(static_cast<size_t>(d), false);
  for (int k = 0; k < d; ++k) {
    int best = -1;
    double bd = 0.0;
    for (int j = 0; j < d; ++j) {
      if (used[static_cast<size_t>(j)]) continue;
      double dd = std::abs(ev[static_cast<size_t>(j)] -
                           out.mu[static_cast<size_t>(k)]);
      if (best < 0 || dd < bd) {
        best = j;
        bd = dd;
      }
    }
    used[static_cast<size_t>(best)] = true;
    out.mu_numeric[static_cast<size_t>(k)] = ev[static_cast<size_t>(best)];
  }
  return out;
}

namespace {

// Adaptive joint integration of the base state and the 2n x 2n perturbation
// matrix along the straight segment [xa, xb]; throws ToleranceFailure on
// step collapse.
void advance_joint(const ODESystem& sys, Eigen::VectorXcd& y,
                   Eigen::MatrixXcd& W, C xa, C xb, double tol,
                   const IntegrateOptions& opts) {
  const int d = sys.dimension();
  const int total = d + d * d;
  const C dx = xb - xa;
  auto pack = [&](const Eigen::VectorXcd& yy, const Eigen::MatrixXcd& ww) {
    Eigen::VectorXcd u(total);
    u.head(d) = yy;
    for (int j = 0; j < d; ++j) u.segment(d + j * d, d) = ww.col(j);
    return u;
  };
  auto rhs = [&](double s, const Eigen::VectorXcd& u) {
    const C x = xa + s * dx;
    Eigen::VectorXcd yy = u.head(d), fy(d), out(total);
    sys.eval(yy, x, fy);
    out.head(d) = fy * dx;
    const Eigen::VectorXcd g = sys.gradient_last(yy, x);
    for (int j = 0; j < d; ++j) {
      auto w = u.segment(d + j * d, d);
      auto fw = out.segment(d + j * d, d);
      for (int i = 0; i + 1 < d; ++i) fw[i] = w[i + 1] * dx;
      C gw = 0.0;  // plain (non-Hermitian) product g . w
      for (int i = 0; i < d; ++i) gw += g[i] * w[i];
      fw[d - 1] = gw * dx;
    }
    return out;
  };
  Eigen::VectorXcd u = pack(y, W);
  double s = 0.0, h = 0.05;
  long steps = 0;
  while (s < 1.0) {
    if (s + h > 1.0) h = 1.0 - s;
    Eigen::VectorXcd u5(total);
    double errn = 0.0;
    dp54_step(rhs, s, u, h, u5, errn, tol, tol);
    if (errn <= 1.0) {
      s += h;
      u = u5;
      double grow = errn > 0.0 ? 0.9 * std::pow(errn, -0.2) : 5.0;
      h *= std::clamp(grow, 0.3, 5.0);
    } else {
      h *= std::min(0.9, 0.9 * std::pow(errn, -0.25));
    }
    if (h * std::abs(dx) < opts.step_floor * std::abs(xa + s * dx))
      throw ToleranceFailure("separation_rate: step collapse on the ray");
    if (++steps > opts.max_steps)
      throw ToleranceFailure("separation_rate: step budget exhausted");
  }
  y = u.head(d);
  for (int j = 0; j < d; ++j) W.col(j) = u.segment(d + j * d, d);
}

}  // namespace

SeparationReport separation_rate(const HierarchyEquation& eq, Kind kind,
                                 double angle, double r_lo, double r_hi,
                                 std::complex<double> alpha, double tol,
                                 const IntegrateOptions& opts) {
  if (!(r_hi > r_lo) || r_lo <= 0.0)
    throw ValidationError("separation_rate: need 0 < r_lo < r_hi");
  const int n = eq.n;
  const int d = 2 * n;
  SeparationReport rep;
  rep.n = n;
  rep.kind = kind;
  rep.angle = angle;
  rep.r_lo = r_lo;
  rep.r_hi = r_hi;
  rep.predicted_rates = ray_rate_profile(n, kind, angle).re_rates;

  const int K = (n == 1) ? 10 : 8;
  FormalSeries series = series_coefficients(eq, kind, K, true, alpha);
  const C dir = std::polar(1.0, angle);
  Eigen::VectorXcd y = seed_from_series(series, r_hi * dir, angle);
  ODESystem sys = compile_system(eq, alpha);

  const double p = (2.0 * n + 1.0) / (2.0 * n);
  auto xi = [&](double r) { return std::pow(r, p) / p; };

  // checkpoints inward from r_hi to r_lo; QR renormalization at each keeps
  // the perturbation columns bounded and accumulates per-mode log growth
  const int m_checks = 48;
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Identity(d, d);
  std::vector<double> xis;
  std::vector<Eigen::VectorXd> logs;  // cumulative log |R_kk|
  Eigen::VectorXd cum = Eigen::VectorXd::Zero(d);
  xis.push_back(xi(r_hi));
  logs.push_back(cum);
  for (int m = 1; m <= m_checks; ++m) {
    const double ra = r_hi + (r_lo - r_hi) * (m - 1) / double(m_checks);
    const double rb = r_hi + (r_lo - r_hi) * m / double(m_checks);
    advance_joint(sys, y, W, ra * dir, rb * dir, tol, opts);
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > opts.blowup_threshold) {
      rep.base_status = TrajStatus::PoleDetected;
      break;
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(W);
    Eigen::MatrixXcd R =
        qr.matrixQR().triangularView<Eigen::Upper>();
    Eigen::MatrixXcd Q =
        qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
    for (int k = 0; k < d; ++k) cum[k] += std::log(std::abs(R(k, k)));
    W = Q;
    xis.push_back(xi(rb));
    logs.push_back(cum);
  }

  // least squares on the half of the window with largest |x|
  const double xi_mid = xi(0.5 * (r_lo + r_hi));
  std::vector<size_t> sel;
  for (size_t i = 0; i < xis.size(); ++i)
    if (xis[i] >= xi_mid) sel.push_back(i);
  if (sel.size() < 5)
    throw FitError("separation_rate: too few checkpoints for a stable fit");
  Eigen::MatrixXd A(sel.size(), 2);
  for (size_t i = 0; i < sel.size(); ++i) {
    A(static_cast<Eigen::Index>(i), 0) = xis[sel[i]];
    A(static_cast<Eigen::Index>(i), 1) = 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  const double cond =
      svd.singularValues()(0) /
      std::max(svd.singularValues()(1), 1e-300);
  rep.fit_condition = cond;
  const double span = xis[sel.front()] - xis[sel.back()];
  if (std::abs(span) < 1e-4 * std::max(1.0, std::abs(xi_mid)) || cond > 1e12)
    throw FitError("separation_rate: fit window is degenerate (condition " +
                   std::to_string(cond) + ")");
  rep.fitted_slopes.resize(static_cast<size_t>(d));
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd b(sel.size());
    for (size_t i = 0; i < sel.size(); ++i)
      b(static_cast<Eigen::Index>(i)) = logs[sel[i]][k];
    Eigen::Vector2d coef = svd.solve(b);
    rep.fitted_slopes[static_cast<size_t>(k)] = coef(0);
  }
  std::sort(rep.fitted_slopes.begin(), rep.fitted_slopes.end());
  return rep;
}

}  // namespace p2h
