#pragma once

#include <cmath>

namespace p2h {

// One embedded Dormand-Prince 5(4) step. F maps (s, y) to dy/ds; Vec is an
// Eigen vector of complex scalars. On return y5 holds the 5th-order result
// and err_norm the max-norm of the embedded error estimate scaled by
// atol + rtol |y5_i|.
template <class Vec, class F>
void dp54_step(const F& f, double s, const Vec& y, double h, Vec& y5,
               double& err_norm, double atol, double rtol) {
  using Real = typename Vec::RealScalar;
  const Vec k1 = f(s, y);
  const Vec k2 = f(s + h / 5.0, Vec(y + (h / 5.0) * k1));
  const Vec k3 = f(s + 3.0 * h / 10.0,
                   Vec(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2)));
  const Vec k4 = f(s + 4.0 * h / 5.0,
                   Vec(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 +
                                32.0 / 9.0 * k3)));
  const Vec k5 =
      f(s + 8.0 * h / 9.0,
        Vec(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                     64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4)));
  const Vec k6 =
      f(s + h, Vec(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                            46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                            5103.0 / 18656.0 * k5)));
  y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
  const Vec k7 = f(s + h, y5);
  // difference of 5th- and embedded 4th-order weights
  const Vec e = h * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 +
                     71.0 / 1920.0 * k4 - 17253.0 / 339200.0 * k5 +
                     22.0 / 525.0 * k6 - 1.0 / 40.0 * k7);
  Real m = 0;
  for (int i = 0; i < y5.size(); ++i) {
    Real sc = Real(atol) + Real(rtol) * std::abs(y5[i]);
    Real v = std::abs(e[i]) / sc;
    if (v > m) m = v;
  }
  err_norm = static_cast<double>(m);
}

}  // namespace p2h
