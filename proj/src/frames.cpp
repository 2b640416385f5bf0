#include "p2h/frames.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "p2h/errors.hpp"

namespace p2h {

namespace {

constexpr double kPi = 3.14159265358979323846;

Rational rational_pow(const Rational& base, int e) {
  Rational r = 1;
  if (e >= 0) {
    for (int i = 0; i < e; ++i) r *= base;
  } else {
    for (int i = 0; i < -e; ++i) r /= base;
  }
  return r;
}

}  // namespace

double normalize_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a > kPi) a -= 2.0 * kPi;
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

bool SectorSpec::contains(std::complex<double> x) const {
  std::complex<double> x0 =
      inner_radius * std::exp(std::complex<double>(0.0, center_angle));
  std::complex<double> d = x - x0;
  if (d == std::complex<double>{}) return false;
  return std::abs(normalize_angle(std::arg(d) - center_angle)) < half_width;
}

nlohmann::json SectorSpec::to_json() const {
  return {{"n", n},
          {"kind", kind_name(kind)},
          {"label", label},
          {"center_angle", center_angle},
          {"half_width", half_width},
          {"inner_radius", inner_radius}};
}

SectorGeometry sectors(int n, Kind kind, double epsilon, double inner_radius) {
  if (n < 1) throw ValidationError("hierarchy index must be positive");
  SectorGeometry g;
  g.n = n;
  g.kind = kind;
  g.epsilon = (epsilon > 0) ? epsilon : kPi / (8.0 * (2 * n + 1));
  g.inner_radius = (inner_radius > 0) ? inner_radius : (n <= 2 ? 10.0 : 20.0);
  double center = (kind == Kind::Infty) ? 0.0 : kPi;
  for (int j = 0; j <= 2 * n; ++j)
    g.rays.push_back(
        normalize_angle(center + (2 * j + 1) * kPi / (2 * n + 1)));
  std::sort(g.rays.begin(), g.rays.end());
  g.S = {n, kind, center, n * kPi / (2 * n + 1), g.inner_radius, "S"};
  g.Sigma = {n, kind, center, 2 * n * kPi / (2 * n + 1), g.inner_radius,
             "Sigma"};
  for (double r : g.rays)
    g.overlaps.push_back({n, kind, r, g.epsilon, g.inner_radius, "S_eps"});
  return g;
}

nlohmann::json SectorGeometry::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["kind"] = kind_name(kind);
  j["epsilon"] = epsilon;
  j["inner_radius"] = inner_radius;
  j["rays"] = rays;
  j["S"] = S.to_json();
  j["Sigma"] = Sigma.to_json();
  nlohmann::json ov = nlohmann::json::array();
  for (const auto& s : overlaps) ov.push_back(s.to_json());
  j["overlaps"] = ov;
  return j;
}

std::complex<double> boutroux_z(int n, std::complex<double> x,
                                std::optional<double> arg_hint) {
  if (x == std::complex<double>{}) throw SingularError("scaling map at x = 0");
  double q = (2.0 * n + 1.0) / (2.0 * n);
  return (1.0 / q) * complex_power(x, q, arg_hint);
}

std::complex<double> boutroux_x(int n, std::complex<double> z,
                                std::optional<double> arg_hint) {
  if (z == std::complex<double>{}) throw SingularError("scaling map at z = 0");
  double q = (2.0 * n + 1.0) / (2.0 * n);
  return complex_power(q * z, 1.0 / q, arg_hint);
}

std::vector<std::vector<Rational>> chain_table(int n, int pmax) {
  std::vector<std::vector<Rational>> C(static_cast<size_t>(pmax) + 1);
  C[0] = {Rational(1)};
  for (int p = 0; p < pmax; ++p) {
    C[static_cast<size_t>(p) + 1].assign(static_cast<size_t>(p) + 2, 0);
    for (int l = 0; l <= p; ++l) {
      Rational e = Rational(l + 1 + 2 * n * (l - p)) / (2 * n);
      C[static_cast<size_t>(p) + 1][static_cast<size_t>(l)] +=
          e * C[static_cast<size_t>(p)][static_cast<size_t>(l)];
      C[static_cast<size_t>(p) + 1][static_cast<size_t>(l) + 1] +=
          C[static_cast<size_t>(p)][static_cast<size_t>(l)];
    }
  }
  return C;
}

namespace {

// Lower-triangular frame matrix M with V^{(p)} = sum_l M(p,l) u^{(l)}.
Eigen::MatrixXcd frame_matrix(int n, std::complex<double> x,
                              std::optional<double> arg_hint) {
  if (x == std::complex<double>{})
    throw SingularError("frame change at x = 0");
  auto C = chain_table(n, 2 * n - 1);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int p = 0; p < 2 * n; ++p)
    for (int l = 0; l <= p; ++l) {
      double e = static_cast<double>(l + 1 + 2 * n * (l - p)) / (2 * n);
      M(p, l) = to_double(C[static_cast<size_t>(p)][static_cast<size_t>(l)]) *
                complex_power(x, e, arg_hint);
    }
  return M;
}

}  // namespace

Eigen::VectorXcd to_scaled_jets(int n, const Eigen::VectorXcd& v_jets,
                                std::complex<double> x,
                                std::optional<double> arg_hint) {
  if (v_jets.size() != 2 * n)
    throw ValidationError("jet vector must have length 2n");
  Eigen::MatrixXcd M = frame_matrix(n, x, arg_hint);
  return M.triangularView<Eigen::Lower>().solve(v_jets);
}

Eigen::VectorXcd from_scaled_jets(int n, const Eigen::VectorXcd& u_jets,
                                  std::complex<double> x,
                                  std::optional<double> arg_hint) {
  if (u_jets.size() != 2 * n)
    throw ValidationError("jet vector must have length 2n");
  return frame_matrix(n, x, arg_hint) * u_jets;
}

JetPolynomial ScaledEquation::autonomous() const {
  JetPolynomial out;
  for (const auto& [m, c] : rhs_z.terms())
    if (m.x == 0) out.insert_term(m, c);
  return out;
}

std::complex<double> ScaledEquation::residual(
    const std::vector<std::complex<double>>& jets, std::complex<double> z,
    std::complex<double> alpha) const {
  if (jets.size() < static_cast<size_t>(2 * n) + 1)
    throw ValidationError("jet vector must include the 2n-th derivative");
  return jets[static_cast<size_t>(2 * n)] - rhs_z.evaluate(jets, z, alpha);
}

nlohmann::json ScaledEquation::to_json() const {
  return {{"n", n}, {"rhs", rhs_z.to_json()}};
}

std::string ScaledEquation::to_latex() const {
  std::string lhs = "u_{" + std::to_string(2 * n) + "z}";
  if (n == 1) lhs = "u_{2z}";
  return lhs + " = " + rhs_z.to_latex("u", "z");
}

ScaledEquation transform_equation(const HierarchyEquation& eq) {
  const int n = eq.n;
  const int two_n = 2 * n;
  const int step = two_n + 1;
  auto C = chain_table(n, two_n);

  // Substitution images: V^{(p)} as a polynomial in the scaled jets, with
  // the x slot carrying the exponent of the formal symbol s = x^{1/(2n)}.
  std::vector<JetPolynomial> S(static_cast<size_t>(two_n) + 1);
  for (int p = 0; p <= two_n; ++p) {
    JetPolynomial sp;
    for (int l = 0; l <= p; ++l) {
      const Rational& c = C[static_cast<size_t>(p)][static_cast<size_t>(l)];
      if (c == 0) continue;
      Monomial m;
      m.jets.assign(static_cast<size_t>(l) + 1, 0);
      m.jets[static_cast<size_t>(l)] = 1;
      m.x = l + 1 + two_n * (l - p);
      m.trim();
      sp.insert_term(m, c);
    }
    S[static_cast<size_t>(p)] = sp;
  }

  JetPolynomial F = JetPolynomial::jet(two_n) - eq.rhs_full();
  JetPolynomial G;  // in s-exponents
  for (const auto& [m, c] : F.terms()) {
    JetPolynomial term = JetPolynomial::constant(c);
    if (m.alpha > 0) term = term * JetPolynomial::alpha_power(m.alpha);
    if (m.x != 0) term = term * JetPolynomial::x_power(two_n * m.x);
    for (size_t i = 0; i < m.jets.size(); ++i)
      if (m.jets[i] > 0) term = term * S[i].pow(m.jets[i]);
    G += term;
  }

  // Divide by s^{2n+1}; every surviving s power must be a multiple of
  // 2n+1 and converts via s^{(2n+1)m} = ((2n+1)/(2n))^m z^m.
  ScaledEquation out;
  out.n = n;
  JetPolynomial R;
  Rational q = Rational(step) / two_n;
  for (const auto& [m, c] : G.terms()) {
    int se = m.x - step;
    if (se % step != 0)
      throw StructureError("scaled equation has a fractional power of z");
    int ze = se / step;
    if (ze > 0 || ze < -two_n)
      throw StructureError("scaled coefficient exceeds the z-degree bound");
    Monomial mz = m;
    mz.x = ze;
    R.insert_term(mz, c * rational_pow(q, ze));
  }
  // R = u^{(2n)} - rhs; peel the leading jet off.
  Monomial lead;
  lead.jets.assign(static_cast<size_t>(two_n) + 1, 0);
  lead.jets[static_cast<size_t>(two_n)] = 1;
  if (R.coefficient(lead) != 1)
    throw StructureError("scaled equation is not monic in u^{(2n)}");
  R.insert_term(lead, Rational(-1));
  out.rhs_z = -R;
  return out;
}

ExponentSet stokes_exponents(int n, Kind kind, std::complex<double> z,
                             std::optional<double> arg_hint) {
  if (n < 1) throw ValidationError("hierarchy index must be positive");
  if (z == std::complex<double>{})
    throw SingularError("characteristic roots at z = 0");
  ExponentSet es;
  es.n = n;
  es.kind = kind;
  es.z = z;
  double fmod_ = std::abs(z) * (kind == Kind::Infty ? (2.0 * n - 1.0) : 1.0);
  double farg;
  if (arg_hint) {
    farg = *arg_hint;
  } else {
    if (z.imag() == 0.0 && z.real() < 0.0)
      throw BranchError("z on the branch cut: supply an argument hint");
    farg = std::arg(z);
  }
  if (kind == Kind::Infty) farg += kPi;  // f(z) = (1-2n) z, 1-2n < 0
  double r = std::pow(fmod_, 1.0 / (2 * n));
  for (int k = 0; k < 2 * n; ++k) {
    double th = (farg + 2.0 * kPi * k) / (2 * n);
    std::complex<double> mu = r * std::exp(std::complex<double>(0.0, th));
    es.mu.push_back(mu);
    es.nu.push_back((2.0 * n / (2.0 * n + 1.0)) * z * mu);
  }
  return es;
}

RayRates ray_rate_profile(int n, Kind kind, double angle) {
  RayRates rr;
  rr.n = n;
  rr.kind = kind;
  rr.angle = angle;
  std::complex<double> z = std::exp(std::complex<double>(0.0, angle));
  ExponentSet es = stokes_exponents(n, kind, z, angle);
  rr.min_abs_rate = std::numeric_limits<double>::infinity();
  for (const auto& mu : es.mu) {
    double rate = (mu * z).real();
    rr.re_rates.push_back(rate);
    rr.max_rate = std::max(rr.max_rate, rate);
    rr.min_abs_rate = std::min(rr.min_abs_rate, std::abs(rate));
  }
  rr.oscillatory = rr.min_abs_rate < 1e-12;
  return rr;
}

}  // namespace p2h
