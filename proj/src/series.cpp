#include "p2h/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "p2h/errors.hpp"

namespace p2h {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_integer(double e) { return e == std::floor(e); }

// Truncated Laurent expansion in t = x^{-1/(2n)}: map from t-grade to a
// coefficient in the ring. d/dx sends t^j to (-j/(2n)) t^{j+2n}.
template <class Ring>
using Lau = std::map<int, typename Ring::Elem>;

template <class Ring>
void lau_insert(const Ring& ring, Lau<Ring>& a, int grade,
                const typename Ring::Elem& v) {
  if (ring.is_zero(v)) return;
  auto it = a.find(grade);
  if (it == a.end()) {
    a.emplace(grade, v);
  } else {
    it->second = ring.add(it->second, v);
    if (ring.is_zero(it->second)) a.erase(it);
  }
}

template <class Ring>
Lau<Ring> lau_D(const Ring& ring, const Lau<Ring>& a, int two_n, int T) {
  Lau<Ring> out;
  for (const auto& [j, v] : a) {
    int nj = j + two_n;
    if (nj > T) continue;
    lau_insert(ring, out, nj, ring.scal(Rational(-j) / two_n, v));
  }
  return out;
}

template <class Ring>
Lau<Ring> lau_mul(const Ring& ring, const Lau<Ring>& a, const Lau<Ring>& b,
                  int T) {
  Lau<Ring> out;
  for (const auto& [ja, va] : a)
    for (const auto& [jb, vb] : b) {
      if (ja + jb > T) break;  // b grades ascend
      lau_insert(ring, out, ja + jb, ring.mul(va, vb));
    }
  return out;
}

template <class Ring>
Lau<Ring> lau_one(const Ring& ring) {
  Lau<Ring> out;
  out.emplace(0, ring.one());
  return out;
}

// Substitute the jet expansions into a jet polynomial. Intermediate
// products keep extra slack so that factors with negative leading grade
// (grade -1 at infinity) and the x monomial (grade -2n) cannot push a
// dropped cross term back below T.
template <class Ring>
Lau<Ring> eval_poly(const Ring& ring, const JetPolynomial& p,
                    const std::vector<Lau<Ring>>& jets, int two_n, int T) {
  Lau<Ring> acc;
  for (const auto& [m, c] : p.terms()) {
    int slack = two_n * std::max(0, m.x) + static_cast<int>(m.total_degree());
    int Te = T + slack;
    Lau<Ring> term = lau_one(ring);
    {
      typename Ring::Elem coeff = ring.from_rational(c);
      if (m.alpha > 0) coeff = ring.mul(coeff, ring.alpha_gen(m.alpha));
      term.begin()->second = coeff;
    }
    bool dead = false;
    for (size_t i = 0; i < m.jets.size() && !dead; ++i)
      for (int e = 0; e < m.jets[i]; ++e) {
        if (static_cast<int>(jets.size()) <= static_cast<int>(i))
          throw StructureError("jet expansion missing for substitution");
        term = lau_mul(ring, term, jets[i], Te);
        if (term.empty()) { dead = true; break; }
      }
    if (dead) continue;
    int shift = -two_n * m.x;  // x^e = t^{-2n e}
    for (const auto& [j, v] : term) {
      if (j + shift > T) continue;
      lau_insert(ring, acc, j + shift, v);
    }
  }
  return acc;
}

template <class Ring>
struct DriveResult {
  std::vector<typename Ring::Elem> v;
  int residual_order = 0;
};

// Residual F(V) = D^{2n} V - rhs_full(V) of the current truncation, up to
// t-grade T.
template <class Ring>
Lau<Ring> residual_lau(const Ring& ring, const HierarchyEquation& eq,
                       const Lau<Ring>& V, int T) {
  int two_n = 2 * eq.n;
  JetPolynomial rhs = eq.rhs_full();
  int P = std::max(0, rhs.max_order());
  int Tj = T + two_n + static_cast<int>(two_n) + 2;  // slack for eval_poly
  std::vector<Lau<Ring>> jets(static_cast<size_t>(two_n) + 1);
  jets[0] = V;
  for (int p = 1; p <= two_n; ++p)
    jets[p] = lau_D(ring, jets[p - 1], two_n, p <= P ? Tj : T);
  Lau<Ring> F = jets[two_n];
  Lau<Ring> R = eval_poly(ring, rhs, jets, two_n, T);
  for (const auto& [j, v] : R) lau_insert(ring, F, j, ring.neg(v));
  for (auto it = F.begin(); it != F.end();)
    it = (it->first > T) ? F.erase(it) : std::next(it);
  return F;
}

template <class Ring>
DriveResult<Ring> drive(const HierarchyEquation& eq, Kind kind, int K,
                        const Ring& ring, bool certify, int j0) {
  const int two_n = 2 * eq.n;
  const int step = two_n + 1;
  JetPolynomial rhs = eq.rhs_full();
  const int P = std::max(0, rhs.max_order());
  std::vector<JetPolynomial> partials;
  for (int p = 0; p <= P; ++p) partials.push_back(rhs.partial_jet(p));

  DriveResult<Ring> res;
  res.v.resize(static_cast<size_t>(K) + 1, ring.zero());
  res.v[0] = (kind == Kind::Infty) ? ring.root_gen(1)
                                   : ring.neg(ring.alpha_gen(1));
  Lau<Ring> V;
  lau_insert(ring, V, j0, res.v[0]);

  for (int k = 1; k <= K; ++k) {
    const int jp = j0 + k * step;
    const int g = jp - two_n;
    Lau<Ring> F = residual_lau(ring, eq, V, g);
    if (certify)
      for (const auto& [j, v] : F)
        if (j < g && !ring.is_zero(v))
          throw StructureError(
              "uncancelled expansion term below the expected grade");
    typename Ring::Elem Fg = ring.zero();
    if (auto it = F.find(g); it != F.end()) Fg = it->second;

    // Linear factor: coefficient of t^g in the directional derivative of F
    // along w = t^{jp}.
    typename Ring::Elem L = ring.zero();
    {
      // D^p w is a single term; track (grade, rational factor).
      int wg = jp;
      Rational wf = 1;
      std::vector<Lau<Ring>> jets(static_cast<size_t>(two_n) + 1);
      jets[0] = V;
      int Tj = g + two_n + two_n + 2;
      for (int p = 1; p <= P; ++p)
        jets[p] = lau_D(ring, jets[p - 1], two_n, Tj);
      for (int p = 0; p <= P; ++p) {
        if (p > 0) {
          wf *= Rational(-(jp + two_n * (p - 1))) / two_n;
          wg += two_n;
        }
        // The partial series reach down to negative grades (the x monomial
        // sits at grade -2n), so every p can contribute at grade g.
        Lau<Ring> dp = eval_poly(ring, partials[p], jets, two_n, g - wg);
        if (auto it = dp.find(g - wg); it != dp.end())
          L = ring.sub(L, ring.scal(wf, it->second));
      }
      // D^{2n} w sits at grade jp + 2n*2n > g, so the left side never
      // contributes at this order.
    }
    res.v[static_cast<size_t>(k)] = ring.solve(ring.neg(Fg), L);
    lau_insert(ring, V, jp, res.v[static_cast<size_t>(k)]);
  }

  // Locate the first surviving residual grade of the full truncation.
  const int Tr = j0 + (K + 4) * step - two_n;
  Lau<Ring> F = residual_lau(ring, eq, V, Tr);
  res.residual_order = Tr + 1;
  for (const auto& [j, v] : F)
    if (!ring.is_zero(v)) {
      res.residual_order = j;
      break;
    }
  return res;
}

template <class Ring>
Lau<Ring> rebuild_V(const Ring& ring,
                    const std::vector<typename Ring::Elem>& v, int j0,
                    int step) {
  Lau<Ring> V;
  for (size_t k = 0; k < v.size(); ++k)
    lau_insert(ring, V, j0 + static_cast<int>(k) * step, v[k]);
  return V;
}

}  // namespace

std::complex<double> complex_power(std::complex<double> x, double e,
                                   std::optional<double> arg_hint) {
  double r = std::abs(x);
  if (r == 0.0) {
    if (e > 0) return {0.0, 0.0};
    if (e == 0.0) return {1.0, 0.0};
    throw SingularError("negative power of zero");
  }
  double th;
  if (arg_hint) {
    th = *arg_hint;
  } else {
    if (x.imag() == 0.0 && x.real() < 0.0 && !is_integer(e))
      throw BranchError(
          "fractional power on the branch cut: supply an argument hint");
    th = std::arg(x);
  }
  return std::pow(r, e) *
         std::exp(std::complex<double>(0.0, th * e));
}

std::complex<double> FormalSeries::term(int k, std::complex<double> x,
                                        std::optional<double> arg_hint) const {
  if (k < 0 || k > K) throw ValidationError("series term index out of range");
  double e = -static_cast<double>(j0 + k * step) / (2.0 * n);
  return coeffs[static_cast<size_t>(k)] * complex_power(x, e, arg_hint);
}

FormalSeries series_coefficients(const HierarchyEquation& eq, Kind kind, int K,
                                 bool exact_mode, std::complex<double> alpha,
                                 int branch_id, bool alpha_formal) {
  if (eq.n < 1) throw ValidationError("hierarchy index must be positive");
  if (K < 0) throw ValidationError("series order must be non-negative");
  const int two_n = 2 * eq.n;

  FormalSeries s;
  s.n = eq.n;
  s.kind = kind;
  s.K = K;
  s.branch_id = branch_id;
  s.exact_mode = exact_mode;
  s.alpha_formal = alpha_formal;
  s.alpha_value = alpha;
  s.j0 = (kind == Kind::Infty) ? -1 : two_n;
  s.step = two_n + 1;
  s.A_relation = Rational((eq.n % 2) ? -1 : 1) / (2 * eq.c);

  if (kind == Kind::Zero && alpha == std::complex<double>{} &&
      !(exact_mode && alpha_formal))
    throw ZeroAlphaError("decaying branch degenerates for alpha = 0");

  {
    double rd = to_double(s.A_relation);
    double base = (rd < 0) ? kPi : 0.0;
    double th = (base + 2.0 * kPi * branch_id) / two_n;
    s.A_value = std::pow(std::abs(rd), 1.0 / two_n) *
                std::exp(std::complex<double>(0.0, th));
  }

  s.coeffs.resize(static_cast<size_t>(K) + 1);
  if (exact_mode) {
    ExtRing ring(two_n, s.A_relation);
    auto r = drive(eq, kind, K, ring, /*certify=*/true, s.j0);
    s.exact_coeffs = std::move(r.v);
    s.residual_order = r.residual_order;
    for (int k = 0; k <= K; ++k)
      s.coeffs[static_cast<size_t>(k)] = ring.substitute(
          s.exact_coeffs[static_cast<size_t>(k)], alpha, s.A_value);
  } else {
    NumRing ring{alpha, s.A_value};
    auto r = drive(eq, kind, K, ring, /*certify=*/false, s.j0);
    s.coeffs = std::move(r.v);
    // The float driver cannot certify cancellation; report the lattice
    // prediction for the first omitted order instead.
    s.residual_order = s.j0 + (K + 1) * s.step - two_n;
  }
  return s;
}

SeriesEvaluation evaluate_series(const FormalSeries& s, std::complex<double> x,
                                 int fixed_K, std::optional<double> arg_hint) {
  if (fixed_K > s.K)
    throw ValidationError("requested truncation exceeds stored order");
  std::vector<std::complex<double>> T(static_cast<size_t>(s.K) + 1);
  std::vector<double> mag(static_cast<size_t>(s.K) + 1);
  for (int k = 0; k <= s.K; ++k) {
    T[static_cast<size_t>(k)] = s.term(k, x, arg_hint);
    mag[static_cast<size_t>(k)] = std::abs(T[static_cast<size_t>(k)]);
  }
  SeriesEvaluation ev;
  ev.x = x;
  int kstar;
  if (fixed_K >= 0) {
    kstar = fixed_K;
  } else {
    // Smallest nonzero term; zero coefficients (a parity effect on the
    // decaying branch) do not count as the optimal stopping point.
    kstar = -1;
    for (int k = 0; k <= s.K; ++k) {
      if (mag[static_cast<size_t>(k)] == 0.0) continue;
      if (kstar < 0 || mag[static_cast<size_t>(k)] <
                           mag[static_cast<size_t>(kstar)])
        kstar = k;
    }
    if (kstar < 0) kstar = 0;  // identically zero truncation
  }
  for (int k = 0; k <= kstar; ++k) ev.value += T[static_cast<size_t>(k)];
  ev.k_star = kstar;
  ev.error_estimate = mag[static_cast<size_t>(kstar)];
  for (int k = kstar + 1; k <= s.K; ++k)
    if (mag[static_cast<size_t>(k)] > 0.0) {
      ev.error_estimate = mag[static_cast<size_t>(k)];
      break;
    }
  return ev;
}

std::vector<std::complex<double>> seed_jets(const FormalSeries& s,
                                            std::complex<double> x0,
                                            std::optional<double> arg_hint,
                                            double* error_estimate) {
  SeriesEvaluation ev = evaluate_series(s, x0, -1, arg_hint);
  if (error_estimate) *error_estimate = ev.error_estimate;
  const int two_n = 2 * s.n;
  std::vector<std::complex<double>> jets(static_cast<size_t>(two_n));
  for (int k = 0; k <= ev.k_star; ++k) {
    double e = -static_cast<double>(s.j0 + k * s.step) / two_n;
    std::complex<double> factor = 1.0;
    for (int p = 0; p < two_n; ++p) {
      jets[static_cast<size_t>(p)] +=
          s.coeffs[static_cast<size_t>(k)] * factor *
          complex_power(x0, e - p, arg_hint);
      factor *= (e - p);
    }
  }
  return jets;
}

std::complex<double> residual(const HierarchyEquation& eq,
                              const FormalSeries& s, int K,
                              std::complex<double> x,
                              std::optional<double> arg_hint) {
  if (K < 0) K = s.K;
  if (K > s.K)
    throw ValidationError("requested truncation exceeds stored order");
  const int two_n = 2 * s.n;
  std::vector<std::complex<double>> jets(static_cast<size_t>(two_n) + 1);
  for (int k = 0; k <= K; ++k) {
    double e = -static_cast<double>(s.j0 + k * s.step) / two_n;
    std::complex<double> factor = 1.0;
    for (int p = 0; p <= two_n; ++p) {
      jets[static_cast<size_t>(p)] +=
          s.coeffs[static_cast<size_t>(k)] * factor *
          complex_power(x, e - p, arg_hint);
      factor *= (e - p);
    }
  }
  return jets[static_cast<size_t>(two_n)] -
         eq.rhs_full().evaluate(jets, x, s.alpha_value);
}

std::complex<double> ResidualExpansion::eval(
    std::complex<double> x, std::optional<double> arg_hint) const {
  std::complex<double> acc{};
  for (const auto& [g, c] : terms)
    acc += c * complex_power(x, -static_cast<double>(g) / (2.0 * n), arg_hint);
  return acc;
}

ResidualExpansion residual_expansion(const HierarchyEquation& eq,
                                     const FormalSeries& s, int extra_orders) {
  const int T = s.j0 + (s.K + 1 + extra_orders) * s.step - 2 * s.n;
  ResidualExpansion out;
  out.n = s.n;
  if (s.exact_mode) {
    ExtRing ring(2 * s.n, s.A_relation);
    Lau<ExtRing> V = rebuild_V(ring, s.exact_coeffs, s.j0, s.step);
    Lau<ExtRing> F = residual_lau(ring, eq, V, T);
    for (const auto& [j, v] : F) {
      std::complex<double> c = ring.substitute(v, s.alpha_value, s.A_value);
      if (c != std::complex<double>{}) out.terms.emplace_back(j, c);
    }
  } else {
    NumRing ring{s.alpha_value, s.A_value};
    Lau<NumRing> V = rebuild_V(ring, s.coeffs, s.j0, s.step);
    Lau<NumRing> F = residual_lau(ring, eq, V, T);
    double top = 0.0;
    for (const auto& [j, v] : F) top = std::max(top, std::abs(v));
    for (const auto& [j, v] : F)
      if (std::abs(v) > 1e-9 * top) out.terms.emplace_back(j, v);
  }
  out.lowest_grade = out.terms.empty() ? T + 1 : out.terms.front().first;
  return out;
}

ZeroBalanceReport zero_balance_report(int n) {
  if (n < 1) throw ValidationError("hierarchy index must be positive");
  ZeroBalanceReport r;
  r.n = n;
  // Leading balance of the decaying branch: x V_0 + alpha = 0 at the
  // dominant grade, so V ~ (-1) * alpha / x.
  r.computed = -1;
  r.published_primary = -1;
  r.published_alternate = Rational(-2) / (2 * n + 1);
  r.matches_primary = (r.computed == r.published_primary);
  r.matches_alternate = (r.computed == r.published_alternate);
  return r;
}

nlohmann::json FormalSeries::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["kind"] = kind_name(kind);
  j["K"] = K;
  j["branch_id"] = branch_id;
  j["exact_mode"] = exact_mode;
  j["alpha_formal"] = alpha_formal;
  j["alpha"] = {alpha_value.real(), alpha_value.imag()};
  j["leading_exponent"] = j0;
  j["lattice_step"] = step;
  j["root_relation"] = {{"num", num_string(A_relation)},
                        {"den", den_string(A_relation)}};
  j["root_value"] = {A_value.real(), A_value.imag()};
  j["residual_order"] = residual_order;
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : coeffs) cs.push_back({c.real(), c.imag()});
  j["coefficients"] = cs;
  if (exact_mode) {
    nlohmann::json es = nlohmann::json::array();
    for (const auto& e : exact_coeffs) es.push_back(e.to_string());
    j["exact_coefficients"] = es;
  }
  return j;
}

}  // namespace p2h
