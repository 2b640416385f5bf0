#include "p2h/hierarchy.hpp"

#include <map>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

namespace p2h {

JetPolynomial lenard_image(const JetPolynomial& L) {
  JetPolynomial dL = L.total_derivative();
  return dL.total_derivative().total_derivative() +
         Rational(4) * (JetPolynomial::jet(0) * dL) +
         Rational(2) * (JetPolynomial::jet(1) * L);
}

JetPolynomial lenard_next(const JetPolynomial& L) {
  return lenard_image(L).integrate_total_derivative();
}

JetPolynomial build_L(int n) {
  if (n < 1) throw ValidationError("build_L: n must be >= 1");
  static std::map<int, JetPolynomial> cache{{1, JetPolynomial::jet(0)}};
  static std::mutex mtx;
  std::lock_guard lock(mtx);
  auto it = cache.lower_bound(n);
  if (it != cache.end() && it->first == n) return it->second;
  int k = std::prev(it)->first;
  JetPolynomial L = cache.at(k);
  for (; k < n; ++k) {
    L = lenard_next(L);
    cache.emplace(k + 1, L);
  }
  return L;
}

HierarchyEquation build_p2n(int n) {
  if (n < 1) throw ValidationError("build_p2n: n must be >= 1");
  JetPolynomial L = build_L(n);
  // Substitute u_0 -> v_1 - v_0^2 and apply (D + 2 v_0).
  JetPolynomial sub = JetPolynomial::jet(1) - JetPolynomial::jet(0).pow(2);
  JetPolynomial Ls = L.substitute_jets(sub);
  JetPolynomial G = Ls.total_derivative() + Rational(2) * (JetPolynomial::jet(0) * Ls);
  // The equation reads G = x v_0 + alpha, i.e.
  //   v_{2n} = P + x v_0 + alpha + beta v_0^{2n+1},  G = v_{2n} - P - beta v_0^{2n+1}.
  Monomial top;
  top.jets.assign(2 * n + 1, 0);
  top.jets[2 * n] = 1;
  if (G.coefficient(top) != 1)
    throw StructureError("build_p2n: leading V_{2n} coefficient is not 1");
  Monomial v0pow;
  v0pow.jets = {2 * n + 1};
  Rational beta = -G.coefficient(v0pow);

  HierarchyEquation eq;
  eq.n = n;
  eq.beta = beta;
  eq.c = c_constant(n);
  eq.lenard_L = L;
  JetPolynomial P = JetPolynomial::jet(2 * n) - G;
  P.insert_term(v0pow, -beta);  // remove the beta v_0^{2n+1} monomial
  eq.rhs_poly = P;

  if (beta != beta_constant(n))
    throw StructureError("build_p2n: extracted beta_n mismatches closed form");
  for (const auto& [m, c] : P.terms()) {
    if (m.x != 0 || m.alpha != 0)
      throw StructureError("build_p2n: P_{2n-1} contains explicit x or alpha");
    if (m.norm() != 2 * n + 1)
      throw StructureError("build_p2n: monomial with <k> != 2n+1 in P_{2n-1}");
    if (m.jet_exp(0) > 2 * n - 1)
      throw StructureError("build_p2n: monomial with k_0 > 2n-1 in P_{2n-1}");
    if (m.max_order() > 2 * n - 2)
      throw StructureError("build_p2n: jet above V_{2n-2} in P_{2n-1}");
  }
  return eq;
}

JetPolynomial HierarchyEquation::rhs_full() const {
  JetPolynomial r = rhs_poly;
  r += JetPolynomial::x_power(1) * JetPolynomial::jet(0);
  r += JetPolynomial::alpha_power(1);
  r += beta * JetPolynomial::jet(0).pow(2 * n + 1);
  return r;
}

IntermediateFormReport verify_intermediate_form(int n) {
  IntermediateFormReport rep;
  rep.n = n;
  JetPolynomial sub = JetPolynomial::jet(1) - JetPolynomial::jet(0).pow(2);
  JetPolynomial Ls = build_L(n).substitute_jets(sub);
  Monomial v0pow;
  v0pow.jets = {2 * n};
  rep.beta_tilde = Ls.coefficient(v0pow);
  rep.beta_tilde_matches = (rep.beta_tilde == -beta_constant(n) / 2);
  Monomial top;
  top.jets.assign(2 * n, 0);
  top.jets[2 * n - 1] = 1;
  for (const auto& [m, c] : Ls.terms()) {
    if (m == top || m == v0pow) continue;
    if (m.norm() != 2 * n || m.jet_exp(0) > 2 * n - 2 || m.max_order() > 2 * n - 2)
      rep.violations.push_back(m);
  }
  if (Ls.coefficient(top) != 1) rep.violations.push_back(top);
  return rep;
}

nlohmann::json HierarchyEquation::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["beta"] = {{"num", num_string(beta)}, {"den", den_string(beta)}};
  j["c"] = {{"num", num_string(c)}, {"den", den_string(c)}};
  j["rhs"] = rhs_poly.to_json();
  j["lenard_L"] = lenard_L.to_json();
  return j;
}

HierarchyEquation HierarchyEquation::from_json(const nlohmann::json& j) {
  HierarchyEquation eq;
  eq.n = j.at("n").get<int>();
  eq.beta = Rational(Integer(j.at("beta").at("num").get<std::string>()),
                     Integer(j.at("beta").at("den").get<std::string>()));
  eq.c = Rational(Integer(j.at("c").at("num").get<std::string>()),
                  Integer(j.at("c").at("den").get<std::string>()));
  eq.rhs_poly = JetPolynomial::from_json(j.at("rhs"));
  eq.lenard_L = JetPolynomial::from_json(j.at("lenard_L"));
  return eq;
}

std::string HierarchyEquation::to_latex() const {
  std::ostringstream os;
  if (n == 1)
    os << "V_{2x}";
  else
    os << "V_{" << 2 * n << "x}";
  os << " = " << rhs_full().to_latex("V");
  return os.str();
}

}  // namespace p2h
