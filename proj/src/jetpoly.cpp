#include "p2h/jetpoly.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

namespace p2h {

void Monomial::trim() {
  while (!jets.empty() && jets.back() == 0) jets.pop_back();
}

long Monomial::norm() const {
  long n = 0;
  for (size_t i = 0; i < jets.size(); ++i) n += static_cast<long>(i + 1) * jets[i];
  return n;
}

long Monomial::total_degree() const {
  long d = x + alpha;
  for (int e : jets) d += e;
  return d;
}

bool MonoLess::operator()(const Monomial& a, const Monomial& b) const {
  long da = a.total_degree(), db = b.total_degree();
  if (da != db) return da < db;
  if (a.x != b.x) return a.x < b.x;
  if (a.alpha != b.alpha) return a.alpha < b.alpha;
  size_t n = std::max(a.jets.size(), b.jets.size());
  for (size_t i = 0; i < n; ++i) {
    int ea = a.jet_exp(static_cast<int>(i)), eb = b.jet_exp(static_cast<int>(i));
    if (ea != eb) return ea < eb;
  }
  return false;
}

void JetPolynomial::insert_term(Monomial m, const Rational& c) {
  if (c == 0) return;
  m.trim();
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(std::move(m), c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

JetPolynomial JetPolynomial::constant(const Rational& c) {
  JetPolynomial p;
  p.insert_term(Monomial{}, c);
  return p;
}

JetPolynomial JetPolynomial::jet(int i, int exp) {
  JetPolynomial p;
  Monomial m;
  m.jets.assign(i + 1, 0);
  m.jets[i] = exp;
  p.insert_term(std::move(m), 1);
  return p;
}

JetPolynomial JetPolynomial::x_power(int e) {
  JetPolynomial p;
  Monomial m;
  m.x = e;
  p.insert_term(std::move(m), 1);
  return p;
}

JetPolynomial JetPolynomial::alpha_power(int e) {
  JetPolynomial p;
  Monomial m;
  m.alpha = e;
  p.insert_term(std::move(m), 1);
  return p;
}

int JetPolynomial::max_order() const {
  int m = -1;
  for (const auto& [mono, c] : terms_) m = std::max(m, mono.max_order());
  return m;
}

bool JetPolynomial::has_explicit_x() const {
  for (const auto& [m, c] : terms_)
    if (m.x != 0) return true;
  return false;
}

bool JetPolynomial::has_alpha() const {
  for (const auto& [m, c] : terms_)
    if (m.alpha != 0) return true;
  return false;
}

Rational JetPolynomial::coefficient(const Monomial& m) const {
  Monomial key = m;
  key.trim();
  auto it = terms_.find(key);
  return it == terms_.end() ? Rational(0) : it->second;
}

JetPolynomial& JetPolynomial::operator+=(const JetPolynomial& o) {
  for (const auto& [m, c] : o.terms_) insert_term(m, c);
  return *this;
}

JetPolynomial& JetPolynomial::operator-=(const JetPolynomial& o) {
  for (const auto& [m, c] : o.terms_) insert_term(m, -c);
  return *this;
}

JetPolynomial JetPolynomial::operator-() const {
  JetPolynomial r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

JetPolynomial operator*(const JetPolynomial& a, const JetPolynomial& b) {
  JetPolynomial r;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m;
      m.x = ma.x + mb.x;
      m.alpha = ma.alpha + mb.alpha;
      m.jets.assign(std::max(ma.jets.size(), mb.jets.size()), 0);
      for (size_t i = 0; i < m.jets.size(); ++i)
        m.jets[i] = ma.jet_exp(static_cast<int>(i)) + mb.jet_exp(static_cast<int>(i));
      r.insert_term(std::move(m), ca * cb);
    }
  }
  return r;
}

JetPolynomial operator*(const Rational& c, JetPolynomial p) {
  if (c == 0) return {};
  for (auto& [m, v] : p.terms_) v *= c;
  return p;
}

JetPolynomial JetPolynomial::pow(int e) const {
  JetPolynomial r = constant(1);
  for (int i = 0; i < e; ++i) r = r * *this;
  return r;
}

JetPolynomial JetPolynomial::total_derivative() const {
  JetPolynomial r;
  for (const auto& [m, c] : terms_) {
    if (m.x != 0) {
      Monomial d = m;
      d.x -= 1;
      r.insert_term(std::move(d), c * m.x);
    }
    for (size_t i = 0; i < m.jets.size(); ++i) {
      if (m.jets[i] == 0) continue;
      Monomial d = m;
      d.jets[i] -= 1;
      if (d.jets.size() < i + 2) d.jets.resize(i + 2, 0);
      d.jets[i + 1] += 1;
      r.insert_term(std::move(d), c * m.jets[i]);
    }
  }
  return r;
}

JetPolynomial JetPolynomial::partial_jet(int i) const {
  JetPolynomial r;
  for (const auto& [m, c] : terms_) {
    int e = m.jet_exp(i);
    if (e == 0) continue;
    Monomial d = m;
    d.jets[i] -= 1;
    r.insert_term(std::move(d), c * e);
  }
  return r;
}

JetPolynomial JetPolynomial::variational_derivative() const {
  if (has_explicit_x())
    throw ExplicitVariableError(
        "variational derivative: explicit x-dependence not supported in "
        "exactness mode");
  JetPolynomial r;
  int order = max_order();
  for (int i = 0; i <= order; ++i) {
    JetPolynomial term = partial_jet(i);
    for (int k = 0; k < i; ++k) term = Rational(-1) * term.total_derivative();
    r += term;
  }
  return r;
}

JetPolynomial JetPolynomial::integrate_total_derivative() const {
  if (!variational_derivative().is_zero())
    throw NotExactError("integrate_total_derivative: Euler operator does not vanish");
  JetPolynomial p = *this;
  JetPolynomial q;
  while (!p.is_zero()) {
    int m = p.max_order();
    if (m <= 0)
      throw NotExactError("integrate_total_derivative: nonzero remainder of order <= 0");
    // Exact p of top order m is linear in u_m with u_m-coefficient
    // A(u_0..u_{m-1}); F = (antiderivative of A in u_{m-1}) satisfies
    // D(F) = A u_m + lower.
    JetPolynomial A = p.partial_jet(m);
    if (A.max_order() >= m)
      throw NotExactError("integrate_total_derivative: not linear in top jet");
    JetPolynomial F;
    for (const auto& [mono, c] : A.terms()) {
      Monomial anti = mono;
      if (anti.jets.size() < static_cast<size_t>(m)) anti.jets.resize(m, 0);
      anti.jets[m - 1] += 1;
      Rational coeff = c / anti.jets[m - 1];
      F.insert_term(std::move(anti), coeff);
    }
    q += F;
    p -= F.total_derivative();
  }
  return q;
}

JetPolynomial JetPolynomial::substitute_jets(const JetPolynomial& image) const {
  int order = max_order();
  std::vector<JetPolynomial> prolonged;  // prolonged[i] = D^i(image)
  prolonged.push_back(image);
  for (int i = 1; i <= order; ++i)
    prolonged.push_back(prolonged.back().total_derivative());
  JetPolynomial r;
  for (const auto& [m, c] : terms_) {
    JetPolynomial t = constant(c);
    if (m.x != 0) t = t * x_power(m.x);
    if (m.alpha != 0) t = t * alpha_power(m.alpha);
    for (size_t i = 0; i < m.jets.size(); ++i)
      if (m.jets[i] > 0) t = t * prolonged[i].pow(m.jets[i]);
    r += t;
  }
  return r;
}

nlohmann::json JetPolynomial::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [m, c] : terms_) {
    nlohmann::json t;
    t["exponents"] = m.jets;
    t["x"] = m.x;
    t["alpha"] = m.alpha;
    t["num"] = num_string(c);
    t["den"] = den_string(c);
    arr.push_back(std::move(t));
  }
  return arr;
}

JetPolynomial JetPolynomial::from_json(const nlohmann::json& j) {
  JetPolynomial p;
  for (const auto& t : j) {
    Monomial m;
    m.jets = t.at("exponents").get<std::vector<int>>();
    m.x = t.at("x").get<int>();
    m.alpha = t.at("alpha").get<int>();
    Rational c(Integer(t.at("num").get<std::string>()),
               Integer(t.at("den").get<std::string>()));
    p.insert_term(std::move(m), c);
  }
  return p;
}

namespace {

std::string rational_latex(const Rational& c) {
  if (boost::multiprecision::denominator(c) == 1) return num_string(c);
  return "\\tfrac{" + num_string(c) + "}{" + den_string(c) + "}";
}

void append_power(std::ostringstream& os, const std::string& base, int e) {
  os << base;
  if (e != 1) os << "^{" << e << "}";
}

}  // namespace

std::string JetPolynomial::to_latex(const std::string& symbol,
                                    const std::string& var) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest-degree terms first reads better for these equations.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    Rational a = c;
    if (first) {
      if (a < 0) {
        os << "-";
        a = -a;
      }
    } else {
      os << (a < 0 ? " - " : " + ");
      if (a < 0) a = -a;
    }
    first = false;
    bool bare = m.jets.empty() && m.x == 0 && m.alpha == 0;
    if (a != 1 || bare) os << rational_latex(a);
    if (m.x != 0) append_power(os, var, m.x);
    if (m.alpha != 0) append_power(os, "\\alpha", m.alpha);
    for (size_t i = 0; i < m.jets.size(); ++i) {
      if (m.jets[i] == 0) continue;
      std::string base = symbol;
      if (i == 1)
        base += "_{" + var + "}";
      else if (i > 1)
        base += "_{" + std::to_string(i) + var + "}";
      append_power(os, base, m.jets[i]);
    }
  }
  return os.str();
}

}  // namespace p2h
