#include "p2h/extring.hpp"

#include <cmath>
#include <sstream>

#include "p2h/errors.hpp"

namespace p2h {

std::string ExtElem::to_string() const {
  if (c.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, v] : c) {
    if (!first) os << " + ";
    first = false;
    os << "(" << num_string(v);
    if (boost::multiprecision::denominator(v) != 1) os << "/" << den_string(v);
    os << ")";
    if (key.first) os << "*alpha^" << key.first;
    if (key.second) os << "*A^" << key.second;
  }
  return os.str();
}

void ExtRing::insert(Elem& e, int ae, int Ae, const Rational& v) const {
  Rational val = v;
  // reduce A^{two_n} -> rel
  int q = Ae / two_n_;
  Ae %= two_n_;
  for (int i = 0; i < q; ++i) val *= rel_;
  if (val == 0) return;
  auto key = std::make_pair(ae, Ae);
  auto it = e.c.find(key);
  if (it == e.c.end()) {
    e.c.emplace(key, val);
  } else {
    it->second += val;
    if (it->second == 0) e.c.erase(it);
  }
}

ExtRing::Elem ExtRing::from_rational(const Rational& r) const {
  Elem e;
  insert(e, 0, 0, r);
  return e;
}

ExtRing::Elem ExtRing::alpha_gen(int ex) const {
  Elem e;
  insert(e, ex, 0, 1);
  return e;
}

ExtRing::Elem ExtRing::root_gen(int ex) const {
  Elem e;
  insert(e, 0, ex, 1);
  return e;
}

ExtRing::Elem ExtRing::add(const Elem& a, const Elem& b) const {
  Elem r = a;
  for (const auto& [k, v] : b.c) insert(r, k.first, k.second, v);
  return r;
}

ExtRing::Elem ExtRing::sub(const Elem& a, const Elem& b) const {
  Elem r = a;
  for (const auto& [k, v] : b.c) insert(r, k.first, k.second, -v);
  return r;
}

ExtRing::Elem ExtRing::neg(const Elem& a) const {
  Elem r;
  for (const auto& [k, v] : a.c) r.c.emplace(k, -v);
  return r;
}

ExtRing::Elem ExtRing::mul(const Elem& a, const Elem& b) const {
  Elem r;
  for (const auto& [ka, va] : a.c)
    for (const auto& [kb, vb] : b.c)
      insert(r, ka.first + kb.first, ka.second + kb.second, va * vb);
  return r;
}

ExtRing::Elem ExtRing::scal(const Rational& s, const Elem& a) const {
  if (s == 0) return {};
  Elem r;
  for (const auto& [k, v] : a.c) r.c.emplace(k, s * v);
  return r;
}

bool ExtRing::rational_part(const Elem& a, Rational* out) const {
  if (a.c.empty()) {
    if (out) *out = 0;
    return true;
  }
  if (a.c.size() == 1 && a.c.begin()->first == std::make_pair(0, 0)) {
    if (out) *out = a.c.begin()->second;
    return true;
  }
  return false;
}

ExtRing::Elem ExtRing::solve(const Elem& a, const Elem& L) const {
  Rational Lr;
  if (!rational_part(L, &Lr) || Lr == 0)
    throw ResonanceError("linear factor is zero or not a plain rational: " +
                         L.to_string());
  return scal(Rational(1) / Lr, a);
}

std::complex<double> ExtRing::substitute(const Elem& a, std::complex<double> alpha,
                                         std::complex<double> A) const {
  std::complex<double> acc{};
  for (const auto& [k, v] : a.c) {
    std::complex<double> t{to_double(v), 0.0};
    for (int i = 0; i < k.first; ++i) t *= alpha;
    for (int i = 0; i < k.second; ++i) t *= A;
    acc += t;
  }
  return acc;
}

NumRing::Elem NumRing::alpha_gen(int e) const {
  Elem r{1.0, 0.0};
  for (int i = 0; i < e; ++i) r *= alpha_val;
  return r;
}

NumRing::Elem NumRing::root_gen(int e) const {
  Elem r{1.0, 0.0};
  for (int i = 0; i < e; ++i) r *= A_val;
  return r;
}

NumRing::Elem NumRing::solve(const Elem& a, const Elem& L) const {
  if (std::abs(L) == 0.0) throw ResonanceError("linear factor vanished numerically");
  return a / L;
}

}  // namespace p2h
