#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "p2h/extring.hpp"
#include "p2h/hierarchy.hpp"

namespace p2h {

enum class Kind { Infty, Zero };

inline const char* kind_name(Kind k) { return k == Kind::Infty ? "infty" : "zero"; }

// x^e for fractional e. `arg_hint` fixes the (possibly continued) argument
// of x; without it the principal branch is used and the negative real axis
// throws BranchError.
std::complex<double> complex_power(std::complex<double> x, double e,
                                   std::optional<double> arg_hint = {});

// Formal solution of the normal form, stored on the grade lattice of
// t = x^{-1/(2n)}: V = sum_{k=0}^{K} v_k t^{j0 + k(2n+1)}.
struct FormalSeries {
  int n = 0;
  Kind kind = Kind::Infty;
  int K = 0;
  int branch_id = 0;
  bool exact_mode = true;
  bool alpha_formal = true;
  std::complex<double> alpha_value{};
  int j0 = 0;    // leading t-exponent: -1 (Infty) or 2n (Zero)
  int step = 0;  // 2n+1
  Rational A_relation;                       // A^{2n} = this
  std::complex<double> A_value{};            // numeric branch root
  std::vector<ExtElem> exact_coeffs;         // exact mode, size K+1
  std::vector<std::complex<double>> coeffs;  // numeric, size K+1
  int residual_order = 0;  // t-grade of the first uncancelled residual term

  ExtRing ring() const { return ExtRing(2 * n, A_relation); }
  // k-th term evaluated at x.
  std::complex<double> term(int k, std::complex<double> x,
                            std::optional<double> arg_hint = {}) const;
  nlohmann::json to_json() const;
};

struct SeriesEvaluation {
  std::complex<double> value{};
  int k_star = 0;
  double error_estimate = 0.0;
  std::complex<double> x{};
};

// Order-by-order construction. `alpha` is the numeric parameter for float
// mode and for numeric evaluation of exact coefficients; with
// `alpha_formal` the exact coefficients keep alpha as a generator.
FormalSeries series_coefficients(const HierarchyEquation& eq, Kind kind, int K,
                                 bool exact_mode, std::complex<double> alpha,
                                 int branch_id = 0, bool alpha_formal = true);

// Optimal truncation (fixed_K < 0) or fixed-order evaluation.
SeriesEvaluation evaluate_series(const FormalSeries& s, std::complex<double> x,
                                 int fixed_K = -1,
                                 std::optional<double> arg_hint = {});

// Jet vector (V, V', ..., V^{(2n-1)}) of the optimally truncated series.
std::vector<std::complex<double>> seed_jets(const FormalSeries& s,
                                            std::complex<double> x0,
                                            std::optional<double> arg_hint = {},
                                            double* error_estimate = nullptr);

// LHS - RHS of the normal form with the K-truncated series substituted,
// by direct numeric evaluation.
std::complex<double> residual(const HierarchyEquation& eq, const FormalSeries& s,
                              int K, std::complex<double> x,
                              std::optional<double> arg_hint = {});

// Residual of the K-truncation as a t-Laurent expansion with numeric
// coefficients (exact cancellation performed in the coefficient ring, so
// evaluation is free of catastrophic cancellation).
struct ResidualExpansion {
  int n = 0;
  int lowest_grade = 0;
  std::vector<std::pair<int, std::complex<double>>> terms;  // (grade, coeff)
  std::complex<double> eval(std::complex<double> x,
                            std::optional<double> arg_hint = {}) const;
};
ResidualExpansion residual_expansion(const HierarchyEquation& eq,
                                     const FormalSeries& s, int extra_orders = 3);

// Dominant-balance record for the decaying branch. Two different leading
// constants circulate in the literature; this reports which one the balance
// of the normal form actually confirms.
struct ZeroBalanceReport {
  int n = 0;
  Rational computed;            // leading coefficient of V as (computed) * alpha / x
  Rational published_primary;   // -1
  Rational published_alternate; // -2/(2n+1)
  bool matches_primary = false;
  bool matches_alternate = false;
};
ZeroBalanceReport zero_balance_report(int n);

}  // namespace p2h
