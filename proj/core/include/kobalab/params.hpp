#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kobalab/bigfloat.hpp"

namespace kobalab {

/// Growth schedule for the sequence a_n.
///
/// "exp_affine" gives a_n = e^(offset + n); "const_exp" pins every a_n to
/// e^(offset) (useful to exercise the no-root failure path). Schedules must be
/// monotone for the table invariants to hold.
struct GrowthRule {
  enum class Kind { exp_affine, const_exp, const_value };
  Kind kind = Kind::exp_affine;
  double offset = 10.0;  // exp_affine / const_exp
  double value = 0.0;    // const_value

  BigFloat at(int n, mpfr_prec_t prec) const;
  std::string spec_string() const;
  /// Accepts "default", "exp:<c>" (a_n = e^(c+n)), "const:e<c>", "const:<x>".
  static GrowthRule parse(const std::string& s);
};

/// Sign-bracket certificate for a root: f(lo) and f(hi) have opposite signs
/// and the scan found no earlier sign change on a geometric grid.
struct RootBracket {
  BigFloat lo, hi;
  int scan_points = 0;
};

struct SwitchPointRoot {
  BigFloat value;
  RootBracket bracket;
  BigFloat residual;  // f(value)
};

/// The coupled scalar sequences driving the whole construction.
///
/// All arrays are index-aligned with the sequence index n; slot 0 holds the
/// base case where one exists (r_0, delta_0) and an unset NaN otherwise.
/// r and a carry one extra entry (n_max+1) because r_tilde_n needs r_{n+1}.
/// C, c, K stay unset until the cusp stage estimates them.
struct ParamTable {
  int n_max = 0;
  mpfr_prec_t precision_bits = 512;
  std::vector<BigFloat> a;        // growth rates, [1 .. n_max+1]
  std::vector<BigFloat> r;        // radii, [0 .. n_max+1], r_0 = 1/4
  std::vector<BigFloat> b;        // switch points, [1 .. n_max]
  std::vector<BigFloat> eps;      // mollification radii, [1 .. n_max]
  std::vector<BigFloat> A;        // series term bounds, [1 .. n_max]
  std::vector<BigFloat> delta;    // weights, [0 .. n_max], delta_0 = 1/2
  std::vector<BigFloat> d;        // tube half-widths, [1 .. n_max]
  std::vector<BigFloat> r_tilde;  // inner-ball radii r_{n+1}^3, [1 .. n_max]
  std::vector<BigFloat> C;        // Levi lower-bound constants (cusp stage)
  std::vector<BigFloat> c;        // corrector Levi constants (cusp stage)
  std::vector<BigFloat> K;        // corrector gains (cusp stage)
  std::vector<RootBracket> b_bracket;  // [1 .. n_max]

  bool has_levi_constants() const;
  /// Throws DomainError naming the first violated invariant.
  void validate() const;
};

/// One radius step: r_n = a_n^{-1} r_{n-1}^2. Requires a_n >= 4 and
/// 0 < r_prev <= 1/4, which force the recursion to contract.
BigFloat next_radius(const BigFloat& a_n, const BigFloat& r_prev);

/// f(x) = 1/8 - x + log(x)/(4 log a): the switch-point equation.
BigFloat switch_equation(const BigFloat& x, const BigFloat& a);

/// Smallest positive root of the switch-point equation, certified by a sign
/// bracket found by a geometric scan (ratio 1.2) from below the root.
/// Throws NoRootError (tagged with `index`) when f is negative at its
/// critical point x* = 1/(4 log a), i.e. when a is too small.
SwitchPointRoot solve_b(const BigFloat& a_n, int index = 0);

/// A_k = 1/2 + a_k/r_k + log(1/r_k)/(4 log a_k).
BigFloat term_bound(const BigFloat& a_k, const BigFloat& r_k);

/// delta_k = min(delta_prev / (A_k 2^k), r_k^k / (1 + a_k)): the series
/// recursion together with the strengthened flatness constraint.
/// Throws UnderflowError if the result rounds to exact zero.
BigFloat next_delta(const BigFloat& delta_prev, const BigFloat& A_k, int k,
                    const BigFloat& a_k, const BigFloat& r_k);

/// eps_n = min(r_n/4, largest eps with eps + log(1+eps/r_n)/(4 log a_n) <= 1/8).
BigFloat mollifier_radius(const BigFloat& r_n, const BigFloat& a_n);

/// Builds and validates the full table for n = 1..n_max.
/// Propagates NoRootError/UnderflowError with the failing index.
ParamTable build_table(const GrowthRule& rule, int n_max, mpfr_prec_t precision_bits);

}  // namespace kobalab
