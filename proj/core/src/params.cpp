#include "kobalab/params.hpp"

#include <cmath>

namespace kobalab {

BigFloat GrowthRule::at(int n, mpfr_prec_t prec) const {
  switch (kind) {
    case Kind::exp_affine:
      return exp(BigFloat::of(offset, prec) + static_cast<long>(n));
    case Kind::const_exp:
      return exp(BigFloat::of(offset, prec));
    case Kind::const_value:
      return BigFloat::of(value, prec);
  }
  throw DomainError("GrowthRule: bad kind");
}

std::string GrowthRule::spec_string() const {
  switch (kind) {
    case Kind::exp_affine:
      return "exp:" + std::to_string(offset);
    case Kind::const_exp:
      return "const:e" + std::to_string(offset);
    case Kind::const_value:
      return "const:" + std::to_string(value);
  }
  return "?";
}

GrowthRule GrowthRule::parse(const std::string& s) {
  GrowthRule rule;
  if (s.empty() || s == "default") return rule;
  auto num = [&](const std::string& t) {
    try {
      size_t pos = 0;
      double v = std::stod(t, &pos);
      if (pos != t.size()) throw DomainError("growth rule: bad number '" + t + "'");
      return v;
    } catch (const std::logic_error&) {
      throw DomainError("growth rule: bad number '" + t + "'");
    }
  };
  if (s.rfind("exp:", 0) == 0) {
    rule.kind = Kind::exp_affine;
    rule.offset = num(s.substr(4));
    return rule;
  }
  if (s.rfind("const:e", 0) == 0) {
    rule.kind = Kind::const_exp;
    rule.offset = num(s.substr(7));
    return rule;
  }
  if (s.rfind("const:", 0) == 0) {
    rule.kind = Kind::const_value;
    rule.value = num(s.substr(6));
    return rule;
  }
  throw DomainError("growth rule: unknown spec '" + s + "'");
}

BigFloat next_radius(const BigFloat& a_n, const BigFloat& r_prev) {
  mpfr_prec_t p = a_n.prec() > r_prev.prec() ? a_n.prec() : r_prev.prec();
  BigFloat quarter = mul_2exp(BigFloat::one(p), -2);
  if (!(a_n >= 4)) throw DomainError("next_radius: growth value below 4");
  if (!(r_prev > 0) || r_prev > quarter) {
    throw DomainError("next_radius: previous radius outside (0, 1/4]");
  }
  return sqr(r_prev) / a_n;
}

BigFloat switch_equation(const BigFloat& x, const BigFloat& a) {
  mpfr_prec_t p = x.prec() > a.prec() ? x.prec() : a.prec();
  BigFloat eighth = mul_2exp(BigFloat::one(p), -3);
  return eighth - x + log(x) / (log(a) * 4);
}

SwitchPointRoot solve_b(const BigFloat& a_n, int index) {
  mpfr_prec_t p = a_n.prec();
  if (!(a_n > 1)) throw DomainError("solve_b: growth value must exceed 1");
  BigFloat c4 = log(a_n) * 4;
  BigFloat bstar = 1 / c4;  // critical point of f; f increases below it
  if (!(switch_equation(bstar, a_n) > 0)) {
    throw NoRootError("solve_b: no positive root, growth value too small (n=" +
                          std::to_string(index) + ")",
                      index);
  }

  // Geometric scan upward from a point certainly below the root. f(x) = 0
  // forces log(x) >= -(log a)/2, so x = a^(-1/2)/2 is a safe floor.
  BigFloat lo = mul_2exp(exp(log(a_n) / -2), -1);
  BigFloat ratio = BigFloat::of(1.2, p);
  BigFloat f_lo = switch_equation(lo, a_n);
  if (!(f_lo < 0)) throw DomainError("solve_b: scan floor not below root");
  BigFloat hi(p);
  int scanned = 1;
  for (;;) {
    BigFloat next = min(lo * ratio, bstar);
    ++scanned;
    if (!(switch_equation(next, a_n) < 0)) {
      hi = next;
      break;
    }
    lo = next;
    if (next == bstar) throw NoRootError("solve_b: scan exhausted (n=" + std::to_string(index) + ")", index);
  }

  // Bisect far past the 1e-12 contract; each halving costs one log.
  BigFloat width_goal = mul_2exp(hi, -static_cast<long>(p - 16));
  while (hi - lo > width_goal) {
    BigFloat mid = mul_2exp(lo + hi, -1);
    if (switch_equation(mid, a_n) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  SwitchPointRoot root;
  root.value = mul_2exp(lo + hi, -1);
  root.bracket = RootBracket{lo, hi, scanned};
  root.residual = switch_equation(root.value, a_n);
  BigFloat eighth = mul_2exp(BigFloat::one(p), -3);
  if (root.value > eighth || !(root.value < bstar)) {
    throw DomainError("solve_b: root outside (0, min(1/8, x*))");
  }
  return root;
}

BigFloat term_bound(const BigFloat& a_k, const BigFloat& r_k) {
  mpfr_prec_t p = a_k.prec() > r_k.prec() ? a_k.prec() : r_k.prec();
  BigFloat half = mul_2exp(BigFloat::one(p), -1);
  return half + a_k / r_k + (-log(r_k)) / (log(a_k) * 4);
}

BigFloat next_delta(const BigFloat& delta_prev, const BigFloat& A_k, int k,
                    const BigFloat& a_k, const BigFloat& r_k) {
  if (!(delta_prev > 0) || !(delta_prev < 1)) {
    throw DomainError("next_delta: previous weight outside (0,1)");
  }
  if (!(A_k > 0)) throw DomainError("next_delta: term bound must be positive");
  BigFloat recursion = mul_2exp(delta_prev / A_k, -k);
  BigFloat flatness = pow_si(r_k, k) / (a_k + 1);
  BigFloat delta = min(recursion, flatness);
  if (delta.sign() == 0) {
    throw UnderflowError("next_delta: weight underflowed to zero (k=" + std::to_string(k) + ")", k);
  }
  return delta;
}

BigFloat mollifier_radius(const BigFloat& r_n, const BigFloat& a_n) {
  mpfr_prec_t p = r_n.prec() > a_n.prec() ? r_n.prec() : a_n.prec();
  BigFloat eighth = mul_2exp(BigFloat::one(p), -3);
  BigFloat c4 = log(a_n) * 4;
  auto bound = [&](const BigFloat& e) { return e + log1p(e / r_n) / c4; };

  BigFloat cap = mul_2exp(r_n, -2);
  if (bound(cap) <= eighth) return cap;

  // Largest eps with bound(eps) <= 1/8; bound is increasing, so bisect.
  BigFloat lo = BigFloat::zero(p);
  BigFloat hi = mul_2exp(r_n, -1);
  if (bound(hi) <= eighth) {
    // Constraint inactive up to the r_n/2 ceiling; stay strictly below it.
    return hi - mul_2exp(hi, -static_cast<long>(p / 2));
  }
  for (int i = 0; i < 256; ++i) {
    BigFloat mid = mul_2exp(lo + hi, -1);
    if (bound(mid) <= eighth) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

ParamTable build_table(const GrowthRule& rule, int n_max, mpfr_prec_t precision_bits) {
  if (n_max < 1) throw DomainError("build_table: n_max must be >= 1");
  ParamTable t;
  t.n_max = n_max;
  t.precision_bits = precision_bits;
  const mpfr_prec_t p = precision_bits;
  const BigFloat nan;  // unset slot

  t.a.assign(n_max + 2, nan);
  t.r.assign(n_max + 2, nan);
  t.b.assign(n_max + 1, nan);
  t.eps.assign(n_max + 1, nan);
  t.A.assign(n_max + 1, nan);
  t.delta.assign(n_max + 1, nan);
  t.d.assign(n_max + 1, nan);
  t.r_tilde.assign(n_max + 1, nan);
  t.C.assign(n_max + 1, nan);
  t.c.assign(n_max + 1, nan);
  t.K.assign(n_max + 1, nan);
  t.b_bracket.assign(n_max + 1, RootBracket{});

  t.r[0] = mul_2exp(BigFloat::one(p), -2);
  t.delta[0] = mul_2exp(BigFloat::one(p), -1);
  // One interleaved pass so the n=1 root-existence failure surfaces before
  // any later-index schedule problem.
  for (int n = 1; n <= n_max; ++n) {
    t.a[n] = rule.at(n, p);
    if (!(t.a[n] >= 4)) throw DomainError("build_table: a_" + std::to_string(n) + " below 4");
    if (n > 1 && !(t.a[n] > t.a[n - 1])) {
      throw DomainError("build_table: growth schedule not strictly increasing at n=" + std::to_string(n));
    }
    t.r[n] = next_radius(t.a[n], t.r[n - 1]);
    SwitchPointRoot root = solve_b(t.a[n], n);
    t.b[n] = root.value;
    t.b_bracket[n] = root.bracket;
    t.eps[n] = mollifier_radius(t.r[n], t.a[n]);
    t.A[n] = term_bound(t.a[n], t.r[n]);
    t.delta[n] = next_delta(t.delta[n - 1], t.A[n], n, t.a[n], t.r[n]);
  }
  t.a[n_max + 1] = rule.at(n_max + 1, p);
  if (!(t.a[n_max + 1] > t.a[n_max])) {
    throw DomainError("build_table: growth schedule not strictly increasing at n=" + std::to_string(n_max + 1));
  }
  t.r[n_max + 1] = next_radius(t.a[n_max + 1], t.r[n_max]);
  for (int n = 1; n <= n_max; ++n) {
    t.r_tilde[n] = pow_si(t.r[n + 1], 3);
    t.d[n] = sqr(t.r_tilde[n]);
  }

  t.validate();
  return t;
}

bool ParamTable::has_levi_constants() const {
  for (int n = 1; n <= n_max; ++n) {
    if (C[n].is_nan() || c[n].is_nan() || K[n].is_nan()) return false;
  }
  return n_max >= 1;
}

void ParamTable::validate() const {
  const mpfr_prec_t p = precision_bits;
  auto fail = [](const std::string& msg) { throw DomainError("ParamTable: " + msg); };
  if (n_max < 1) fail("n_max < 1");
  if (static_cast<int>(a.size()) != n_max + 2 || static_cast<int>(r.size()) != n_max + 2) {
    fail("array sizes inconsistent with n_max");
  }

  BigFloat quarter = mul_2exp(BigFloat::one(p), -2);
  BigFloat eighth = mul_2exp(BigFloat::one(p), -3);
  // Relative slack for re-evaluated identities; exact-route recomputation
  // at the same precision normally matches bit for bit.
  BigFloat slack = mul_2exp(BigFloat::one(p), -static_cast<long>(p - 8));

  if (!(a[1] >= exp(BigFloat::of(10, p)) * (1 - slack))) fail("a_1 below e^10");
  for (int n = 1; n <= n_max + 1; ++n) {
    if (!(a[n] >= 4)) fail("a_n below 4");
    if (n > 1 && !(a[n] > a[n - 1])) fail("a not strictly increasing");
  }

  if (r[0] != quarter) fail("r_0 != 1/4");
  for (int n = 1; n <= n_max + 1; ++n) {
    if (!(r[n] > 0) || r[n] > quarter) fail("r_n outside (0, 1/4]");
    if (!(r[n] < r[n - 1])) fail("r not strictly decreasing");
    BigFloat again = sqr(r[n - 1]) / a[n];
    if (abs(again - r[n]) > slack * r[n]) fail("radius recursion does not re-evaluate");
  }

  for (int n = 1; n <= n_max; ++n) {
    if (!(b[n] > 0) || b[n] > eighth) fail("b_n outside (0, 1/8]");
    if (n > 1 && !(b[n] < b[n - 1])) fail("b not strictly decreasing");
    if (!(switch_equation(b_bracket[n].lo, a[n]) < 0) ||
        !(switch_equation(b_bracket[n].hi, a[n]) >= 0)) {
      fail("b_n bracket lost its sign change");
    }
    if (!(mul_2exp(r[n], 1) < b[n])) fail("2 r_n not below b_n");

    if (!(eps[n] < mul_2exp(r[n], -1))) fail("eps_n not below r_n/2");
    BigFloat g = eps[n] + log1p(eps[n] / r[n]) / (log(a[n]) * 4);
    if (g > eighth * (1 + slack)) fail("mollifier bound above 1/8");

    if (!(A[n] > a[n] / r[n])) fail("A_k not above a_k/r_k");

    if (!(delta[n] > 0) || !(delta[n] < 1)) fail("delta_k outside (0,1)");
    if (!(delta[n] < delta[n - 1])) fail("delta not strictly decreasing");
    BigFloat rec = mul_2exp(delta[n - 1] / A[n], -n);
    if (delta[n] > rec * (1 + slack)) fail("delta recursion bound violated");
    if (delta[n] * (a[n] + 1) > pow_si(r[n], n) * (1 + slack)) fail("flatness constraint violated");

    BigFloat rt = pow_si(r[n + 1], 3);
    if (abs(rt - r_tilde[n]) > slack * rt) fail("r_tilde_n != r_{n+1}^3");
    BigFloat sep = sqrt(pow_si(r_tilde[n] * 3 / 4, 3));
    if (d[n] > mul_2exp(sep, -2)) fail("tube half-width above sheet-separation budget");
    if (!(d[n] > 0)) fail("tube half-width not positive");
  }
  if (!(delta[0] == mul_2exp(BigFloat::one(p), -1))) fail("delta_0 != 1/2");
}

}  // namespace kobalab
