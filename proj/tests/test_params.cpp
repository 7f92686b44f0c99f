#include "doctest.h"

#include <string>

#include "kobalab/params.hpp"
#include "support/oracles.hpp"

using namespace kobalab;
using kobalab::testing::newton_switch_root;
using kobalab::testing::TestRng;

namespace {
constexpr mpfr_prec_t P = 512;

BigFloat e_pow(long k) { return exp(BigFloat::of_int(k, P)); }

bool rel_close(const BigFloat& x, const BigFloat& y, const BigFloat& tol) {
  if (x == y) return true;
  return abs(x - y) <= tol * max(abs(x), abs(y));
}

BigFloat tol_bits(long bits) { return mul_2exp(BigFloat::one(P), -bits); }

// Frozen by an independent high-precision run of the recursions.
const char* kR1 = "1.04385629939035370703971983504e-6";
const char* kR2 = "6.69495481071098814962000133819e-18";
const char* kR3 = "1.01313433831493139659153065039e-40";
const char* kR4 = "8.53515325854430735544968817051e-87";
const char* kR5 = "2.22846295526870932933089640742e-179";
const char* kA1 = "5.73586055389184783669494632547e10";
const char* kA4 = "1.40900139427594071618357658518e92";
const char* kD1 = "4.35854389504591606065555174532e-12";
const char* kD2 = "2.75396774066674377521813813729e-40";
const char* kD3 = "2.35056280282245833298326327971e-126";
const char* kD4 = "4.41288070684239293097628853423e-351";
const char* kB11 = "5.119212568415827704298338798525521e-3";
const char* kB40 = "2.0611543021755749248306052071161262e-9";
}  // namespace

TEST_CASE("next_radius: direct substitutions and domain errors") {
  BigFloat quarter = BigFloat::of(0.25, P);
  CHECK(next_radius(BigFloat::of_int(4, P), quarter) == BigFloat::one(P) / 64L);
  BigFloat r1 = next_radius(e_pow(11), quarter);
  CHECK(rel_close(r1, e_pow(-11) / 16L, tol_bits(P - 8)));
  CHECK(rel_close(r1, BigFloat::parse(kR1, P), tol_bits(90)));
  CHECK_THROWS_AS(next_radius(BigFloat::of_int(2, P), quarter), DomainError);
  CHECK_THROWS_AS(next_radius(BigFloat::of_int(4, P), BigFloat::of(0.3, P)), DomainError);
  CHECK_THROWS_AS(next_radius(BigFloat::of_int(4, P), BigFloat::zero(P)), DomainError);
}

TEST_CASE("next_radius contracts by at least 16x (boundary case is exact)") {
  // a=4, r=1/4 attains r/16 exactly; anything admissible stays at or below it.
  BigFloat quarter = BigFloat::of(0.25, P);
  CHECK(next_radius(BigFloat::of_int(4, P), quarter) == quarter / 16L);
  TestRng rng(11);
  for (int i = 0; i < 50; ++i) {
    BigFloat a = BigFloat::of(4.0 + 100.0 * rng.uniform(), P);
    BigFloat r = BigFloat::of(0.25 * (0.0001 + 0.9999 * rng.uniform()), P);
    CHECK(next_radius(a, r) <= r / 16L);
  }
}

TEST_CASE("solve_b: existence threshold") {
  CHECK_THROWS_AS(solve_b(e_pow(9), 1), NoRootError);
  // Sign scan oracle: f stays negative on a geometric grid up to the
  // critical point when a = e^9.
  {
    BigFloat a = e_pow(9);
    BigFloat bstar = 1 / (log(a) * 4);
    BigFloat x = bstar / 1000000L;
    bool any_nonneg = false;
    while (x <= bstar) {
      if (switch_equation(x, a).sign() >= 0) any_nonneg = true;
      x = x * BigFloat::of(1.1, P);
    }
    CHECK_FALSE(any_nonneg);
  }
  CHECK_NOTHROW(solve_b(e_pow(10), 1));
}

TEST_CASE("solve_b: bracketed root for a = e^40 lands in (1e-9, 1e-8)") {
  SwitchPointRoot root = solve_b(e_pow(40));
  CHECK(root.value > BigFloat::parse("1e-9", P));
  CHECK(root.value < BigFloat::parse("1e-8", P));
  CHECK(rel_close(root.value, BigFloat::parse(kB40, P), tol_bits(100)));
  CHECK(switch_equation(root.bracket.lo, e_pow(40)).sign() < 0);
  CHECK(switch_equation(root.bracket.hi, e_pow(40)).sign() >= 0);
}

TEST_CASE("solve_b: residual, bound, and Newton agreement") {
  for (long k : {11L, 12L, 13L, 14L, 40L}) {
    BigFloat a = e_pow(k);
    SwitchPointRoot root = solve_b(a);
    CHECK(root.value <= BigFloat::of(0.125, P));
    CHECK(root.value > 0);
    // |f(b)| <= 1e-12 relative to the local slope scale.
    BigFloat slope = 1 / (log(a) * 4 * root.value) - 1;
    CHECK(abs(root.residual) <= BigFloat::parse("1e-12", P) * abs(slope) * root.value);
    // Newton oracle from a seed inside the bracket.
    BigFloat newton = newton_switch_root(a, root.bracket.hi);
    CHECK(rel_close(root.value, newton, BigFloat::parse("1e-12", P)));
  }
  SwitchPointRoot r11 = solve_b(e_pow(11));
  CHECK(rel_close(r11.value, BigFloat::parse(kB11, P), tol_bits(100)));
}

TEST_CASE("solve_b: smallest-root property on a geometric grid") {
  SwitchPointRoot root = solve_b(e_pow(11));
  BigFloat a = e_pow(11);
  const int points = 256;
  // Geometric grid over (lo/1e40, lo): no sign change below the bracket.
  BigFloat lo = root.bracket.lo;
  BigFloat start = lo * BigFloat::parse("1e-40", P);
  BigFloat ratio = exp(log(lo / start) / points);
  BigFloat x = start;
  for (int i = 0; i <= points; ++i) {
    CHECK(switch_equation(min(x, lo), a).sign() < 0);
    x = x * ratio;
  }
  CHECK(root.bracket.scan_points >= 2);
}

TEST_CASE("term_bound: substitutions and dominance") {
  BigFloat A = term_bound(BigFloat::of_int(4, P), BigFloat::one(P) / 64L);
  CHECK(rel_close(A, BigFloat::of(257.25, P), tol_bits(P - 12)));

  BigFloat a1 = e_pow(11);
  BigFloat r1 = e_pow(-11) / 16L;
  BigFloat expect = BigFloat::of(0.5, P) + 16L * e_pow(22) +
                    (BigFloat::of_int(11, P) + log(BigFloat::of_int(16, P))) / 44L;
  BigFloat got = term_bound(a1, r1);
  CHECK(rel_close(got, expect, tol_bits(P - 16)));
  CHECK(rel_close(got, BigFloat::parse(kA1, P), tol_bits(90)));
  CHECK(got > a1 / r1);
}

TEST_CASE("next_delta: recursion branch, flatness branch, domain errors") {
  BigFloat d1 = next_delta(BigFloat::of(0.5, P), BigFloat::of(257.25, P), 1,
                           BigFloat::of_int(4, P), BigFloat::of(0.25, P));
  CHECK(rel_close(d1, BigFloat::one(P) / 1029L, tol_bits(P - 12)));

  CHECK_THROWS_AS(next_delta(BigFloat::of_int(2, P), BigFloat::one(P), 1,
                             BigFloat::of_int(4, P), BigFloat::of(0.25, P)),
                  DomainError);
  CHECK_THROWS_AS(next_delta(BigFloat::of(0.5, P), BigFloat::zero(P), 1,
                             BigFloat::of_int(4, P), BigFloat::of(0.25, P)),
                  DomainError);
}

TEST_CASE("next_delta: underflow reported when exponent range is exhausted") {
  mpfr_exp_t old_emin = mpfr_get_emin();
  mpfr_set_emin(-64);  // shrink the representable range, then restore
  bool threw = false;
  try {
    next_delta(BigFloat::parse("1e-15", P), BigFloat::parse("1e10", P), 4,
               BigFloat::of_int(64, P), BigFloat::of(0.001, P));
  } catch (const UnderflowError& e) {
    threw = true;
    CHECK(e.index == 4);
  }
  mpfr_set_emin(old_emin);
  CHECK(threw);
}

TEST_CASE("mollifier_radius: cap r_n/4 wins for admissible inputs") {
  BigFloat r1 = e_pow(-11) / 16L;
  BigFloat eps = mollifier_radius(r1, e_pow(11));
  CHECK(eps == mul_2exp(r1, -2));
  BigFloat g = eps + log1p(eps / r1) / (log(e_pow(11)) * 4);
  CHECK(g <= BigFloat::of(0.125, P));
  CHECK(eps < mul_2exp(r1, -1));
}

TEST_CASE("mollifier_radius: bisection branch for synthetic slow growth") {
  // a below 4 is rejected upstream; the helper itself still honors the bound.
  BigFloat r = BigFloat::of(0.25, P);
  BigFloat a = BigFloat::of(1.5, P);
  BigFloat eps = mollifier_radius(r, a);
  CHECK(eps < mul_2exp(r, -1));
  BigFloat g = eps + log1p(eps / r) / (log(a) * 4);
  CHECK(g <= BigFloat::of(0.125, P) * (1 + tol_bits(200)));
  // Largest admissible: nudging up must break the bound (when bisected).
  BigFloat g_up = (eps * BigFloat::of(1.01, P)) +
                  log1p(eps * BigFloat::of(1.01, P) / r) / (log(a) * 4);
  CHECK(g_up > BigFloat::of(0.125, P));
}

TEST_CASE("build_table: default instance reproduces the frozen table") {
  ParamTable t = build_table(GrowthRule{}, 4, P);
  CHECK(t.n_max == 4);
  CHECK(rel_close(t.r[1], e_pow(-11) / 16L, tol_bits(P - 10)));
  struct Row {
    const char* lit;
    const BigFloat& got;
  } rows[] = {
      {kR1, t.r[1]}, {kR2, t.r[2]}, {kR3, t.r[3]}, {kR4, t.r[4]}, {kR5, t.r[5]},
      {kA1, t.A[1]}, {kA4, t.A[4]}, {kD1, t.delta[1]}, {kD2, t.delta[2]},
      {kD3, t.delta[3]}, {kD4, t.delta[4]}, {kB11, t.b[1]},
  };
  for (const Row& row : rows) {
    CHECK(rel_close(row.got, BigFloat::parse(row.lit, P), tol_bits(90)));
  }
  CHECK(t.delta[1] > t.delta[2]);
  CHECK(t.delta[2] > t.delta[3]);
  CHECK(t.delta[3] > t.delta[4]);
  CHECK(t.delta[4] > 0);
  CHECK_FALSE(t.has_levi_constants());
  CHECK_NOTHROW(t.validate());
}

TEST_CASE("build_table: radius recursion re-evaluates exactly") {
  ParamTable t = build_table(GrowthRule{}, 4, P);
  for (int n = 1; n <= 5; ++n) {
    CHECK(t.r[n] == sqr(t.r[n - 1]) / t.a[n]);
  }
}

TEST_CASE("build_table: tail-sum property by direct summation") {
  ParamTable t = build_table(GrowthRule{}, 4, P);
  for (int n = 1; n < 4; ++n) {
    BigFloat tail = BigFloat::zero(P);
    for (int k = n + 1; k <= 4; ++k) tail += t.delta[k] * t.A[k];
    CHECK(tail <= mul_2exp(t.delta[n], -1));
  }
}

TEST_CASE("build_table: flatness constraint against log-arithmetic recomputation") {
  ParamTable t = build_table(GrowthRule{}, 4, P);
  for (int n = 1; n <= 4; ++n) {
    // Independent route: compare in log space rather than by pow_si.
    BigFloat lhs = t.delta[n].log_magnitude() + (t.a[n] + 1).log_magnitude();
    BigFloat rhs = t.r[n].log_magnitude() * n;
    CHECK(lhs <= rhs + mul_2exp(abs(rhs), -200));
  }
}

TEST_CASE("build_table: constant e^9 schedule fails with NoRoot at n=1") {
  GrowthRule rule;
  rule.kind = GrowthRule::Kind::const_exp;
  rule.offset = 9.0;
  bool threw = false;
  try {
    build_table(rule, 4, P);
  } catch (const NoRootError& e) {
    threw = true;
    CHECK(e.index == 1);
  } catch (const DomainError&) {
    // Constant schedules also violate monotonicity, but the root check
    // must fire first (n=1 precedes the n=2 comparison).
    CHECK(false);
  }
  CHECK(threw);
}

TEST_CASE("growth rule parsing") {
  CHECK(GrowthRule::parse("default").kind == GrowthRule::Kind::exp_affine);
  CHECK(GrowthRule::parse("exp:12").offset == 12.0);
  CHECK(GrowthRule::parse("const:e9").kind == GrowthRule::Kind::const_exp);
  CHECK(GrowthRule::parse("const:55000").kind == GrowthRule::Kind::const_value);
  CHECK_THROWS_AS(GrowthRule::parse("geom:2"), DomainError);
  CHECK_THROWS_AS(GrowthRule::parse("const:xyz"), DomainError);
}
