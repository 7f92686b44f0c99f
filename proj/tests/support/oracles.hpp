#pragma once

// Test-only oracles, kept independent of the library code paths they check.

#include <cstdint>

#include "kobalab/bigfloat.hpp"

namespace kobalab::testing {

/// splitmix64: deterministic across platforms, unlike <random> distributions.
struct TestRng {
  std::uint64_t state;
  explicit TestRng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0,1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform in [-1,1).
  double symmetric() { return 2.0 * uniform() - 1.0; }
  long integer(long lo, long hi) {  // inclusive bounds
    return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

/// Random value with a wide exponent range and full-width mantissa.
inline BigFloat random_value(TestRng& rng, mpfr_prec_t prec, long max_exp10) {
  BigFloat x = BigFloat::of(rng.symmetric(), prec);
  x = x + BigFloat::of(rng.symmetric(), prec) * pow_si(BigFloat::of(2.0, prec), -52);
  x = x + BigFloat::of(rng.symmetric(), prec) * pow_si(BigFloat::of(2.0, prec), -104);
  long e = rng.integer(-max_exp10, max_exp10);
  return x * exp(BigFloat::of_int(e, prec));
}

/// Newton iteration for the switch-point equation, seeded inside the bracket.
/// Oracle only: the library must never use this as its primary method.
inline BigFloat newton_switch_root(const BigFloat& a, const BigFloat& seed, int iters = 200) {
  BigFloat b = seed;
  BigFloat c4 = log(a) * 4;
  BigFloat eighth = mul_2exp(BigFloat::one(a.prec()), -3);
  for (int i = 0; i < iters; ++i) {
    BigFloat f = eighth - b + log(b) / c4;
    BigFloat fp = 1 / (c4 * b) - 1;
    b = b - f / fp;
  }
  return b;
}

}  // namespace kobalab::testing
