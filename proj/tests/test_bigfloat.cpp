#include "doctest.h"

#include <string>

#include "kobalab/bigfloat.hpp"
#include "support/oracles.hpp"

using namespace kobalab;
using kobalab::testing::TestRng;
using kobalab::testing::random_value;

namespace {
constexpr mpfr_prec_t P = 512;

bool rel_close(const BigFloat& x, const BigFloat& y, long bits) {
  if (x == y) return true;
  BigFloat scale = max(abs(x), abs(y));
  return abs(x - y) <= mul_2exp(scale, -bits);
}
}  // namespace

TEST_CASE("arithmetic basics at 512 bits") {
  BigFloat two = BigFloat::of_int(2, P);
  BigFloat three = BigFloat::of_int(3, P);
  CHECK((two + three) == BigFloat::of_int(5, P));
  CHECK((two * three) == BigFloat::of_int(6, P));
  CHECK((three - two) == BigFloat::one(P));
  CHECK((three / three) == BigFloat::one(P));
  CHECK(sqr(three) == BigFloat::of_int(9, P));
  CHECK(sqrt(BigFloat::of_int(9, P)) == three);
  CHECK(pow_si(two, 10) == BigFloat::of_int(1024, P));
  CHECK(mul_2exp(three, -1) == BigFloat::of(1.5, P));
  CHECK((-two).sign() == -1);
  CHECK(BigFloat::zero(P).sign() == 0);
}

TEST_CASE("precision joins take the wider operand") {
  BigFloat narrow = BigFloat::of_int(1, 128);
  BigFloat wide = BigFloat::of_int(1, 1024);
  CHECK((narrow + wide).prec() == 1024);
  CHECK((wide / narrow).prec() == 1024);
}

TEST_CASE("comparisons are total for finite and infinite values") {
  BigFloat ninf = BigFloat::neg_inf(P);
  BigFloat tiny = exp(BigFloat::of_int(-3000, P));
  CHECK(ninf < tiny);
  CHECK(tiny > 0);
  CHECK(tiny < 1);
  CHECK(ninf < -BigFloat::one(P));
  CHECK(BigFloat::pos_inf(P) > exp(BigFloat::of_int(3000, P)));
}

TEST_CASE("exact decimal round trip at same and higher precision") {
  TestRng rng(42);
  for (int i = 0; i < 60; ++i) {
    BigFloat x = random_value(rng, P, 900);
    BigFloat::Decimal d = x.to_decimal();
    BigFloat same = BigFloat::from_decimal(d, P);
    CHECK(same == x);
    BigFloat higher = BigFloat::from_decimal(d, P + 256);
    CHECK(higher == x);  // the decimal form is exact, not merely close
  }
}

TEST_CASE("decimal forms of simple values") {
  BigFloat quarter = mul_2exp(BigFloat::one(P), -2);
  auto d = quarter.to_decimal();
  CHECK(d.mantissa == "2.5");
  CHECK(d.exp10 == -1);
  CHECK(quarter.to_sci_string() == "2.5e-1");
  CHECK(BigFloat::zero(P).to_sci_string() == "0e0");
  BigFloat neg = BigFloat::of(-0.5, P);
  CHECK(neg.to_sci_string() == "-5e-1");
  CHECK(BigFloat::parse("-5e-1", P) == neg);
}

TEST_CASE("parse rejects junk") {
  CHECK_THROWS_AS(BigFloat::parse("", P), DomainError);
  CHECK_THROWS_AS(BigFloat::parse("1.2.3", P), DomainError);
  CHECK_THROWS_AS(BigFloat::parse("abc", P), DomainError);
}

TEST_CASE("sign/log round trip keeps relative error under 2^-(bits-8)") {
  TestRng rng(7);
  for (int i = 0; i < 40; ++i) {
    BigFloat x = random_value(rng, P, 2000);
    if (x.is_zero()) continue;
    BigFloat back = BigFloat::from_sign_log(x.sign(), x.log_magnitude(), P);
    CHECK(rel_close(back, x, P - 8));
  }
  // Extremes matching the deepest table magnitudes.
  BigFloat tiny = exp(BigFloat::of_int(-4600, P));
  BigFloat back = BigFloat::from_sign_log(1, tiny.log_magnitude(), P);
  CHECK(rel_close(back, tiny, P - 8));
  CHECK(BigFloat::from_sign_log(0, BigFloat::zero(P), P).is_zero());
  CHECK(BigFloat::zero(P).log_magnitude().is_inf());
}

TEST_CASE("complex arithmetic and helpers") {
  Complex i = Complex::of(0, 1, P);
  Complex one = Complex::of(1, 0, P);
  CHECK((i * i + one).is_zero());
  Complex z = Complex::of(3, 4, P);
  CHECK(z.abs() == BigFloat::of_int(5, P));
  CHECK(z.abs2() == BigFloat::of_int(25, P));
  Complex w = z / Complex::of(1, 2, P);
  // (3+4i)/(1+2i) = (11-2i)/5
  CHECK(rel_close(w.re, BigFloat::of_int(11, P) / 5L, P - 8));
  CHECK(rel_close(w.im, BigFloat::of_int(-2, P) / 5L, P - 8));
  CHECK(mul_i(one).im == BigFloat::one(P));
}
