#include "kobalab/bigfloat.hpp"

#include <gmp.h>

#include <cctype>
#include <cstdlib>
#include <cstring>

namespace kobalab {

BigFloat BigFloat::parse(const std::string& s, mpfr_prec_t prec) {
  BigFloat r(prec);
  if (s.empty() || mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0) {
    throw DomainError("BigFloat::parse: not a decimal number: '" + s + "'");
  }
  return r;
}

BigFloat BigFloat::log_magnitude() const {
  mpfr_prec_t wp = prec() + 64;
  if (is_zero()) return neg_inf(wp);
  if (!is_finite()) throw DomainError("log_magnitude: non-finite input");
  BigFloat r(wp);
  mpfr_abs(r.v_, v_, MPFR_RNDN);  // exact: wp > prec
  mpfr_log(r.v_, r.v_, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::from_sign_log(int sign, const BigFloat& log_mag, mpfr_prec_t prec) {
  if (sign == 0) return zero(prec);
  mpfr_prec_t wp = prec + 64 > log_mag.prec() ? prec + 64 : log_mag.prec();
  BigFloat t(wp);
  mpfr_exp(t.v_, log_mag.v_, MPFR_RNDN);
  if (sign < 0) mpfr_neg(t.v_, t.v_, MPFR_RNDN);
  return t.round_to(prec);
}

BigFloat::Decimal BigFloat::to_decimal() const {
  if (!is_finite()) throw DomainError("to_decimal: non-finite value");
  if (is_zero()) return Decimal{"0", 0};

  // v = z * 2^k exactly; fold the binary exponent into powers of 10 via
  // 2^-k = 5^k / 10^k, which keeps the expansion exact.
  mpz_t z;
  mpz_init(z);
  mpfr_exp_t k = mpfr_get_z_2exp(z, v_);
  long exp10 = 0;
  if (k >= 0) {
    mpz_mul_2exp(z, z, static_cast<mp_bitcnt_t>(k));
  } else {
    mpz_t p5;
    mpz_init(p5);
    mpz_ui_pow_ui(p5, 5, static_cast<unsigned long>(-k));
    mpz_mul(z, z, p5);
    mpz_clear(p5);
    exp10 = static_cast<long>(k);
  }

  char* raw = mpz_get_str(nullptr, 10, z);
  std::string digits(raw);
  std::free(raw);
  mpz_clear(z);

  bool neg = !digits.empty() && digits[0] == '-';
  if (neg) digits.erase(digits.begin());

  long ndigits = static_cast<long>(digits.size());
  long sci_exp = exp10 + ndigits - 1;
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();

  std::string mant;
  if (neg) mant += '-';
  mant += digits[0];
  if (digits.size() > 1) {
    mant += '.';
    mant.append(digits, 1, std::string::npos);
  }
  return Decimal{mant, sci_exp};
}

BigFloat BigFloat::from_decimal(const Decimal& d, mpfr_prec_t prec) {
  return parse(d.mantissa + "e" + std::to_string(d.exp10), prec);
}

std::string BigFloat::to_sci_string() const {
  if (is_nan()) return "nan";
  if (is_inf()) return sign() > 0 ? "inf" : "-inf";
  Decimal d = to_decimal();
  return d.mantissa + "e" + std::to_string(d.exp10);
}

}  // namespace kobalab
