#pragma once

#include <mpfr.h>

#include <cstdint>
#include <string>
#include <utility>

#include "kobalab/errors.hpp"

namespace kobalab {

/// Arbitrary-precision real scalar backed by MPFR, rounding to nearest.
///
/// The construction's weight sequence reaches magnitudes around 1e-348 by the
/// fourth step and the tube-shell sweeps need steps below 1e-1000, so every
/// quantity that can leave double range lives in this type. Each value carries
/// its own precision; binary operations round at the wider of the two operand
/// precisions. Assignment adopts the source's precision so containers behave
/// like value types.
class BigFloat {
 public:
  static constexpr mpfr_prec_t kMinPrec = 64;

  BigFloat() { mpfr_init2(v_, kMinPrec); }
  explicit BigFloat(mpfr_prec_t prec) { mpfr_init2(v_, clamp(prec)); }

  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, kMinPrec);
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  static BigFloat of(double x, mpfr_prec_t prec) {
    BigFloat r(prec);
    mpfr_set_d(r.v_, x, MPFR_RNDN);
    return r;
  }
  static BigFloat of_int(long x, mpfr_prec_t prec) {
    BigFloat r(prec);
    mpfr_set_si(r.v_, x, MPFR_RNDN);
    return r;
  }
  static BigFloat zero(mpfr_prec_t prec) { return of_int(0, prec); }
  static BigFloat one(mpfr_prec_t prec) { return of_int(1, prec); }
  /// Parses decimal scientific notation ("1.25e-80"); throws DomainError on junk.
  static BigFloat parse(const std::string& s, mpfr_prec_t prec);
  static BigFloat pos_inf(mpfr_prec_t prec) {
    BigFloat r(prec);
    mpfr_set_inf(r.v_, +1);
    return r;
  }
  static BigFloat neg_inf(mpfr_prec_t prec) {
    BigFloat r(prec);
    mpfr_set_inf(r.v_, -1);
    return r;
  }
  static BigFloat pi(mpfr_prec_t prec) {
    BigFloat r(prec);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }

  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  int sign() const { return mpfr_zero_p(v_) ? 0 : (mpfr_signbit(v_) ? -1 : 1); }
  bool is_zero() const { return mpfr_zero_p(v_); }
  bool is_nan() const { return mpfr_nan_p(v_); }
  bool is_inf() const { return mpfr_inf_p(v_); }
  bool is_finite() const { return mpfr_number_p(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  /// Exponent e with |x| in [2^(e-1), 2^e); 0 for zero/non-finite.
  long exp2() const { return mpfr_regular_p(v_) ? static_cast<long>(mpfr_get_exp(v_)) : 0; }

  // Raw handle for the few call sites that talk to MPFR directly.
  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
    BigFloat r(join(a, b));
    mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
    BigFloat r(join(a, b));
    mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
    BigFloat r(join(a, b));
    mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
    BigFloat r(join(a, b));
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  BigFloat operator-() const {
    BigFloat r(prec());
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }
  BigFloat& operator+=(const BigFloat& b) { return *this = *this + b; }
  BigFloat& operator-=(const BigFloat& b) { return *this = *this - b; }
  BigFloat& operator*=(const BigFloat& b) { return *this = *this * b; }
  BigFloat& operator/=(const BigFloat& b) { return *this = *this / b; }

  friend BigFloat operator*(const BigFloat& a, long b) {
    BigFloat r(a.prec());
    mpfr_mul_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator/(const BigFloat& a, long b) {
    BigFloat r(a.prec());
    mpfr_div_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator+(const BigFloat& a, long b) {
    BigFloat r(a.prec());
    mpfr_add_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator-(const BigFloat& a, long b) {
    BigFloat r(a.prec());
    mpfr_sub_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator-(long a, const BigFloat& b) {
    BigFloat r(b.prec());
    mpfr_si_sub(r.v_, a, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator+(long a, const BigFloat& b) { return b + a; }
  friend BigFloat operator*(long a, const BigFloat& b) { return b * a; }
  friend BigFloat operator/(long a, const BigFloat& b) {
    BigFloat r(b.prec());
    mpfr_si_div(r.v_, a, b.v_, MPFR_RNDN);
    return r;
  }

  int cmp(const BigFloat& b) const { return mpfr_cmp(v_, b.v_); }
  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_); }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.v_, b.v_); }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.v_, b.v_); }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_greaterequal_p(a.v_, b.v_); }
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_); }
  friend bool operator!=(const BigFloat& a, const BigFloat& b) { return !mpfr_equal_p(a.v_, b.v_); }
  friend bool operator<(const BigFloat& a, long b) { return mpfr_cmp_si(a.v_, b) < 0; }
  friend bool operator>(const BigFloat& a, long b) { return mpfr_cmp_si(a.v_, b) > 0; }
  friend bool operator<=(const BigFloat& a, long b) { return mpfr_cmp_si(a.v_, b) <= 0; }
  friend bool operator>=(const BigFloat& a, long b) { return mpfr_cmp_si(a.v_, b) >= 0; }

  friend BigFloat abs(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_abs(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat sqrt(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat cbrt(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_cbrt(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat log(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_log(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat log1p(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_log1p(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat exp(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_exp(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat expm1(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_expm1(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat sqr(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_sqr(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  /// a^k for integer k (k may be negative; a != 0 then).
  friend BigFloat pow_si(const BigFloat& a, long k) {
    BigFloat r(a.prec());
    mpfr_pow_si(r.v_, a.v_, k, MPFR_RNDN);
    return r;
  }
  friend BigFloat mul_2exp(const BigFloat& a, long k) {
    BigFloat r(a.prec());
    mpfr_mul_2si(r.v_, a.v_, k, MPFR_RNDN);
    return r;
  }
  friend BigFloat min(const BigFloat& a, const BigFloat& b) { return a <= b ? a : b; }
  friend BigFloat max(const BigFloat& a, const BigFloat& b) { return a >= b ? a : b; }
  friend void sin_cos(BigFloat& s, BigFloat& c, const BigFloat& angle) {
    s = BigFloat(angle.prec());
    c = BigFloat(angle.prec());
    mpfr_sin_cos(s.v_, c.v_, angle.raw(), MPFR_RNDN);
  }

  /// Rounds to a (usually smaller) precision.
  BigFloat round_to(mpfr_prec_t prec) const {
    BigFloat r(prec);
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
  }

  /// Natural log of |x|; -inf at zero. Computed with 64 guard bits so the
  /// sign/log round trip keeps relative error under 2^-(prec-8) even for
  /// magnitudes like exp(+-5000).
  BigFloat log_magnitude() const;
  /// Inverse of the (sign, log_magnitude) decomposition.
  static BigFloat from_sign_log(int sign, const BigFloat& log_mag, mpfr_prec_t prec);

  /// Exact decimal form: value == mantissa * 10^exp10 with mantissa "d.ddd..".
  /// Every binary float has a finite decimal expansion, so the round trip
  /// through this form is exact at any precision >= the writing precision.
  struct Decimal {
    std::string mantissa;  // "0", or "[-]d.ddd..." with no trailing zeros
    long exp10 = 0;
  };
  Decimal to_decimal() const;
  static BigFloat from_decimal(const Decimal& d, mpfr_prec_t prec);
  /// Single-token scientific form "d.ddd...e[+-]k" (exact, CSV-friendly).
  std::string to_sci_string() const;

 private:
  static mpfr_prec_t clamp(mpfr_prec_t p) { return p < kMinPrec ? kMinPrec : p; }
  static mpfr_prec_t join(const BigFloat& a, const BigFloat& b) {
    return a.prec() > b.prec() ? a.prec() : b.prec();
  }
  mpfr_t v_;
};

/// Complex scalar over BigFloat.
struct Complex {
  BigFloat re, im;

  Complex() = default;
  Complex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}
  static Complex of(double r, double i, mpfr_prec_t prec) {
    return Complex(BigFloat::of(r, prec), BigFloat::of(i, prec));
  }
  static Complex zero(mpfr_prec_t prec) {
    return Complex(BigFloat::zero(prec), BigFloat::zero(prec));
  }

  friend Complex operator+(const Complex& a, const Complex& b) {
    return Complex(a.re + b.re, a.im + b.im);
  }
  friend Complex operator-(const Complex& a, const Complex& b) {
    return Complex(a.re - b.re, a.im - b.im);
  }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return Complex(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend Complex operator*(const BigFloat& a, const Complex& b) {
    return Complex(a * b.re, a * b.im);
  }
  friend Complex operator/(const Complex& a, const Complex& b) {
    BigFloat d = b.abs2();
    Complex n = a * b.conj();
    return Complex(n.re / d, n.im / d);
  }
  Complex operator-() const { return Complex(-re, -im); }
  Complex conj() const { return Complex(re, -im); }
  BigFloat abs2() const { return re * re + im * im; }
  BigFloat abs() const { return sqrt(abs2()); }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  mpfr_prec_t prec() const { return re.prec() > im.prec() ? re.prec() : im.prec(); }
};

inline Complex mul_i(const Complex& a) { return Complex(-a.im, a.re); }

}  // namespace kobalab
