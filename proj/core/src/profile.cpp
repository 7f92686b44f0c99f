#include "kobalab/profile.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace kobalab {

BigFloat kernel_profile(const BigFloat& radius) {
  mpfr_prec_t p = radius.prec();
  BigFloat one = BigFloat::one(p);
  if (radius >= one) return BigFloat::zero(p);
  return exp(-(1 / (one - sqr(radius))));
}

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton refinement of double
// seeds; the Legendre recurrence supplies values and derivatives.
void legendre_rule(int n, mpfr_prec_t prec, std::vector<BigFloat>& x, std::vector<BigFloat>& w) {
  x.clear();
  w.clear();
  mpfr_prec_t wp = prec + 64;
  BigFloat one = BigFloat::one(wp);
  for (int i = 0; i < n; ++i) {
    double seed = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    BigFloat xi = BigFloat::of(seed, wp);
    BigFloat pn(wp), pd(wp);
    for (int iter = 0; iter < 64; ++iter) {
      BigFloat p0 = one, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        BigFloat p2 = ((2 * k - 1) * (xi * p1) - (k - 1) * p0) / static_cast<long>(k);
        p0 = p1;
        p1 = p2;
      }
      pn = p1;
      pd = static_cast<long>(n) * (xi * p1 - p0) / (sqr(xi) - 1);
      BigFloat dx = pn / pd;
      xi = xi - dx;
      if (dx.is_zero() || dx.exp2() < -(static_cast<long>(prec) + 32)) break;
    }
    x.push_back(xi.round_to(prec));
    BigFloat wi = 2 / ((1 - sqr(xi)) * sqr(pd));
    w.push_back(wi.round_to(prec));
  }
}

struct QuadKey {
  int nr, nt;
  mpfr_prec_t prec;
  bool operator<(const QuadKey& o) const {
    return std::tie(nr, nt, prec) < std::tie(o.nr, o.nt, o.prec);
  }
};

std::mutex g_quad_mutex;
std::map<QuadKey, std::unique_ptr<PolarQuadrature>> g_quad_cache;

}  // namespace

PolarQuadrature::PolarQuadrature(QuadSpec s, mpfr_prec_t p) : spec(s), prec(p) {
  std::vector<BigFloat> gl_x, gl_w;
  legendre_rule(s.radial, p, gl_x, gl_w);

  // Map [-1,1] -> [0,1] and fold in the polar Jacobian and the kernel.
  std::vector<BigFloat> radial_part(s.radial);
  BigFloat S = BigFloat::zero(p);
  rho.resize(s.radial);
  for (int j = 0; j < s.radial; ++j) {
    rho[j] = mul_2exp(gl_x[j] + 1, -1);
    radial_part[j] = mul_2exp(gl_w[j], -1) * rho[j] * kernel_profile(rho[j]);
    S += radial_part[j];
  }

  BigFloat two_pi = mul_2exp(BigFloat::pi(p), 1);
  kernel_mass = two_pi * S;

  weight.resize(s.radial);
  for (int j = 0; j < s.radial; ++j) {
    weight[j] = radial_part[j] / (S * static_cast<long>(s.angular));
  }

  direction.resize(s.angular);
  for (int k = 0; k < s.angular; ++k) {
    BigFloat angle = two_pi * static_cast<long>(k) / static_cast<long>(s.angular);
    BigFloat sn(p), cs(p);
    sin_cos(sn, cs, angle);
    direction[k] = Complex(cs, sn);
  }
}

const PolarQuadrature& PolarQuadrature::get(QuadSpec spec, mpfr_prec_t prec) {
  std::lock_guard<std::mutex> lock(g_quad_mutex);
  QuadKey key{spec.radial, spec.angular, prec};
  auto it = g_quad_cache.find(key);
  if (it == g_quad_cache.end()) {
    it = g_quad_cache.emplace(key, std::unique_ptr<PolarQuadrature>(new PolarQuadrature(spec, prec))).first;
  }
  return *it->second;
}

BigFloat convolve_radial(const std::function<BigFloat(const Complex&)>& f,
                         const Complex& center, const BigFloat& eps,
                         const PolarQuadrature& quad) {
  mpfr_prec_t p = quad.prec > center.prec() ? quad.prec : center.prec();
  BigFloat acc = BigFloat::zero(p);
  const int nr = quad.spec.radial;
  const int nt = quad.spec.angular;
  for (int j = 0; j < nr; ++j) {
    BigFloat ring = BigFloat::zero(p);
    BigFloat scale = eps * quad.rho[j];
    for (int k = 0; k < nt; ++k) {
      Complex zq(center.re - scale * quad.direction[k].re,
                 center.im - scale * quad.direction[k].im);
      if (zq.is_zero()) {
        // Node fell on the integrand's singular point: shift it by half the
        // local radial spacing.
        BigFloat spacing = j + 1 < nr ? quad.rho[j + 1] - quad.rho[j] : 1 - quad.rho[j];
        BigFloat nudged = eps * (quad.rho[j] + mul_2exp(spacing, -1));
        zq = Complex(center.re - nudged * quad.direction[k].re,
                     center.im - nudged * quad.direction[k].im);
      }
      ring += f(zq);
    }
    acc += quad.weight[j] * ring;
  }
  return acc;
}

BigFloat u_profile(const Complex& z, const BigFloat& a) {
  mpfr_prec_t p = z.prec() > a.prec() ? z.prec() : a.prec();
  if (z.is_zero()) return BigFloat::neg_inf(p);
  BigFloat eighth = mul_2exp(BigFloat::one(p), -3);
  // log|z| = log(|z|^2) / 2 avoids a sqrt.
  return eighth - z.re + mul_2exp(log(z.abs2()), -1) / (log(a) * 4);
}

BigFloat base_profile(const Complex& z, const BigFloat& a, const BigFloat& b) {
  BigFloat u = u_profile(z, a);
  if (z.re <= b) {
    return max(u, BigFloat::zero(u.prec()));
  }
  return u;
}

namespace {

// Classification body, parameterized by working precision so a cheap
// low-precision pass can screen most points. `conclusive` reports whether
// every comparison cleared the 2^-margin_bits relative slop.
ProfileRegion classify_at(const Complex& z, const BigFloat& pad, const BigFloat& a,
                          const BigFloat& b, mpfr_prec_t wp, long margin_bits,
                          bool& conclusive) {
  conclusive = true;
  BigFloat guard = mul_2exp(BigFloat::one(wp), -margin_bits);
  auto decide = [&](const BigFloat& value) {
    // Sign of `value` with slop: 0 means too close to call at this precision.
    BigFloat slop = guard * (1 + abs(value));
    if (value > slop) return 1;
    if (value < -slop) return -1;
    conclusive = false;
    return 0;
  };

  Complex zw(z.re.round_to(wp), z.im.round_to(wp));
  BigFloat mag = zw.abs();
  BigFloat m_lo = mag - pad.round_to(wp);
  BigFloat m_hi = mag + pad.round_to(wp);
  BigFloat re_lo = zw.re - pad.round_to(wp);
  BigFloat re_hi = zw.re + pad.round_to(wp);
  BigFloat c4 = log(a.round_to(wp)) * 4;
  BigFloat eighth = mul_2exp(BigFloat::one(wp), -3);
  BigFloat bw = b.round_to(wp);

  if (decide(re_lo - bw) > 0) return ProfileRegion::harmonic;  // right branch holds u
  BigFloat u_max = eighth - re_lo + log(m_hi) / c4;
  if (decide(-u_max) > 0 && decide(bw - re_hi) > 0) return ProfileRegion::zero;
  if (m_lo > 0) {
    BigFloat u_min = eighth - re_hi + log(m_lo) / c4;
    if (decide(u_min) > 0) return ProfileRegion::harmonic;  // max(u,0) = u throughout
  }
  return ProfileRegion::kink;
}

}  // namespace

ProfileRegion classify_profile_disc(const Complex& z, const BigFloat& pad,
                                    const BigFloat& a, const BigFloat& b) {
  mpfr_prec_t p = z.prec() > a.prec() ? z.prec() : a.prec();
  // Screening pass at 128 bits settles all but borderline points; the kink
  // fallback is always safe, so only a clear-cut shortcut may skip quadrature.
  bool conclusive = false;
  ProfileRegion quick = classify_at(z, pad, a, b, 128, 64, conclusive);
  if (conclusive) return quick;
  ProfileRegion full = classify_at(z, pad, a, b, p, static_cast<long>(p) - 16, conclusive);
  return conclusive ? full : ProfileRegion::kink;
}

BigFloat smooth_profile(const Complex& z, int n, const ParamTable& t, QuadSpec quad) {
  if (quad.radial < 64 || quad.angular < 64) {
    throw QuadratureError("smooth_profile: quadrature below the 64x64 minimum");
  }
  if (n < 1 || n > t.n_max) throw DomainError("smooth_profile: index out of range");
  mpfr_prec_t p = z.prec() > t.precision_bits ? z.prec() : t.precision_bits;

  if (z.abs2() < sqr(t.r[n])) return BigFloat::zero(p);

  const BigFloat& a = t.a[n];
  const BigFloat& b = t.b[n];
  switch (classify_profile_disc(z, t.eps[n], a, b)) {
    case ProfileRegion::zero:
      return BigFloat::zero(p);
    case ProfileRegion::harmonic:
      // Mean value of a harmonic branch under a radial normalized kernel.
      return u_profile(z, a);
    case ProfileRegion::kink:
      break;
  }
  const PolarQuadrature& rule = PolarQuadrature::get(quad, p);
  return convolve_radial([&](const Complex& w) { return base_profile(w, a, b); }, z,
                         t.eps[n], rule);
}

BigFloat scaled_profile(const Complex& z, int k, const ParamTable& t, QuadSpec quad) {
  if (k < 1 || k > t.n_max) throw DomainError("scaled_profile: index out of range");
  mpfr_prec_t p = z.prec() > t.precision_bits ? z.prec() : t.precision_bits;
  if (z.abs2() < sqr(t.r[k + 1])) return BigFloat::zero(p);
  BigFloat scale = t.a[k] / t.r[k];
  return smooth_profile(Complex(scale * z.re, scale * z.im), k, t, quad);
}

TailInterval profile_series(const Complex& z, const ParamTable& t, QuadSpec quad) {
  mpfr_prec_t p = z.prec() > t.precision_bits ? z.prec() : t.precision_bits;
  BigFloat value = BigFloat::zero(p);
  for (int k = 1; k <= t.n_max; ++k) {
    BigFloat term = scaled_profile(z, k, t, quad);
    if (!term.is_zero()) value += t.delta[k] * term;
  }
  BigFloat stretch = max(BigFloat::one(p), z.abs() / t.r[1]);
  BigFloat tail = mul_2exp(t.delta[t.n_max], -1) * stretch;
  return TailInterval{value, tail};
}

BigFloat kink_radius_on_ray(const Complex& dir, int n, const ParamTable& t) {
  mpfr_prec_t p = t.precision_bits > dir.prec() ? t.precision_bits : dir.prec();
  const BigFloat& a = t.a[n];
  auto u_at = [&](const BigFloat& s) {
    return u_profile(Complex(s * dir.re, s * dir.im), a);
  };
  // u(s dir) >= f(s) for every ray, and f is positive at the critical point,
  // so [2 r_n, 1/(4 log a)] brackets a sign change.
  BigFloat lo = mul_2exp(t.r[n], 1);
  BigFloat hi = 1 / (log(a) * 4);
  if (!(u_at(lo) < 0) || !(u_at(hi) > 0)) {
    throw DomainError("kink_radius_on_ray: bracket lost its sign change");
  }
  for (int i = 0; i < 200; ++i) {
    BigFloat mid = mul_2exp(lo + hi, -1);
    if (u_at(mid) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mul_2exp(lo + hi, -1);
}

}  // namespace kobalab
