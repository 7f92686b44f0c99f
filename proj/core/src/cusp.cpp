#include "kobalab/cusp.hpp"

#include <algorithm>
#include <cmath>

namespace kobalab {

CuspGeometry CuspGeometry::of(const ParamTable& t, int n) {
  if (n < 1 || n > t.n_max) throw DomainError("CuspGeometry: index out of range");
  CuspGeometry g;
  g.n = n;
  g.r_tilde = t.r_tilde[n];
  g.d = t.d[n];
  g.core_radius = t.r_tilde[n] * 3 / 4L;
  return g;
}

Complex complex_cbrt(const Complex& w, mpfr_prec_t prec) {
  if (w.is_zero()) return Complex::zero(prec);
  // Split w = m * 2^{3k} so the double-precision seed never leaves range.
  long e = w.abs2().exp2() / 2;
  long k = e / 3;
  Complex m(mul_2exp(w.re, -3 * k), mul_2exp(w.im, -3 * k));

  double mre = m.re.to_double(), mim = m.im.to_double();
  double r = std::cbrt(std::hypot(mre, mim));
  double th = std::atan2(mim, mre) / 3.0;
  mpfr_prec_t p = 64;
  Complex c = Complex::of(r * std::cos(th), r * std::sin(th), p);

  // Newton for c^3 = m with precision doubling; each step squares the error.
  while (true) {
    p = std::min<mpfr_prec_t>(2 * p, prec + 32);
    Complex cp(c.re.round_to(p), c.im.round_to(p));
    Complex mp(m.re.round_to(p), m.im.round_to(p));
    Complex c2 = cp * cp;
    c = Complex(mul_2exp(cp.re, 1), mul_2exp(cp.im, 1)) + mp / c2;
    c = Complex(c.re / 3L, c.im / 3L);
    if (p >= prec + 32) break;
  }
  // Two clean-up iterations at full precision.
  for (int i = 0; i < 2; ++i) {
    Complex c2 = c * c;
    c = Complex(mul_2exp(c.re, 1), mul_2exp(c.im, 1)) + m / c2;
    c = Complex(c.re / 3L, c.im / 3L);
  }
  return Complex(mul_2exp(c.re, k).round_to(prec), mul_2exp(c.im, k).round_to(prec));
}

Complex variety_residual(const PointC& z) {
  if (z.size() != 2) throw DomainError("variety_residual: expected a point of C^2");
  const Complex& s = z[0];
  const Complex& t = z[1];
  mpfr_prec_t q = 3 * std::max(s.prec(), t.prec()) + 192;
  Complex sq(s.re.round_to(q), s.im.round_to(q));
  Complex tq(t.re.round_to(q), t.im.round_to(q));
  Complex s2 = sq * sq;
  Complex t3 = (tq * tq) * tq;
  return s2 - t3;
}

Complex cusp_parameter(const PointC& z) {
  Complex g = variety_residual(z);
  const Complex& s = z[0];
  const Complex& t = z[1];
  mpfr_prec_t p = std::max(s.prec(), t.prec());
  BigFloat s2 = s.abs2();
  BigFloat t2 = t.abs2();
  BigFloat scale2 = max(BigFloat::one(p), max(sqr(s2), sqr(t2) * t2));  // max(1,|s|^2,|t|^3)^2
  if (g.abs2() > BigFloat::parse("1e-24", p) * scale2) {
    throw NotOnVarietyError("cusp_parameter: point is not on the curve");
  }
  if (t.is_zero()) return Complex::zero(p);
  return s / t;
}

SheetDistance nearest_sheet_distance(const PointC& z, mpfr_prec_t prec) {
  const Complex& s = z[0];
  const Complex& t = z[1];
  Complex g = variety_residual(z);
  if (g.is_zero()) {
    return SheetDistance{BigFloat::zero(prec), Complex(t.re.round_to(prec), t.im.round_to(prec))};
  }
  Complex w = Complex(s.re.round_to(prec), s.im.round_to(prec));
  Complex c0 = complex_cbrt(w * w, prec);
  // The other branches differ by the primitive cube roots of unity.
  BigFloat half = mul_2exp(BigFloat::one(prec), -1);
  BigFloat root3_2 = mul_2exp(sqrt(BigFloat::of_int(3, prec)), -1);
  Complex omega(-half, root3_2);
  Complex candidates[3] = {c0, c0 * omega, c0 * omega.conj()};

  SheetDistance best{BigFloat(), Complex()};
  for (const Complex& c : candidates) {
    BigFloat d2 = (t - c).abs2();
    if (best.dist2.is_nan() || d2 < best.dist2) {
      best.dist2 = d2;
      best.branch = c;
    }
  }
  return best;
}

PointC project_to_cusp(const PointC& z, const CuspGeometry& geo) {
  if (z.size() != 2) throw DomainError("project_to_cusp: expected a point of C^2");
  mpfr_prec_t p = std::max(z[0].prec(), z[1].prec());
  BigFloat norm2 = z[0].abs2() + z[1].abs2();
  if (norm2 < sqr(geo.core_radius)) {
    throw InsideCoreError("project_to_cusp: inside the core ball, projection degenerates");
  }
  Complex g = variety_residual(z);
  if (g.is_zero()) return z;  // already on the curve, exactly
  SheetDistance sd = nearest_sheet_distance(z, p);
  if (sd.dist2 > sqr(geo.d)) {
    throw OutsideTubeError("project_to_cusp: no sheet within the tube half-width");
  }
  return PointC{z[0], sd.branch};
}

namespace {

// Septic smoothstep: C^3 joins at both plateaus.
BigFloat smoothstep7(const BigFloat& t) {
  BigFloat t2 = sqr(t);
  BigFloat t4 = sqr(t2);
  return t4 * (35 - 84 * t + (70 * t2 - 20 * (t2 * t)));
}

}  // namespace

BigFloat ramp_h(const BigFloat& x) {
  mpfr_prec_t p = x.prec();
  BigFloat lo = BigFloat::of(9.0 / 16.0, p);
  if (x <= lo) return BigFloat::zero(p);
  if (x >= 1) return BigFloat::one(p);
  return smoothstep7((x - lo) / (1 - lo));
}

BigFloat plateau_chi(const BigFloat& x) {
  mpfr_prec_t p = x.prec();
  BigFloat half = mul_2exp(BigFloat::one(p), -1);
  if (x <= half) return BigFloat::one(p);
  if (x >= 1) return BigFloat::zero(p);
  return 1 - smoothstep7(mul_2exp(x - half, 1));
}

BigFloat tube_cutoff(const PointC& z, const CuspGeometry& geo) {
  mpfr_prec_t p = std::max(z[0].prec(), z[1].prec());
  BigFloat x = (z[0].abs2() + z[1].abs2()) / sqr(geo.r_tilde);
  // h vanishes on the core ball, killing the projection dependence there.
  if (x <= BigFloat::of(9.0 / 16.0, p)) return BigFloat::one(p);
  SheetDistance sd = nearest_sheet_distance(z, p);
  BigFloat arg = ramp_h(x) * (sd.dist2 / sqr(geo.d));
  return plateau_chi(arg);
}

BigFloat psh_corrector(const PointC& z) {
  if (z.size() != 2) throw DomainError("psh_corrector: expected a point of C^2");
  mpfr_prec_t p = std::max(z[0].prec(), z[1].prec());
  Complex g = variety_residual(z);
  BigFloat g2 = g.abs2().round_to(p);
  if (g2.is_zero()) return BigFloat::zero(p);
  return exp(z[0].abs2() + z[1].abs2()) * g2;
}

BigFloat cusp_term(const PointC& z, int n, const ParamTable& t, const CuspGeometry& geo,
                   QuadSpec quad) {
  if (z.size() != 2) throw DomainError("cusp_term: expected a point of C^2");
  mpfr_prec_t p = std::max({z[0].prec(), z[1].prec(), t.precision_bits});
  BigFloat norm2 = z[0].abs2() + z[1].abs2();
  if (norm2 < sqr(geo.r_tilde)) return BigFloat::zero(p);  // inner ball

  Complex g = variety_residual(z);
  if (g.is_zero()) {
    // On the curve the cutoff is exactly 1 and the parameter is s/t
    // (t != 0 here: t = 0 on the curve forces z = 0, inside the ball).
    Complex zeta = z[0] / z[1];
    return scaled_profile(zeta, n, t, quad);
  }

  SheetDistance sd = nearest_sheet_distance(z, p);
  // Outside the inner ball h == 1, so the cutoff argument is the plain
  // squared tube coordinate.
  BigFloat chi = plateau_chi(sd.dist2 / sqr(geo.d));
  if (chi.is_zero()) return BigFloat::zero(p);
  Complex zeta = z[0] / sd.branch;
  return scaled_profile(zeta, n, t, quad) * chi;
}

BigFloat corrector_gain(const BigFloat& C, const BigFloat& c) {
  if (!(c > 0)) throw DomainError("corrector_gain: corrector constant must be positive");
  if (C.sign() < 0) throw DomainError("corrector_gain: C must be nonnegative");
  return mul_2exp(C, 1) / c;
}

BigFloat psh_summand_value(const PointC& z, int n, const ParamTable& t,
                           const CuspGeometry& geo, QuadSpec quad) {
  if (t.K[n].is_nan()) throw DomainError("psh_summand_value: gain K_n not yet estimated");
  return cusp_term(z, n, t, geo, quad) + t.K[n] * psh_corrector(z);
}

RealFnN psh_summand_fn(int n, const ParamTable& t, QuadSpec quad) {
  CuspGeometry geo = CuspGeometry::of(t, n);
  return [n, geo, &t, quad](const PointC& z) {
    return psh_summand_value(z, n, t, geo, quad);
  };
}

TailInterval cusp_series(const PointC& z, const ParamTable& t, QuadSpec quad) {
  mpfr_prec_t p = std::max({z[0].prec(), z[1].prec(), t.precision_bits});
  BigFloat q_gain = BigFloat::zero(p);
  BigFloat value = BigFloat::zero(p);
  for (int n = 1; n <= t.n_max; ++n) {
    if (t.K[n].is_nan()) throw DomainError("cusp_series: gains not yet estimated");
    CuspGeometry geo = CuspGeometry::of(t, n);
    BigFloat term = cusp_term(z, n, t, geo, quad);
    if (!term.is_zero()) value += t.delta[n] * term;
    q_gain += t.delta[n] * t.K[n];
  }
  BigFloat q = psh_corrector(z);
  if (!q.is_zero()) value += q_gain * q;

  // Tail certificate along the curve trace; off the curve the same formal
  // bound is reported for the profile part of the truncated sum.
  BigFloat stretch;
  if (q.is_zero()) {
    Complex zeta = z[1].is_zero() ? Complex::zero(p) : z[0] / z[1];
    stretch = max(BigFloat::one(p), zeta.abs() / t.r[1]);
  } else {
    stretch = max(BigFloat::one(p), sqrt(z[0].abs2() + z[1].abs2()) / t.r[1]);
  }
  return TailInterval{value, mul_2exp(t.delta[t.n_max], -1) * stretch};
}

mpfr_prec_t tube_precision(const CuspGeometry& geo, mpfr_prec_t base) {
  long scale_gap = 12 - geo.d.exp2();  // ~ log2(ambient 4 / step 1e-3 d)
  mpfr_prec_t need = static_cast<mpfr_prec_t>(2 * scale_gap + 192);
  return std::max(base, need);
}

std::vector<PointC> tube_shell_samples(const ParamTable& t, const CuspGeometry& geo,
                                       const TubeGrid& grid, mpfr_prec_t prec, long& excluded) {
  excluded = 0;
  std::vector<PointC> out;
  BigFloat zeta_lo = sqrt(geo.r_tilde * BigFloat::of(1.2, prec));
  BigFloat zeta_hi = BigFloat::of(1.15, prec);
  BigFloat log_lo = log(zeta_lo);
  BigFloat log_ratio = log(zeta_hi / zeta_lo);
  BigFloat two_pi = mul_2exp(BigFloat::pi(prec), 1);
  BigFloat four = BigFloat::of_int(4, prec);
  BigFloat d2 = sqr(geo.d);
  BigFloat d2_half = mul_2exp(d2, -1);
  BigFloat profile_scale = t.a[geo.n] / t.r[geo.n];
  BigFloat pad = t.eps[geo.n] * 4;

  for (int i = 0; i < grid.zeta_radii; ++i) {
    BigFloat radius =
        exp(log_lo + log_ratio * static_cast<long>(i) / static_cast<long>(grid.zeta_radii - 1));
    for (int j = 0; j < grid.zeta_angles; ++j) {
      BigFloat sn(prec), cs(prec);
      sin_cos(sn, cs, two_pi * static_cast<long>(j) / static_cast<long>(grid.zeta_angles));
      Complex zeta(radius * cs, radius * sn);
      Complex zeta2 = zeta * zeta;
      Complex base_s = zeta2 * zeta;
      Complex base_t = zeta2;

      for (int l = 0; l < grid.shells; ++l) {
        // |eta|^2 spread evenly across (d^2/2, d^2).
        BigFloat frac = mul_2exp(BigFloat::one(prec), -1) *
                        (1 + (BigFloat::of(l + 0.5, prec) / static_cast<long>(grid.shells)));
        BigFloat eta_mag = geo.d * sqrt(frac);
        for (int m = 0; m < grid.phases; ++m) {
          BigFloat psn(prec), pcs(prec);
          sin_cos(psn, pcs, two_pi * static_cast<long>(m) / static_cast<long>(grid.phases));
          // Offset the t-coordinate only: the tube coordinate |z - pi(z)|
          // measures exactly this displacement, so the shell levels land
          // where intended for every curve scale.
          Complex eta(eta_mag * pcs, eta_mag * psn);
          PointC z{base_s, base_t + eta};

          BigFloat norm2 = z[0].abs2() + z[1].abs2();
          if (!(norm2 < four) || !(norm2 > sqr(geo.r_tilde * BigFloat::of(1.05, prec)))) continue;
          SheetDistance sd = nearest_sheet_distance(z, prec);
          if (sd.dist2 < d2_half || sd.dist2 > d2) continue;
          // Skip samples whose profile argument could meet the mollification
          // band: the escalated-precision sweep must never pay quadrature.
          Complex w = profile_scale * (z[0] / sd.branch);
          if (classify_profile_disc(w, pad, t.a[geo.n], t.b[geo.n]) == ProfileRegion::kink) {
            ++excluded;
            continue;
          }
          out.push_back(std::move(z));
        }
      }
    }
  }
  return out;
}

LeviConstants estimate_levi_constants(int n, const ParamTable& t, const CuspGeometry& geo,
                                      const TubeGrid& grid, int directions,
                                      std::uint64_t seed, QuadSpec quad) {
  mpfr_prec_t prec = tube_precision(geo, t.precision_bits);
  LeviConstants out;
  out.prec_bits = prec;
  out.step = (geo.d * BigFloat::parse("1e-3", prec)).round_to(prec);

  std::vector<PointC> samples = tube_shell_samples(t, geo, grid, prec, out.excluded);
  out.points = static_cast<long>(samples.size());
  GridSpec region = GridSpec::explicit_set(std::move(samples));
  region.dim = 2;
  StepRule step = StepRule::fixed(out.step);

  RealFnN q_fn = [](const PointC& z) { return psh_corrector(z); };
  out.q_report = min_levi_on_region(q_fn, region, directions, step, seed, prec);
  if (!(out.q_report.min_value > 0)) {
    throw NonPositiveCorrectorError(
        "estimate_levi_constants: corrector minimum not positive on the shell (n=" +
        std::to_string(n) + "); tube half-width too large");
  }
  out.c = mul_2exp(out.q_report.min_value, -1).round_to(t.precision_bits);

  RealFnN p_fn = [&t, &geo, n, quad](const PointC& z) {
    return cusp_term(z, n, t, geo, quad);
  };
  out.p_report = min_levi_on_region(p_fn, region, directions, step, seed, prec);
  BigFloat neg = -out.p_report.min_value;
  out.C = neg.sign() > 0 ? mul_2exp(neg, 1).round_to(t.precision_bits)
                         : BigFloat::zero(t.precision_bits);
  return out;
}

std::vector<CuspConstantsReport> fill_levi_constants(ParamTable& t, const TubeGrid& grid,
                                                     int directions, std::uint64_t seed,
                                                     QuadSpec quad) {
  std::vector<CuspConstantsReport> reports;
  for (int n = 1; n <= t.n_max; ++n) {
    CuspGeometry geo = CuspGeometry::of(t, n);
    CuspConstantsReport rep;
    rep.n = n;
    rep.coarse = estimate_levi_constants(n, t, geo, grid, directions, seed, quad);
    rep.fine = estimate_levi_constants(n, t, geo, grid.doubled(), directions, seed, quad);
    auto rel_change = [&](const BigFloat& a, const BigFloat& b) {
      BigFloat scale = max(abs(a), abs(b));
      if (scale.is_zero()) return BigFloat::zero(t.precision_bits);
      return (abs(a - b) / scale).round_to(t.precision_bits);
    };
    rep.stability_C = rel_change(rep.coarse.C, rep.fine.C);
    rep.stability_c = rel_change(rep.coarse.c, rep.fine.c);
    rep.K = corrector_gain(rep.fine.C, rep.fine.c);
    t.C[n] = rep.fine.C;
    t.c[n] = rep.fine.c;
    t.K[n] = rep.K;
    reports.push_back(std::move(rep));
  }
  return reports;
}

BigFloat sheet_separation_ratio(const ParamTable& t, const CuspGeometry& geo, int samples) {
  mpfr_prec_t p = t.precision_bits;
  BigFloat two_pi = mul_2exp(BigFloat::pi(p), 1);
  BigFloat lo = geo.core_radius;
  BigFloat hi = BigFloat::of(2.0, p);
  BigFloat log_ratio = log(hi / lo);
  BigFloat best_ratio(p);

  auto sheet2 = [&](const BigFloat& sigma, const BigFloat& phi) {
    BigFloat sn(p), cs(p);
    sin_cos(sn, cs, phi);
    Complex tt(sigma * cs, sigma * sn);
    BigFloat s_mag = sqrt(pow_si(sigma, 3));
    BigFloat sn3(p), cs3(p);
    sin_cos(sn3, cs3, phi * 3 / 2L);
    return PointC{Complex(s_mag * cs3, s_mag * sn3), tt};
  };

  for (int i = 0; i < samples; ++i) {
    BigFloat rho = lo * exp(log_ratio * static_cast<long>(i) / static_cast<long>(samples));
    BigFloat theta = two_pi * BigFloat::of(0.61803398875 * i, p);
    // Point on the opposite-phase sheet.
    BigFloat sn(p), cs(p);
    sin_cos(sn, cs, theta);
    Complex t1(rho * cs, rho * sn);
    BigFloat s_mag = sqrt(pow_si(rho, 3));
    BigFloat ang = theta * 3 / 2L + BigFloat::pi(p);
    BigFloat sn3(p), cs3(p);
    sin_cos(sn3, cs3, ang);
    Complex s1(s_mag * cs3, s_mag * sn3);

    // Nested grid refinement of the squared distance to the other sheet.
    // Three angular windows: the basin at matching curve angle plus the two
    // rotations where the s-components align and only the t-gap remains.
    BigFloat best(p);
    BigFloat third = two_pi / 3L;
    for (int win = -1; win <= 1; ++win) {
      BigFloat center = theta + third * static_cast<long>(win);
      BigFloat sig_lo = mul_2exp(rho, -1), sig_hi = rho + mul_2exp(rho, -1);
      BigFloat phi_lo = center - 1, phi_hi = center + 1;
      for (int stage = 0; stage < 3; ++stage) {
        BigFloat best_sig(p), best_phi(p);
        BigFloat local(p);
        for (int a = 0; a <= 8; ++a) {
          BigFloat sigma = sig_lo + (sig_hi - sig_lo) * static_cast<long>(a) / 8L;
          for (int b = 0; b <= 8; ++b) {
            BigFloat phi = phi_lo + (phi_hi - phi_lo) * static_cast<long>(b) / 8L;
            PointC v2 = sheet2(sigma, phi);
            BigFloat dist2 = (v2[0] - s1).abs2() + (v2[1] - t1).abs2();
            if (local.is_nan() || dist2 < local) {
              local = dist2;
              best_sig = sigma;
              best_phi = phi;
            }
          }
        }
        BigFloat sig_step = (sig_hi - sig_lo) / 8L;
        BigFloat phi_step = (phi_hi - phi_lo) / 8L;
        sig_lo = max(mul_2exp(rho, -2), best_sig - sig_step);
        sig_hi = best_sig + sig_step;
        phi_lo = best_phi - phi_step;
        phi_hi = best_phi + phi_step;
        if (best.is_nan() || local < best) best = local;
      }
    }
    BigFloat ratio = sqrt(best) / mul_2exp(geo.d, 1);
    if (best_ratio.is_nan() || ratio < best_ratio) best_ratio = ratio;
  }
  return best_ratio;
}

}  // namespace kobalab
