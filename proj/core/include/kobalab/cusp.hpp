#pragma once

#include <cstdint>

#include "kobalab/differential.hpp"
#include "kobalab/profile.hpp"

namespace kobalab {

/// Geometry of the n-th tube around the cusp curve {s^2 = t^3}.
struct CuspGeometry {
  int n = 0;
  BigFloat r_tilde;      // inner-ball radius r_{n+1}^3
  BigFloat d;            // tube half-width
  BigFloat core_radius;  // 3 r_tilde / 4, where the sheet projection degenerates

  static CuspGeometry of(const ParamTable& t, int n);
};

/// Principal cube root of a complex number by Newton iteration with
/// precision doubling; exponents are pre-split so magnitudes like 1e-1000
/// never meet double range. cbrt(0) = 0.
Complex complex_cbrt(const Complex& w, mpfr_prec_t prec);

/// s^2 - t^3 with both powers computed exactly before the one rounded
/// subtraction (3x precision + headroom). Points constructed on the curve
/// from a short-mantissa parameter yield an exact zero, which downstream
/// code uses as the on-curve test; near the curve the cancellation costs
/// no relative accuracy.
Complex variety_residual(const PointC& z);

/// Parameter of a point on the curve: (zeta^3, zeta^2) -> zeta = s/t, 0 at
/// the origin. Throws NotOnVarietyError unless
/// |s^2 - t^3| <= 1e-12 max(|s|^2, |t|^3, 1).
Complex cusp_parameter(const PointC& z);

/// Squared distance to the nearest sheet: min over the three branches c of
/// (s^2)^(1/3) of |t - c|^2, together with the minimizing branch value.
/// Exactly zero (with c = t) when the residual vanishes.
struct SheetDistance {
  BigFloat dist2;
  Complex branch;  // nearest cube root of s^2
};
SheetDistance nearest_sheet_distance(const PointC& z, mpfr_prec_t prec);

/// Sheet projection: fix s, move t to the nearest branch of (s^2)^(1/3).
/// Fixed points of the curve project to themselves exactly. Throws
/// InsideCoreError for |z| < 3 r_tilde/4 and OutsideTubeError when every
/// sheet is at least the tube half-width away.
PointC project_to_cusp(const PointC& z, const CuspGeometry& geo);

/// Plateau splines (C^3 septic transitions, exact plateau values):
/// ramp_h: 0 on [0, 9/16], 1 on [1, inf).
/// plateau_chi: 1 on [0, 1/2], 0 on [1, inf).
BigFloat ramp_h(const BigFloat& x);
BigFloat plateau_chi(const BigFloat& x);

/// The tube cutoff chi_n(z) = chi( h(|z|^2/r_tilde^2) |z - pi(z)|^2 / d^2 ).
/// Exactly 1 on the core ball and on the curve; exactly 0 once the
/// composite argument reaches 1.
BigFloat tube_cutoff(const PointC& z, const CuspGeometry& geo);

/// Strictly-plurisubharmonic corrector q(z) = e^{|z|^2} |s^2 - t^3|^2.
BigFloat psh_corrector(const PointC& z);

/// The extended profile term p_n: 0 on the inner ball, the projected
/// profile times the cutoff inside the tube, 0 beyond it.
BigFloat cusp_term(const PointC& z, int n, const ParamTable& t, const CuspGeometry& geo,
                   QuadSpec quad);

/// Corrector gain K = 2 C / c (safety factor 2), so -C + K c >= C >= 0.
BigFloat corrector_gain(const BigFloat& C, const BigFloat& c);

/// Summand p_n + K_n q; requires K_n in the table.
BigFloat psh_summand_value(const PointC& z, int n, const ParamTable& t,
                           const CuspGeometry& geo, QuadSpec quad);
RealFnN psh_summand_fn(int n, const ParamTable& t, QuadSpec quad);

/// Weighted series over all summands with the tail certificate carried on
/// the curve trace (where the containment inequality lives).
TailInterval cusp_series(const PointC& z, const ParamTable& t, QuadSpec quad);

/// Sample grid over the shell A_n = {d^2/2 <= |z - pi(z)|^2 <= d^2} inside
/// B(0,2): log-spaced curve parameters x angles x shell levels x normal
/// phases. Samples whose profile argument would meet the mollification band
/// are excluded (padded classification), so shell sweeps never pay for
/// quadrature at escalated precision.
struct TubeGrid {
  int zeta_radii = 8;
  int zeta_angles = 8;
  int shells = 2;
  int phases = 4;

  TubeGrid doubled() const { return TubeGrid{2 * zeta_radii, 2 * zeta_angles, shells, phases}; }
};
std::vector<PointC> tube_shell_samples(const ParamTable& t, const CuspGeometry& geo,
                                       const TubeGrid& grid, mpfr_prec_t prec, long& excluded);

/// Working precision for shell sweeps: the finite-difference step is
/// 1e-3 d_n below the O(1) ambient scale, so representation and second
/// differences both need ~2 log2(scale/h) bits of headroom.
mpfr_prec_t tube_precision(const CuspGeometry& geo, mpfr_prec_t base);

struct LeviConstants {
  BigFloat C;  // max(0, -min sampled Levi of p_n) * 2
  BigFloat c;  // (min sampled Levi of q) / 2
  LeviReport p_report;
  LeviReport q_report;
  long points = 0;
  long excluded = 0;
  mpfr_prec_t prec_bits = 0;
  BigFloat step;
};

/// Shell sweep for the two constants. Throws NonPositiveCorrectorError when
/// the corrector's sampled minimum fails to be positive.
LeviConstants estimate_levi_constants(int n, const ParamTable& t, const CuspGeometry& geo,
                                      const TubeGrid& grid, int directions,
                                      std::uint64_t seed, QuadSpec quad);

struct CuspConstantsReport {
  int n = 0;
  LeviConstants coarse;
  LeviConstants fine;
  BigFloat K;
  BigFloat stability_C;  // relative change coarse -> fine
  BigFloat stability_c;
};

/// Runs the coarse and doubled sweeps for every n, stores the finer C, c, K
/// into the table, and returns the per-n evidence.
std::vector<CuspConstantsReport> fill_levi_constants(ParamTable& t, const TubeGrid& grid,
                                                     int directions, std::uint64_t seed,
                                                     QuadSpec quad);

/// Minimum distance from sampled points of one sheet to the other, in units
/// of the tube diameter 2 d_n (must stay above 1 for the tubes to be
/// honestly disjoint).
BigFloat sheet_separation_ratio(const ParamTable& t, const CuspGeometry& geo, int samples);

}  // namespace kobalab
