#pragma once

#include <functional>
#include <vector>

#include "kobalab/bigfloat.hpp"
#include "kobalab/params.hpp"

namespace kobalab {

/// Truncated series value with a certified bound on the omitted tail.
/// tail_hi bounds the tail's absolute value, so the full series lies in
/// [value - tail_hi, value + tail_hi]; certifications consume the upper end.
struct TailInterval {
  BigFloat value;
  BigFloat tail_hi;

  BigFloat upper() const { return value + tail_hi; }
};

/// Quadrature resolution for the mollification integral (radial x angular).
struct QuadSpec {
  int radial = 64;
  int angular = 64;

  bool operator==(const QuadSpec&) const = default;
};

/// Radial C-infinity bump: exp(-1/(1-x^2)) on [0,1), exactly 0 for x >= 1.
BigFloat kernel_profile(const BigFloat& radius);

/// Tensor rule over the unit disc: Gauss-Legendre radially, trapezoid in the
/// angle, with the kernel folded into self-normalized weights (constants are
/// reproduced exactly up to rounding). Rules are cached per (spec, precision).
class PolarQuadrature {
 public:
  static const PolarQuadrature& get(QuadSpec spec, mpfr_prec_t prec);

  QuadSpec spec;
  mpfr_prec_t prec;
  std::vector<BigFloat> rho;       // radial nodes in (0,1)
  std::vector<BigFloat> weight;    // normalized: kernel * gl * rho / (M * S)
  std::vector<Complex> direction;  // unit vectors e^{i theta_k}
  BigFloat kernel_mass;            // quadrature value of the plane integral m

 private:
  PolarQuadrature(QuadSpec s, mpfr_prec_t p);
};

/// Normalized convolution of f against the kernel scaled to `eps`:
/// integral of f(center - eps w) d mu(w) over the unit disc.
BigFloat convolve_radial(const std::function<BigFloat(const Complex&)>& f,
                         const Complex& center, const BigFloat& eps,
                         const PolarQuadrature& quad);

/// u(z) = 1/8 - Re z + log|z| / (4 log a); -inf at z = 0.
BigFloat u_profile(const Complex& z, const BigFloat& a);

/// The piecewise profile: max(u, 0) for Re z <= b, u otherwise.
/// Exactly 0 wherever u < 0 and Re z <= b, with no tolerance involved.
BigFloat base_profile(const Complex& z, const BigFloat& a, const BigFloat& b);

/// Certified classification of the closed disc D(z, pad) against the
/// piecewise structure of the profile.
enum class ProfileRegion {
  zero,      // profile vanishes identically on the disc
  harmonic,  // profile equals u (harmonic, origin-free) on the disc
  kink,      // disc may meet the switching set: integrate
};
ProfileRegion classify_profile_disc(const Complex& z, const BigFloat& pad,
                                    const BigFloat& a, const BigFloat& b);

/// Mollified profile. Exact 0 for |z| < r_n; the mean-value identity
/// collapses the integral wherever the disc stays inside one smooth branch,
/// and only kink-adjacent points pay for quadrature.
/// Throws QuadratureError if spec is below 64 x 64.
BigFloat smooth_profile(const Complex& z, int n, const ParamTable& t, QuadSpec quad);

/// Rescaled term: smooth_profile evaluated at a_k z / r_k.
/// Exact 0 for |z| < r_{k+1}.
BigFloat scaled_profile(const Complex& z, int k, const ParamTable& t, QuadSpec quad);

/// Weighted series truncated at n_max, with tail bound
/// (delta_{n_max}/2) * max(1, |z|/r_1).
TailInterval profile_series(const Complex& z, const ParamTable& t, QuadSpec quad);

/// Radius along the ray `dir` (unit) at which u crosses zero, bisected inside
/// [2 r_n, 1/(4 log a_n)] where the sign change is guaranteed. This locates
/// the switching curve so samplers can target the mollification band.
BigFloat kink_radius_on_ray(const Complex& dir, int n, const ParamTable& t);

}  // namespace kobalab
