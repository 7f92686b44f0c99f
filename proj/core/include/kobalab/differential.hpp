#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "kobalab/bigfloat.hpp"

namespace kobalab {

using PointC = std::vector<Complex>;                     // point in C^d
using RealFn1 = std::function<BigFloat(const Complex&)>;  // scalar field on C
using RealFnN = std::function<BigFloat(const PointC&)>;   // scalar field on C^d

/// Sample region for derivative sweeps. Three flavors:
///  - ball_lattice: cell-centered lattice on the bounding box of a ball in
///    C^dim, clipped to the ball (counts per real axis, >= 8 each);
///  - polar_annulus (dim 1): log-spaced radii x uniform angles, reaching
///    across many magnitude scales;
///  - explicit_points: caller-provided samples.
/// The optional exclusion predicate drops points (e.g. too close to a
/// variety for the step size in use); it must leave the region nonempty.
struct GridSpec {
  enum class Kind { ball_lattice, polar_annulus, explicit_points };
  Kind kind = Kind::ball_lattice;
  int dim = 1;
  PointC center;
  BigFloat radius;
  BigFloat inner_radius;  // polar_annulus only
  std::vector<int> per_axis;
  std::function<bool(const PointC&)> exclude;
  std::vector<PointC> points;  // explicit_points only

  /// Materializes the samples; throws EmptyRegionError if exclusion
  /// removed everything and DomainError on malformed specs.
  std::vector<PointC> samples(mpfr_prec_t prec) const;

  static GridSpec ball(int dim, double radius, int per_axis, mpfr_prec_t prec);
  static GridSpec annulus(const BigFloat& inner, const BigFloat& outer, int n_radii,
                          int n_angles);
  static GridSpec explicit_set(std::vector<PointC> pts);
};

/// Minimum of a sampled quadratic form with its witness.
struct LeviReport {
  BigFloat min_value;
  PointC argmin_point;
  PointC argmin_direction;
  BigFloat step;      // step used at the argmin
  long samples = 0;   // (point, direction) pairs evaluated
  long excluded = 0;  // points dropped by the exclusion predicate
  std::uint64_t seed = 0;
};

/// Five-point Laplacian: (f(z+h)+f(z-h)+f(z+ih)+f(z-ih)-4f(z))/h^2.
/// Second order for C^4 integrands. Throws StencilError when f fails or
/// returns a non-finite value at a stencil point.
BigFloat laplacian_fd(const RealFn1& f, const Complex& z, const BigFloat& h);

/// Complex-Hessian form along L via the line restriction: one quarter of the
/// Laplacian of tau -> f(z + tau L) at tau = 0. Requires |L| = 1 up to 1e-6.
BigFloat levi_form_fd(const RealFnN& f, const PointC& z, const PointC& L, const BigFloat& h);

/// Central-difference gradient with respect to the 2*dim real coordinates;
/// component j holds (d/dRe z_j) + i (d/dIm z_j).
PointC gradient_fd(const RealFnN& f, const PointC& z, const BigFloat& h);

/// Deterministic uniform directions on the unit sphere of C^dim. The
/// Box-Muller transform runs in BigFloat from splitmix64 dyadic uniforms, so
/// results are identical across platforms for a fixed seed.
std::vector<PointC> sphere_directions(int dim, int count, std::uint64_t seed, mpfr_prec_t prec);

/// Per-point finite-difference step. Either a fixed value or a rule
/// proportional to the local geometric scale max(floor, |z|).
struct StepRule {
  BigFloat base;
  bool scale_by_magnitude = false;
  BigFloat floor;  // used when scale_by_magnitude

  BigFloat at(const PointC& z) const;
  static StepRule fixed(BigFloat h) { return StepRule{std::move(h), false, BigFloat()}; }
  static StepRule scaled(BigFloat rel, BigFloat floor_scale) {
    return StepRule{std::move(rel), true, std::move(floor_scale)};
  }
};

/// Minimum sampled Levi form over grid x directions (>= 16 per point).
/// Deterministic for a fixed seed; sweeps run in parallel but reduce in
/// index order, so reports are reproducible bit for bit.
LeviReport min_levi_on_region(const RealFnN& f, const GridSpec& grid, int directions,
                              const StepRule& step, std::uint64_t seed, mpfr_prec_t prec);

struct SubharmonicCert {
  bool pass = false;
  BigFloat tol;
  LeviReport report;  // min five-point Laplacian with witness
};

/// Pass iff the minimum sampled Laplacian stays above -tol.
SubharmonicCert certify_subharmonic(const RealFn1& f, const GridSpec& grid,
                                    const StepRule& step, const BigFloat& tol,
                                    mpfr_prec_t prec);

/// Average of f over `count` circle points minus the center value
/// (sub-mean-value probe for profiles that are merely continuous).
BigFloat circle_mean_excess(const RealFn1& f, const Complex& z, const BigFloat& radius,
                            int count);

}  // namespace kobalab
