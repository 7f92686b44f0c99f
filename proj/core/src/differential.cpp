#include "kobalab/differential.hpp"

#include <algorithm>
#include <thread>

namespace kobalab {

namespace {

// Index-sharded parallel map; the reduction stays with the caller in index
// order so results do not depend on scheduling.
void parallel_for(long count, const std::function<void(long)>& body) {
  unsigned threads = std::min<unsigned>(std::thread::hardware_concurrency(), 8);
  if (threads <= 1 || count < 8) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (long i = t; i < count; i += threads) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

BigFloat point_norm(const PointC& z) {
  BigFloat s = BigFloat::zero(z.empty() ? 64 : z[0].prec());
  for (const Complex& c : z) s += c.abs2();
  return sqrt(s);
}

struct Splitmix {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t v = (state += 0x9e3779b97f4a7c15ULL);
    v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
    v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
    return v ^ (v >> 31);
  }
  // Dyadic uniform in (0,1): exact in any binary float.
  double uniform_pos() {
    std::uint64_t bits = next() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }
};

}  // namespace

std::vector<PointC> GridSpec::samples(mpfr_prec_t prec) const {
  std::vector<PointC> out;
  long dropped = 0;
  auto push = [&](PointC p) {
    if (exclude && exclude(p)) {
      ++dropped;
      return;
    }
    out.push_back(std::move(p));
  };

  switch (kind) {
    case Kind::explicit_points: {
      for (const PointC& p : points) push(p);
      break;
    }
    case Kind::ball_lattice: {
      if (dim < 1 || dim > 3) throw DomainError("GridSpec: dim must be 1..3");
      int axes = 2 * dim;
      if (static_cast<int>(per_axis.size()) != axes) {
        throw DomainError("GridSpec: per-axis count list does not match dimension");
      }
      for (int c : per_axis) {
        if (c < 8) throw DomainError("GridSpec: fewer than 8 samples on an axis");
      }
      std::vector<int> idx(axes, 0);
      BigFloat R = radius;
      BigFloat R2 = sqr(R);
      for (;;) {
        PointC p(dim);
        BigFloat norm2 = BigFloat::zero(prec);
        for (int d = 0; d < dim; ++d) {
          // Cell-centered coordinates in [-R, R).
          BigFloat xre = R * (BigFloat::of(2.0 * (idx[2 * d] + 0.5), prec) /
                                  static_cast<long>(per_axis[2 * d]) -
                              1);
          BigFloat xim = R * (BigFloat::of(2.0 * (idx[2 * d + 1] + 0.5), prec) /
                                  static_cast<long>(per_axis[2 * d + 1]) -
                              1);
          Complex zc(xre, xim);
          if (!center.empty()) zc = zc + center[d];
          norm2 += Complex(xre, xim).abs2();
          p[d] = zc;
        }
        if (norm2 < R2) push(std::move(p));
        int axis = 0;
        while (axis < axes && ++idx[axis] == per_axis[axis]) idx[axis++] = 0;
        if (axis == axes) break;
      }
      break;
    }
    case Kind::polar_annulus: {
      if (dim != 1) throw DomainError("GridSpec: polar annulus is 1-dimensional");
      if (per_axis.size() != 2 || per_axis[0] < 8 || per_axis[1] < 8) {
        throw DomainError("GridSpec: polar annulus needs >= 8 radii and angles");
      }
      if (!(inner_radius > 0) || !(radius > inner_radius)) {
        throw DomainError("GridSpec: bad annulus bounds");
      }
      int nr = per_axis[0], nt = per_axis[1];
      BigFloat log_lo = log(inner_radius);
      BigFloat log_ratio = log(radius / inner_radius);
      BigFloat two_pi = mul_2exp(BigFloat::pi(prec), 1);
      for (int j = 0; j < nr; ++j) {
        BigFloat rj = exp(log_lo + log_ratio * static_cast<long>(j) / static_cast<long>(nr - 1));
        for (int k = 0; k < nt; ++k) {
          BigFloat angle = two_pi * static_cast<long>(k) / static_cast<long>(nt);
          BigFloat sn(prec), cs(prec);
          sin_cos(sn, cs, angle);
          Complex zc(rj * cs, rj * sn);
          if (!center.empty()) zc = zc + center[0];
          push(PointC{zc});
        }
      }
      break;
    }
  }
  if (out.empty()) throw EmptyRegionError("GridSpec: no samples survive exclusion");
  return out;
}

GridSpec GridSpec::ball(int dim, double radius, int per_axis, mpfr_prec_t prec) {
  GridSpec g;
  g.kind = Kind::ball_lattice;
  g.dim = dim;
  g.radius = BigFloat::of(radius, prec);
  g.per_axis.assign(2 * dim, per_axis);
  return g;
}

GridSpec GridSpec::annulus(const BigFloat& inner, const BigFloat& outer, int n_radii,
                           int n_angles) {
  GridSpec g;
  g.kind = Kind::polar_annulus;
  g.dim = 1;
  g.inner_radius = inner;
  g.radius = outer;
  g.per_axis = {n_radii, n_angles};
  return g;
}

GridSpec GridSpec::explicit_set(std::vector<PointC> pts) {
  GridSpec g;
  g.kind = Kind::explicit_points;
  g.dim = pts.empty() ? 1 : static_cast<int>(pts[0].size());
  g.points = std::move(pts);
  return g;
}

namespace {

BigFloat eval_checked(const RealFn1& f, const Complex& z) {
  BigFloat v;
  try {
    v = f(z);
  } catch (const Error& e) {
    throw StencilError(std::string("stencil point rejected: ") + e.what());
  }
  if (v.is_nan() || v.is_inf()) throw StencilError("stencil value not finite");
  return v;
}

}  // namespace

BigFloat laplacian_fd(const RealFn1& f, const Complex& z, const BigFloat& h) {
  if (!(h > 0)) throw DomainError("laplacian_fd: step must be positive");
  BigFloat sum = eval_checked(f, Complex(z.re + h, z.im)) +
                 eval_checked(f, Complex(z.re - h, z.im)) +
                 eval_checked(f, Complex(z.re, z.im + h)) +
                 eval_checked(f, Complex(z.re, z.im - h));
  BigFloat center = eval_checked(f, z);
  return (sum - 4 * center) / sqr(h);
}

BigFloat levi_form_fd(const RealFnN& f, const PointC& z, const PointC& L, const BigFloat& h) {
  if (z.size() != L.size() || z.empty()) throw DomainError("levi_form_fd: dimension mismatch");
  BigFloat n2 = BigFloat::zero(h.prec());
  for (const Complex& c : L) n2 += c.abs2();
  if (abs(n2 - 1) > BigFloat::parse("1e-6", h.prec())) {
    throw DomainError("levi_form_fd: direction is not unit length");
  }
  RealFn1 line = [&](const Complex& tau) {
    PointC q(z.size());
    for (size_t i = 0; i < z.size(); ++i) q[i] = z[i] + tau * L[i];
    return f(q);
  };
  return mul_2exp(laplacian_fd(line, Complex::zero(h.prec()), h), -2);
}

PointC gradient_fd(const RealFnN& f, const PointC& z, const BigFloat& h) {
  if (!(h > 0)) throw DomainError("gradient_fd: step must be positive");
  PointC g(z.size());
  BigFloat two_h = mul_2exp(h, 1);
  for (size_t i = 0; i < z.size(); ++i) {
    PointC q = z;
    q[i] = Complex(z[i].re + h, z[i].im);
    BigFloat re_plus = f(q);
    q[i] = Complex(z[i].re - h, z[i].im);
    BigFloat re_minus = f(q);
    q[i] = Complex(z[i].re, z[i].im + h);
    BigFloat im_plus = f(q);
    q[i] = Complex(z[i].re, z[i].im - h);
    BigFloat im_minus = f(q);
    g[i] = Complex((re_plus - re_minus) / two_h, (im_plus - im_minus) / two_h);
  }
  return g;
}

std::vector<PointC> sphere_directions(int dim, int count, std::uint64_t seed, mpfr_prec_t prec) {
  if (dim < 1 || count < 1) throw DomainError("sphere_directions: bad arguments");
  std::vector<PointC> dirs;
  dirs.reserve(count);
  if (dim == 1) {
    // Roots of unity: exactly uniform on the circle.
    BigFloat two_pi = mul_2exp(BigFloat::pi(prec), 1);
    for (int k = 0; k < count; ++k) {
      BigFloat angle = two_pi * static_cast<long>(k) / static_cast<long>(count);
      BigFloat sn(prec), cs(prec);
      sin_cos(sn, cs, angle);
      dirs.push_back(PointC{Complex(cs, sn)});
    }
    return dirs;
  }
  Splitmix rng{seed};
  BigFloat two_pi = mul_2exp(BigFloat::pi(prec), 1);
  while (static_cast<int>(dirs.size()) < count) {
    PointC v(dim);
    BigFloat norm2 = BigFloat::zero(prec);
    for (int d = 0; d < dim; ++d) {
      // Box-Muller on exact dyadic uniforms, evaluated in BigFloat.
      BigFloat u1 = BigFloat::of(rng.uniform_pos(), prec);
      BigFloat u2 = BigFloat::of(rng.uniform_pos(), prec);
      BigFloat amp = sqrt(mul_2exp(-log(u1), 1));
      BigFloat sn(prec), cs(prec);
      sin_cos(sn, cs, two_pi * u2);
      v[d] = Complex(amp * cs, amp * sn);
      norm2 += v[d].abs2();
    }
    if (!(norm2 > BigFloat::parse("1e-12", prec))) continue;
    BigFloat inv = 1 / sqrt(norm2);
    for (Complex& c : v) c = Complex(inv * c.re, inv * c.im);
    dirs.push_back(std::move(v));
  }
  return dirs;
}

BigFloat StepRule::at(const PointC& z) const {
  if (!scale_by_magnitude) return base;
  return base * max(floor, point_norm(z));
}

LeviReport min_levi_on_region(const RealFnN& f, const GridSpec& grid, int directions,
                              const StepRule& step, std::uint64_t seed, mpfr_prec_t prec) {
  if (directions < 16) throw DomainError("min_levi_on_region: need >= 16 directions per point");
  std::vector<PointC> pts = grid.samples(prec);
  std::vector<PointC> dirs = sphere_directions(grid.dim, directions, seed, prec);

  struct PointResult {
    BigFloat min_value;
    int dir = -1;
    BigFloat step;
  };
  std::vector<PointResult> results(pts.size());

  parallel_for(static_cast<long>(pts.size()), [&](long i) {
    const PointC& z = pts[i];
    BigFloat h = step.at(z);
    BigFloat h2_4 = mul_2exp(sqr(h), 2);
    BigFloat center = f(z);
    PointResult best;
    for (int di = 0; di < static_cast<int>(dirs.size()); ++di) {
      const PointC& L = dirs[di];
      BigFloat sum = BigFloat::zero(prec);
      Complex taus[4] = {Complex(h, BigFloat::zero(prec)), Complex(-h, BigFloat::zero(prec)),
                         Complex(BigFloat::zero(prec), h), Complex(BigFloat::zero(prec), -h)};
      for (const Complex& tau : taus) {
        PointC q(z.size());
        for (size_t c = 0; c < z.size(); ++c) q[c] = z[c] + tau * L[c];
        BigFloat v = f(q);
        if (v.is_nan() || v.is_inf()) throw StencilError("min_levi: non-finite stencil value");
        sum += v;
      }
      BigFloat levi = (sum - 4 * center) / h2_4;
      if (best.dir < 0 || levi < best.min_value) {
        best.min_value = levi;
        best.dir = di;
        best.step = h;
      }
    }
    results[i] = std::move(best);
  });

  LeviReport report;
  report.seed = seed;
  report.samples = static_cast<long>(pts.size()) * directions;
  long best_i = -1;
  for (long i = 0; i < static_cast<long>(results.size()); ++i) {
    if (best_i < 0 || results[i].min_value < results[best_i].min_value) best_i = i;
  }
  report.min_value = results[best_i].min_value;
  report.argmin_point = pts[best_i];
  report.argmin_direction = dirs[results[best_i].dir];
  report.step = results[best_i].step;
  return report;
}

SubharmonicCert certify_subharmonic(const RealFn1& f, const GridSpec& grid,
                                    const StepRule& step, const BigFloat& tol,
                                    mpfr_prec_t prec) {
  if (grid.dim != 1) throw DomainError("certify_subharmonic: grid must be 1-dimensional");
  std::vector<PointC> pts = grid.samples(prec);

  struct PointResult {
    BigFloat value;
    BigFloat step;
  };
  std::vector<PointResult> results(pts.size());
  parallel_for(static_cast<long>(pts.size()), [&](long i) {
    BigFloat h = step.at(pts[i]);
    results[i] = PointResult{laplacian_fd(f, pts[i][0], h), h};
  });

  SubharmonicCert cert;
  cert.tol = tol;
  long best_i = 0;
  for (long i = 1; i < static_cast<long>(results.size()); ++i) {
    if (results[i].value < results[best_i].value) best_i = i;
  }
  cert.report.min_value = results[best_i].value;
  cert.report.argmin_point = pts[best_i];
  cert.report.argmin_direction = PointC{Complex::of(1, 0, prec)};
  cert.report.step = results[best_i].step;
  cert.report.samples = static_cast<long>(pts.size());
  cert.pass = cert.report.min_value >= -tol;
  return cert;
}

BigFloat circle_mean_excess(const RealFn1& f, const Complex& z, const BigFloat& radius,
                            int count) {
  if (count < 3) throw DomainError("circle_mean_excess: need at least 3 points");
  mpfr_prec_t prec = z.prec();
  BigFloat two_pi = mul_2exp(BigFloat::pi(prec), 1);
  BigFloat acc = BigFloat::zero(prec);
  for (int k = 0; k < count; ++k) {
    BigFloat angle = two_pi * static_cast<long>(k) / static_cast<long>(count);
    BigFloat sn(prec), cs(prec);
    sin_cos(sn, cs, angle);
    acc += f(Complex(z.re + radius * cs, z.im + radius * sn));
  }
  return acc / static_cast<long>(count) - f(z);
}

}  // namespace kobalab
