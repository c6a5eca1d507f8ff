#pragma once

// Kinetic geometry: Galilean shifts, kinetic cylinders, the anisotropic
// velocity rescaling around a large base velocity, and the two kinetic
// distances built on them.

#include <cmath>
#include <limits>

#include "landau/errors.hpp"
#include "landau/grid.hpp"

namespace landau {

template <int D>
struct KineticPoint {
  double t = 0.0;
  Vec<D> x = Vec<D>::Zero();
  Vec<D> v = Vec<D>::Zero();

  static KineticPoint origin() { return {}; }
};

/// S_{z0}(t, x, v) = (t0 + t, x0 + x + t v0, v0 + v)
template <int D>
KineticPoint<D> galilean_shift(const KineticPoint<D>& z0, const KineticPoint<D>& z) {
  return {z0.t + z.t, z0.x + z.x + z.t * z0.v, z0.v + z.v};
}

template <int D>
KineticPoint<D> galilean_shift_inverse(const KineticPoint<D>& z0, const KineticPoint<D>& z) {
  const double dt = z.t - z0.t;
  return {dt, z.x - z0.x - dt * z0.v, z.v - z0.v};
}

/// Q_r(z0) = (t0 - r^2, t0] x {|x - x0 - (t - t0) v0| < r^3} x B_r(v0)
template <int D>
struct KineticCylinder {
  KineticPoint<D> center;
  double radius = 1.0;
};

template <int D>
bool cylinder_contains(const KineticCylinder<D>& q, const KineticPoint<D>& z) {
  const auto& c = q.center;
  const double r = q.radius;
  const double dt = z.t - c.t;
  if (!(dt <= 0.0 && dt > -r * r)) return false;
  if (!((z.x - c.x - dt * c.v).norm() < r * r * r)) return false;
  return (z.v - c.v).norm() < r;
}

/// Linear map scaling directions orthogonal to v0 by |v0|^{1+gamma/2} and the
/// direction of v0 by |v0|^{gamma/2}. Identity when constructed for |v0| < 2.
template <int D>
class AnisotropicTransform {
 public:
  static AnisotropicTransform identity(const Vec<D>& v0, double gamma) {
    AnisotropicTransform t;
    t.base_ = v0;
    t.gamma_ = gamma;
    t.par_ = t.perp_ = 1.0;
    t.axis_ = v0.norm() > 0.0 ? Vec<D>(v0.normalized()) : Vec<D>::Unit(0);
    return t;
  }

  AnisotropicTransform(const Vec<D>& v0, double gamma) : base_(v0), gamma_(gamma) {
    const double s = v0.norm();
    if (!(s >= 2.0))
      throw PreconditionError("anisotropic transform needs |v0| >= 2, got " + std::to_string(s));
    if (!(gamma > -2.0 && gamma <= 0.0))
      throw PreconditionError("anisotropic transform needs gamma in (-2, 0]");
    axis_ = v0 / s;
    par_ = std::pow(s, gamma / 2.0);
    perp_ = std::pow(s, 1.0 + gamma / 2.0);
  }

  const Vec<D>& base_velocity() const { return base_; }
  double gamma() const { return gamma_; }
  double parallel_factor() const { return par_; }
  double perpendicular_factor() const { return perp_; }
  bool is_identity() const { return par_ == 1.0 && perp_ == 1.0; }

  Mat<D> matrix() const { return scaled(par_, perp_); }
  Mat<D> inverse_matrix() const { return scaled(1.0 / par_, 1.0 / perp_); }
  double determinant() const { return par_ * std::pow(perp_, D - 1); }

  Vec<D> apply(const Vec<D>& w) const {
    const double along = axis_.dot(w);
    return perp_ * w + (par_ - perp_) * along * axis_;
  }
  Vec<D> apply_inverse(const Vec<D>& w) const {
    const double along = axis_.dot(w);
    return w / perp_ + (1.0 / par_ - 1.0 / perp_) * along * axis_;
  }

 private:
  AnisotropicTransform() = default;

  Mat<D> scaled(double par, double perp) const {
    const Mat<D> proj = axis_ * axis_.transpose();
    return par * proj + perp * (Mat<D>::Identity() - proj);
  }

  Vec<D> base_ = Vec<D>::Zero();
  Vec<D> axis_ = Vec<D>::Unit(0);
  double gamma_ = 0.0;
  double par_ = 1.0;
  double perp_ = 1.0;
};

template <int D>
AnisotropicTransform<D> build_transform(const Vec<D>& v0, double gamma) {
  return AnisotropicTransform<D>(v0, gamma);
}

/// Transform attached to base velocity v0, falling back to the identity below
/// |v0| = 2 as the kinetic distance convention requires.
template <int D>
AnisotropicTransform<D> transform_or_identity(const Vec<D>& v0, double gamma) {
  if (v0.norm() < 2.0) return AnisotropicTransform<D>::identity(v0, gamma);
  return AnisotropicTransform<D>(v0, gamma);
}

/// (t0 + t, x0 + T x + t v0, v0 + T v)
template <int D>
KineticPoint<D> kinetic_transform(const KineticPoint<D>& z0, const KineticPoint<D>& z, double gamma) {
  const auto tr = transform_or_identity<D>(z0.v, gamma);
  return {z0.t + z.t, z0.x + tr.apply(z.x) + z.t * z0.v, z0.v + tr.apply(z.v)};
}

template <int D>
KineticPoint<D> kinetic_transform_inverse(const KineticPoint<D>& z0, const KineticPoint<D>& z,
                                          double gamma) {
  const auto tr = transform_or_identity<D>(z0.v, gamma);
  const double t = z.t - z0.t;
  return {t, tr.apply_inverse(z.x - z0.x - t * z0.v), tr.apply_inverse(z.v - z0.v)};
}

/// Closed-form kinetic distance
///   |t1-t2|^{1/2} + |x1 - x2 - (t1-t2)(v1+v2)/2|^{1/3} + |v1-v2|.
template <int D>
double metric_dP(const KineticPoint<D>& z1, const KineticPoint<D>& z2) {
  const double dt = z1.t - z2.t;
  const Vec<D> drift = z1.x - z2.x - dt * 0.5 * (z1.v + z2.v);
  return std::sqrt(std::abs(dt)) + std::cbrt(drift.norm()) + (z1.v - z2.v).norm();
}

/// Gauge factor times d_P of the two points pulled back through the transform
/// at base velocity vbar. Base time and position drop out: the closed-form d_P
/// is invariant under Galilean shifts, so only vbar matters.
template <int D>
double deformed_distance(const KineticPoint<D>& z1, const KineticPoint<D>& z2, const Vec<D>& vbar,
                         double gamma) {
  const double speed = vbar.norm();
  if (speed < 2.0) return metric_dP(z1, z2);
  const AnisotropicTransform<D> tr(vbar, gamma);
  const double dt = z1.t - z2.t;
  const Vec<D> drift = tr.apply_inverse(z1.x - z2.x - dt * 0.5 * (z1.v + z2.v));
  const Vec<D> dv = tr.apply_inverse(z1.v - z2.v);
  const double gauge = std::pow(speed, 1.0 + gamma / 2.0);
  return gauge * (std::sqrt(std::abs(dt)) + std::cbrt(drift.norm()) + dv.norm());
}

struct MetricSearchOptions {
  int lattice_half_points = 10;
  double relative_tolerance = 1e-6;
  int max_refinements = 20000;
};

template <int D>
struct MetricResult {
  double value = 0.0;
  Vec<D> base_velocity = Vec<D>::Zero();
  int evaluations = 0;
};

/// d_L by minimisation over base velocities in the ball of radius
/// 2|v1 - v2| + 1 around (v1 + v2)/2: lattice scan, then compass search.
template <int D>
MetricResult<D> metric_dL_search(const KineticPoint<D>& z1, const KineticPoint<D>& z2, double gamma,
                                 const MetricSearchOptions& opt = {}) {
  MetricResult<D> res;
  const Vec<D> mid = 0.5 * (z1.v + z2.v);
  const double radius = 2.0 * (z1.v - z2.v).norm() + 1.0;
  auto eval = [&](const Vec<D>& vb) {
    ++res.evaluations;
    return deformed_distance(z1, z2, vb, gamma);
  };

  // Any admissible base below |v| = 2 gives exactly d_P, and no base above it
  // can do better (the gauge dominates T^{-1} in every direction).
  if (mid.norm() - radius < 2.0) {
    res.value = metric_dP(z1, z2);
    res.base_velocity = mid.norm() < 2.0 ? mid : Vec<D>(mid * ((mid.norm() - radius) / mid.norm()));
    return res;
  }

  const int n = D == 2 ? opt.lattice_half_points : std::max(3, opt.lattice_half_points / 2);
  const double step = radius / n;
  double best = std::numeric_limits<double>::infinity();
  Vec<D> best_v = mid;
  Index<D> idx;
  idx.fill(-n);
  while (true) {
    Vec<D> vb = mid;
    for (int k = 0; k < D; ++k) vb[k] += idx[k] * step;
    if ((vb - mid).norm() <= radius) {
      const double val = eval(vb);
      if (val < best) {
        best = val;
        best_v = vb;
      }
    }
    int k = D - 1;
    while (k >= 0 && ++idx[k] > n) idx[k--] = -n;
    if (k < 0) break;
  }

  double h = step;
  const double scale = std::max(best, std::numeric_limits<double>::min());
  int iters = 0;
  while (h > opt.relative_tolerance * 1e-3 * radius) {
    bool improved = false;
    for (int k = 0; k < D && !improved; ++k) {
      for (double sgn : {1.0, -1.0}) {
        Vec<D> vb = best_v;
        vb[k] += sgn * h;
        if ((vb - mid).norm() > radius) continue;
        const double val = eval(vb);
        if (val < best - opt.relative_tolerance * 1e-3 * scale) {
          best = val;
          best_v = vb;
          improved = true;
          break;
        }
      }
    }
    if (!improved) h *= 0.5;
    if (++iters > opt.max_refinements) throw ConvergenceError("d_L base-point search did not converge");
  }
  res.value = best;
  res.base_velocity = best_v;
  return res;
}

template <int D>
double metric_dL(const KineticPoint<D>& z1, const KineticPoint<D>& z2, double gamma,
                 const MetricSearchOptions& opt = {}) {
  return metric_dL_search(z1, z2, gamma, opt).value;
}

}  // namespace landau
