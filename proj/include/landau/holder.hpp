#pragma once

// Empirical Hölder quotient of a run in the kinetic metric d_L.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "landau/errors.hpp"
#include "landau/grid.hpp"
#include "landau/kinetic.hpp"
#include "landau/solver.hpp"

namespace landau {

/// Multilinear interpolation of a cell-centred slice; v is clamped to the
/// outermost nodes.
template <int D>
double interpolate_slice(std::span<const double> f, const VelocityGrid<D>& g, const Vec<D>& v) {
  const int n = g.points_per_axis();
  const double h = g.spacing();
  Index<D> base;
  Vec<D> frac;
  for (int k = 0; k < D; ++k) {
    double s = (v[k] + g.half_width()) / h - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(n - 1));
    int i = std::min(static_cast<int>(std::floor(s)), n - 2);
    base[k] = i;
    frac[k] = s - i;
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << D); ++corner) {
    Index<D> idx = base;
    double w = 1.0;
    for (int k = 0; k < D; ++k) {
      const bool up = (corner >> k) & 1;
      idx[k] += up;
      w *= up ? frac[k] : 1.0 - frac[k];
    }
    if (w != 0.0) acc += w * f[g.flatten(idx)];
  }
  return acc;
}

struct HolderOptions {
  std::uint64_t seed = 0;
  int pairs = 12000;
  double t_min = 0.05;
  std::optional<double> alpha;  // Gaussian weight; absent selects polynomial-weight mode
  double radius_fraction = 0.5;
  double near_distance = 0.1;
  double percentile_ratio = 10.0;
};

template <int D>
struct HolderPair {
  KineticPoint<D> z1, z2;
  double f1 = 0.0, f2 = 0.0;
  double distance = 0.0;
};

template <int D>
struct HolderResult {
  double beta_fit = 0.0;
  double constant = 0.0;
  std::pair<KineticPoint<D>, KineticPoint<D>> worst_pair;
  bool polynomial_weight_mode = false;
  int pairs_used = 0;
  int excluded = 0;  // coincident pairs
  std::vector<double> beta_grid;
  std::vector<double> spread;     // p99 / median per beta
  std::vector<double> constants;  // max quotient per beta over all used pairs
};

template <int D>
double holder_weighted_quotient(const HolderPair<D>& p, double beta, std::optional<double> alpha) {
  const double w = alpha ? std::exp(-*alpha * p.z1.v.squaredNorm()) + std::exp(-*alpha * p.z2.v.squaredNorm()) : 1.0;
  const double tw = 1.0 + std::pow(p.z1.t, -beta / 2.0) + std::pow(p.z2.t, -beta / 2.0);
  return std::abs(p.f1 - p.f2) / (w * std::min(1.0, tw * std::pow(p.distance, beta)));
}

namespace detail {
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return 0.0;
  const std::size_t k = std::min(xs.size() - 1, static_cast<std::size_t>(q * static_cast<double>(xs.size() - 1)));
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(k), xs.end());
  return xs[k];
}
}  // namespace detail

/// Samples point pairs in three strata (near pairs with d_L <= near_distance,
/// arbitrary pairs across snapshots, pairs with |v| in the outer half of the
/// checked ball) and fits beta on the grid 0.05..0.95: the largest beta whose
/// 99th percentile stays within percentile_ratio times the median.
template <int D>
HolderResult<D> holder_quotient(const RunRecord<D>& run, const HolderOptions& opt = {}) {
  std::vector<const DistributionField<D>*> snaps;
  for (const auto& s : run.snapshots)
    if (s.time >= opt.t_min && s.time > 0.0) snaps.push_back(&s);
  if (!(opt.t_min > 0.0) || snaps.size() < 5)
    throw PreconditionError("holder quotient needs at least 5 snapshots with t >= t_min > 0 (have " +
                            std::to_string(snaps.size()) + ")");
  const auto& g = snaps.front()->grid.vgrid;
  const double gamma = run.params.gamma;
  const double rmax = opt.radius_fraction * g.half_width();

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto direction = [&]() {
    Vec<D> u;
    do {
      for (int k = 0; k < D; ++k) u[k] = normal(rng);
    } while (u.norm() < 1e-12);
    return Vec<D>(u / u.norm());
  };
  auto in_ball = [&](double rlo, double rhi) {
    const double s = std::pow(std::pow(rlo, D) + unit(rng) * (std::pow(rhi, D) - std::pow(rlo, D)), 1.0 / D);
    return Vec<D>(s * direction());
  };
  auto pick_snapshot = [&]() { return static_cast<std::size_t>(unit(rng) * snaps.size()) % snaps.size(); };
  auto pick_slice = [&](const DistributionField<D>& f) {
    return static_cast<int>(unit(rng) * f.slices()) % f.slices();
  };
  auto point = [&](std::size_t si, int ix, const Vec<D>& v) {
    KineticPoint<D> z;
    z.t = snaps[si]->time;
    if (snaps[si]->grid.x) z.x[0] = snaps[si]->grid.x->node(ix);
    z.v = v;
    return z;
  };

  struct Draw {
    std::size_t s1, s2;
    int x1, x2;
    Vec<D> v1, v2;
    bool near;
  };
  std::vector<Draw> draws;
  draws.reserve(static_cast<std::size_t>(opt.pairs));
  for (int i = 0; i < opt.pairs; ++i) {
    Draw d;
    const int stratum = i % 3;
    d.s1 = pick_snapshot();
    d.x1 = pick_slice(*snaps[d.s1]);
    d.near = stratum == 0;
    if (stratum == 0) {
      d.v1 = in_ball(0.0, rmax);
      d.s2 = d.s1;
      d.x2 = d.x1;
      d.v2 = d.v1 + 0.5 * opt.near_distance * unit(rng) * direction();
      if (d.v2.norm() > rmax) d.v2 *= rmax / d.v2.norm();
    } else {
      const double rlo = stratum == 2 ? 0.5 * rmax : 0.0;
      d.v1 = in_ball(rlo, rmax);
      d.v2 = in_ball(rlo, rmax);
      d.s2 = pick_snapshot();
      d.x2 = pick_slice(*snaps[d.s2]);
    }
    draws.push_back(d);
  }

  std::vector<HolderPair<D>> pairs(draws.size());
  std::vector<char> keep(draws.size(), 0);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(draws.size()); ++i) {
    const auto& d = draws[i];
    HolderPair<D> p;
    p.z1 = point(d.s1, d.x1, d.v1);
    p.z2 = point(d.s2, d.x2, d.v2);
    p.f1 = interpolate_slice<D>(snaps[d.s1]->slice(d.x1), g, d.v1);
    p.f2 = interpolate_slice<D>(snaps[d.s2]->slice(d.x2), g, d.v2);
    p.distance = metric_dL(p.z1, p.z2, gamma);
    pairs[i] = p;
    keep[i] = p.distance > 0.0 && (!d.near || p.distance <= opt.near_distance);
  }

  HolderResult<D> res;
  res.polynomial_weight_mode = !opt.alpha.has_value();
  std::vector<HolderPair<D>> used;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (keep[i])
      used.push_back(pairs[i]);
    else if (pairs[i].distance == 0.0)
      ++res.excluded;
  }
  res.pairs_used = static_cast<int>(used.size());
  if (used.empty()) throw PreconditionError("no usable point pairs");

  // Pairs where min{1, ...} saturates at 1 carry no information about beta;
  // the spread is taken over the remaining (Hoelder-regime) pairs.
  std::vector<double> q;
  q.reserve(used.size());
  for (int k = 1; k <= 19; ++k) {
    const double beta = k / 20.0;
    q.clear();
    for (const auto& p : used) {
      const double tw = 1.0 + std::pow(p.z1.t, -beta / 2.0) + std::pow(p.z2.t, -beta / 2.0);
      if (tw * std::pow(p.distance, beta) < 1.0) q.push_back(holder_weighted_quotient(p, beta, opt.alpha));
    }
    const double med = detail::quantile(q, 0.5);
    const double p99 = detail::quantile(q, 0.99);
    res.beta_grid.push_back(beta);
    double cmax = 0.0;
    for (const auto& p : used) cmax = std::max(cmax, holder_weighted_quotient(p, beta, opt.alpha));
    res.constants.push_back(cmax);
    res.spread.push_back(med > 0.0 ? p99 / med : std::numeric_limits<double>::infinity());
    if (med > 0.0 && p99 <= opt.percentile_ratio * med) res.beta_fit = beta;
  }
  if (res.beta_fit > 0.0) {
    for (const auto& p : used) {
      const double v = holder_weighted_quotient(p, res.beta_fit, opt.alpha);
      if (v > res.constant) {
        res.constant = v;
        res.worst_pair = {p.z1, p.z2};
      }
    }
  }
  return res;
}

}  // namespace landau
