#pragma once

// Barrier functions and envelope verdicts over solver runs: the polynomial
// lower barrier e^{-beta t} eta(|v|), the Gaussian supersolution
// e^{-alpha |v|^2}, Gaussian propagation, and the decay envelope.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "landau/coefficients.hpp"
#include "landau/errors.hpp"
#include "landau/kinetic.hpp"
#include "landau/solver.hpp"
#include "landau/stencil.hpp"

namespace landau {

template <int D>
struct EnvelopeVerdict {
  bool holds = false;
  KineticPoint<D> worst_point;
  double measured_constant = 0.0;
};

template <int D>
KineticPoint<D> phase_point(const DistributionField<D>& f, int ix, const Vec<D>& v) {
  KineticPoint<D> z;
  z.t = f.time;
  z.v = v;
  if (f.grid.x) z.x[0] = f.grid.x->node(ix);
  return z;
}

/// Coefficients of every snapshot of a run (outer: snapshot, inner: x-slice).
template <int D>
std::vector<std::vector<CoefficientField<D>>> snapshot_coefficients(const RunRecord<D>& run,
                                                                    const KernelPack<D>& pack) {
  std::vector<std::vector<CoefficientField<D>>> out;
  out.reserve(run.snapshots.size());
  for (const auto& s : run.snapshots) out.push_back(compute_coefficients(s, pack));
  return out;
}

/// sum_t rho_t (u(v + h e_t) - 2 u(v) + u(v - h e_t)) / h^2 for an analytic u,
/// using the Selling stencil of the solver's non-divergence form.
template <int D>
double stencil_second_derivative(const std::function<double(const Vec<D>&)>& u, const Vec<D>& v, double h,
                                 const SellingDecomposition<D>& sd) {
  const double centre = u(v);
  double acc = 0.0;
  for (int t = 0; t < kSellingTerms<D>; ++t) {
    if (sd.weight[t] == 0.0) continue;
    const Vec<D> e = h * detail::as_vec<D>(sd.offset[t]);
    acc += sd.weight[t] * (u(v + e) - 2.0 * centre + u(v - e));
  }
  return acc / (h * h);
}

/// Decreasing C^2 profile: 2 on [0, 1/2], r^{-p} on [1, inf). On [1/2, 1],
/// with s = 2r - 1, log eta = log 2 - int_0^s q where
/// q(s) = s^n (A + B (1 - s)), A = p/2, B = p(2n+1)/4 match slope and
/// curvature of r^{-p} at r = 1, and n is fixed by int_0^1 q = log 2. q >= 0
/// keeps eta monotone.
class EtaProfile {
 public:
  explicit EtaProfile(double p) : p_(p) {
    if (!(p > 0.0)) throw PreconditionError("eta profile needs p > 0");
    A_ = p / 2.0;
    auto mismatch = [&](double n) {
      const double B = p * (2.0 * n + 1.0) / 4.0;
      return A_ / (n + 1.0) + B / ((n + 1.0) * (n + 2.0)) - std::log(2.0);
    };
    if (mismatch(2.0) < 0.0) throw PreconditionError("eta profile needs a larger p");
    double lo = 2.0, hi = 4.0;
    while (mismatch(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mismatch(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    n_ = 0.5 * (lo + hi);
    B_ = p * (2.0 * n_ + 1.0) / 4.0;
  }

  double p() const { return p_; }
  double exponent_n() const { return n_; }

  double operator()(double r) const {
    if (r <= 0.5) return 2.0;
    if (r >= 1.0) return std::pow(r, -p_);
    return std::exp(log_inner(2.0 * r - 1.0));
  }

  double derivative(double r) const {
    if (r <= 0.5) return 0.0;
    if (r >= 1.0) return -p_ * std::pow(r, -p_ - 1.0);
    const double s = 2.0 * r - 1.0;
    return -2.0 * q(s) * std::exp(log_inner(s));
  }

  double second_derivative(double r) const {
    if (r <= 0.5) return 0.0;
    if (r >= 1.0) return p_ * (p_ + 1.0) * std::pow(r, -p_ - 2.0);
    const double s = 2.0 * r - 1.0;
    const double qs = q(s);
    return 4.0 * (qs * qs - dq(s)) * std::exp(log_inner(s));
  }

 private:
  double q(double s) const { return std::pow(s, n_) * (A_ + B_ * (1.0 - s)); }
  double dq(double s) const {
    return n_ * std::pow(s, n_ - 1.0) * (A_ + B_ * (1.0 - s)) - B_ * std::pow(s, n_);
  }
  double log_inner(double s) const {
    return std::log(2.0) - (A_ + B_) * std::pow(s, n_ + 1.0) / (n_ + 1.0) + B_ * std::pow(s, n_ + 2.0) / (n_ + 2.0);
  }

  double p_, n_ = 2.0, A_ = 0.0, B_ = 0.0;
};

struct BarrierOptions {
  double radius_fraction = 0.5;
  double beta_start = 1.0;
  double relative_tolerance = 1e-12;
};

template <int D>
struct PolynomialBarrierReport {
  double p = 0.0;
  double beta = 0.0;  // smallest beta with a nonnegative subsolution residual
  double c0 = 0.0;    // min f_in (1 + |v|)^p over |v| <= fraction L
  double c1 = 0.0;    // min f e^{beta t} (1 + |v|)^p over 1 <= |v| <= fraction L
  double min_residual = 0.0;
  EnvelopeVerdict<D> verdict;
};

/// Residual terms a : D_h^2 eta + c eta and eta at every node |v| <= fraction L
/// of every snapshot.
template <int D>
std::vector<std::pair<double, double>> barrier_residual_terms(const RunRecord<D>& run, const KernelPack<D>& pack,
                                                              const EtaProfile& eta, double radius_fraction) {
  std::vector<std::pair<double, double>> terms;
  const auto& g = pack.grid();
  const double rmax = radius_fraction * g.half_width();
  const std::function<double(const Vec<D>&)> u = [&](const Vec<D>& v) { return eta(v.norm()); };
  for (const auto& snap : run.snapshots) {
    const auto coeffs = compute_coefficients(snap, pack);
    for (const auto& cf : coeffs)
      for (std::size_t k = 0; k < g.size(); ++k) {
        const Vec<D> v = g.velocity(k);
        if (v.norm() > rmax) continue;
        const auto sd = selling_decomposition<D>(cf.a(k));
        const double e = eta(v.norm());
        terms.emplace_back(stencil_second_derivative<D>(u, v, g.spacing(), sd) + cf.c(k) * e, e);
      }
  }
  return terms;
}

/// Smallest beta >= 0 with beta eta + R >= 0 for every (R, eta): doubling from
/// beta_start, then bisection.
inline double search_barrier_rate(const std::vector<std::pair<double, double>>& terms, const BarrierOptions& opt) {
  auto ok = [&](double beta) {
    for (const auto& [r, e] : terms)
      if (beta * e + r < 0.0) return false;
    return true;
  };
  if (ok(0.0)) return 0.0;
  double lo = 0.0, hi = opt.beta_start;
  while (!ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) return std::numeric_limits<double>::infinity();
  }
  while (hi - lo > opt.relative_tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

template <int D>
PolynomialBarrierReport<D> verify_polynomial_barrier(const RunRecord<D>& run, const KernelPack<D>& pack, double p,
                                                     const BarrierOptions& opt = {}) {
  if (!(p > D + 2.0)) throw PreconditionError("polynomial barrier needs p > d + 2");
  if (run.snapshots.empty()) throw PreconditionError("run has no snapshots");
  const auto& g = pack.grid();
  const double rmax = opt.radius_fraction * g.half_width();
  PolynomialBarrierReport<D> rep;
  rep.p = p;

  const auto& init = run.snapshots.front();
  rep.c0 = std::numeric_limits<double>::infinity();
  for (int ix = 0; ix < init.slices(); ++ix)
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double s = g.velocity(k).norm();
      if (s <= rmax) rep.c0 = std::min(rep.c0, init.slice(ix)[k] * std::pow(1.0 + s, p));
    }
  if (!(rep.c0 > 0.0))
    throw PreconditionError("initial data is not bounded below by c0 (1 + |v|)^{-p} on |v| <= " +
                            std::to_string(rmax));

  const EtaProfile eta(p);
  const auto terms = barrier_residual_terms(run, pack, eta, opt.radius_fraction);
  rep.beta = search_barrier_rate(terms, opt);
  rep.min_residual = std::numeric_limits<double>::infinity();
  for (const auto& [r, e] : terms) rep.min_residual = std::min(rep.min_residual, rep.beta * e + r);

  rep.c1 = std::numeric_limits<double>::infinity();
  for (const auto& snap : run.snapshots)
    for (int ix = 0; ix < snap.slices(); ++ix)
      for (std::size_t k = 0; k < g.size(); ++k) {
        const Vec<D> v = g.velocity(k);
        const double s = v.norm();
        if (s < 1.0 || s > rmax) continue;
        const double val = snap.slice(ix)[k] * std::exp(rep.beta * snap.time) * std::pow(1.0 + s, p);
        if (val < rep.c1) {
          rep.c1 = val;
          rep.verdict.worst_point = phase_point(snap, ix, v);
        }
      }
  rep.verdict.measured_constant = rep.c1;
  rep.verdict.holds = std::isfinite(rep.beta) && rep.c1 > 0.0 && std::isfinite(rep.c1);
  return rep;
}

/// Hessian of e^{-alpha |v|^2}.
template <int D>
Mat<D> gaussian_hessian(const Vec<D>& v, double alpha) {
  const double r2 = v.squaredNorm();
  const double phi = std::exp(-alpha * r2);
  const Mat<D> vv = v * v.transpose();
  return ((4.0 * alpha * alpha * r2 - 2.0 * alpha) / r2 * vv - 2.0 * alpha * (Mat<D>::Identity() - vv / r2)) * phi;
}

template <int D>
struct SupersolutionResult {
  bool success = false;
  double alpha = 0.0;
  double R0 = 0.0;
  double margin = 0.0;      // min of -(a : D^2 phi + c phi) / (|v|^{g+2} phi) beyond R0
  double growth = 0.0;      // max(0, sup (a : D^2 phi + c phi) / phi) over |v| <= fraction L
  Vec<D> worst_point = Vec<D>::Zero();
};

struct SupersolutionOptions {
  double radius_fraction = 0.5;
};

/// Per-node value of (a : D_h^2 phi + c phi) / phi.
template <int D>
std::vector<double> gaussian_generator_ratio(const CoefficientField<D>& cf, double alpha) {
  const auto& g = cf.grid;
  const std::function<double(const Vec<D>&)> phi = [&](const Vec<D>& v) { return std::exp(-alpha * v.squaredNorm()); };
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.on_boundary_layer(g.unflatten(k))) continue;
    const Vec<D> v = g.velocity(k);
    const auto sd = selling_decomposition<D>(cf.a(k));
    // Divide through by phi(v) to keep far nodes away from underflow.
    const std::function<double(const Vec<D>&)> rel = [&](const Vec<D>& w) {
      return std::exp(-alpha * (w.squaredNorm() - v.squaredNorm()));
    };
    out[k] = stencil_second_derivative<D>(rel, v, g.spacing(), sd) + cf.c(k);
  }
  (void)phi;
  return out;
}

template <int D>
SupersolutionResult<D> certify_gaussian_supersolution(const std::vector<const CoefficientField<D>*>& fields,
                                                      double alpha, double gamma,
                                                      const SupersolutionOptions& opt = {}) {
  if (!(alpha > 0.0)) throw PreconditionError("alpha must be positive");
  SupersolutionResult<D> res;
  res.alpha = alpha;
  const auto& g = fields.front()->grid;
  const double rmax = opt.radius_fraction * g.half_width();
  std::vector<std::vector<double>> ratios;
  for (const auto* cf : fields) ratios.push_back(gaussian_generator_ratio(*cf, alpha));
  double bad = 0.0;  // largest radius with a nonnegative left side
  for (const auto& r : ratios)
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double s = g.velocity(k).norm();
      if (s > rmax || g.on_boundary_layer(g.unflatten(k))) continue;
      res.growth = std::max(res.growth, r[k]);
      if (r[k] >= 0.0) bad = std::max(bad, s);
    }
  double R0 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s = g.velocity(k).norm();
    if (s > bad && s <= rmax) R0 = std::min(R0, s);
  }
  if (!std::isfinite(R0)) return res;
  res.R0 = R0;
  res.margin = std::numeric_limits<double>::infinity();
  for (const auto& r : ratios)
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Vec<D> v = g.velocity(k);
      const double s = v.norm();
      if (s < R0 || s > rmax) continue;
      const double m = -r[k] / std::pow(s, gamma + 2.0);
      if (m < res.margin) {
        res.margin = m;
        res.worst_point = v;
      }
    }
  res.success = res.margin > 0.0 && std::isfinite(res.margin);
  return res;
}

template <int D>
SupersolutionResult<D> certify_gaussian_supersolution(const CoefficientField<D>& cf, double alpha, double gamma,
                                                      const SupersolutionOptions& opt = {}) {
  return certify_gaussian_supersolution<D>(std::vector<const CoefficientField<D>*>{&cf}, alpha, gamma, opt);
}

/// Margin at a prescribed R0 (nodes R0 <= |v| <= fraction L); negative when
/// the inequality fails somewhere in that shell.
template <int D>
double gaussian_margin_at(const CoefficientField<D>& cf, double alpha, double gamma, double R0,
                          const SupersolutionOptions& opt = {}) {
  const auto& g = cf.grid;
  const auto r = gaussian_generator_ratio(cf, alpha);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s = g.velocity(k).norm();
    if (s < R0 || s > opt.radius_fraction * g.half_width()) continue;
    m = std::min(m, -r[k] / std::pow(s, gamma + 2.0));
  }
  return m;
}

/// Largest alpha for which certification succeeds: geometric scan, then
/// bisection between the last success and the next failure.
template <int D>
double largest_certified_alpha(const std::vector<const CoefficientField<D>*>& fields, double gamma,
                               const SupersolutionOptions& opt = {}) {
  auto ok = [&](double a) { return certify_gaussian_supersolution<D>(fields, a, gamma, opt).success; };
  double best = 0.0, next = 0.0;
  for (int k = 0; k <= 64; ++k) {
    const double a = 1e-4 * std::pow(2.0, k / 4.0);
    if (ok(a)) {
      best = a;
      next = 1e-4 * std::pow(2.0, (k + 1) / 4.0);
    }
  }
  if (best == 0.0) return 0.0;
  double lo = best, hi = next;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

template <int D>
struct PropagationReport {
  double alpha = 0.0;
  double alpha0 = 0.0;     // certified threshold
  double C0 = 0.0;
  double growth = 0.0;     // C: sup (a : D^2 phi + c phi) / phi over the run
  double R0 = 0.0;
  double C2 = 0.0;         // sup f over the run
  double t0 = 0.0;
  std::vector<double> times;
  std::vector<double> ratio;     // max f / phi at each snapshot
  std::vector<double> C1;        // running maximum of ratio
  std::vector<double> bound;     // C0 e^{C min(t, t0)}
  bool non_decreasing = true;
  EnvelopeVerdict<D> verdict;
};

template <int D>
PropagationReport<D> verify_gaussian_propagation(const RunRecord<D>& run, const KernelPack<D>& pack, double C0,
                                                 double alpha, const SupersolutionOptions& opt = {}) {
  if (run.snapshots.empty()) throw PreconditionError("run has no snapshots");
  const auto& g = pack.grid();
  const double gamma = pack.params().gamma;
  const double rmax = opt.radius_fraction * g.half_width();
  const auto coeffs = snapshot_coefficients(run, pack);
  PropagationReport<D> rep;
  rep.alpha = alpha;
  rep.C0 = C0;

  std::vector<const CoefficientField<D>*> initial;
  for (const auto& cf : coeffs.front()) initial.push_back(&cf);
  rep.alpha0 = largest_certified_alpha<D>(initial, gamma, opt);
  if (!(alpha < rep.alpha0))
    throw PreconditionError("alpha " + std::to_string(alpha) + " is not below the certified threshold " +
                            std::to_string(rep.alpha0) + " from the Gaussian supersolution certification");

  auto phi = [&](const Vec<D>& v) { return std::exp(-alpha * v.squaredNorm()); };
  const auto& f0 = run.snapshots.front();
  for (int ix = 0; ix < f0.slices(); ++ix)
    for (std::size_t k = 0; k < g.size(); ++k)
      if (f0.slice(ix)[k] > C0 * phi(g.velocity(k)) * (1.0 + 1e-12))
        throw PreconditionError("initial data exceeds C0 exp(-alpha |v|^2)");

  std::vector<const CoefficientField<D>*> all;
  for (const auto& snap : coeffs)
    for (const auto& cf : snap) all.push_back(&cf);
  const auto sup = certify_gaussian_supersolution<D>(all, alpha, gamma, opt);
  if (!sup.success) throw PreconditionError("supersolution certification fails along the run");
  rep.growth = sup.growth;
  rep.R0 = sup.R0;
  for (const auto& snap : run.snapshots) rep.C2 = std::max(rep.C2, snap.max_value());
  const double floor_at_R0 = C0 * std::exp(-alpha * rep.R0 * rep.R0);
  rep.t0 = rep.growth > 0.0 ? std::max(0.0, std::log(rep.C2 / floor_at_R0) / rep.growth) : 0.0;

  double running = 0.0;
  rep.verdict.holds = true;
  for (const auto& snap : run.snapshots) {
    double m = 0.0;
    KineticPoint<D> where;
    for (int ix = 0; ix < snap.slices(); ++ix)
      for (std::size_t k = 0; k < g.size(); ++k) {
        const Vec<D> v = g.velocity(k);
        if (v.norm() > rmax) continue;
        const double q = snap.slice(ix)[k] / phi(v);
        if (q > m) {
          m = q;
          where = phase_point(snap, ix, v);
        }
      }
    if (m > running) {
      running = m;
      rep.verdict.worst_point = where;
    }
    const double b = C0 * std::exp(rep.growth * std::min(snap.time, rep.t0));
    rep.times.push_back(snap.time);
    rep.ratio.push_back(m);
    rep.C1.push_back(running);
    rep.bound.push_back(b);
    if (!(running <= b * (1.0 + 1e-9))) rep.verdict.holds = false;
  }
  for (std::size_t i = 1; i < rep.C1.size(); ++i) rep.non_decreasing = rep.non_decreasing && rep.C1[i] >= rep.C1[i - 1];
  rep.verdict.measured_constant = running;
  rep.verdict.holds = rep.verdict.holds && std::isfinite(running) && rep.non_decreasing;
  return rep;
}

template <int D>
struct DecayReport {
  EnvelopeVerdict<D> verdict;
  std::vector<double> times;
  std::vector<double> small_time_product;  // min(t^{d/2}, 1) max f
};

/// f <= K0 (1 + t^{-d/2}) (1 + |v|)^{-1} over snapshots with t > 0 and
/// |v| <= fraction L. Without K0 the smallest admissible K0 is measured.
template <int D>
DecayReport<D> verify_decay_envelope(const RunRecord<D>& run, std::optional<double> K0 = std::nullopt,
                                     double radius_fraction = 0.5) {
  DecayReport<D> rep;
  double worst = 0.0;
  for (const auto& snap : run.snapshots) {
    rep.times.push_back(snap.time);
    rep.small_time_product.push_back(std::min(std::pow(snap.time, D / 2.0), 1.0) * snap.max_value());
    if (!(snap.time > 0.0)) continue;
    const auto& g = snap.grid.vgrid;
    const double tw = 1.0 + std::pow(snap.time, -D / 2.0);
    for (int ix = 0; ix < snap.slices(); ++ix)
      for (std::size_t k = 0; k < g.size(); ++k) {
        const Vec<D> v = g.velocity(k);
        if (v.norm() > radius_fraction * g.half_width()) continue;
        const double q = snap.slice(ix)[k] * (1.0 + v.norm()) / tw;
        if (q > worst) {
          worst = q;
          rep.verdict.worst_point = phase_point(snap, ix, v);
        }
      }
  }
  rep.verdict.measured_constant = worst;
  rep.verdict.holds = K0 ? worst <= *K0 : std::isfinite(worst);
  return rep;
}

}  // namespace landau
