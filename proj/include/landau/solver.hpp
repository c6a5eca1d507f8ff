#pragma once

// Time stepping for the Landau equation: conservative flux form, the
// equivalent non-divergence form, periodic transport in one x-direction, and
// the discrete maximum-principle harness.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "landau/coefficients.hpp"
#include "landau/errors.hpp"
#include "landau/grid.hpp"
#include "landau/hydro.hpp"
#include "landau/stencil.hpp"

namespace landau {

enum class Form { DivergenceFlux, NonDivergence };

struct SolverConfig {
  Form form = Form::DivergenceFlux;
  std::optional<double> dt;  // empty: automatic from the CFL bound
  double cfl_safety = 0.8;
  double t_end = 1.0;
  int snapshot_stride = 1;
  bool freeze_coefficients = false;
  bool check_admissibility = true;
};

inline constexpr double kNegativityTolerance = 1e-12;

/// h^2 / (2 d rho_max): the largest stable explicit step.
template <int D>
double cfl_limit(const std::vector<CoefficientField<D>>& coeffs) {
  double rho = 0.0;
  for (const auto& cf : coeffs) rho = std::max(rho, cf.max_spectral_radius());
  const double h = coeffs.front().grid.spacing();
  return rho > 0.0 ? h * h / (2.0 * D * rho) : std::numeric_limits<double>::infinity();
}

/// x / (e^x - 1), the Scharfetter-Gummel weight.
inline double bernoulli_weight(double x) {
  if (std::abs(x) < 1e-6) return 1.0 - 0.5 * x + x * x / 12.0;
  return x / std::expm1(x);
}

/// Edge of the flux-form graph: the flux from q into p is
/// w_q f(q) - w_p f(p), already divided by h^2.
struct FluxEdge {
  std::size_t p = 0, q = 0;
  double w_p = 0.0, w_q = 0.0;
};

template <int D>
struct FluxStencil {
  std::vector<FluxEdge> edges;
  double max_diagonal = 0.0;
};

/// Conservative monotone discretisation of div(a grad f + b f). With the
/// Selling decomposition a = sum_t rho_t e_t e_t^T and u = a^{-1} b, the flux
/// splits as sum_t rho_t e_t (e_t . grad f + (e_t . u) f): one 1-D
/// convection-diffusion flux per lattice direction, each discretised with
/// exponential fitting. Every node owns half of the edges along its own
/// directions, so the graph is symmetric in structure and each edge transfers
/// mass between exactly two nodes. Edges touching the outer layer or leaving
/// the box are dropped (zero flux through the support boundary).
template <int D>
FluxStencil<D> build_flux_stencil(const CoefficientField<D>& cf) {
  const auto& g = cf.grid;
  const int n = g.points_per_axis();
  const double h = g.spacing();
  FluxStencil<D> st;
  std::vector<double> diag(g.size(), 0.0);
  st.edges.reserve(2 * kSellingTerms<D> * g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Index<D> idx = g.unflatten(p);
    if (g.on_boundary_layer(idx)) continue;
    const Mat<D> a = cf.a(p);
    const auto sd = selling_decomposition<D>(a);
    const Vec<D> u = a.inverse() * cf.b(p);
    for (int t = 0; t < kSellingTerms<D>; ++t) {
      if (sd.weight[t] == 0.0) continue;
      const Vec<D> e = detail::as_vec<D>(sd.offset[t]);
      for (int sgn : {1, -1}) {
        Index<D> qi = idx;
        bool inside = true;
        for (int k = 0; k < D; ++k) {
          qi[k] += sgn * sd.offset[t][k];
          inside = inside && qi[k] >= 0 && qi[k] < n;
        }
        if (!inside || g.on_boundary_layer(qi)) continue;
        const double peclet = sgn * h * e.dot(u);
        const double scale = 0.5 * sd.weight[t] / (h * h);
        const double bw = bernoulli_weight(peclet);  // B(-x) = B(x) + x
        FluxEdge ed{p, g.flatten(qi), scale * bw, scale * (bw + peclet)};
        diag[ed.p] += ed.w_p;
        diag[ed.q] += ed.w_q;
        st.edges.push_back(ed);
      }
    }
  }
  for (double x : diag) st.max_diagonal = std::max(st.max_diagonal, x);
  return st;
}

template <int D>
void flux_form_rhs(std::span<const double> f, const FluxStencil<D>& st, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& e : st.edges) {
    const double flux = e.w_q * f[e.q] - e.w_p * f[e.p];
    out[e.p] += flux;
    out[e.q] -= flux;
  }
}

template <int D>
void flux_form_rhs(std::span<const double> f, const CoefficientField<D>& cf, std::span<double> out) {
  flux_form_rhs<D>(f, build_flux_stencil(cf), out);
}

/// Per-node monotone stencil for a : D^2 f.
template <int D>
struct NonDivergenceStencil {
  VelocityGrid<D> grid;
  std::vector<SellingDecomposition<D>> nodes;
};

template <int D>
NonDivergenceStencil<D> build_nondivergence_stencil(const CoefficientField<D>& cf) {
  NonDivergenceStencil<D> st{cf.grid, {}};
  st.nodes.resize(cf.grid.size());
  for (std::size_t p = 0; p < cf.grid.size(); ++p)
    if (!cf.grid.on_boundary_layer(cf.grid.unflatten(p))) st.nodes[p] = selling_decomposition<D>(cf.a(p));
  return st;
}

/// a : D_h^2 f (+ c f), values outside the box read as zero; the outer layer
/// is left at zero.
template <int D>
void nondivergence_rhs(std::span<const double> f, const CoefficientField<D>& cf, const NonDivergenceStencil<D>& st,
                       std::span<double> out, bool include_c = true) {
  const auto& g = cf.grid;
  const int n = g.points_per_axis();
  const double h2 = g.spacing() * g.spacing();
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Index<D> idx = g.unflatten(p);
    if (g.on_boundary_layer(idx)) {
      out[p] = 0.0;
      continue;
    }
    const auto& sd = st.nodes[p];
    double acc = 0.0;
    for (int t = 0; t < kSellingTerms<D>; ++t) {
      if (sd.weight[t] == 0.0) continue;
      double sum = -2.0 * f[p];
      for (int sgn : {1, -1}) {
        Index<D> q = idx;
        bool inside = true;
        for (int k = 0; k < D; ++k) {
          q[k] += sgn * sd.offset[t][k];
          inside = inside && q[k] >= 0 && q[k] < n;
        }
        if (inside) sum += f[g.flatten(q)];
      }
      acc += sd.weight[t] * sum;
    }
    out[p] = acc / h2 + (include_c ? cf.c(p) * f[p] : 0.0);
  }
}

struct StepStats {
  int clamps = 0;
};

/// Clamp values below -tol * max to zero and count them; smaller negatives
/// are rounding and are kept.
inline int clamp_negatives(std::span<double> f) {
  double mx = 0.0;
  for (double x : f) mx = std::max(mx, x);
  int clamps = 0;
  for (double& x : f)
    if (x < -kNegativityTolerance * mx) {
      x = 0.0;
      ++clamps;
    }
  return clamps;
}

/// Collision operator on one velocity slice for a fixed coefficient field.
template <int D>
class SliceOperator {
 public:
  SliceOperator(const CoefficientField<D>& cf, Form form) : cf_(&cf), form_(form) {
    if (form == Form::NonDivergence)
      nd_ = build_nondivergence_stencil(cf);
    else
      flux_ = build_flux_stencil(cf);
  }

  void apply(std::span<const double> f, std::span<double> out) const {
    if (form_ == Form::DivergenceFlux)
      flux_form_rhs<D>(f, *flux_, out);
    else
      nondivergence_rhs<D>(f, *cf_, *nd_, out, true);
  }

  /// Largest step keeping forward Euler monotone: h^2 / (2 d rho_max), and
  /// for the flux form also 1 / max diagonal (large Peclet numbers shrink it).
  double step_limit() const {
    double lim = single_cfl(*cf_);
    if (flux_ && flux_->max_diagonal > 0.0) lim = std::min(lim, 1.0 / flux_->max_diagonal);
    return lim;
  }

 private:
  static double single_cfl(const CoefficientField<D>& cf) {
    const double rho = cf.max_spectral_radius();
    const double h = cf.grid.spacing();
    return rho > 0.0 ? h * h / (2.0 * D * rho) : std::numeric_limits<double>::infinity();
  }

  const CoefficientField<D>* cf_;
  Form form_;
  std::optional<NonDivergenceStencil<D>> nd_;
  std::optional<FluxStencil<D>> flux_;
};

template <int D>
double step_limit(const std::vector<CoefficientField<D>>& coeffs, Form form) {
  double lim = std::numeric_limits<double>::infinity();
  for (const auto& cf : coeffs) lim = std::min(lim, SliceOperator<D>(cf, form).step_limit());
  return lim;
}

/// One Heun (SSP-RK2) collision step on every slice. Without frozen
/// coefficients the second stage uses coefficients of the predictor.
template <int D>
StepStats collision_step(DistributionField<D>& f, const KernelPack<D>& pack, Form form, double dt,
                         const std::vector<CoefficientField<D>>* frozen = nullptr) {
  const std::size_t nv = f.slice_size();
  const int ns = f.slices();
  const auto c0 = frozen ? std::vector<CoefficientField<D>>{} : compute_coefficients(f, pack);
  const auto& coeff0 = frozen ? *frozen : c0;
  if (frozen && static_cast<int>(frozen->size()) != ns) throw PreconditionError("frozen coefficients per slice");
  std::vector<SliceOperator<D>> ops0;
  double limit = std::numeric_limits<double>::infinity();
  for (int ix = 0; ix < ns; ++ix) {
    ops0.emplace_back(coeff0[ix], form);
    limit = std::min(limit, ops0.back().step_limit());
  }
  if (dt > limit * (1.0 + 1e-12))
    throw CflViolation("dt " + std::to_string(dt) + " exceeds the stability limit " + std::to_string(limit));

  DistributionField<D> pred = f;
  std::vector<double> rhs(nv);
  for (int ix = 0; ix < ns; ++ix) {
    ops0[ix].apply(f.slice(ix), rhs);
    auto s = pred.slice(ix);
    for (std::size_t k = 0; k < nv; ++k) s[k] += dt * rhs[k];
  }
  const auto c1 = frozen ? std::vector<CoefficientField<D>>{} : compute_coefficients(pred, pack);
  const auto& coeff1 = frozen ? *frozen : c1;
  StepStats stats;
  for (int ix = 0; ix < ns; ++ix) {
    if (frozen)
      ops0[ix].apply(pred.slice(ix), rhs);
    else
      SliceOperator<D>(coeff1[ix], form).apply(pred.slice(ix), rhs);
    auto s = f.slice(ix);
    auto p = pred.slice(ix);
    for (std::size_t k = 0; k < nv; ++k) s[k] = 0.5 * (s[k] + p[k] + dt * rhs[k]);
    stats.clamps += clamp_negatives(s);
  }
  f.time += dt;
  return stats;
}

/// Semi-Lagrangian shift f(x, v) <- f(x - v_1 dt, v) with periodic linear
/// interpolation in x.
template <int D>
void transport_step(DistributionField<D>& f, double dt) {
  if (!f.grid.x) throw PreconditionError("transport needs an inhomogeneous field");
  const auto& xl = *f.grid.x;
  const auto& vg = f.grid.vgrid;
  const int nx = xl.points;
  const std::size_t nv = vg.size();
  std::vector<double> src = f.values;
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < static_cast<long long>(nv); ++k) {
    const double shift = vg.velocity(static_cast<std::size_t>(k))[0] * dt / xl.spacing();
    const double fl = std::floor(shift);
    const double frac = shift - fl;
    const long long whole = static_cast<long long>(fl);
    for (int ix = 0; ix < nx; ++ix) {
      const long long a = ((ix - whole) % nx + nx) % nx;
      const long long b = ((ix - whole - 1) % nx + nx) % nx;
      const double fa = src[static_cast<std::size_t>(a) * nv + k];
      const double fb = src[static_cast<std::size_t>(b) * nv + k];
      f.values[static_cast<std::size_t>(ix) * nv + k] = frac == 0.0 ? fa : (1.0 - frac) * fa + frac * fb;
    }
  }
}

struct TraceRow {
  double t = 0.0;
  HydroState hydro;
  double min_f = 0.0;
  double max_f = 0.0;
  int clamps = 0;
};

template <int D>
struct RunRecord {
  SolverConfig config;
  PotentialParams params;
  double dt = 0.0;
  std::vector<DistributionField<D>> snapshots;
  std::vector<TraceRow> trace;
  int total_clamps = 0;
  double wall_seconds = 0.0;
};

template <int D>
TraceRow trace_row(const DistributionField<D>& f, int clamps) {
  return {f.time, hydro_total(f), f.min_value(), f.max_value(), clamps};
}

template <int D>
RunRecord<D> run(const DistributionField<D>& initial, const HydroBounds& bounds, const SolverConfig& config,
                 const PotentialParams& params, std::shared_ptr<const KernelPack<D>> pack = nullptr) {
  const auto wall0 = std::chrono::steady_clock::now();
  if (!pack) pack = precompute_kernels(initial.grid.vgrid, params);
  if (config.check_admissibility) {
    const auto adm = check_admissible(initial, bounds);
    if (!adm.admissible) throw PreconditionError("initial data not admissible: " + adm.message);
  }
  if (!(config.t_end > 0.0)) throw PreconditionError("t_end must be positive");
  if (config.snapshot_stride < 1) throw PreconditionError("snapshot_stride must be >= 1");

  DistributionField<D> f = initial;
  const auto coeff_init = compute_coefficients(f, *pack);
  const double limit = step_limit(coeff_init, config.form);
  double dt = config.dt ? *config.dt : config.cfl_safety * limit;
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  if (dt > limit) throw CflViolation("dt " + std::to_string(dt) + " exceeds stability limit " + std::to_string(limit));
  const long long steps = static_cast<long long>(std::ceil(config.t_end / dt - 1e-9));
  dt = config.t_end / static_cast<double>(steps);

  RunRecord<D> rec;
  rec.config = config;
  rec.params = params;
  rec.dt = dt;
  rec.snapshots.push_back(f);
  rec.trace.push_back(trace_row(f, 0));
  const double t0 = f.time;
  const std::vector<CoefficientField<D>>* frozen = config.freeze_coefficients ? &coeff_init : nullptr;
  for (long long s = 1; s <= steps; ++s) {
    if (f.grid.x) transport_step(f, 0.5 * dt);
    const auto stats = collision_step(f, *pack, config.form, dt, frozen);
    if (f.grid.x) transport_step(f, 0.5 * dt);
    f.time = t0 + static_cast<double>(s) * dt;
    rec.total_clamps += stats.clamps;
    rec.trace.push_back(trace_row(f, stats.clamps));
    if (config.check_admissibility) {
      const auto adm = check_admissible(f, bounds);
      if (!adm.admissible)
        throw AdmissibilityError("admissibility lost at t = " + std::to_string(f.time) + ": " + adm.message);
    }
    if (s % config.snapshot_stride == 0 || s == steps) rec.snapshots.push_back(f);
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return rec;
}

struct MaximumPrincipleReport {
  bool holds = false;
  bool input_violation = false;  // g0 had positive values
  double max_g = 0.0;
  double threshold = 0.0;
  double worst_time = 0.0;
  std::string message;
};

/// Evolve g by a : D^2 g (no c term), with coefficients frozen from snapshot k
/// on [t_k, t_{k+1}) and transport in inhomogeneous mode; forward Euler
/// substeps at half the CFL limit.
template <int D>
MaximumPrincipleReport check_discrete_maximum_principle(const RunRecord<D>& run_record,
                                                        const DistributionField<D>& g0, const KernelPack<D>& pack,
                                                        double tol = 1e-10) {
  MaximumPrincipleReport rep;
  double gmax0 = 0.0, gnorm = 0.0;
  for (double x : g0.values) {
    gmax0 = std::max(gmax0, x);
    gnorm = std::max(gnorm, std::abs(x));
  }
  rep.threshold = tol * gnorm;
  if (gmax0 > 0.0) {
    rep.input_violation = true;
    rep.max_g = gmax0;
    rep.message = "g0 is positive somewhere (max " + std::to_string(gmax0) + "); precondition violated at t = 0";
    return rep;
  }
  const auto& snaps = run_record.snapshots;
  if (snaps.size() < 2) throw PreconditionError("run record needs at least two snapshots");
  DistributionField<D> g = g0;
  const std::size_t nv = g.slice_size();
  std::vector<double> rhs(nv);
  for (std::size_t k = 0; k + 1 < snaps.size(); ++k) {
    const auto coeffs = compute_coefficients(snaps[k], pack);
    std::vector<NonDivergenceStencil<D>> stencils;
    for (const auto& cf : coeffs) stencils.push_back(build_nondivergence_stencil(cf));
    const double span = snaps[k + 1].time - snaps[k].time;
    const double limit = 0.5 * cfl_limit(coeffs);
    const int sub = std::max(1, static_cast<int>(std::ceil(span / limit)));
    const double dt = span / sub;
    for (int s = 0; s < sub; ++s) {
      if (g.grid.x) transport_step(g, 0.5 * dt);
      for (int ix = 0; ix < g.slices(); ++ix) {
        nondivergence_rhs<D>(g.slice(ix), coeffs[ix], stencils[ix], rhs, false);
        auto sl = g.slice(ix);
        for (std::size_t p = 0; p < nv; ++p) sl[p] += dt * rhs[p];
      }
      if (g.grid.x) transport_step(g, 0.5 * dt);
      const double m = g.max_value();
      if (m > rep.max_g) {
        rep.max_g = m;
        rep.worst_time = snaps[k].time + (s + 1) * dt;
      }
    }
  }
  rep.holds = rep.max_g <= rep.threshold;
  if (!rep.holds) rep.message = "max g = " + std::to_string(rep.max_g) + " at t = " + std::to_string(rep.worst_time);
  return rep;
}

}  // namespace landau
