#pragma once

// Mass, energy and entropy densities and the admissibility gate built on them.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "landau/grid.hpp"

namespace landau {

struct HydroState {
  double mass = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
};

struct HydroBounds {
  double m0 = 0.0;
  double M0 = 0.0;
  double E0 = 0.0;
  double H0 = 0.0;
};

inline constexpr double kEntropyFloor = 1e-300;

inline double entropy_density(double f) { return f > kEntropyFloor ? f * std::log(f) : 0.0; }

template <int D>
HydroState hydro_slice(std::span<const double> f, const VelocityGrid<D>& g) {
  HydroState s;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = f[k];
    s.mass += x;
    s.energy += g.velocity(k).squaredNorm() * x;
    s.entropy += entropy_density(x);
  }
  const double w = g.cell_volume();
  s.mass *= w;
  s.energy *= w;
  s.entropy *= w;
  return s;
}

/// One state per x-slice (one entry for homogeneous fields).
template <int D>
std::vector<HydroState> hydro_state(const DistributionField<D>& f) {
  std::vector<HydroState> out(f.slices());
  for (int ix = 0; ix < f.slices(); ++ix) out[ix] = hydro_slice<D>(f.slice(ix), f.grid.vgrid);
  return out;
}

/// Totals over x (weighted by the x-spacing in inhomogeneous mode).
template <int D>
HydroState hydro_total(const DistributionField<D>& f) {
  const auto per = hydro_state(f);
  const double w = f.grid.x ? f.grid.x->spacing() : 1.0;
  HydroState t;
  for (const auto& s : per) {
    t.mass += w * s.mass;
    t.energy += w * s.energy;
    t.entropy += w * s.entropy;
  }
  return t;
}

struct AdmissibilityReport {
  bool admissible = true;
  std::vector<int> failing_slices;
  std::string message;
};

inline bool within_bounds(const HydroState& s, const HydroBounds& b) {
  return s.mass >= b.m0 && s.mass <= b.M0 && s.energy <= b.E0 && s.entropy <= b.H0;
}

template <int D>
AdmissibilityReport check_admissible(const DistributionField<D>& f, const HydroBounds& b) {
  AdmissibilityReport r;
  const auto per = hydro_state(f);
  for (int ix = 0; ix < static_cast<int>(per.size()); ++ix) {
    const auto& s = per[ix];
    if (within_bounds(s, b)) continue;
    r.admissible = false;
    r.failing_slices.push_back(ix);
    if (r.message.empty())
      r.message = "slice " + std::to_string(ix) + ": mass " + std::to_string(s.mass) + ", energy " +
                  std::to_string(s.energy) + ", entropy " + std::to_string(s.entropy) + " outside bounds";
  }
  return r;
}

}  // namespace landau
