#pragma once

// Initial-data presets. Every preset is multiplied by the support window so
// the outer two velocity layers vanish.

#include <cmath>
#include <functional>
#include <numbers>

#include "landau/grid.hpp"

namespace landau {

template <int D>
double maxwellian_value(const Vec<D>& v, double mass, double temperature, const Vec<D>& drift) {
  const double norm = mass / std::pow(2.0 * std::numbers::pi * temperature, D / 2.0);
  return norm * std::exp(-(v - drift).squaredNorm() / (2.0 * temperature));
}

/// Homogeneous field sampled from g(v) at the nodes, then windowed.
template <int D>
DistributionField<D> sample_field(const PhaseGrid<D>& grid, const std::function<double(const Vec<D>&)>& g,
                                  bool window = true) {
  DistributionField<D> f(grid);
  const auto& vg = grid.vgrid;
  for (int ix = 0; ix < f.slices(); ++ix) {
    auto s = f.slice(ix);
    for (std::size_t k = 0; k < vg.size(); ++k) s[k] = g(vg.velocity(k));
  }
  if (window) apply_support_window(f);
  return f;
}

template <int D>
DistributionField<D> maxwellian(const PhaseGrid<D>& grid, double mass = 1.0, double temperature = 1.0,
                                Vec<D> drift = Vec<D>::Zero()) {
  return sample_field<D>(grid, [&](const Vec<D>& v) { return maxwellian_value<D>(v, mass, temperature, drift); });
}

/// Two Maxwellians of half the mass each at +-offset along the first axis.
template <int D>
DistributionField<D> bimodal(const PhaseGrid<D>& grid, double mass = 1.0, double temperature = 1.0,
                             double offset = 2.0) {
  const Vec<D> u = offset * Vec<D>::Unit(0);
  return sample_field<D>(grid, [&](const Vec<D>& v) {
    return maxwellian_value<D>(v, 0.5 * mass, temperature, u) + maxwellian_value<D>(v, 0.5 * mass, temperature, -u);
  });
}

/// All mass on one node (mass / h^d there).
template <int D>
DistributionField<D> spike(const PhaseGrid<D>& grid, double mass, const Index<D>& node) {
  DistributionField<D> f(grid);
  const auto& vg = grid.vgrid;
  if (vg.on_boundary_layer(node)) throw PreconditionError("spike node on the outer velocity layer");
  for (int ix = 0; ix < f.slices(); ++ix) f.slice(ix)[vg.flatten(node)] = mass / vg.cell_volume();
  return f;
}

/// c0 (1 + |v|)^{-p}, cut off by the support window.
template <int D>
DistributionField<D> polynomial_tail(const PhaseGrid<D>& grid, double c0, double p) {
  return sample_field<D>(grid, [&](const Vec<D>& v) { return c0 * std::pow(1.0 + v.norm(), -p); });
}

/// C0 exp(-alpha |v|^2).
template <int D>
DistributionField<D> gaussian_envelope(const PhaseGrid<D>& grid, double c0, double alpha) {
  return sample_field<D>(grid, [&](const Vec<D>& v) { return c0 * std::exp(-alpha * v.squaredNorm()); });
}

/// Inhomogeneous Maxwellian with density 1 + amplitude sin(2 pi x / X).
template <int D>
DistributionField<D> modulated_maxwellian(const PhaseGrid<D>& grid, double amplitude, double temperature = 1.0) {
  if (!grid.x) throw PreconditionError("modulated initial data needs a spatial lattice");
  DistributionField<D> f = maxwellian<D>(grid, 1.0, temperature);
  const auto& xl = *grid.x;
  for (int ix = 0; ix < xl.points; ++ix) {
    const double rho = 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * xl.node(ix) / xl.period);
    for (auto& x : f.slice(ix)) x *= rho;
  }
  return f;
}

}  // namespace landau
