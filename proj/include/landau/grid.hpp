#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "landau/errors.hpp"

namespace landau {

template <int D>
using Vec = Eigen::Matrix<double, D, 1>;
template <int D>
using Mat = Eigen::Matrix<double, D, D>;
template <int D>
using Index = std::array<int, D>;

/// Cell-centred uniform lattice on the box [-L, L]^D.
///
/// Nodes sit at v_k = -L + (k + 1/2) h along every axis, so no node lands on
/// v = 0. The representation is (L, N); the spacing is derived.
template <int D>
class VelocityGrid {
  static_assert(D == 2 || D == 3, "velocity dimension must be 2 or 3");

 public:
  static constexpr int dim = D;

  VelocityGrid(double half_width, int points_per_axis)
      : half_width_(half_width), n_(points_per_axis) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw PreconditionError("velocity half width must be positive");
    if (points_per_axis < 8 || points_per_axis % 2 != 0)
      throw PreconditionError("points per axis must be even and >= 8");
  }

  double half_width() const { return half_width_; }
  int points_per_axis() const { return n_; }
  double spacing() const { return 2.0 * half_width_ / n_; }
  double cell_volume() const { return std::pow(spacing(), D); }

  std::size_t size() const {
    std::size_t s = 1;
    for (int k = 0; k < D; ++k) s *= static_cast<std::size_t>(n_);
    return s;
  }

  double node(int k) const { return -half_width_ + (k + 0.5) * spacing(); }

  // Last axis varies fastest.
  std::size_t flatten(const Index<D>& idx) const {
    std::size_t flat = 0;
    for (int k = 0; k < D; ++k) flat = flat * n_ + static_cast<std::size_t>(idx[k]);
    return flat;
  }

  Index<D> unflatten(std::size_t flat) const {
    Index<D> idx{};
    for (int k = D - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(flat % n_);
      flat /= n_;
    }
    return idx;
  }

  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int k = D - 1; k > axis; --k) s *= static_cast<std::size_t>(n_);
    return s;
  }

  Vec<D> velocity(const Index<D>& idx) const {
    Vec<D> v;
    for (int k = 0; k < D; ++k) v[k] = node(idx[k]);
    return v;
  }

  Vec<D> velocity(std::size_t flat) const { return velocity(unflatten(flat)); }

  /// True on the outermost cell layer of the box.
  bool on_boundary_layer(const Index<D>& idx) const {
    for (int k = 0; k < D; ++k)
      if (idx[k] == 0 || idx[k] == n_ - 1) return true;
    return false;
  }

  bool operator==(const VelocityGrid&) const = default;

 private:
  double half_width_;
  int n_;
};

/// One periodic spatial slab in x (period X, Nx nodes) times the velocity
/// lattice. Absent x means a spatially homogeneous field.
struct SpatialLattice {
  double period = 0.0;
  int points = 0;

  double spacing() const { return period / points; }
  double node(int i) const { return i * spacing(); }
  bool operator==(const SpatialLattice&) const = default;
};

template <int D>
struct PhaseGrid {
  VelocityGrid<D> vgrid;
  std::optional<SpatialLattice> x;

  explicit PhaseGrid(VelocityGrid<D> v, std::optional<SpatialLattice> xl = std::nullopt)
      : vgrid(v), x(xl) {
    if (x && (!(x->period > 0.0) || x->points < 1))
      throw PreconditionError("spatial lattice needs period > 0 and at least one point");
  }

  bool inhomogeneous() const { return x.has_value(); }
  int slices() const { return x ? x->points : 1; }
  bool operator==(const PhaseGrid&) const = default;
};

/// Nonnegative density over the phase grid, x-major then v lexicographic.
template <int D>
struct DistributionField {
  PhaseGrid<D> grid;
  double time = 0.0;
  std::vector<double> values;

  explicit DistributionField(PhaseGrid<D> g, double t = 0.0)
      : grid(std::move(g)), time(t), values(grid.vgrid.size() * grid.slices(), 0.0) {}

  std::size_t slice_size() const { return grid.vgrid.size(); }
  int slices() const { return grid.slices(); }

  std::span<double> slice(int ix) {
    return {values.data() + static_cast<std::size_t>(ix) * slice_size(), slice_size()};
  }
  std::span<const double> slice(int ix) const {
    return {values.data() + static_cast<std::size_t>(ix) * slice_size(), slice_size()};
  }

  double max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  }
  double min_value() const {
    return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
  }

  /// Largest |f| found on the outermost velocity layer of any slice.
  double boundary_layer_max() const {
    const auto& vg = grid.vgrid;
    double m = 0.0;
    for (int ix = 0; ix < slices(); ++ix) {
      auto s = slice(ix);
      for (std::size_t k = 0; k < s.size(); ++k)
        if (vg.on_boundary_layer(vg.unflatten(k))) m = std::max(m, std::abs(s[k]));
    }
    return m;
  }

  DistributionField& operator+=(const DistributionField& o) {
    if (!(grid == o.grid)) throw PreconditionError("field grids differ");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  DistributionField& operator*=(double s) {
    for (auto& v : values) v *= s;
    return *this;
  }
};

/// Smooth per-axis window: 1 in the interior, 0 on the outer two cells.
///
/// The transition band ends at |v_k| = L - 2h and is max(4h, 0.1 L) wide; the
/// profile is the C-infinity exp(-1/x) step.
inline double support_window(double vk, double half_width, double h) {
  const double end = half_width - 2.0 * h;
  const double band = std::max(4.0 * h, 0.1 * half_width);
  const double start = end - band;
  const double u = std::abs(vk);
  if (u <= start) return 1.0;
  if (u >= end) return 0.0;
  auto bump = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  const double s = (end - u) / band;
  return bump(s) / (bump(s) + bump(1.0 - s));
}

template <int D>
double support_window(const VelocityGrid<D>& g, const Index<D>& idx) {
  double w = 1.0;
  for (int k = 0; k < D; ++k) w *= support_window(g.node(idx[k]), g.half_width(), g.spacing());
  return w;
}

template <int D>
void apply_support_window(DistributionField<D>& f) {
  const auto& vg = f.grid.vgrid;
  std::vector<double> window(vg.size());
  for (std::size_t k = 0; k < vg.size(); ++k) window[k] = support_window<D>(vg, vg.unflatten(k));
  for (int ix = 0; ix < f.slices(); ++ix) {
    auto s = f.slice(ix);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] *= window[k];
  }
}

}  // namespace landau
