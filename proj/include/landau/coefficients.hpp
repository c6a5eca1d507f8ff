#pragma once

// Coefficients a-bar, b-bar, c-bar of the Landau operator as convolutions of f
// with cell-averaged kernels, plus the identities and bounds they satisfy.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "landau/errors.hpp"
#include "landau/grid.hpp"
#include "landau/kinetic.hpp"
#include "landau/quadrature.hpp"

namespace landau {

struct PotentialParams {
  double gamma = -1.0;
  double a_const = 1.0;
  double b_const = 1.0;
  double c_const = 1.0;

  /// Constants tied together so that b_i = -d_j a_ij and div b = c.
  static PotentialParams defaults(int d, double gamma) {
    return {gamma, 1.0, static_cast<double>(d - 1), (d - 1) * (d + gamma)};
  }

  void validate() const {
    if (!(gamma > -2.0 && gamma <= 0.0))
      throw PreconditionError("gamma must lie in (-2, 0], got " + std::to_string(gamma));
    if (!(a_const > 0.0)) throw PreconditionError("a_const must be positive");
  }

  /// Multiplier for packed component q.
  template <int D>
  double component_constant(int q) const {
    if (q < kSymEntries<D>) return a_const;
    if (q < kPacked<D> - 1) return b_const;
    return c_const;
  }
};

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Cell-averaged kernels on the offsets |m_k| <= N-1 and their spectra on the
/// zero-padded 2N lattice. Immutable after construction.
template <int D>
class KernelPack {
 public:
  KernelPack(const VelocityGrid<D>& grid, const PotentialParams& params) : grid_(grid), params_(params) {
    params.validate();
    n_ = grid.points_per_axis();
    m_ = 2 * n_;
    build_table();
    build_spectra();
  }

  ~KernelPack() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
  }

  KernelPack(const KernelPack&) = delete;
  KernelPack& operator=(const KernelPack&) = delete;

  const VelocityGrid<D>& grid() const { return grid_; }
  const PotentialParams& params() const { return params_; }
  int padded_points() const { return m_; }

  /// Unscaled cell average of the kernels over the cell at offset m (in cells).
  const Packed<D>& kernel_at_offset(const Index<D>& m) const {
    std::size_t flat = 0;
    for (int k = 0; k < D; ++k) {
      if (std::abs(m[k]) > n_ - 1) throw PreconditionError("kernel offset outside tabulated range");
      flat = flat * (2 * n_ - 1) + static_cast<std::size_t>(m[k] + n_ - 1);
    }
    return table_[flat];
  }

  /// Convolve one velocity slice with all kernels; out[q] receives plane q
  /// (constants and the cell volume already applied).
  void convolve(std::span<const double> f, std::array<std::vector<double>, kPacked<D>>& out) const {
    const std::size_t real_size = padded_real_size();
    const std::size_t spec_size = padded_spectrum_size();
    std::vector<double> pad(real_size, 0.0);
    const std::size_t nv = grid_.size();
    for (std::size_t k = 0; k < nv; ++k) pad[padded_flat(grid_.unflatten(k))] = f[k];
    std::vector<std::complex<double>> fhat(spec_size), work(spec_size);
    fftw_execute_dft_r2c(forward_, pad.data(), reinterpret_cast<fftw_complex*>(fhat.data()));
    const double norm = grid_.cell_volume() / static_cast<double>(real_size);
    for (int q = 0; q < kPacked<D>; ++q) {
      const auto& kh = spectra_[q];
      for (std::size_t i = 0; i < spec_size; ++i) work[i] = fhat[i] * kh[i];
      fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(work.data()), pad.data());
      const double s = norm * params_.template component_constant<D>(q);
      auto& plane = out[q];
      plane.resize(nv);
      for (std::size_t k = 0; k < nv; ++k) plane[k] = s * pad[padded_flat(grid_.unflatten(k))];
    }
  }

 private:
  std::size_t padded_real_size() const {
    std::size_t s = 1;
    for (int k = 0; k < D; ++k) s *= static_cast<std::size_t>(m_);
    return s;
  }
  std::size_t padded_spectrum_size() const { return padded_real_size() / m_ * (m_ / 2 + 1); }

  std::size_t padded_flat(const Index<D>& i) const {
    std::size_t flat = 0;
    for (int k = 0; k < D; ++k) flat = flat * m_ + static_cast<std::size_t>(i[k]);
    return flat;
  }

  void build_table() {
    const int side = 2 * n_ - 1;
    std::size_t total = 1, quarter = 1;
    for (int k = 0; k < D; ++k) {
      total *= side;
      quarter *= n_;
    }
    table_.assign(total, Packed<D>{});
    const double h = grid_.spacing();
    // Only m >= 0 is integrated; the rest follows by reflection symmetry.
    std::vector<Packed<D>> base(quarter);
#pragma omp parallel for schedule(dynamic, 16)
    for (long long flat = 0; flat < static_cast<long long>(quarter); ++flat) {
      Vec<D> c;
      long long r = flat;
      for (int k = D - 1; k >= 0; --k) {
        c[k] = static_cast<double>(r % n_) * h;
        r /= n_;
      }
      base[flat] = kernel_cell_average<D>(c, h, params_.gamma);
    }
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t r = flat, qflat = 0, mul = 1;
      std::array<double, D> sign;
      Index<D> m;
      for (int k = D - 1; k >= 0; --k) {
        m[k] = static_cast<int>(r % side) - (n_ - 1);
        r /= side;
      }
      for (int k = D - 1; k >= 0; --k) {
        sign[k] = m[k] < 0 ? -1.0 : 1.0;
        qflat += static_cast<std::size_t>(std::abs(m[k])) * mul;
        mul *= n_;
      }
      table_[flat] = detail::reflect<D>(base[qflat], sign);
    }
  }

  void build_spectra() {
    const std::size_t real_size = padded_real_size();
    const std::size_t spec_size = padded_spectrum_size();
    std::vector<double> real(real_size);
    std::vector<std::complex<double>> spec(spec_size);
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      std::array<int, D> dims;
      dims.fill(m_);
      forward_ = fftw_plan_dft_r2c(D, dims.data(), real.data(), reinterpret_cast<fftw_complex*>(spec.data()),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
      backward_ = fftw_plan_dft_c2r(D, dims.data(), reinterpret_cast<fftw_complex*>(spec.data()), real.data(),
                                    FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
    }
    if (!forward_ || !backward_) throw std::runtime_error("FFTW planning failed");

    const int side = 2 * n_ - 1;
    for (int q = 0; q < kPacked<D>; ++q) {
      std::fill(real.begin(), real.end(), 0.0);
      for (std::size_t flat = 0; flat < table_.size(); ++flat) {
        std::size_t r = flat;
        Index<D> pos;
        for (int k = D - 1; k >= 0; --k) {
          const int mk = static_cast<int>(r % side) - (n_ - 1);
          r /= side;
          pos[k] = mk >= 0 ? mk : mk + m_;
        }
        real[padded_flat(pos)] = table_[flat][q];
      }
      spectra_[q].resize(spec_size);
      fftw_execute_dft_r2c(forward_, real.data(), reinterpret_cast<fftw_complex*>(spectra_[q].data()));
    }
  }

  VelocityGrid<D> grid_;
  PotentialParams params_;
  int n_ = 0;
  int m_ = 0;
  std::vector<Packed<D>> table_;
  std::array<std::vector<std::complex<double>>, kPacked<D>> spectra_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

template <int D>
std::shared_ptr<const KernelPack<D>> precompute_kernels(const VelocityGrid<D>& grid, const PotentialParams& params) {
  return std::make_shared<const KernelPack<D>>(grid, params);
}

/// a-bar, b-bar, c-bar on the velocity lattice of one x-slice.
template <int D>
struct CoefficientField {
  VelocityGrid<D> grid;
  std::array<std::vector<double>, kPacked<D>> planes;
  double source_mass = 0.0;

  explicit CoefficientField(VelocityGrid<D> g) : grid(g) {
    for (auto& p : planes) p.assign(grid.size(), 0.0);
  }

  Packed<D> packed(std::size_t k) const {
    Packed<D> p;
    for (int q = 0; q < kPacked<D>; ++q) p[q] = planes[q][k];
    return p;
  }
  Mat<D> a(std::size_t k) const { return unpack_a<D>(packed(k)); }
  Vec<D> b(std::size_t k) const { return unpack_b<D>(packed(k)); }
  double c(std::size_t k) const { return planes[kPacked<D> - 1][k]; }
  double a(std::size_t k, int i, int j) const { return planes[sym_index<D>(i, j)][k]; }

  double max_spectral_radius() const {
    double r = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      Eigen::SelfAdjointEigenSolver<Mat<D>> es(a(k), Eigen::EigenvaluesOnly);
      r = std::max(r, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    return r;
  }
};

template <int D>
void require_support(std::span<const double> f, const VelocityGrid<D>& grid, int slice = 0) {
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (f[k] != 0.0 && grid.on_boundary_layer(grid.unflatten(k)))
      throw SupportViolation("f is nonzero on the outer velocity layer (slice " + std::to_string(slice) +
                             ", node " + std::to_string(k) + ")");
}

template <int D>
CoefficientField<D> compute_slice_coefficients(std::span<const double> f, const KernelPack<D>& pack, int slice = 0) {
  require_support(f, pack.grid(), slice);
  CoefficientField<D> cf(pack.grid());
  pack.convolve(f, cf.planes);
  double m = 0.0;
  for (double x : f) m += x;
  cf.source_mass = m * pack.grid().cell_volume();
  return cf;
}

/// One coefficient field per x-slice (a single entry for homogeneous f).
template <int D>
std::vector<CoefficientField<D>> compute_coefficients(const DistributionField<D>& f, const KernelPack<D>& pack) {
  if (!(f.grid.vgrid == pack.grid())) throw PreconditionError("kernel pack built for a different velocity grid");
  const int ns = f.slices();
  for (int ix = 0; ix < ns; ++ix) require_support(f.slice(ix), pack.grid(), ix);
  std::vector<CoefficientField<D>> out(ns, CoefficientField<D>(pack.grid()));
#pragma omp parallel for schedule(static)
  for (int ix = 0; ix < ns; ++ix) out[ix] = compute_slice_coefficients(f.slice(ix), pack, ix);
  return out;
}

/// Direct-sum convolution at one node with the same tabulated kernels.
template <int D>
Packed<D> direct_coefficients_at(std::span<const double> f, const KernelPack<D>& pack, const Index<D>& node) {
  const auto& g = pack.grid();
  Packed<D> acc{};
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (f[j] == 0.0) continue;
    const Index<D> src = g.unflatten(j);
    Index<D> m;
    for (int k = 0; k < D; ++k) m[k] = node[k] - src[k];
    accumulate<D>(acc, pack.kernel_at_offset(m), f[j]);
  }
  const auto& p = pack.params();
  for (int q = 0; q < kPacked<D>; ++q) acc[q] *= g.cell_volume() * p.template component_constant<D>(q);
  return acc;
}

/// Coefficients at an arbitrary velocity v: f is piecewise constant on cells
/// and each cell contributes the exact integral of the kernel over v - cell.
template <int D>
Packed<D> coefficients_at_point(std::span<const double> f, const VelocityGrid<D>& g, const PotentialParams& p,
                                const Vec<D>& v) {
  Packed<D> acc{};
  const double h = g.spacing();
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (f[j] == 0.0) continue;
    accumulate<D>(acc, kernel_cell_average<D>(v - g.velocity(j), h, p.gamma), f[j]);
  }
  for (int q = 0; q < kPacked<D>; ++q) acc[q] *= g.cell_volume() * p.template component_constant<D>(q);
  return acc;
}

template <int D>
struct BoundCertificate {
  std::string inequality_id;
  double constant = 0.0;
  Vec<D> worst_point = Vec<D>::Zero();
  bool holds = false;
};

struct DivergenceResidual {
  double residual_ab = 0.0;  // max_i |d_j a_ij + b_i|
  double residual_bc = 0.0;  // max |div b - c|
  double tolerance = 0.0;
};

/// Calibrated on unit-temperature Maxwellians, L = 8: max residual / (h^2 mass)
/// is 0.22 or less for gamma in {-0.5, -1, -1.5} and N in {32, ..., 256}.
inline constexpr double kIdentityConstant = 2.0;

template <int D>
std::pair<DivergenceResidual, std::array<BoundCertificate<D>, 2>> verify_divergence_identities(
    const CoefficientField<D>& cf, double c_id = kIdentityConstant) {
  const auto& g = cf.grid;
  const double h = g.spacing();
  const int n = g.points_per_axis();
  DivergenceResidual res;
  res.tolerance = c_id * h * h * std::max(cf.source_mass, std::numeric_limits<double>::min());
  std::array<BoundCertificate<D>, 2> certs;
  certs[0].inequality_id = "identity_b_plus_div_a";
  certs[1].inequality_id = "identity_div_b_minus_c";
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Index<D> idx = g.unflatten(k);
    bool interior = true;
    for (int a = 0; a < D; ++a) interior = interior && idx[a] > 0 && idx[a] < n - 1;
    if (!interior) continue;
    auto diff = [&](const std::vector<double>& plane, int axis) {
      const std::size_t s = g.stride(axis);
      return (plane[k + s] - plane[k - s]) / (2.0 * h);
    };
    for (int i = 0; i < D; ++i) {
      double r = cf.planes[kSymEntries<D> + i][k];
      for (int j = 0; j < D; ++j) r += diff(cf.planes[sym_index<D>(i, j)], j);
      if (std::abs(r) > res.residual_ab) {
        res.residual_ab = std::abs(r);
        certs[0].worst_point = g.velocity(idx);
      }
    }
    double r = -cf.planes[kPacked<D> - 1][k];
    for (int i = 0; i < D; ++i) r += diff(cf.planes[kSymEntries<D> + i], i);
    if (std::abs(r) > res.residual_bc) {
      res.residual_bc = std::abs(r);
      certs[1].worst_point = g.velocity(idx);
    }
  }
  certs[0].constant = res.residual_ab;
  certs[1].constant = res.residual_bc;
  certs[0].holds = res.residual_ab <= res.tolerance;
  certs[1].holds = res.residual_bc <= res.tolerance;
  return {res, certs};
}

struct CertificateOptions {
  double radius_fraction = 0.5;  // sweep |v| <= fraction * L
  double lower_floor = 1e-3;
};

namespace detail {
template <int D>
double min_perp_quadratic(const Mat<D>& a, const Vec<D>& vhat) {
  if constexpr (D == 2) {
    const Vec<D> e(-vhat[1], vhat[0]);
    return e.dot(a * e);
  } else {
    Vec<D> u = vhat.unitOrthogonal();
    Vec<D> w = vhat.cross(u);
    Eigen::Matrix2d m;
    m << u.dot(a * u), u.dot(a * w), w.dot(a * u), w.dot(a * w);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
  }
}

template <int D>
void track(BoundCertificate<D>& c, double ratio, const Vec<D>& v, bool lower) {
  if (lower ? ratio < c.constant : ratio > c.constant) {
    c.constant = ratio;
    c.worst_point = v;
  }
}
}  // namespace detail

/// The four directional bounds on a-bar; the extremum over all unit e comes
/// from the eigenvalues, and the perpendicular minimum from the restriction
/// to the plane orthogonal to v.
template <int D>
std::vector<BoundCertificate<D>> certify_a_bounds(const CoefficientField<D>& cf, double gamma,
                                                  const CertificateOptions& opt = {}) {
  const auto& g = cf.grid;
  const double inf = std::numeric_limits<double>::infinity();
  BoundCertificate<D> lower_all{"a_lower_all", inf}, lower_perp{"a_lower_perp", inf};
  BoundCertificate<D> upper_all{"a_upper_all", 0.0}, upper_par{"a_upper_par", 0.0};
  const double rmax = opt.radius_fraction * g.half_width();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec<D> v = g.velocity(k);
    const double s = v.norm();
    if (s > rmax) continue;
    const Mat<D> a = cf.a(k);
    Eigen::SelfAdjointEigenSolver<Mat<D>> es(a, Eigen::EigenvaluesOnly);
    const double w_soft = std::pow(1.0 + s, gamma);
    const double w_hard = std::pow(1.0 + s, gamma + 2.0);
    const Vec<D> vhat = v / s;
    detail::track(lower_all, es.eigenvalues()[0] / w_soft, v, true);
    detail::track(lower_perp, detail::min_perp_quadratic<D>(a, vhat) / w_hard, v, true);
    detail::track(upper_all, es.eigenvalues()[D - 1] / w_hard, v, false);
    detail::track(upper_par, vhat.dot(a * vhat) / w_soft, v, false);
  }
  lower_all.holds = lower_all.constant >= opt.lower_floor && std::isfinite(lower_all.constant);
  lower_perp.holds = lower_perp.constant >= opt.lower_floor && std::isfinite(lower_perp.constant);
  upper_all.holds = std::isfinite(upper_all.constant) && upper_all.constant > 0.0;
  upper_par.holds = std::isfinite(upper_par.constant) && upper_par.constant > 0.0;
  return {lower_all, lower_perp, upper_all, upper_par};
}

/// max f over nodes within distance rho of v, rho clamped below by h.
template <int D>
double local_sup(std::span<const double> f, const VelocityGrid<D>& g, const Vec<D>& v, double rho) {
  rho = std::max(rho, g.spacing());
  const double h = g.spacing();
  Index<D> lo, hi;
  for (int k = 0; k < D; ++k) {
    lo[k] = std::max(0, static_cast<int>(std::floor((v[k] - rho + g.half_width()) / h - 0.5)));
    hi[k] = std::min(g.points_per_axis() - 1, static_cast<int>(std::ceil((v[k] + rho + g.half_width()) / h - 0.5)));
  }
  double m = 0.0;
  Index<D> idx = lo;
  while (true) {
    if ((g.velocity(idx) - v).norm() <= rho) m = std::max(m, f[g.flatten(idx)]);
    int k = D - 1;
    while (k >= 0 && ++idx[k] > hi[k]) {
      idx[k] = lo[k];
      --k;
    }
    if (k < 0) break;
  }
  return m;
}

inline double local_sup_radius(double speed, int d) { return speed < 2.0 ? 1.0 : std::pow(speed, -2.0 / d); }

/// Right-hand side of the c-bar bound at |v| = s given the local sup F.
inline double c_bound_rhs(double s, double F, double gamma, int d) {
  const double branch = -2.0 * d / (d + 2.0);
  const double e = gamma >= branch ? gamma : -2.0 - 2.0 * gamma / d;
  return std::pow(1.0 + s, e) * std::pow(1.0 + F, -gamma / d);
}

inline double b_bound_rhs(double s, double F, double gamma, int d) {
  if (gamma >= -1.0) return std::pow(1.0 + s, gamma + 1.0);
  return std::pow(1.0 + s, gamma + 1.0) * std::pow(1.0 + F, -(gamma + 1.0) / d);
}

template <int D>
std::vector<BoundCertificate<D>> certify_bc_bounds(const CoefficientField<D>& cf, std::span<const double> f,
                                                   double gamma, const CertificateOptions& opt = {}) {
  const auto& g = cf.grid;
  BoundCertificate<D> cc{gamma >= -2.0 * D / (D + 2.0) ? "c_upper_branch1" : "c_upper_branch2", 0.0};
  BoundCertificate<D> bc{gamma >= -1.0 ? "b_upper_branch1" : "b_upper_branch2", 0.0};
  const double rmax = opt.radius_fraction * g.half_width();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec<D> v = g.velocity(k);
    const double s = v.norm();
    if (s > rmax) continue;
    const double F = local_sup<D>(f, g, v, local_sup_radius(s, D));
    detail::track(cc, cf.c(k) / c_bound_rhs(s, F, gamma, D), v, false);
    detail::track(bc, cf.b(k).norm() / b_bound_rhs(s, F, gamma, D), v, false);
  }
  cc.holds = std::isfinite(cc.constant);
  bc.holds = std::isfinite(bc.constant);
  return {cc, bc};
}

/// A = T^{-1} a T^{-1}, B = T^{-1} b, C = c sampled at z in Q_R around z0.
template <int D>
struct TransformedSample {
  Vec<D> v;  // pre-image velocity in B_R
  Mat<D> A;
  Vec<D> B;
  double C = 0.0;
};

template <int D>
struct TransformedCoefficients {
  KineticPoint<D> base;
  double radius = 0.0;
  std::vector<TransformedSample<D>> samples;
  double lambda = 0.0;  // smallest eigenvalue of A over the samples
  double Lambda = 0.0;  // largest
  double max_B = 0.0;
  double max_C = 0.0;
};

/// Largest admissible radius: min(sqrt(t0), |v0|^{-1-gamma/2}); with c1 = 1
/// this keeps |T v| <= 1 on B_R.
template <int D>
double transformed_radius_limit(const KineticPoint<D>& z0, double gamma) {
  const double s = z0.v.norm();
  const double cap = s < 2.0 ? 1.0 : std::pow(s, -1.0 - gamma / 2.0);
  return std::min(std::sqrt(std::max(z0.t, 0.0)), cap);
}

template <int D>
TransformedCoefficients<D> transformed_coefficients(std::span<const double> f, const VelocityGrid<D>& g,
                                                    const PotentialParams& p, const KineticPoint<D>& z0, double R,
                                                    int samples_per_axis = 5) {
  const double limit = transformed_radius_limit(z0, p.gamma);
  if (!(R > 0.0 && R < limit))
    throw PreconditionError("R must lie in (0, " + std::to_string(limit) + "), got " + std::to_string(R));
  const auto tr = transform_or_identity<D>(z0.v, p.gamma);
  const Mat<D> Tinv = tr.inverse_matrix();
  TransformedCoefficients<D> out;
  out.base = z0;
  out.radius = R;
  out.lambda = std::numeric_limits<double>::infinity();
  Index<D> idx{};
  const int m = std::max(samples_per_axis, 1);
  while (true) {
    Vec<D> v;
    for (int k = 0; k < D; ++k) v[k] = m == 1 ? 0.0 : R * (-1.0 + 2.0 * idx[k] / (m - 1.0)) * 0.999;
    if (v.norm() < R) {
      const Vec<D> vt = z0.v + tr.apply(v);
      const Packed<D> pk = coefficients_at_point<D>(f, g, p, vt);
      TransformedSample<D> s;
      s.v = v;
      s.A = Tinv * unpack_a<D>(pk) * Tinv;
      s.B = Tinv * unpack_b<D>(pk);
      s.C = unpack_c<D>(pk);
      Eigen::SelfAdjointEigenSolver<Mat<D>> es(s.A, Eigen::EigenvaluesOnly);
      out.lambda = std::min(out.lambda, es.eigenvalues()[0]);
      out.Lambda = std::max(out.Lambda, es.eigenvalues()[D - 1]);
      out.max_B = std::max(out.max_B, s.B.norm());
      out.max_C = std::max(out.max_C, std::abs(s.C));
      out.samples.push_back(s);
    }
    int k = D - 1;
    while (k >= 0 && ++idx[k] == m) idx[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

template <int D>
struct EllipticitySweep {
  std::vector<TransformedCoefficients<D>> points;
  double lambda_spread = 0.0;  // max/min of lambda across the sweep
  double Lambda_spread = 0.0;
  BoundCertificate<D> certificate;
};

/// Ellipticity of A across base velocities; holds iff every lambda is positive
/// and lambda, Lambda each vary by less than max_factor.
template <int D>
EllipticitySweep<D> certify_ellipticity_sweep(std::span<const double> f, const VelocityGrid<D>& g,
                                              const PotentialParams& p, const std::vector<Vec<D>>& bases, double t0,
                                              double max_factor = 2.0, int samples_per_axis = 5) {
  EllipticitySweep<D> sw;
  double lmin = std::numeric_limits<double>::infinity(), lmax = 0.0;
  double Lmin = std::numeric_limits<double>::infinity(), Lmax = 0.0;
  sw.certificate.inequality_id = "transformed_ellipticity";
  sw.certificate.constant = std::numeric_limits<double>::infinity();
  for (const auto& v0 : bases) {
    KineticPoint<D> z0;
    z0.t = t0;
    z0.v = v0;
    const double R = 0.5 * transformed_radius_limit(z0, p.gamma);
    auto tc = transformed_coefficients<D>(f, g, p, z0, R, samples_per_axis);
    lmin = std::min(lmin, tc.lambda);
    lmax = std::max(lmax, tc.lambda);
    Lmin = std::min(Lmin, tc.Lambda);
    Lmax = std::max(Lmax, tc.Lambda);
    if (tc.lambda < sw.certificate.constant) {
      sw.certificate.constant = tc.lambda;
      sw.certificate.worst_point = v0;
    }
    sw.points.push_back(std::move(tc));
  }
  sw.lambda_spread = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  sw.Lambda_spread = Lmin > 0.0 ? Lmax / Lmin : std::numeric_limits<double>::infinity();
  sw.certificate.holds = lmin > 0.0 && sw.lambda_spread <= max_factor && sw.Lambda_spread <= max_factor;
  return sw;
}

}  // namespace landau
