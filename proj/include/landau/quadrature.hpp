#pragma once

// Pointwise Landau kernels and their exact box averages.
//
// Packed layout of one kernel sample: upper triangle of the a-kernel
// (row-major, i <= j), then the d components of the b-kernel, then c.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "landau/grid.hpp"

namespace landau {

template <int D>
inline constexpr int kSymEntries = D * (D + 1) / 2;
template <int D>
inline constexpr int kPacked = kSymEntries<D> + D + 1;

template <int D>
using Packed = std::array<double, kPacked<D>>;

template <int D>
constexpr int sym_index(int i, int j) {
  if (i > j) std::swap(i, j);
  return i * D - i * (i - 1) / 2 + (j - i);
}

template <int D>
Mat<D> unpack_a(const Packed<D>& p) {
  Mat<D> a;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) a(i, j) = p[sym_index<D>(i, j)];
  return a;
}

template <int D>
Vec<D> unpack_b(const Packed<D>& p) {
  Vec<D> b;
  for (int i = 0; i < D; ++i) b[i] = p[kSymEntries<D> + i];
  return b;
}

template <int D>
double unpack_c(const Packed<D>& p) {
  return p[kPacked<D> - 1];
}

/// a = |w|^{g+2} (I - w^ w^), b = |w|^g w, c = |w|^g; all zero at w = 0.
template <int D>
Packed<D> kernel_point(const Vec<D>& w, double gamma) {
  Packed<D> out{};
  const double r2 = w.squaredNorm();
  if (r2 == 0.0) return out;
  const double rg = std::pow(r2, gamma / 2.0);
  for (int i = 0; i < D; ++i)
    for (int j = i; j < D; ++j)
      out[sym_index<D>(i, j)] = rg * ((i == j ? r2 : 0.0) - w[i] * w[j]);
  for (int i = 0; i < D; ++i) out[kSymEntries<D> + i] = rg * w[i];
  out[kPacked<D> - 1] = rg;
  return out;
}

/// Gauss-Legendre rule on [-1, 1] (Newton on the three-term recurrence).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(int n) {
  GaussRule g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = g.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return g;
}

inline const GaussRule& cached_rule(int n) {
  static const GaussRule r4 = gauss_legendre(4);
  static const GaussRule r8 = gauss_legendre(8);
  static const GaussRule r12 = gauss_legendre(12);
  if (n == 4) return r4;
  if (n == 8) return r8;
  return r12;
}

template <int D>
void accumulate(Packed<D>& acc, const Packed<D>& x, double s) {
  for (int k = 0; k < kPacked<D>; ++k) acc[k] += s * x[k];
}

template <int D>
double packed_norm(const Packed<D>& p) {
  double m = 0.0;
  for (double x : p) m = std::max(m, std::abs(x));
  return m;
}

/// Tensor Gauss-Legendre integral over an M-dimensional box of a packed
/// integrand.
template <int D, int M>
Packed<D> tensor_gauss(const std::array<double, M>& lo, const std::array<double, M>& hi, int n,
                       const std::function<Packed<D>(const std::array<double, M>&)>& fn) {
  const GaussRule& g = cached_rule(n);
  const int npts = static_cast<int>(g.nodes.size());
  Packed<D> acc{};
  std::array<int, M> idx{};
  std::array<double, M> x{};
  double jac = 1.0;
  for (int k = 0; k < M; ++k) jac *= 0.5 * (hi[k] - lo[k]);
  while (true) {
    double w = jac;
    for (int k = 0; k < M; ++k) {
      x[k] = 0.5 * (lo[k] + hi[k]) + 0.5 * (hi[k] - lo[k]) * g.nodes[idx[k]];
      w *= g.weights[idx[k]];
    }
    accumulate<D>(acc, fn(x), w);
    int k = M - 1;
    while (k >= 0 && ++idx[k] == npts) idx[k--] = 0;
    if (k < 0) break;
  }
  return acc;
}

/// Adaptive tensor quadrature: accept a box once its 8-point estimate agrees
/// with the sum over its 2^M children.
template <int D, int M>
Packed<D> adaptive_gauss(const std::array<double, M>& lo, const std::array<double, M>& hi,
                         const std::function<Packed<D>(const std::array<double, M>&)>& fn,
                         double abs_tol, int depth = 0) {
  const Packed<D> whole = tensor_gauss<D, M>(lo, hi, 8, fn);
  Packed<D> split{};
  for (int c = 0; c < (1 << M); ++c) {
    std::array<double, M> clo, chi;
    for (int k = 0; k < M; ++k) {
      const double mid = 0.5 * (lo[k] + hi[k]);
      clo[k] = (c >> k) & 1 ? mid : lo[k];
      chi[k] = (c >> k) & 1 ? hi[k] : mid;
    }
    accumulate<D>(split, tensor_gauss<D, M>(clo, chi, 8, fn), 1.0);
  }
  Packed<D> diff = split;
  accumulate<D>(diff, whole, -1.0);
  if (packed_norm<D>(diff) <= abs_tol || depth >= 14) return split;
  Packed<D> acc{};
  for (int c = 0; c < (1 << M); ++c) {
    std::array<double, M> clo, chi;
    for (int k = 0; k < M; ++k) {
      const double mid = 0.5 * (lo[k] + hi[k]);
      clo[k] = (c >> k) & 1 ? mid : lo[k];
      chi[k] = (c >> k) & 1 ? hi[k] : mid;
    }
    accumulate<D>(acc, adaptive_gauss<D, M>(clo, chi, fn, abs_tol / (1 << M), depth + 1), 1.0);
  }
  return acc;
}

namespace detail {

/// Integral of the kernel over [0, a_1] x ... x [0, a_D] (origin at a corner).
/// The box is the union of the pyramids with apex 0 over the D far faces; for a
/// kernel homogeneous of degree q, the pyramid over x_k = a_k integrates to
/// a_k / (D + q) times the face integral.
template <int D>
Packed<D> corner_box_integral(const std::array<double, D>& a, double gamma, double rel_tol) {
  Packed<D> total{};
  double vol = 1.0;
  for (int k = 0; k < D; ++k) vol *= a[k];
  if (vol == 0.0) return total;
  const double amax = *std::max_element(a.begin(), a.end());
  const double scale = std::pow(amax, gamma) * std::pow(amax, 2.0) * vol / amax;
  for (int k = 0; k < D; ++k) {
    std::array<double, D - 1> lo{}, hi{};
    for (int j = 0, m = 0; j < D; ++j)
      if (j != k) hi[m++] = a[j];
    std::function<Packed<D>(const std::array<double, D - 1>&)> face =
        [&](const std::array<double, D - 1>& p) {
          Vec<D> w;
          for (int j = 0, m = 0; j < D; ++j) w[j] = j == k ? a[k] : p[m++];
          return kernel_point<D>(w, gamma);
        };
    const Packed<D> fint = adaptive_gauss<D, D - 1>(lo, hi, face, rel_tol * scale);
    // a-block degree g+2, b-block g+1, c-block g
    for (int q = 0; q < kPacked<D>; ++q) {
      const double deg = q < kSymEntries<D> ? gamma + 2.0 : (q < kPacked<D> - 1 ? gamma + 1.0 : gamma);
      total[q] += a[k] / (D + deg) * fint[q];
    }
  }
  return total;
}

/// Reflect a packed sample through w -> S w with S = diag(sign).
template <int D>
Packed<D> reflect(const Packed<D>& p, const std::array<double, D>& sign) {
  Packed<D> out = p;
  for (int i = 0; i < D; ++i)
    for (int j = i; j < D; ++j) out[sym_index<D>(i, j)] *= sign[i] * sign[j];
  for (int i = 0; i < D; ++i) out[kSymEntries<D> + i] *= sign[i];
  return out;
}

}  // namespace detail

/// Average of the packed kernel over the box [lo, hi]. Boxes whose closure
/// holds the origin are split into corner boxes and integrated exactly in the
/// radial direction; others use tensor Gauss-Legendre, adaptive when close to
/// the singularity.
template <int D>
Packed<D> kernel_box_average(const Vec<D>& lo, const Vec<D>& hi, double gamma, double rel_tol = 1e-13) {
  double vol = 1.0;
  for (int k = 0; k < D; ++k) vol *= hi[k] - lo[k];
  bool straddles = true;
  for (int k = 0; k < D; ++k) straddles = straddles && lo[k] <= 0.0 && hi[k] >= 0.0;

  Packed<D> total{};
  if (straddles) {
    for (int c = 0; c < (1 << D); ++c) {
      std::array<double, D> a, sign;
      for (int k = 0; k < D; ++k) {
        sign[k] = (c >> k) & 1 ? -1.0 : 1.0;
        a[k] = sign[k] > 0 ? hi[k] : -lo[k];
      }
      accumulate<D>(total, detail::reflect<D>(detail::corner_box_integral<D>(a, gamma, rel_tol), sign),
                    1.0);
    }
  } else {
    std::array<double, D> blo, bhi;
    double dist2 = 0.0, size = 0.0;
    for (int k = 0; k < D; ++k) {
      blo[k] = lo[k];
      bhi[k] = hi[k];
      const double gap = lo[k] > 0.0 ? lo[k] : (hi[k] < 0.0 ? -hi[k] : 0.0);
      dist2 += gap * gap;
      size = std::max(size, hi[k] - lo[k]);
    }
    std::function<Packed<D>(const std::array<double, D>&)> fn = [&](const std::array<double, D>& x) {
      Vec<D> w;
      for (int k = 0; k < D; ++k) w[k] = x[k];
      return kernel_point<D>(w, gamma);
    };
    const double dist = std::sqrt(dist2);
    if (dist > 8.0 * size) {
      total = tensor_gauss<D, D>(blo, bhi, 4, fn);
    } else if (dist > 2.0 * size) {
      total = tensor_gauss<D, D>(blo, bhi, 8, fn);
    } else {
      const double far = dist + size;
      const double scale = std::pow(far, gamma) * std::max(far * far, 1.0) * vol;
      total = adaptive_gauss<D, D>(blo, bhi, fn, rel_tol * scale);
    }
  }
  for (auto& x : total) x /= vol;
  return total;
}

/// Box average over the cube of side h centred at c.
template <int D>
Packed<D> kernel_cell_average(const Vec<D>& c, double h, double gamma) {
  const Vec<D> half = Vec<D>::Constant(0.5 * h);
  return kernel_box_average<D>(c - half, c + half, gamma);
}

}  // namespace landau
