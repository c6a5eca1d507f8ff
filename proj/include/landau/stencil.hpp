#pragma once

// Selling decomposition of a symmetric positive definite matrix into
// nonnegative weights along integer lattice directions:
//   D = sum_i rho_i e_i e_i^T,  rho_i >= 0.
// Second differences along the e_i then give a monotone discretisation of
// D : Hess f.

#include <array>
#include <cmath>

#include "landau/errors.hpp"
#include "landau/grid.hpp"

namespace landau {

template <int D>
inline constexpr int kSellingTerms = D == 2 ? 3 : 6;

template <int D>
struct SellingDecomposition {
  std::array<double, kSellingTerms<D>> weight{};
  std::array<Index<D>, kSellingTerms<D>> offset{};
};

namespace detail {
template <int D>
Vec<D> as_vec(const Index<D>& e) {
  Vec<D> v;
  for (int k = 0; k < D; ++k) v[k] = e[k];
  return v;
}
}  // namespace detail

template <int D>
SellingDecomposition<D> selling_decomposition(Mat<D> m) {
  const double tr = m.trace();
  SellingDecomposition<D> out;
  if (!(tr > 0.0)) return out;
  // Nudge semi-definite inputs so the reduction terminates.
  m += 1e-13 * tr * Mat<D>::Identity();
  std::array<Index<D>, D + 1> sb{};
  for (int k = 0; k < D; ++k) {
    sb[k].fill(0);
    sb[k][k] = 1;
    sb[D][k] = -1;
  }
  auto dot = [&](const Index<D>& a, const Index<D>& b) {
    return detail::as_vec<D>(a).dot(m * detail::as_vec<D>(b));
  };
  for (int iter = 0;; ++iter) {
    if (iter > 10000) throw ConvergenceError("Selling reduction did not terminate");
    bool obtuse = true;
    for (int i = 0; i <= D && obtuse; ++i)
      for (int j = i + 1; j <= D && obtuse; ++j) {
        if (dot(sb[i], sb[j]) <= 0.0) continue;
        obtuse = false;
        const Index<D> ei = sb[i];
        if constexpr (D == 2) {
          const int k = 3 - i - j;
          for (int a = 0; a < D; ++a) {
            sb[k][a] = ei[a] - sb[j][a];
            sb[i][a] = -ei[a];
          }
        } else {
          for (int k = 0; k <= D; ++k) {
            if (k == i || k == j) continue;
            for (int a = 0; a < D; ++a) sb[k][a] += ei[a];
          }
          for (int a = 0; a < D; ++a) sb[i][a] = -ei[a];
        }
      }
    if (obtuse) break;
  }
  int t = 0;
  for (int i = 0; i <= D; ++i)
    for (int j = i + 1; j <= D; ++j, ++t) {
      out.weight[t] = std::max(0.0, -dot(sb[i], sb[j]));
      if constexpr (D == 2) {
        const Index<D>& e = sb[3 - i - j];
        out.offset[t] = {-e[1], e[0]};
      } else {
        int k = -1, l = -1;
        for (int q = 0; q <= D; ++q)
          if (q != i && q != j) (k < 0 ? k : l) = q;
        const Index<D>& a = sb[k];
        const Index<D>& b = sb[l];
        out.offset[t] = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
      }
    }
  return out;
}

template <int D>
Mat<D> selling_reconstruct(const SellingDecomposition<D>& s) {
  Mat<D> m = Mat<D>::Zero();
  for (int t = 0; t < kSellingTerms<D>; ++t) {
    const Vec<D> e = detail::as_vec<D>(s.offset[t]);
    m += s.weight[t] * e * e.transpose();
  }
  return m;
}

}  // namespace landau
