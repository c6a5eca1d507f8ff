#pragma once

// Exponent calculus behind the decay generation: the one-step gain P(d, a, g),
// the correction exponent Q(g), the fixed point K* of p_g, the alpha
// bootstrap, and the time weight kappa(t).

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "landau/errors.hpp"

namespace landau {

namespace detail {
inline void require_gamma(double gamma) {
  if (!(gamma > -2.0 && gamma <= 0.0))
    throw PreconditionError("gamma must lie in (-2, 0], got " + std::to_string(gamma));
}
inline void require_dim(int d) {
  if (d < 1) throw PreconditionError("dimension must be positive");
}
}  // namespace detail

/// Branch point -2d/(d+2) separating the two regimes.
inline double gamma_branch_point(int d) { return -2.0 * d / (d + 2.0); }

inline double exponent_P(int d, double alpha, double gamma) {
  detail::require_dim(d);
  detail::require_gamma(gamma);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw PreconditionError("alpha must lie in [0, 1]");
  if (gamma >= gamma_branch_point(d)) return -1.0 - d * (1.0 + alpha) / (d + 2.0);
  // Same as -(d(4+g) + 2 + 2g + alpha d)/(d+2), grouped so (d+2) g is formed once.
  return -((4.0 * d + 2.0 + alpha * d) + (d + 2.0) * gamma) / (d + 2.0);
}

inline double exponent_Q(double gamma) {
  detail::require_gamma(gamma);
  return gamma >= -1.0 ? 0.0 : -(1.0 + gamma);
}

/// p_g(K) = C (K^{(d-g)/(d+2)} + 1) for g in (-1, 0], C (K^{(d-g)/(d+2)} + K^{-(1+g)}) otherwise.
inline double p_gamma(double K, double gamma, int d, double C) {
  const double main = std::pow(K, (d - gamma) / (d + 2.0));
  return C * (main + (gamma > -1.0 ? 1.0 : std::pow(K, -(1.0 + gamma))));
}

struct FixedPointResult {
  double K_star = 1.0;
  double residual = 0.0;     // |K* - p(K*)|
  bool separation = false;   // 2K* > p(2K*)
  bool clamped = false;      // no root above 1; K* reported as 1
};

/// Largest K >= 1 with K = p_g(K), by bisection to relative 1e-12. Both
/// exponents are below 1 so K - p(K) is eventually positive; when it is
/// positive already at K = 1 the fixed point collapses to 1.
inline FixedPointResult fixed_point_Kstar(double gamma, int d, double C) {
  detail::require_dim(d);
  detail::require_gamma(gamma);
  if (!(C > 0.0)) throw PreconditionError("fixed point needs C > 0 (no bracketing otherwise)");
  auto gap = [&](double K) { return K - p_gamma(K, gamma, d, C); };
  FixedPointResult r;
  // K - p(K) is convex on [1, inf): locate its minimum, then the last root
  // lies to the right of it.
  double b = 2.0;
  for (int guard = 0; gap(b) <= gap(0.5 * b + 0.5); ++guard) {
    b *= 2.0;
    if (guard > 2000) throw ConvergenceError("fixed point bracket did not close");
  }
  double a = 1.0;
  for (int it = 0; it < 300 && b - a > 1e-12 * b; ++it) {
    const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (gap(m1) < gap(m2))
      b = m2;
    else
      a = m1;
  }
  double lo = std::max(1.0, a), hi = 2.0 * lo;
  if (gap(lo) >= 0.0) {
    r.K_star = 1.0;
    r.clamped = gap(1.0) > 0.0;
  } else {
    int guard = 0;
    while (gap(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++guard > 2000) throw ConvergenceError("fixed point bracket did not close");
    }
    for (int it = 0; it < 400 && (hi - lo) > 1e-13 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (gap(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    r.K_star = hi;
  }
  r.residual = std::abs(gap(r.K_star));
  const double k2 = 2.0 * r.K_star;
  r.separation = k2 > p_gamma(k2, gamma, d, C);
  return r;
}

struct ExponentReport {
  double gamma = 0.0;
  int d = 3;
  std::vector<double> alpha_sequence;
  std::vector<double> P_values;
  std::vector<double> gains;  // -P - alpha at each step
  int steps = 0;
  double min_gain = 0.0;
  double K_star = 1.0;
  double C_used = 1.0;
};

/// alpha_0 = 0, alpha_{k+1} = min(1, -P(d, alpha_k, g)) until alpha = 1.
inline ExponentReport bootstrap_exponents(int d, double gamma, double C = 1.0) {
  ExponentReport rep;
  rep.gamma = gamma;
  rep.d = d;
  rep.C_used = C;
  double alpha = 0.0;
  rep.alpha_sequence.push_back(alpha);
  rep.min_gain = std::numeric_limits<double>::infinity();
  while (alpha < 1.0) {
    const double P = exponent_P(d, alpha, gamma);
    rep.P_values.push_back(P);
    rep.gains.push_back(-P - alpha);
    rep.min_gain = std::min(rep.min_gain, -P - alpha);
    if (!(-P - alpha > 0.0)) throw ConvergenceError("bootstrap stalled: no decay gained");
    alpha = std::min(1.0, -P);
    rep.alpha_sequence.push_back(alpha);
    if (++rep.steps > 1000) throw ConvergenceError("bootstrap did not reach alpha = 1");
  }
  rep.K_star = fixed_point_Kstar(gamma, d, C).K_star;
  return rep;
}

/// kappa(t) = beta/(1+g/2) t^{1+g/2} on [0,1], continued linearly with slope beta.
inline double kappa_weight(double t, double beta, double gamma) {
  detail::require_gamma(gamma);
  if (!(t >= 0.0)) throw PreconditionError("kappa needs t >= 0");
  if (!(beta > 0.0)) throw PreconditionError("kappa needs beta > 0");
  const double e = 1.0 + gamma / 2.0;
  if (t <= 1.0) return beta / e * std::pow(t, e);
  return beta / e + beta * (t - 1.0);
}

inline double kappa_derivative(double t, double beta, double gamma) {
  detail::require_gamma(gamma);
  if (t <= 1.0) return beta * std::pow(t, gamma / 2.0);
  return beta;
}

}  // namespace landau
