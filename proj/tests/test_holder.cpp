#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "landau/holder.hpp"
#include "landau/initial.hpp"

using namespace landau;

namespace {

const HydroBounds kLoose{0.1, 10.0, 20.0, 10.0};

RunRecord<2> maxwellian_run() {
  const PhaseGrid<2> grid(VelocityGrid<2>(8.0, 32), std::nullopt);
  SolverConfig cfg;
  cfg.t_end = 0.3;
  cfg.snapshot_stride = 2;
  return run<2>(maxwellian<2>(grid), kLoose, cfg, PotentialParams::defaults(2, -1.0));
}

}  // namespace

TEST(Interpolation, ReproducesAffineFunctions) {
  const VelocityGrid<2> g(3.0, 16);
  std::vector<double> f(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) f[k] = 1.0 + 2.0 * g.velocity(k)[0] - 0.5 * g.velocity(k)[1];
  for (const Vec<2>& v : {Vec<2>(0.1, 0.2), Vec<2>(-1.37, 2.01), Vec<2>(2.5, -2.5)})
    EXPECT_NEAR(interpolate_slice<2>(f, g, v), 1.0 + 2.0 * v[0] - 0.5 * v[1], 1e-13);
}

TEST(Holder, StationaryMaxwellianHasFiniteConstants) {
  const auto rec = maxwellian_run();
  HolderOptions opt;
  opt.pairs = 3000;
  const auto r = holder_quotient(rec, opt);
  EXPECT_GT(r.pairs_used, 2000);
  EXPECT_TRUE(r.polynomial_weight_mode);
  ASSERT_EQ(r.beta_grid.size(), 19u);
  ASSERT_EQ(r.constants.size(), 19u);
  for (double c : r.constants) {
    EXPECT_TRUE(std::isfinite(c));
    EXPECT_GT(c, 0.0);
  }
}

TEST(Holder, NearPairQuotientBoundedByGradient) {
  // Same snapshot, so d_L >= |dv| and |df| <= sup |grad f| |dv| for the unit
  // Maxwellian: sup |grad f| = e^{-1/2} / (2 pi), attained at |v| = 1.
  const auto rec = maxwellian_run();
  const auto& f = rec.snapshots.back();
  const auto& g = f.grid.vgrid;
  const double grad = std::exp(-0.5) / (2.0 * std::numbers::pi);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0), s(-0.05, 0.05);
  for (int i = 0; i < 500; ++i) {
    HolderPair<2> p;
    p.z1.t = p.z2.t = f.time;
    p.z1.v = Vec<2>(u(rng), u(rng));
    p.z2.v = p.z1.v + Vec<2>(s(rng), s(rng));
    p.f1 = interpolate_slice<2>(f.slice(0), g, p.z1.v);
    p.f2 = interpolate_slice<2>(f.slice(0), g, p.z2.v);
    p.distance = metric_dL(p.z1, p.z2, -1.0);
    if (p.distance == 0.0) continue;
    for (double beta : {0.25, 0.5, 0.9}) {
      const double bound = 1.02 * grad * std::pow(p.distance, 1.0 - beta);
      EXPECT_LE(holder_weighted_quotient(p, beta, std::nullopt), bound);
    }
  }
}

TEST(Holder, NeedsFiveSnapshots) {
  auto rec = maxwellian_run();
  rec.snapshots.erase(rec.snapshots.begin() + 4, rec.snapshots.end());
  EXPECT_THROW(holder_quotient(rec), PreconditionError);
  HolderOptions opt;
  opt.t_min = 0.0;
  EXPECT_THROW(holder_quotient(maxwellian_run(), opt), PreconditionError);
}

TEST(Holder, DeterministicForFixedSeed) {
  const auto rec = maxwellian_run();
  HolderOptions opt;
  opt.pairs = 1500;
  opt.seed = 7;
  const auto a = holder_quotient(rec, opt);
  const auto b = holder_quotient(rec, opt);
  EXPECT_EQ(a.beta_fit, b.beta_fit);
  EXPECT_EQ(a.constant, b.constant);
  EXPECT_EQ(a.spread, b.spread);
  EXPECT_EQ(a.constants, b.constants);
}
