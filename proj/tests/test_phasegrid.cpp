#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "landau/grid.hpp"
#include "landau/kinetic.hpp"

using namespace landau;

namespace {

template <int D>
KineticPoint<D> random_point(std::mt19937_64& rng, double scale = 3.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  KineticPoint<D> z;
  z.t = u(rng);
  for (int k = 0; k < D; ++k) {
    z.x[k] = u(rng);
    z.v[k] = u(rng);
  }
  return z;
}

template <int D>
void expect_point_near(const KineticPoint<D>& a, const KineticPoint<D>& b, double tol) {
  EXPECT_NEAR(a.t, b.t, tol);
  EXPECT_LE((a.x - b.x).norm(), tol);
  EXPECT_LE((a.v - b.v).norm(), tol);
}

}  // namespace

TEST(VelocityGrid, CellCentredNodes) {
  VelocityGrid<2> g(4.0, 16);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
  EXPECT_DOUBLE_EQ(g.spacing() * g.points_per_axis(), 2.0 * g.half_width());
  EXPECT_DOUBLE_EQ(g.node(0), -3.75);
  EXPECT_DOUBLE_EQ(g.node(15), 3.75);
  EXPECT_EQ(g.size(), 256u);
  for (int k = 0; k < 16; ++k) EXPECT_NE(g.node(k), 0.0);
}

TEST(VelocityGrid, FlattenRoundTrip) {
  VelocityGrid<3> g(2.0, 8);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(g.flatten(g.unflatten(k)), k);
  EXPECT_EQ(g.stride(2), 1u);
  EXPECT_EQ(g.stride(0), 64u);
}

TEST(VelocityGrid, RejectsBadShape) {
  EXPECT_THROW(VelocityGrid<2>(1.0, 7), PreconditionError);
  EXPECT_THROW(VelocityGrid<2>(-1.0, 8), PreconditionError);
}

TEST(PhaseGrid, SlicesFollowSpatialLattice) {
  PhaseGrid<2> hom(VelocityGrid<2>(1.0, 8), std::nullopt);
  EXPECT_FALSE(hom.inhomogeneous());
  EXPECT_EQ(hom.slices(), 1);
  PhaseGrid<2> inh(VelocityGrid<2>(1.0, 8), SpatialLattice{2.0, 5});
  EXPECT_TRUE(inh.inhomogeneous());
  EXPECT_EQ(inh.slices(), 5);
  EXPECT_DOUBLE_EQ(inh.x->spacing(), 0.4);
}

TEST(SupportWindow, VanishesOnOuterLayers) {
  VelocityGrid<2> g(4.0, 32);
  DistributionField<2> f(PhaseGrid<2>(g, std::nullopt));
  std::fill(f.values.begin(), f.values.end(), 1.0);
  apply_support_window(f);
  EXPECT_EQ(f.boundary_layer_max(), 0.0);
  EXPECT_DOUBLE_EQ(f.values[g.flatten({16, 16})], 1.0);
}

TEST(GalileanShift, IdentityBasePoint) {
  std::mt19937_64 rng(1);
  const auto z = random_point<2>(rng);
  expect_point_near(galilean_shift(KineticPoint<2>::origin(), z), z, 0.0);
}

TEST(GalileanShift, WorkedExample) {
  KineticPoint<2> z0{1.0, {0.0, 0.0}, {1.0, 0.0}};
  KineticPoint<2> z{2.0, {0.0, 0.0}, {0.0, 0.0}};
  const auto s = galilean_shift(z0, z);
  EXPECT_DOUBLE_EQ(s.t, 3.0);
  EXPECT_DOUBLE_EQ(s.x[0], 2.0);
  EXPECT_DOUBLE_EQ(s.x[1], 0.0);
  EXPECT_DOUBLE_EQ(s.v[0], 1.0);
}

TEST(GalileanShift, InverseRoundTrip) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto z0 = random_point<3>(rng);
    const auto z = random_point<3>(rng);
    expect_point_near(galilean_shift_inverse(z0, galilean_shift(z0, z)), z, 1e-12);
  }
}

TEST(GalileanShift, GroupAction) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto z0 = random_point<2>(rng);
    const auto z1 = random_point<2>(rng);
    const auto z = random_point<2>(rng);
    expect_point_near(galilean_shift(z1, galilean_shift(z0, z)), galilean_shift(galilean_shift(z1, z0), z), 1e-12);
  }
}

TEST(Cylinder, MembershipExamples) {
  KineticCylinder<2> q{KineticPoint<2>::origin(), 1.0};
  EXPECT_TRUE(cylinder_contains(q, KineticPoint<2>::origin()));
  EXPECT_FALSE(cylinder_contains(q, KineticPoint<2>{-1.5, {0, 0}, {0, 0}}));
  KineticCylinder<2> moving{KineticPoint<2>{0.0, {0, 0}, {1, 0}}, 1.0};
  EXPECT_TRUE(cylinder_contains(moving, KineticPoint<2>{-0.5, {-0.5, 0}, {1, 0}}));
}

TEST(Cylinder, InvariantUnderShift) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto c = random_point<2>(rng, 1.0);
    const auto z = random_point<2>(rng, 1.0);
    const auto s = random_point<2>(rng, 2.0);
    KineticCylinder<2> q{c, 1.0};
    KineticCylinder<2> qs{galilean_shift(s, c), 1.0};
    EXPECT_EQ(cylinder_contains(q, z), cylinder_contains(qs, galilean_shift(s, z)));
  }
}

TEST(AnisotropicTransform, ScaleFactors) {
  const auto t = build_transform<3>(Vec<3>(2.0, 0.0, 0.0), -1.0);
  EXPECT_NEAR(t.parallel_factor(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(t.perpendicular_factor(), std::sqrt(2.0), 1e-15);
  const auto u = build_transform<2>(Vec<2>(0.0, 3.0), -1.0);
  EXPECT_NEAR(u.parallel_factor(), 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(u.perpendicular_factor(), std::sqrt(3.0), 1e-15);
  const Vec<2> along = u.apply(Vec<2>(0.0, 1.0));
  const Vec<2> across = u.apply(Vec<2>(1.0, 0.0));
  EXPECT_NEAR(along[1], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(across[0], std::sqrt(3.0), 1e-15);
}

TEST(AnisotropicTransform, RejectsSlowBase) {
  EXPECT_THROW(build_transform<2>(Vec<2>(1.0, 1.0), -1.0), PreconditionError);
  EXPECT_NO_THROW(transform_or_identity<2>(Vec<2>(1.0, 1.0), -1.0));
  EXPECT_TRUE(transform_or_identity<2>(Vec<2>(1.0, 1.0), -1.0).is_identity());
}

TEST(AnisotropicTransform, EigenstructureAndDeterminant) {
  for (double s : {2.0, 5.0, 17.0}) {
    const double gamma = -0.7;
    const auto t = build_transform<3>(Vec<3>(s, 0.0, 0.0).normalized() * s, gamma);
    Eigen::SelfAdjointEigenSolver<Mat<3>> es(t.matrix());
    const auto ev = es.eigenvalues();
    EXPECT_NEAR(ev[0], std::pow(s, gamma / 2.0), 1e-12);
    EXPECT_NEAR(ev[1], std::pow(s, 1.0 + gamma / 2.0), 1e-12 * s);
    EXPECT_NEAR(ev[2], std::pow(s, 1.0 + gamma / 2.0), 1e-12 * s);
    EXPECT_NEAR(t.determinant(), std::pow(s, 2.0 * (1.0 + gamma / 2.0) + gamma / 2.0), 1e-12 * t.determinant());
    EXPECT_NEAR((t.matrix() * t.inverse_matrix() - Mat<3>::Identity()).norm(), 0.0, 1e-12);
  }
}

TEST(AnisotropicTransform, SpeedComparableOverUnitBall) {
  // |v0 + T v| / |v0| stays in a |v0|-independent band for |v| <= 1.
  double lo = 1e300, hi = 0.0;
  for (double s = 2.5; s <= 80.0; s *= 2.0) {
    const Vec<2> v0(s / std::sqrt(2.0), s / std::sqrt(2.0));
    const auto t = build_transform<2>(v0, -1.5);
    for (int i = 0; i < 64; ++i) {
      const double th = 2.0 * M_PI * i / 64.0;
      const Vec<2> v(std::cos(th), std::sin(th));
      const double r = (v0 + t.apply(v)).norm() / s;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  EXPECT_GT(lo, 0.25);
  EXPECT_LT(hi, 1.75);
}

TEST(KineticTransform, WorkedExample) {
  KineticPoint<3> z0{0.5, {1, 2, 3}, {2, 0, 0}};
  KineticPoint<3> z{0.0, {0, 0, 0}, {1, 0, 0}};
  const auto w = kinetic_transform(z0, z, -1.0);
  EXPECT_DOUBLE_EQ(w.t, 0.5);
  EXPECT_LE((w.x - z0.x).norm(), 1e-15);
  EXPECT_NEAR(w.v[0], 2.0 + std::sqrt(0.5), 1e-15);
  const auto o = kinetic_transform(z0, KineticPoint<3>::origin(), -1.0);
  expect_point_near(o, z0, 0.0);
}

TEST(KineticTransform, InverseRoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto z0 = random_point<2>(rng, 6.0);
    const auto z = random_point<2>(rng);
    expect_point_near(kinetic_transform_inverse(z0, kinetic_transform(z0, z, -1.2), -1.2), z, 1e-11);
  }
}

TEST(MetricDP, Examples) {
  const auto o = KineticPoint<2>::origin();
  EXPECT_EQ(metric_dP(o, o), 0.0);
  EXPECT_DOUBLE_EQ(metric_dP(o, KineticPoint<2>{0.0, {0, 0}, {0.5, 0}}), 0.5);
  EXPECT_DOUBLE_EQ(metric_dP(o, KineticPoint<2>{1.0, {0.5, 0}, {1, 0}}), 2.0);
}

TEST(MetricDP, SymmetricAndScaling) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    const auto z1 = random_point<2>(rng);
    const auto z2 = random_point<2>(rng);
    EXPECT_EQ(metric_dP(z1, z2), metric_dP(z2, z1));
    for (double r : {0.5, 2.0}) {
      auto dil = [r](KineticPoint<2> z) {
        z.t *= r * r;
        z.x *= r * r * r;
        z.v *= r;
        return z;
      };
      const double lhs = metric_dP(dil(z1), dil(z2));
      EXPECT_NEAR(lhs, r * metric_dP(z1, z2), 4e-15 * lhs);
    }
  }
}

TEST(MetricDL, CoincidentPointsGiveZero) {
  KineticPoint<2> z{0.3, {1, 0}, {5, 1}};
  EXPECT_EQ(metric_dL(z, z, -1.0), 0.0);
}

TEST(MetricDL, EqualsDPBelowSpeedTwo) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int i = 0; i < 50; ++i) {
    KineticPoint<2> z1{0.2, {0.1, 0.0}, {u(rng), u(rng)}};
    KineticPoint<2> z2{0.2, {0.1, 0.0}, {u(rng), u(rng)}};
    const double dp = metric_dP(z1, z2);
    EXPECT_NEAR(metric_dL(z1, z2, -1.0), dp, 1e-3 * dp);
  }
}

TEST(MetricDL, SymmetricAndPositive) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    auto z1 = random_point<2>(rng, 0.5);
    auto z2 = random_point<2>(rng, 0.5);
    z1.v += Vec<2>(8.0, 0.0);
    z2.v += Vec<2>(8.0, 0.0);
    const double a = metric_dL(z1, z2, -1.0);
    const double b = metric_dL(z2, z1, -1.0);
    EXPECT_GT(a, 0.0);
    EXPECT_NEAR(a, b, 1e-6 * a);
  }
}

TEST(MetricDL, MatchesDenseLatticeOracle) {
  // Brute-force minimisation over a dense base-velocity lattice in the search
  // ball; the search may only do better, and by little.
  const double gamma = -1.0;
  for (const Vec<2>& dv : {Vec<2>(0.0, 0.2), Vec<2>(0.2, 0.0), Vec<2>(0.1, 0.1)}) {
    KineticPoint<2> z1{0.0, {0, 0}, {8.0, 0.0}};
    KineticPoint<2> z2{0.0, {0, 0}, Vec<2>(Vec<2>(8.0, 0.0) + dv)};
    const Vec<2> mid = 0.5 * (z1.v + z2.v);
    const double radius = 2.0 * dv.norm() + 1.0;
    double oracle = 1e300;
    const int n = 400;
    for (int i = -n; i <= n; ++i)
      for (int j = -n; j <= n; ++j) {
        const Vec<2> vb = mid + radius * Vec<2>(i, j) / n;
        if ((vb - mid).norm() <= radius) oracle = std::min(oracle, deformed_distance(z1, z2, vb, gamma));
      }
    const double got = metric_dL(z1, z2, gamma);
    EXPECT_LE(got, oracle * (1.0 + 1e-9));
    EXPECT_GE(got, oracle * (1.0 - 1e-3));
  }
}

TEST(MetricDL, AnisotropyAtHighSpeed) {
  // At |v| = 8, gamma = -1: velocity offsets across v cost what they cost in
  // d_P, offsets along v cost about |v| times more.
  const double gamma = -1.0;
  KineticPoint<2> z1{0.0, {0, 0}, {8.0, 0.0}};
  KineticPoint<2> across{0.0, {0, 0}, {8.0, 0.05}};
  KineticPoint<2> along{0.0, {0, 0}, {8.05, 0.0}};
  const double r_across = metric_dL(z1, across, gamma) / metric_dP(z1, across);
  const double r_along = metric_dL(z1, along, gamma) / metric_dP(z1, along);
  EXPECT_GT(r_across, 0.5);
  EXPECT_LT(r_across, 2.0);
  EXPECT_GT(r_along, 4.0);
  EXPECT_LT(r_along, 16.0);
}
