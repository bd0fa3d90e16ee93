#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rockland/metric.hpp"
#include "rockland/systems.hpp"

using namespace rockland;

namespace {

const ControlSystem& grushin_system() {
  static const ControlSystem sys = [] {
    auto s = systems::grushin();
    return ControlSystem(s.fields, s.dilation);
  }();
  return sys;
}

}  // namespace

TEST(Metric, EndpointOfTwoSegments) {
  const auto& sys = grushin_system();
  ControlPath p;
  p.delta = 1;
  p.segments = {{0.5, {2.0, 0.0}}, {0.5, {0.0, 2.0}}};
  auto e = sys.endpoint(std::vector<double>{0, 0}, p);
  EXPECT_NEAR(e[0], 1.0, 1e-14);
  EXPECT_NEAR(e[1], 1.0, 1e-14);
  // the second field vanishes on x1 = 0
  ControlPath q;
  q.delta = 1;
  q.segments = {{1.0, {0.0, 1.0}}};
  auto f = sys.endpoint(std::vector<double>{0, 0.25}, q);
  EXPECT_NEAR(f[1], 0.25, 1e-15);
}

TEST(Metric, FlowMatchesJacobian) {
  const auto& sys = grushin_system();
  double x[2] = {0.3, -0.2}, a[2] = {0.7, 0.4}, out[2], jac[8];
  sys.flow(x, a, out, jac);
  EXPECT_NEAR(out[0], 1.0, 1e-15);
  // x2 + a2 (x1 + a1 / 2)
  EXPECT_NEAR(out[1], -0.2 + 0.4 * (0.3 + 0.35), 1e-15);
  const double h = 1e-6;
  for (int k = 0; k < 4; ++k) {
    double xp[2] = {x[0], x[1]}, ap[2] = {a[0], a[1]}, o2[2];
    (k < 2 ? xp[k] : ap[k - 2]) += h;
    sys.flow(xp, ap, o2, nullptr);
    for (int j = 0; j < 2; ++j) EXPECT_NEAR((o2[j] - out[j]) / h, jac[j * 4 + k], 1e-6);
  }
}

TEST(Metric, BoxBoundContainsReachableSet) {
  const auto& sys = grushin_system();
  auto B = sys.box_half_widths(std::vector<double>{0, 0}, 0.5);
  EXPECT_DOUBLE_EQ(B[0], 0.5);
  EXPECT_DOUBLE_EQ(B[1], 0.25);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 200; ++t) {
    ControlPath p;
    p.delta = 0.5;
    for (int k = 0; k < 5; ++k) p.segments.push_back({0.2, {0.5 * u(rng), 0.5 * u(rng)}});
    auto e = sys.endpoint(std::vector<double>{0, 0}, p);
    EXPECT_LE(std::abs(e[0]), B[0] + 1e-15);
    EXPECT_LE(std::abs(e[1]), B[1] + 1e-15);
  }
}

TEST(Metric, GrushinDistanceAlongFirstAxis) {
  const auto& sys = grushin_system();
  auto d = distance(sys, std::vector<double>{0, 0}, std::vector<double>{1, 0});
  EXPECT_NEAR(d.upper, 1.0, 1e-3);
  EXPECT_LE(d.lower, d.upper);
  EXPECT_NEAR(d.certified_lower, 1.0, 1e-9);
  auto e = sys.endpoint(std::vector<double>{0, 0}, d.path);
  EXPECT_NEAR(e[0], 1.0, 1e-6);
  EXPECT_NEAR(e[1], 0.0, 1e-6);
}

TEST(Metric, DistanceIsHomogeneousAndSymmetric) {
  const auto& sys = grushin_system();
  std::vector<double> x{0.2, -0.1}, y{-0.3, 0.4};
  auto dxy = distance(sys, x, y);
  auto dyx = distance(sys, y, x);
  double tol = DistanceConfig{}.tol;
  EXPECT_NEAR(dxy.upper, dyx.upper, tol * (dxy.upper + dyx.upper));
  // the reversed path with negated controls joins y to x at the same scale
  ControlPath rev;
  rev.delta = dxy.path.delta;
  for (auto it = dxy.path.segments.rbegin(); it != dxy.path.segments.rend(); ++it) {
    ControlSegment s = *it;
    for (double& a : s.controls) a = -a;
    rev.segments.push_back(s);
  }
  auto back = sys.endpoint(y, rev);
  EXPECT_NEAR(back[0], x[0], 1e-6);
  EXPECT_NEAR(back[1], x[1], 1e-6);
  for (double lam : {0.5, 2.0}) {
    std::vector<double> xs{lam * x[0], lam * lam * x[1]}, ys{lam * y[0], lam * lam * y[1]};
    double dl = distance(sys, xs, ys).upper;
    EXPECT_NEAR(dl / (lam * dxy.upper), 1.0, 0.05) << lam;
  }
  EXPECT_EQ(distance(sys, x, x).upper, 0.0);
}

TEST(Metric, OriginScalingAndTriangleInequality) {
  const auto& sys = grushin_system();
  std::vector<double> o{0, 0}, y{0.4, 0.3};
  double d = distance(sys, o, y).upper;
  for (double lam : {0.25, 4.0}) {
    double dl = distance(sys, o, std::vector<double>{lam * y[0], lam * lam * y[1]}).upper;
    EXPECT_NEAR(dl, lam * d, 3e-3 * lam * d);
  }
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    double ab = distance(sys, a, b).upper, bc = distance(sys, b, c).upper, ac = distance(sys, a, c).upper;
    EXPECT_LE(ac, (ab + bc) * (1 + 2e-3));
  }
}

TEST(Metric, BracketInvariants) {
  const auto& sys = grushin_system();
  std::vector<double> x{0.5, 0.1}, y{-0.2, -0.3};
  auto d = distance(sys, x, y);
  EXPECT_LE(d.certified_lower, d.lower);
  EXPECT_LE(d.lower, d.upper);
  EXPECT_LE(d.upper - d.lower, DistanceConfig{}.tol * d.upper);
  EXPECT_FALSE(d.stagnated);
  EXPECT_DOUBLE_EQ(d.path.delta, d.upper);
  double total = 0;
  for (const auto& s : d.path.segments) {
    total += s.duration;
    for (std::size_t i = 0; i < 2; ++i) EXPECT_LE(std::abs(s.controls[i]), d.upper + 1e-15);
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  auto e = sys.endpoint(x, d.path);
  EXPECT_NEAR(e[0], y[0], 1e-6 * d.upper);
  EXPECT_NEAR(e[1], y[1], 1e-6 * d.upper * d.upper);
}

TEST(Metric, WilsonInterval) {
  auto [lo, hi] = wilson_interval(50, 100);
  EXPECT_NEAR(lo, 0.4038, 1e-4);
  EXPECT_NEAR(hi, 0.5962, 1e-4);
  auto [l0, h0] = wilson_interval(0, 10);
  EXPECT_EQ(l0, 0.0);
  EXPECT_GT(h0, 0.2);
}

TEST(Metric, VolumeGrowthExponent) {
  const auto& sys = grushin_system();
  std::vector<double> radii, vols;
  for (int k = -4; k <= 2; ++k) {
    double r = std::ldexp(1.0, k);
    auto v = ball_volume(sys, std::vector<double>{0, 0}, r, 1500, 11);
    EXPECT_LE(v.lo, v.estimate);
    EXPECT_GE(v.hi, v.estimate);
    radii.push_back(r);
    vols.push_back(v.estimate);
  }
  EXPECT_NEAR(loglog_slope(radii, vols), 3.0, 0.15);
}

TEST(Metric, DoublingAwayFromOrigin) {
  const auto& sys = grushin_system();
  auto d = doubling_check(sys, std::vector<double>{0, 0}, {0.25, 1.0}, 1500, 5);
  for (double r : d.ratios) EXPECT_NEAR(r, 8.0, 1.0);
  auto e = doubling_check(sys, std::vector<double>{1, 0}, {0.125, 0.5, 2.0}, 1000, 5);
  for (double r : e.ratios) {
    EXPECT_GT(r, 3.0);
    EXPECT_LT(r, 9.0);
  }
}

TEST(Metric, FractionalIntegralScalesWithRadius) {
  const auto& sys = grushin_system();
  std::vector<double> mult;
  for (double r : {0.25, 1.0}) mult.push_back(fractional_integral_check(sys, std::vector<double>{0.3, 0}, r, 1.0, 300, 9).multiple);
  EXPECT_GT(mult[0], 0);
  EXPECT_NEAR(mult[1] / mult[0], 1.0, 0.3);
}
