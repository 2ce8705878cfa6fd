#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "coatlab/error.hpp"
#include "coatlab/geometry.hpp"
#include "coatlab/sampling.hpp"

using namespace coatlab;

namespace {

// Test-only oracle: largest root of sum x_j^2/(c_j^2 + s) = 1 by plain
// bisection on [lo, hi], independent of the library's deflation logic.
double bisect_rho(const Vec3& x, const Vec3& c, double lo, double hi) {
  auto f = [&](double s) {
    double v = -1.0;
    for (int j = 0; j < 3; ++j) v += x[j] * x[j] / (c[j] * c[j] + s);
    return v;
  };
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double cubic_scale(double s, const Vec3& x, const Vec3& c) {
  const Vec3 t = (c.cwiseProduct(c).array() + std::abs(s)).matrix();
  return t.prod() + x[0] * x[0] * t[1] * t[2] + x[1] * x[1] * t[0] * t[2] + x[2] * x[2] * t[0] * t[1];
}

}  // namespace

TEST(ConfocalCoords, SphereRhoIsSquaredRadiusMinusSquaredAxis) {
  const auto cc = confocal_coords(Vec3(2, 0, 0), Vec3(1, 1, 1));
  EXPECT_NEAR(cc.rho, 3.0, 1e-14);
  EXPECT_DOUBLE_EQ(cc.mu, -1.0);
  EXPECT_DOUBLE_EQ(cc.xi, -1.0);
}

TEST(ConfocalCoords, OnAxisPoint) {
  const auto cc = confocal_coords(Vec3(1.2, 0, 0), Vec3(1, 1.5, 2));
  EXPECT_NEAR(cc.rho, 0.44, 1e-14);
  // x2 = x3 = 0 deflates the factors (2.25 + s)(4 + s).
  EXPECT_DOUBLE_EQ(cc.mu, -2.25);
  EXPECT_DOUBLE_EQ(cc.xi, -4.0);
}

TEST(ConfocalCoords, GenericPointMatchesBisectionOracle) {
  const Vec3 x(1, 1, 1), c(1, 1.5, 2);
  const auto cc = confocal_coords(x, c);
  const double oracle = bisect_rho(x, c, 0.0, x.squaredNorm());
  EXPECT_NEAR(cc.rho, oracle, 1e-13);
  // Independent high-precision root, frozen.
  EXPECT_NEAR(cc.rho, 1.0201667939774082, 1e-13);
  double recon = -1.0;
  for (int j = 0; j < 3; ++j) recon += x[j] * x[j] / (c[j] * c[j] + cc.rho);
  EXPECT_LE(std::abs(recon), 1e-12);
  EXPECT_LT(cc.xi, -2.25);
  EXPECT_GT(cc.xi, -4.0);
  EXPECT_LT(cc.mu, -1.0);
  EXPECT_GT(cc.mu, -2.25);
}

TEST(ConfocalCoords, RejectsBadInput) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    confocal_coords(Vec3(nan, 0, 0), Vec3(1, 1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteInput);
  }
  try {
    confocal_coords(Vec3(1, 0, 0), Vec3(1, 0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateAxes);
  }
  EXPECT_THROW(confocal_coords(Vec3(kInf, 0, 0), Vec3(1, 1, 1)), Error);
}

TEST(ConfocalCoords, RootsOrderedAndSatisfyCubicRandomised) {
  Rng rng(20240611);
  for (int n = 0; n < 1'000'000; ++n) {
    const Vec3 c(rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0));
    Vec3 x(rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4));
    // Some points on symmetry planes exercise the deflated branch.
    if (n % 7 == 0) x[n % 3] = 0.0;
    const auto cc = confocal_coords(x, c);
    ASSERT_LE(cc.xi, cc.mu);
    ASSERT_LE(cc.mu, cc.rho);
    for (double r : {cc.rho, cc.mu, cc.xi}) {
      ASSERT_LE(std::abs(confocal_cubic(r, x, c)), 1e-10 * cubic_scale(r, x, c)) << "n=" << n;
    }
  }
}

TEST(ConfocalCoords, RhoVanishesOnBaseEllipsoid) {
  const Ellipsoid e(Vec3(1.0, 1.5, 2.0));
  for (const Vec3& u : fibonacci_sphere(500)) {
    const Vec3 p = e.radial_point(u);
    EXPECT_LE(std::abs(confocal_coords(p, e.semi_axes()).rho), 1e-10);
  }
}

TEST(ConfocalPair, OuterAxesAreConfocal) {
  const ConfocalPair pair(Ellipsoid(Vec3(1.0, 1.5, 2.0)), 1.0);
  const Vec3 a = pair.outer_semi_axes();
  const Vec3 c = pair.inner().semi_axes();
  EXPECT_NEAR(a[2], std::sqrt(5.0), 1e-15);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(a[i] * a[i] - a[j] * a[j], c[i] * c[i] - c[j] * c[j], 1e-14);
    }
  }
  // Points on the outer surface sit at rho = rho0.
  for (const Vec3& u : fibonacci_sphere(100)) {
    EXPECT_NEAR(confocal_coords(pair.outer().radial_point(u), c).rho, 1.0, 1e-12);
  }
}

TEST(Classify, SpecExamples) {
  const ConfocalPair spheres(Ellipsoid::sphere(1.0), 3.0);
  EXPECT_EQ(classify(spheres, Vec3(0, 0, 0.5)), Region::Core);
  EXPECT_EQ(classify(spheres, Vec3(1.5, 0, 0)), Region::Shell);
  EXPECT_EQ(classify(spheres, Vec3(0, 2.5, 0)), Region::Exterior);
  EXPECT_EQ(classify(spheres, Vec3(0, 0, 2.0)), Region::OnOuter);
  EXPECT_EQ(classify(spheres, Vec3(0, 1.0, 0)), Region::OnInner);

  const ConfocalPair ell(Ellipsoid(Vec3(1.0, 1.5, 2.0)), 1.0);
  EXPECT_EQ(classify(ell, Vec3(0, 0, 2.1)), Region::Shell);
  EXPECT_EQ(classify(ell, Vec3(0, 0, 2.3)), Region::Exterior);
  EXPECT_EQ(classify(ell, Vec3(0, 0, 0.5)), Region::Core);
}

TEST(Classify, RespectsCenterOffset) {
  const ConfocalPair pair(Ellipsoid::sphere(1.0, Vec3(5, 0, 0)), 3.0);
  EXPECT_EQ(classify(pair, Vec3(5, 0, 0.5)), Region::Core);
  EXPECT_EQ(classify(pair, Vec3(0, 0, 0.5)), Region::Exterior);
}
