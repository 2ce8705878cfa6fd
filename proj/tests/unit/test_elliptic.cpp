#include <gtest/gtest.h>

#include <cmath>

#include "coatlab/elliptic.hpp"
#include "coatlab/error.hpp"
#include "coatlab/sampling.hpp"

using namespace coatlab;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Carlson, KnownValues) {
  // Carlson (1995) test values.
  EXPECT_NEAR(carlson_rf(1.0, 2.0, 0.0), 1.3110287771461, 1e-13);
  EXPECT_NEAR(carlson_rf(2.0, 3.0, 4.0), 0.58408284167715, 1e-13);
  EXPECT_NEAR(carlson_rd(0.0, 2.0, 1.0), 1.7972103521034, 1e-12);
  EXPECT_NEAR(carlson_rd(2.0, 3.0, 4.0), 0.16510527294261, 1e-13);
  // Equal arguments collapse to powers.
  EXPECT_NEAR(carlson_rf(4.0, 4.0, 4.0), 0.5, 1e-15);
  EXPECT_NEAR(carlson_rd(4.0, 4.0, 4.0), 0.125, 1e-15);
}

TEST(Carlson, RejectsOutOfDomain) {
  EXPECT_THROW(carlson_rf(-1.0, 1.0, 1.0), Error);
  EXPECT_THROW(carlson_rf(0.0, 0.0, 1.0), Error);
  EXPECT_THROW(carlson_rd(1.0, 1.0, 0.0), Error);
  EXPECT_THROW(carlson_rd(std::nan(""), 1.0, 1.0), Error);
}

TEST(Elliptic, GProduct) {
  EXPECT_DOUBLE_EQ(EllipticContext(Vec3(1, 1, 1)).g(3.0), 64.0);
  const EllipticContext ctx(Vec3(1, 1.5, 2));
  EXPECT_DOUBLE_EQ(ctx.g(0.0), 9.0);
  EXPECT_DOUBLE_EQ(ctx.g(1.0), 32.5);
}

TEST(Elliptic, SphereClosedForms) {
  const EllipticContext ctx(Vec3(1, 1, 1));
  EXPECT_LE(rel(ctx.phi(0.0, 0), 2.0 / 3.0), 1e-14);
  EXPECT_LE(rel(ctx.phi(3.0, 1), 1.0 / 12.0), 1e-14);
  EXPECT_LE(rel(ctx.i0(0.0), 2.0), 1e-14);
  EXPECT_LE(rel(ctx.i0(3.0), 1.0), 1e-14);
  // phi = (2/3)(c^2 + rho)^(-3/2) for a sphere of any radius.
  const EllipticContext big(Vec3(1.7, 1.7, 1.7));
  for (double rho : {0.0, 0.01, 0.5, 2.0, 40.0, 1e4}) {
    const double expected = 2.0 / 3.0 * std::pow(1.7 * 1.7 + rho, -1.5);
    for (int j = 0; j < 3; ++j) EXPECT_LE(rel(big.phi(rho, j), expected), 1e-12);
    EXPECT_LE(std::abs(big.phi(rho, 0) - big.phi(rho, 2)), 1e-14 * expected);
  }
}

TEST(Elliptic, TriaxialValuesMatchFrozenOracle) {
  // Frozen from an independent 40-digit quadrature.
  const EllipticContext ctx(Vec3(1, 1.5, 2));
  const double phi0[3] = {0.32248542454218323, 0.20333750524494764, 0.14084373687953580};
  const double phi1[3] = {0.15040241808198210, 0.11360847827231483, 0.086812311368514748};
  for (int j = 0; j < 3; ++j) {
    EXPECT_LE(rel(ctx.phi(0.0, j), phi0[j]), 1e-12);
    EXPECT_LE(rel(ctx.phi(1.0, j), phi1[j]), 1e-12);
  }
  EXPECT_LE(rel(ctx.i0(0.0), 1.3433697588614586), 1e-12);
  EXPECT_LE(rel(ctx.i0(1.0), 1.1040939473915612), 1e-12);
  EXPECT_LE(rel(phi0[0] + phi0[1] + phi0[2], 2.0 / 3.0), 1e-15);
  // Lower bound: the integrand of i0 dominates that of phi_j times c_1^2.
  EXPECT_GT(ctx.i0(0.0), 2.0 / 3.0);
}

TEST(Elliptic, SumIdentityOnLogGrid) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const EllipticContext ctx(Vec3(rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0)));
    for (int k = 0; k < 50; ++k) {
      const double rho = std::pow(10.0, -4.0 + 8.0 * k / 49.0);
      const Vec3 phi = ctx.phi_all(rho);
      const double target = 2.0 / std::sqrt(ctx.g(rho));
      EXPECT_LE(rel(phi.sum(), target), 1e-11) << "rho " << rho;
    }
  }
}

TEST(Elliptic, DerivativeMatchesFiniteDifference) {
  const EllipticContext ctx(Vec3(0.7, 1.5, 2.4));
  for (double rho : {0.05, 0.5, 3.0, 20.0}) {
    const double h = 1e-4 * (1.0 + rho);
    for (int j = 0; j < 3; ++j) {
      const double fd = (ctx.phi(rho + h, j) - ctx.phi(rho - h, j)) / (2.0 * h);
      EXPECT_LE(rel(fd, ctx.phi_derivative(rho, j)), 1e-6);
    }
  }
}

TEST(Elliptic, Monotonicity) {
  const EllipticContext ctx(Vec3(0.8, 1.3, 2.1));
  double prev_i0 = kInf;
  Vec3 prev = Vec3::Constant(kInf);
  for (double rho = 0.0; rho < 50.0; rho += 0.37) {
    const Vec3 phi = ctx.phi_all(rho);
    for (int j = 0; j < 3; ++j) EXPECT_LT(phi[j], prev[j]);
    EXPECT_LT(ctx.i0(rho), prev_i0);
    prev = phi;
    prev_i0 = ctx.i0(rho);
    // Larger axis, smaller phi.
    EXPECT_GT(phi[0], phi[1]);
    EXPECT_GT(phi[1], phi[2]);
  }
}

TEST(Elliptic, CarlsonAgreesWithQuadratureOracle) {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const EllipticContext ctx(Vec3(rng.uniform(0.2, 4.0), rng.uniform(0.2, 4.0), rng.uniform(0.2, 4.0)));
    const double rho = (trial % 4 == 0) ? 0.0 : std::pow(10.0, rng.uniform(-3.0, 3.0));
    for (int j = 0; j < 3; ++j) EXPECT_LE(rel(ctx.phi(rho, j), oracle::phi(ctx, rho, j)), 1e-10);
    EXPECT_LE(rel(ctx.i0(rho), oracle::i0(ctx, rho)), 1e-10);
  }
}

TEST(Elliptic, RejectsRhoBelowDomain) {
  const EllipticContext ctx(Vec3(1, 1.5, 2));
  EXPECT_THROW(ctx.phi(-1.0, 0), Error);
  EXPECT_THROW(ctx.i0(std::nan("")), Error);
  EXPECT_THROW(ctx.phi(0.0, 3), Error);
  EXPECT_THROW(EllipticContext(Vec3(1, -1, 1)), Error);
}
