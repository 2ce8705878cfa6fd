#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "coatlab/parallel.hpp"
#include "coatlab/quadrature.hpp"
#include "coatlab/sampling.hpp"

using namespace coatlab;

TEST(Rng, DeterministicAndSeedSensitive) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next();
    EXPECT_EQ(va, b.next());
    EXPECT_NE(va, c.next());
  }
  EXPECT_NE(stream_seed(1, 0), stream_seed(1, 1));
  EXPECT_EQ(stream_seed(1, 5), stream_seed(1, 5));
}

TEST(Rng, UniformMoments) {
  Rng rng(1);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 5e-3);
  EXPECT_NEAR(s2 / n, 1.0 / 3.0, 5e-3);
}

TEST(Halton, FirstValues) {
  EXPECT_DOUBLE_EQ(halton(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(halton(2, 2), 0.25);
  EXPECT_DOUBLE_EQ(halton(3, 2), 0.75);
  EXPECT_NEAR(halton(1, 3), 1.0 / 3.0, 1e-16);
}

TEST(Fibonacci, UnitVectorsWithZeroMean) {
  const auto pts = fibonacci_sphere(242);
  ASSERT_EQ(pts.size(), 242u);
  Vec3 mean = Vec3::Zero();
  for (const auto& p : pts) {
    EXPECT_NEAR(p.norm(), 1.0, 1e-15);
    mean += p;
  }
  EXPECT_LT((mean / 242.0).norm(), 1e-2);
}

TEST(Parallel, CoversEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Quadrature, GaussKronrodPolynomialAndSingularEndpoint) {
  auto r = quad::gauss_kronrod([](double x) { return x * x * x; }, 0.0, 2.0, 1e-14);
  EXPECT_NEAR(r.value, 4.0, 1e-13);
  EXPECT_TRUE(r.converged);
  r = quad::gauss_kronrod([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
  EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(Quadrature, GaussLegendreExactness) {
  const auto rule = quad::gauss_legendre(6);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 10);
  EXPECT_NEAR(s, 2.0 / 11.0, 1e-14);
}

TEST(Quadrature, TriangleRuleDegreeFive) {
  // Reference triangle (0,0),(1,0),(0,1): int x^2 y^3 = 2! 3! / 7! = 1/420.
  double s = 0.0;
  for (const auto& p : quad::triangle_rule7()) {
    const double x = p.l2, y = p.l3;
    s += p.weight * x * x * y * y * y;
  }
  EXPECT_NEAR(0.5 * s, 1.0 / 420.0, 1e-15);
}
