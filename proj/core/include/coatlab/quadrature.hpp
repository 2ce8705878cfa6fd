#pragma once

#include <array>
#include <functional>
#include <vector>

namespace coatlab::quad {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Globally adaptive 7/15-point Gauss-Kronrod on [a, b]. Subdivides the interval
// with the largest error estimate until the total estimate is below
// max(abs_tol, rel_tol * |value|) or max_intervals is reached.
Result gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol = 0.0, int max_intervals = 2000);

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n);

// Symmetric 7-point rule, exact for degree 5 polynomials. Barycentric
// coordinates and weights normalised to sum to one.
struct TrianglePoint {
  double l1, l2, l3, weight;
};
const std::array<TrianglePoint, 7>& triangle_rule7();

}  // namespace coatlab::quad
