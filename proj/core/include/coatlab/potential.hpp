#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "coatlab/analytic.hpp"
#include "coatlab/geometry.hpp"
#include "coatlab/mesh.hpp"
#include "coatlab/types.hpp"

namespace coatlab {

// Fundamental solution Gamma(x) = -1 / (4 pi |x|); throws SingularPoint at 0.
double gamma(const Vec3& x);
Vec3 gamma_gradient(const Vec3& x);

// int_T dS_y / |x - y| over the flat triangle (a, b, c), in closed form
// (edge-wise asinh / atan terms). Valid for every x, including x on T.
double triangle_inverse_distance(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x);

// Newtonian potential N_E(x) = int_E Gamma(x - y) dy of an ellipsoid:
//   (c1 c2 c3 / 4) [ sum_j phi_j(lambda) x_j^2 - I0(lambda) ]
// with lambda = 0 inside and lambda = rho(x) outside (local coordinates).
double newtonian_ellipsoid(const Ellipsoid& e, const Vec3& x);
Vec3 newtonian_ellipsoid_gradient(const Ellipsoid& e, const Vec3& x);

// Exact Newtonian potential of the polyhedron bounded by a closed mesh:
// N(x) = -(1 / 8 pi) sum_T ((a_T - x) . nu_T) int_T dS / |x - y|.
double newtonian_polyhedron(const TriMesh& mesh, const Vec3& x);

// Region for Monte Carlo integration: a containment predicate and a bounding box.
struct McDomain {
  std::function<bool(const Vec3&)> contains;
  Vec3 lo;
  Vec3 hi;
  double volume = 0.0;  // exact for ellipsoids, divergence-theorem for meshes

  static McDomain from_ellipsoid(const Ellipsoid& e);
  // Keeps its own copy of the mesh and a grid-accelerated inside tester.
  static McDomain from_mesh(const TriMesh& mesh);
};

struct McEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
  std::uint64_t samples = 0;
};

// Monte Carlo estimate of N_Omega(x). A ball of radius 1/4 of the smallest
// box extent around x is integrated with radial density 2r / r_b^2 (which
// cancels the 1/|x - y| singularity); the rest of the box is sampled
// uniformly. Deterministic for a given seed and independent of the thread
// count (fixed-size chunks with their own streams, pairwise reduction).
// Throws SeedRequired when seed is empty.
McEstimate newtonian_mc(const McDomain& domain, const Vec3& x, std::uint64_t samples,
                        std::optional<std::uint64_t> seed, std::uint64_t stream_offset = 0);

// N_Omega / |Omega| - N_D / |D| at each point, exact for ellipsoids.
std::vector<double> averaged_difference(const Ellipsoid& outer, const Ellipsoid& inner,
                                        const std::vector<Vec3>& points);
// Same difference by Monte Carlo on arbitrary domains; stderr combines both terms.
std::vector<McEstimate> averaged_difference_mc(const McDomain& outer, const McDomain& inner,
                                               const std::vector<Vec3>& points, std::uint64_t samples,
                                               std::optional<std::uint64_t> seed);

// Fit values = 1/2 x.Ax + d.x + C* with all 10 coefficients free.
struct QuadraticFit {
  Mat3 A = Mat3::Zero();
  Vec3 d = Vec3::Zero();
  double c_star = 0.0;
  double residual = 0.0;       // max |value - fit|
  double value_scale = 0.0;    // max |value|
  std::size_t points = 0;
};

// Requires at least 200 points (InvalidArgument) spread enough to determine
// all coefficients (IllConditionedFit).
QuadraticFit quadratic_fit(const std::vector<Vec3>& points, const std::vector<double>& values);

// k |Omega| (N^_Omega - N^_D) on n Halton points inside the core of a confocal
// pair, with k = 2 / sqrt(g(rho0)), fitted by quadratic_fit.
QuadraticFit quadratic_fit(const ConfocalPair& pair, int n_points = 256);

// Halton points inside an ellipsoid (deterministic).
std::vector<Vec3> interior_points(const Ellipsoid& e, int n, double shrink = 0.95);

// Signed defect k |Omega \ D| + Tr A |D|.
double trace_check(double k, const Mat3& A, double shell_volume, double core_volume);
double trace_check(const OverdetSolution& w);

}  // namespace coatlab
