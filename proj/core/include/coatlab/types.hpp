#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace coatlab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool all_finite(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

// Numerical knobs shared across modules. Every field is reachable from the
// scenario schema.
struct Tolerances {
  double geometry = 1e-10;          // boundary classification and coordinate residuals
  double elliptic_rel = 1e-12;      // Carlson fast path target
  double oracle_rel = 1e-11;        // adaptive quadrature oracle target
  double tsvd_cut = 1e-12;          // relative singular value cutoff for MFS
  double fd_step = 1e-3;            // finite difference Laplacian probe step
  double mesh_aspect_max = 50.0;    // sliver guard for BEM panels
};

}  // namespace coatlab
