#pragma once

#include "coatlab/types.hpp"

namespace coatlab {

// Carlson symmetric integrals, evaluated by the duplication theorem.
//   R_F(x,y,z) = 1/2 int_0^inf dt / sqrt((t+x)(t+y)(t+z))
//   R_D(x,y,z) = 3/2 int_0^inf dt / ((t+z) sqrt((t+x)(t+y)(t+z)))
// Throws ConvergenceFailure if the duplication does not contract.
double carlson_rf(double x, double y, double z);
double carlson_rd(double x, double y, double z);

// The shell integrals for the base ellipsoid with semi-axes c:
//   g(rho)     = prod_j (c_j^2 + rho)
//   phi_j(rho) = int_rho^inf ds / ((c_j^2 + s) sqrt(g(s)))
//   i0(rho)    = int_rho^inf ds / sqrt(g(s))
class EllipticContext {
 public:
  explicit EllipticContext(const Vec3& semi_axes);

  const Vec3& semi_axes() const { return semi_axes_; }
  const Vec3& squares() const { return squares_; }

  double g(double rho) const;
  double phi(double rho, int j) const;
  Vec3 phi_all(double rho) const;
  double i0(double rho) const;
  // d phi_j / d rho, in closed form.
  double phi_derivative(double rho, int j) const;

 private:
  void require_rho(double rho) const;

  Vec3 semi_axes_;
  Vec3 squares_;
};

// Independent evaluation of the same integrals by adaptive Gauss-Kronrod on
// the map s = rho + L (t / (1 - t))^2, t in [0, 1), with L = max c_j^2 + rho. Throws ConvergenceFailure if
// the requested relative tolerance is not met.
namespace oracle {
double phi(const EllipticContext& ctx, double rho, int j, double rel_tol = 1e-11);
double i0(const EllipticContext& ctx, double rho, double rel_tol = 1e-11);
}  // namespace oracle

}  // namespace coatlab
