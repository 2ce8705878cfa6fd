#include "coatlab/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coatlab/error.hpp"
#include "coatlab/geometry.hpp"
#include "coatlab/quadrature.hpp"

namespace coatlab {

namespace {

constexpr int kMaxDuplications = 100;
// Carlson's truncation parameter; series error is O(r).
constexpr double kDuplicationTol = 1e-16;

void require_args(double x, double y, double z, bool z_positive) {
  if (!(std::isfinite(x) && std::isfinite(y) && std::isfinite(z)))
    throw Error(ErrorCode::NonFiniteInput, "Carlson integral arguments must be finite");
  if (x < 0.0 || y < 0.0 || z < 0.0 || (z_positive && z == 0.0))
    throw Error(ErrorCode::InvalidArgument, "Carlson integral arguments out of domain");
}

}  // namespace

double carlson_rf(double x, double y, double z) {
  require_args(x, y, z, false);
  if ((x == 0.0) + (y == 0.0) + (z == 0.0) > 1)
    throw Error(ErrorCode::InvalidArgument, "R_F needs at most one zero argument");
  const double a0 = (x + y + z) / 3.0;
  double a = a0;
  double q = std::pow(3.0 * kDuplicationTol, -1.0 / 6.0) * std::max({std::abs(a0 - x), std::abs(a0 - y), std::abs(a0 - z)});
  double fac = 1.0;
  int m = 0;
  while (q * fac >= std::abs(a)) {
    if (++m > kMaxDuplications) throw Error(ErrorCode::ConvergenceFailure, "R_F duplication did not contract");
    const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    const double lambda = sx * sy + sx * sz + sy * sz;
    x = 0.25 * (x + lambda);
    y = 0.25 * (y + lambda);
    z = 0.25 * (z + lambda);
    a = 0.25 * (a + lambda);
    fac *= 0.25;
  }
  const double X = (a - x) / a;
  const double Y = (a - y) / a;
  const double Z = -(X + Y);
  const double e2 = X * Y - Z * Z;
  const double e3 = X * Y * Z;
  return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / std::sqrt(a);
}

double carlson_rd(double x, double y, double z) {
  require_args(x, y, z, true);
  if (x == 0.0 && y == 0.0) throw Error(ErrorCode::InvalidArgument, "R_D needs x + y > 0");
  const double a0 = (x + y + 3.0 * z) / 5.0;
  double a = a0;
  double q = std::pow(0.25 * kDuplicationTol, -1.0 / 6.0) * std::max({std::abs(a0 - x), std::abs(a0 - y), std::abs(a0 - z)});
  double fac = 1.0;
  double sum = 0.0;
  int m = 0;
  while (q * fac >= std::abs(a)) {
    if (++m > kMaxDuplications) throw Error(ErrorCode::ConvergenceFailure, "R_D duplication did not contract");
    const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    const double lambda = sx * sy + sx * sz + sy * sz;
    sum += fac / (sz * (z + lambda));
    x = 0.25 * (x + lambda);
    y = 0.25 * (y + lambda);
    z = 0.25 * (z + lambda);
    a = 0.25 * (a + lambda);
    fac *= 0.25;
  }
  const double X = (a - x) / a;
  const double Y = (a - y) / a;
  const double Z = -(X + Y) / 3.0;
  const double xy = X * Y;
  const double z2 = Z * Z;
  const double e2 = xy - 6.0 * z2;
  const double e3 = (3.0 * xy - 8.0 * z2) * Z;
  const double e4 = 3.0 * (xy - z2) * z2;
  const double e5 = xy * z2 * Z;
  const double series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 - 3.0 * e4 / 22.0 -
                        9.0 * e2 * e3 / 52.0 + 3.0 * e5 / 26.0;
  return fac * series / (a * std::sqrt(a)) + 3.0 * sum;
}

EllipticContext::EllipticContext(const Vec3& semi_axes) : semi_axes_(semi_axes) {
  // Validates through the ellipsoid constructor.
  (void)Ellipsoid(semi_axes);
  squares_ = semi_axes.cwiseProduct(semi_axes);
}

void EllipticContext::require_rho(double rho) const {
  if (!std::isfinite(rho)) throw Error(ErrorCode::NonFiniteInput, "rho must be finite");
  if (!(rho > -squares_.minCoeff()))
    throw Error(ErrorCode::InvalidArgument, "rho must exceed -min(c_j^2), got " + std::to_string(rho));
}

double EllipticContext::g(double rho) const {
  require_rho(rho);
  return (squares_[0] + rho) * (squares_[1] + rho) * (squares_[2] + rho);
}

double EllipticContext::phi(double rho, int j) const {
  require_rho(rho);
  if (j < 0 || j > 2) throw Error(ErrorCode::InvalidArgument, "axis index must be 0, 1 or 2");
  const int k = (j + 1) % 3;
  const int l = (j + 2) % 3;
  return 2.0 / 3.0 * carlson_rd(squares_[k] + rho, squares_[l] + rho, squares_[j] + rho);
}

Vec3 EllipticContext::phi_all(double rho) const { return {phi(rho, 0), phi(rho, 1), phi(rho, 2)}; }

double EllipticContext::i0(double rho) const {
  require_rho(rho);
  return 2.0 * carlson_rf(squares_[0] + rho, squares_[1] + rho, squares_[2] + rho);
}

double EllipticContext::phi_derivative(double rho, int j) const {
  return -1.0 / ((squares_[j] + rho) * std::sqrt(g(rho)));
}

namespace oracle {

namespace {

double integrate(const EllipticContext& ctx, double rho, double rel_tol, int axis) {
  const Vec3& sq = ctx.squares();
  // Length scale of the integrand, so the mass sits at t ~ 1/2 for any rho.
  const double scale = sq.maxCoeff() + rho;
  auto integrand = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double u = t / (1.0 - t);
    const double s = rho + scale * u * u;
    const double jac = 2.0 * scale * t / ((1.0 - t) * (1.0 - t) * (1.0 - t));
    const double g = (sq[0] + s) * (sq[1] + s) * (sq[2] + s);
    double f = 1.0 / std::sqrt(g);
    if (axis >= 0) f /= sq[axis] + s;
    return f * jac;
  };
  const auto r = quad::gauss_kronrod(integrand, 0.0, 1.0, rel_tol, 0.0, 4000);
  if (!r.converged) {
    throw Error(ErrorCode::ConvergenceFailure,
                "adaptive quadrature missed tolerance (estimate " + std::to_string(r.abs_error) + ")");
  }
  return r.value;
}

}  // namespace

double phi(const EllipticContext& ctx, double rho, int j, double rel_tol) {
  (void)ctx.g(rho);
  if (j < 0 || j > 2) throw Error(ErrorCode::InvalidArgument, "axis index must be 0, 1 or 2");
  return integrate(ctx, rho, rel_tol, j);
}

double i0(const EllipticContext& ctx, double rho, double rel_tol) {
  (void)ctx.g(rho);
  return integrate(ctx, rho, rel_tol, -1);
}

}  // namespace oracle

}  // namespace coatlab
