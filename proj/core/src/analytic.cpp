#include "coatlab/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "coatlab/error.hpp"
#include "coatlab/quadrature.hpp"

namespace coatlab {

namespace {

constexpr double kSingularRcond = 1e-14;

void require_radii(double r_i, double r_e) {
  if (!std::isfinite(r_i) || !std::isfinite(r_e)) throw Error(ErrorCode::NonFiniteInput, "radii must be finite");
  if (!(r_i > 0.0 && r_i < r_e)) throw Error(ErrorCode::InvalidArgument, "sphere radii require 0 < r_i < r_e");
}

template <int N>
Eigen::Matrix<double, N, 1> solve_interface(const Eigen::Matrix<double, N, N>& m,
                                            const Eigen::Matrix<double, N, 1>& rhs) {
  const Eigen::PartialPivLU<Eigen::Matrix<double, N, N>> lu(m);
  if (!(lu.rcond() > kSingularRcond)) {
    throw Error(ErrorCode::SingularInterfaceSystem, "interface system is singular (rcond " +
                                                        std::to_string(lu.rcond()) + ")");
  }
  return lu.solve(rhs);
}

}  // namespace

LayeredMedium::LayeredMedium(double sigma_c, double sigma_s, const Vec3& sigma_m)
    : sigma_c_(sigma_c), sigma_s_(sigma_s), sigma_m_(sigma_m) {
  if (std::isnan(sigma_c) || sigma_c < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "sigma_c must lie in [0, inf]");
  }
  if (!std::isfinite(sigma_s) || sigma_s <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "sigma_s must be positive and finite");
  }
  if (!all_finite(sigma_m) || sigma_m.minCoeff() <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "sigma_m entries must be positive and finite");
  }
}

Mat3 LayeredMedium::B() const {
  const Vec3 b = beta();
  for (int j = 0; j < 3; ++j) {
    if (b[j] == 0.0) throw Error(ErrorCode::ContrastSingular, "beta_j = 0: B = diag(1/beta_j) undefined");
  }
  return b.cwiseInverse().asDiagonal();
}

double ShellField::laplacian(const Vec3& x) const { return laplacian_probe(*this, x, 1e-3); }

FunctionField::FunctionField(std::function<double(const Vec3&)> value, std::function<Vec3(const Vec3&)> gradient,
                             std::function<bool(const Vec3&)> domain)
    : value_(std::move(value)), gradient_(std::move(gradient)), domain_(std::move(domain)) {}

double laplacian_probe(const ShellField& field, const Vec3& x, double h) {
  if (!all_finite(x) || !std::isfinite(h)) throw Error(ErrorCode::NonFiniteInput, "probe point must be finite");
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "probe step must be positive");
  if (!field.in_domain(x)) throw Error(ErrorCode::StencilLeavesShell, "probe centre is outside the shell");
  const double center = field.value(x);
  double sum = 0.0;
  for (int j = 0; j < 3; ++j) {
    Vec3 plus = x;
    Vec3 minus = x;
    plus[j] += h;
    minus[j] -= h;
    if (!field.in_domain(plus) || !field.in_domain(minus)) {
      throw Error(ErrorCode::StencilLeavesShell, "probe stencil leaves the shell");
    }
    sum += (field.value(plus) - center) + (field.value(minus) - center);
  }
  return sum / (h * h);
}

// ---------------------------------------------------------------- section 3

OverdetSolution::OverdetSolution(const ConfocalPair& pair, double scale_c, double shift_e)
    : pair_(pair), ctx_(pair.inner().semi_axes()), c_(scale_c), e_(shift_e), d_(Vec3::Zero()) {
  if (!std::isfinite(scale_c) || !std::isfinite(shift_e) || scale_c == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "scaling constant C must be finite and non-zero");
  }
  phi_outer_ = ctx_.phi_all(pair.rho0());
  k_ = c_ * 2.0 / std::sqrt(ctx_.g(pair.rho0()));
  A_ = (c_ * (phi_outer_ - ctx_.phi_all(0.0))).asDiagonal();
  d_ = -A_ * pair.inner().center();
}

double OverdetSolution::rho_at(const Vec3& local) const {
  return confocal_coords(local, pair_.inner().semi_axes()).rho;
}

double OverdetSolution::value(const Vec3& x) const {
  const Vec3 local = x - pair_.inner().center();
  const double rho = rho_at(local);
  const Vec3 sq = local.cwiseAbs2();
  const double w = 0.5 * ctx_.i0(rho) - 0.5 * ctx_.phi_all(rho).dot(sq) + 0.5 * phi_outer_.dot(sq);
  return c_ * w + e_;
}

Vec3 OverdetSolution::gradient(const Vec3& x) const {
  const Vec3 local = x - pair_.inner().center();
  const double rho = rho_at(local);
  return c_ * (phi_outer_ - ctx_.phi_all(rho)).cwiseProduct(local);
}

bool OverdetSolution::in_domain(const Vec3& x) const { return classify(pair_, x) == Region::Shell; }

OverdetSolution overdet_solution(const ConfocalPair& pair) { return OverdetSolution(pair); }

// ---------------------------------------------------------------- spheres

double SphereTransmission::profile(double r) const {
  if (r < r_i) return regime == CoreRegime::PerfectlyConducting ? 0.0 : core_slope;
  if (r <= r_e) return shell_slope + shell_dipole / (r * r * r);
  return 1.0 + exterior_dipole / (r * r * r);
}

double SphereTransmission::potential(const Vec3& x, int axis) const {
  const double r = x.norm();
  if (regime == CoreRegime::PerfectlyConducting && r < r_i) return core_constant;
  return profile(r) * x[axis];
}

Vec3 SphereTransmission::gradient(const Vec3& x, int axis) const {
  // grad (f(r) x_j) = f e_j + f'(r) x_j x / r with f = s + q / r^3.
  const double r = x.norm();
  double slope = 0.0;
  double dipole = 0.0;
  if (r < r_i) {
    slope = regime == CoreRegime::PerfectlyConducting ? 0.0 : core_slope;
  } else if (r <= r_e) {
    slope = shell_slope;
    dipole = shell_dipole;
  } else {
    slope = 1.0;
    dipole = exterior_dipole;
  }
  Vec3 g = Vec3::Zero();
  g[axis] = slope + (r > 0.0 ? dipole / (r * r * r) : 0.0);
  if (dipole != 0.0) g += -3.0 * dipole / std::pow(r, 5) * x[axis] * x;
  return g;
}

SphereTransmission sphere_transmission(double r_i, double r_e, const LayeredMedium& medium) {
  require_radii(r_i, r_e);
  if (!medium.matrix_isotropic()) {
    throw Error(ErrorCode::InvalidArgument, "sphere transmission requires an isotropic matrix");
  }
  SphereTransmission t;
  t.r_i = r_i;
  t.r_e = r_e;
  t.sigma_c = medium.sigma_c();
  t.sigma_s = medium.sigma_s();
  t.sigma_m = medium.sigma_m()[0];
  const double si = 1.0 / (r_i * r_i * r_i);
  const double se = 1.0 / (r_e * r_e * r_e);
  const double ss = t.sigma_s;
  const double sm = t.sigma_m;

  // Rows common to all regimes: continuity and flux at r_e, unknowns (b, c, p).
  //   b + c se - p se = 1,   ss (b - 2 c se) + 2 sm p se = sm
  if (medium.core_insulating() || medium.core_perfect()) {
    Eigen::Matrix3d m;
    Eigen::Vector3d rhs(0.0, 1.0, sm);
    if (medium.core_insulating()) {
      t.regime = CoreRegime::Insulating;
      m.row(0) << 1.0, -2.0 * si, 0.0;  // zero shell flux at r_i
    } else {
      t.regime = CoreRegime::PerfectlyConducting;
      m.row(0) << 1.0, si, 0.0;  // u = gamma = 0 on r_i (l = 1 carries no constant)
    }
    m.row(1) << 1.0, se, -se;
    m.row(2) << ss, -2.0 * ss * se, 2.0 * sm * se;
    const Eigen::Vector3d x = solve_interface<3>(m, rhs);
    t.shell_slope = x[0];
    t.shell_dipole = x[1];
    t.exterior_dipole = x[2];
    t.core_slope = t.regime == CoreRegime::Insulating ? x[0] + x[1] * si : 0.0;
    t.core_constant = 0.0;
    t.interface_residual = (m * x - rhs).cwiseAbs().maxCoeff();
    return t;
  }

  const double sc = medium.sigma_c();
  Eigen::Matrix4d m;
  m << 1.0, -1.0, -si, 0.0,            //
      sc, -ss, 2.0 * ss * si, 0.0,     //
      0.0, 1.0, se, -se,               //
      0.0, ss, -2.0 * ss * se, 2.0 * sm * se;
  const Eigen::Vector4d rhs(0.0, 0.0, 1.0, sm);
  const Eigen::Vector4d x = solve_interface<4>(m, rhs);
  t.regime = CoreRegime::Finite;
  t.core_slope = x[0];
  t.shell_slope = x[1];
  t.shell_dipole = x[2];
  t.exterior_dipole = x[3];
  t.interface_residual = (m * x - rhs).cwiseAbs().maxCoeff();
  return t;
}

double neutral_sigma_m(double r_i, double r_e, double sigma_c, double sigma_s) {
  require_radii(r_i, r_e);
  if (sigma_c == sigma_s) throw Error(ErrorCode::VacuousNeutrality, "sigma_c = sigma_s: every sigma_m = sigma_s is trivially neutral");
  auto dipole = [&](double sm) {
    return sphere_transmission(r_i, r_e, LayeredMedium::isotropic(sigma_c, sigma_s, sm)).exterior_dipole;
  };
  // Expand geometrically from sigma_s until p changes sign.
  double lo = sigma_s;
  double hi = sigma_s;
  double p_lo = dipole(lo);
  double p_hi = p_lo;
  if (p_lo == 0.0) return lo;
  bool bracketed = false;
  for (int it = 0; it < 200 && !bracketed; ++it) {
    const double down = lo * 0.5;
    const double up = hi * 2.0;
    const double p_down = dipole(down);
    const double p_up = dipole(up);
    if ((p_down > 0.0) != (p_lo > 0.0) || p_down == 0.0) {
      hi = lo;
      p_hi = p_lo;
      lo = down;
      p_lo = p_down;
      bracketed = true;
    } else if ((p_up > 0.0) != (p_hi > 0.0) || p_up == 0.0) {
      lo = hi;
      p_lo = p_hi;
      hi = up;
      p_hi = p_up;
      bracketed = true;
    } else {
      lo = down;
      hi = up;
      p_lo = p_down;
      p_hi = p_up;
    }
  }
  if (!bracketed) throw Error(ErrorCode::NoPositiveRoot, "no positive sigma_m cancels the exterior dipole");
  if (p_lo == 0.0) return lo;
  if (p_hi == 0.0) return hi;
  // Bisection to adjacent doubles, then keep the endpoint with the smaller |p|.
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double p_mid = dipole(mid);
    if (p_mid == 0.0) return mid;
    if ((p_mid > 0.0) == (p_lo > 0.0)) {
      lo = mid;
      p_lo = p_mid;
    } else {
      hi = mid;
      p_hi = p_mid;
    }
  }
  return std::abs(p_lo) <= std::abs(p_hi) ? lo : hi;
}

NeutralSphereField::NeutralSphereField(const SphereTransmission& t, double beta) : t_(t), beta_(beta) {
  if (beta == 0.0) throw Error(ErrorCode::ContrastSingular, "beta = 0");
}

// w = psi - r^2 / (2 beta) with psi = (b r^2 / 2 - c / r) / beta, the exact
// antiderivative of (b + c / r^3) r / beta.
double NeutralSphereField::value(const Vec3& x) const {
  const double r = x.norm();
  return ((t_.shell_slope - 1.0) * 0.5 * r * r - t_.shell_dipole / r) / beta_;
}

Vec3 NeutralSphereField::gradient(const Vec3& x) const {
  const double r = x.norm();
  return ((t_.shell_slope - 1.0) + t_.shell_dipole / (r * r * r)) / beta_ * x;
}

double NeutralSphereField::laplacian(const Vec3&) const { return 3.0 * (t_.shell_slope - 1.0) / beta_; }

bool NeutralSphereField::in_domain(const Vec3& x) const {
  const double r = x.norm();
  return r > t_.r_i && r < t_.r_e;
}

double NeutralSphereField::psi_by_quadrature(double r) const {
  const auto radial = [&](double s) { return (t_.shell_slope + t_.shell_dipole / (s * s * s)) * s / beta_; };
  const double base = (t_.shell_slope * 0.5 * t_.r_i * t_.r_i - t_.shell_dipole / t_.r_i) / beta_;
  const quad::Result q = quad::gauss_kronrod(radial, t_.r_i, r, 1e-14, 1e-15);
  return base + q.value;
}

NeutralShell neutral_shell_field(double r_i, double r_e, double sigma_c, double sigma_s) {
  if (!(sigma_c > sigma_s)) {
    throw Error(ErrorCode::AssumptionViolated, "the section 2 construction assumes sigma_c > sigma_s");
  }
  NeutralShell out;
  out.sigma_m = neutral_sigma_m(r_i, r_e, sigma_c, sigma_s);
  out.transmission = sphere_transmission(r_i, r_e, LayeredMedium::isotropic(sigma_c, sigma_s, out.sigma_m));
  out.beta = out.sigma_m / sigma_s - 1.0;
  out.c0 = out.transmission.core_slope / out.beta;
  out.k = 1.0;
  out.A = Mat3::Identity() * (out.c0 - 1.0 / out.beta);
  out.d = Vec3::Zero();
  out.field = std::make_shared<NeutralSphereField>(out.transmission, out.beta);
  return out;
}

}  // namespace coatlab
