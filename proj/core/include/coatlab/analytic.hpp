#pragma once

#include <functional>
#include <memory>

#include "coatlab/elliptic.hpp"
#include "coatlab/geometry.hpp"
#include "coatlab/types.hpp"

namespace coatlab {

// Conductivities of core, shell and (diagonal) matrix. sigma_c may be 0 or
// +infinity; the two limits select the degenerate interface systems.
class LayeredMedium {
 public:
  LayeredMedium(double sigma_c, double sigma_s, const Vec3& sigma_m);
  static LayeredMedium isotropic(double sigma_c, double sigma_s, double sigma_m) {
    return LayeredMedium(sigma_c, sigma_s, Vec3::Constant(sigma_m));
  }

  double sigma_c() const { return sigma_c_; }
  double sigma_s() const { return sigma_s_; }
  const Vec3& sigma_m() const { return sigma_m_; }
  bool core_insulating() const { return sigma_c_ == 0.0; }
  bool core_perfect() const { return sigma_c_ == kInf; }
  bool matrix_isotropic() const { return sigma_m_[0] == sigma_m_[1] && sigma_m_[1] == sigma_m_[2]; }

  // alpha = sigma_c / sigma_s - 1 (infinite for a perfectly conducting core).
  double alpha() const { return sigma_c_ / sigma_s_ - 1.0; }
  // beta_j = sigma_{m,j} / sigma_s - 1.
  Vec3 beta() const { return sigma_m_ / sigma_s_ - Vec3::Ones(); }
  // B = diag(1 / beta_j). Throws ContrastSingular when some beta_j = 0.
  Mat3 B() const;

 private:
  double sigma_c_;
  double sigma_s_;
  Vec3 sigma_m_;
};

// A scalar field on a shell region exposing value, gradient and Laplacian.
class ShellField {
 public:
  virtual ~ShellField() = default;
  virtual double value(const Vec3& x) const = 0;
  virtual Vec3 gradient(const Vec3& x) const = 0;
  // Analytic Laplacian where the field knows it; defaults to the
  // finite-difference probe with step 1e-3.
  virtual double laplacian(const Vec3& x) const;
  // True when x lies in the open shell on which the field is a solution.
  virtual bool in_domain(const Vec3& x) const = 0;
};

// Field given by closures; in_domain defaults to everywhere.
class FunctionField final : public ShellField {
 public:
  FunctionField(std::function<double(const Vec3&)> value, std::function<Vec3(const Vec3&)> gradient,
                std::function<bool(const Vec3&)> domain = {});
  double value(const Vec3& x) const override { return value_(x); }
  Vec3 gradient(const Vec3& x) const override { return gradient_(x); }
  bool in_domain(const Vec3& x) const override { return domain_ ? domain_(x) : true; }

 private:
  std::function<double(const Vec3&)> value_;
  std::function<Vec3(const Vec3&)> gradient_;
  std::function<bool(const Vec3&)> domain_;
};

// Central 7-point estimate of the Laplacian with step h. Throws
// StencilLeavesShell if any stencil point is outside field.in_domain.
double laplacian_probe(const ShellField& field, const Vec3& x, double h);

// The section 3 solution on a confocal pair:
//   w = C [ 1/2 I0(rho) - 1/2 sum phi_j(rho) x_j^2 + 1/2 sum phi_j(rho0) x_j^2 ] + E
// in the pair's local frame, with Laplacian k = C * 2/sqrt(g(rho0)) and
// boundary gradient A x + d on the core, A = C diag(phi_j(rho0) - phi_j(0)),
// d = -A * center (zero for a centred pair).
class OverdetSolution final : public ShellField {
 public:
  explicit OverdetSolution(const ConfocalPair& pair, double scale_c = 1.0, double shift_e = 0.0);

  const ConfocalPair& pair() const { return pair_; }
  double k() const { return k_; }
  const Mat3& A() const { return A_; }
  const Vec3& d() const { return d_; }
  double scale_c() const { return c_; }
  double shift_e() const { return e_; }
  // Same solution after w -> C w + E.
  OverdetSolution scaled(double c, double e) const { return OverdetSolution(pair_, c_ * c, c * e_ + e); }

  double value(const Vec3& x) const override;
  Vec3 gradient(const Vec3& x) const override;
  double laplacian(const Vec3&) const override { return k_; }
  bool in_domain(const Vec3& x) const override;

 private:
  double rho_at(const Vec3& local) const;

  ConfocalPair pair_;
  EllipticContext ctx_;
  Vec3 phi_outer_;
  double c_;
  double e_;
  double k_;
  Mat3 A_;
  Vec3 d_;
};

OverdetSolution overdet_solution(const ConfocalPair& pair);

enum class CoreRegime { Finite, Insulating, PerfectlyConducting };

// l = 1 solution of the concentric-sphere transmission problem for the
// incident field x_j:
//   core      u = core_slope * x_j                    (u = gamma on the core for sigma_c = inf)
//   shell     u = (shell_slope + shell_dipole / r^3) x_j
//   exterior  u = (1 + exterior_dipole / r^3) x_j
struct SphereTransmission {
  double r_i = 0.0;
  double r_e = 0.0;
  double sigma_c = 0.0;
  double sigma_s = 0.0;
  double sigma_m = 0.0;
  CoreRegime regime = CoreRegime::Finite;
  double core_slope = 0.0;
  double shell_slope = 0.0;
  double shell_dipole = 0.0;
  double exterior_dipole = 0.0;
  double core_constant = 0.0;     // gamma_j, only meaningful for sigma_c = inf
  double interface_residual = 0.0;  // max residual of the interface equations

  // Radial profile u_j / x_j at radius r.
  double profile(double r) const;
  double potential(const Vec3& x, int axis) const;
  Vec3 gradient(const Vec3& x, int axis) const;
};

// Solves the interface system for 0 < r_i < r_e and an isotropic matrix.
// Throws SingularInterfaceSystem at degenerate conductivities.
SphereTransmission sphere_transmission(double r_i, double r_e, const LayeredMedium& medium);

// Matrix conductivity making the exterior dipole vanish, by bracketed root
// finding on p(sigma_m). Throws VacuousNeutrality for sigma_c = sigma_s and
// NoPositiveRoot if no sign change is found.
double neutral_sigma_m(double r_i, double r_e, double sigma_c, double sigma_s);

// The section 2 field w = psi - 1/2 x.Bx on neutral concentric spheres, with
// psi the radial antiderivative of u / beta in the shell.
class NeutralSphereField final : public ShellField {
 public:
  NeutralSphereField(const SphereTransmission& t, double beta);
  double value(const Vec3& x) const override;
  Vec3 gradient(const Vec3& x) const override;
  double laplacian(const Vec3&) const override;
  bool in_domain(const Vec3& x) const override;
  // psi(r) from 1D quadrature of u_r / beta starting at r_i (independent of
  // the closed-form antiderivative used by value()).
  double psi_by_quadrature(double r) const;

 private:
  SphereTransmission t_;
  double beta_;
};

struct NeutralShell {
  double sigma_m = 0.0;
  double beta = 0.0;
  double c0 = 0.0;
  double k = 1.0;
  Mat3 A = Mat3::Zero();
  Vec3 d = Vec3::Zero();
  SphereTransmission transmission;
  std::shared_ptr<NeutralSphereField> field;
};

// Requires sigma_c > sigma_s (AssumptionViolated otherwise).
NeutralShell neutral_shell_field(double r_i, double r_e, double sigma_c, double sigma_s);

}  // namespace coatlab
