#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "coatlab/analytic.hpp"
#include "coatlab/mesh.hpp"
#include "coatlab/types.hpp"

namespace coatlab {

struct BemOptions {
  // A panel is integrated with the 7-point rule once the collocation point is
  // farther than near_factor panel diameters from it; closer panels are split
  // into four, recursively, up to max_refine levels.
  double near_factor = 3.0;
  int max_refine = 6;
  // Meshes whose worst triangle aspect ratio exceeds this are rejected.
  double mesh_aspect_max = 50.0;
  int probes = 242;
  double probe_radius_factor = 4.0;  // probe sphere radius = factor * diam
};

// Geometry of a coated inclusion with the assembled, conductivity-independent
// boundary operators (adjoint double layer K* and, on demand, the single
// layer on the core). Shared by every solve on the same meshes.
class BemSystem {
 public:
  // Throws MeshesIntersect unless core lies strictly inside shell, and
  // DegenerateMesh when a mesh violates the aspect-ratio guard.
  BemSystem(TriMesh core, TriMesh shell, const BemOptions& opts = {});

  const TriMesh& core() const { return core_; }
  const TriMesh& shell() const { return shell_; }
  const BemOptions& options() const { return opts_; }
  std::size_t core_panels() const { return core_.triangle_count(); }
  std::size_t panels() const { return core_.triangle_count() + shell_.triangle_count(); }
  // Centroid of the shell polyhedron; probes are placed around it.
  const Vec3& center() const { return center_; }
  double diameter() const { return diameter_; }

  // Collocation point, unit normal and area of global panel i (core first).
  const Vec3& point(std::size_t i) const;
  const Vec3& normal(std::size_t i) const;
  double area(std::size_t i) const;

  // K*[i, j] = int_{T_j} d/dnu(x_i) Gamma(x_i - y) dS_y, all panels. The flat
  // self panel contributes nothing, so each diagonal entry instead enforces
  // Gauss' law sum_i |T_i| K*[i, j] = |T_j| / 2 within its own surface.
  const Eigen::MatrixXd& adjoint_double_layer() const { return k_; }
  // S[i, j] = int_{T_j} Gamma(x_i - y) dS_y for core collocation points i
  // (all panels j); assembled on first use.
  const Eigen::MatrixXd& core_single_layer() const;

  // Single-layer potential of a density on all panels at x (exact panel integrals).
  double single_layer(const Eigen::VectorXd& density, const Vec3& x) const;

 private:
  TriMesh core_;
  TriMesh shell_;
  BemOptions opts_;
  Vec3 center_;
  double diameter_ = 0.0;
  Eigen::MatrixXd k_;
  mutable std::optional<Eigen::MatrixXd> s_core_;
};

// u = a.x + S_{dD}[phi_D] + S_{dOmega}[phi_Omega].
struct TransmissionSolution {
  std::shared_ptr<const BemSystem> system;
  Vec3 a = Vec3::Zero();
  Eigen::VectorXd density;  // core panels first, then shell panels
  double charge_core = 0.0;   // int_{dD} phi_D
  double charge_shell = 0.0;  // int_{dOmega} phi_Omega
  double core_potential = 0.0;  // constant value of u in D (sigma_c = inf only)

  double perturbation(const Vec3& x) const;  // u(x) - a.x
  double value(const Vec3& x) const { return a.dot(x) + perturbation(x); }
};

// Contrast parameter (s1 + s2) / (2 (s1 - s2)); infinite s1 gives 1/2.
double contrast_lambda(double inner, double outer);

// Solves the transmission problem for an isotropic matrix. sigma_c = 0 is the
// Neumann core (lambda_D = -1/2); sigma_c = inf uses Dirichlet rows on dD
// (u = const) plus a zero-charge constraint. Throws ContrastSingular when
// sigma_c = sigma_s or sigma_s = sigma_m, InvalidArgument for an anisotropic
// matrix or a zero direction.
TransmissionSolution solve_transmission(const std::shared_ptr<const BemSystem>& system, const LayeredMedium& medium,
                                        const Vec3& a);
// Three incident directions sharing one factorisation.
std::vector<TransmissionSolution> solve_transmission(const std::shared_ptr<const BemSystem>& system,
                                                     const LayeredMedium& medium, const std::vector<Vec3>& directions);

// Quasi-uniform probe points on the sphere of radius probe_radius_factor * diam.
std::vector<Vec3> far_probes(const BemSystem& system);

struct ProbeValue {
  Vec3 x;
  double perturbation;  // u - a.x
  double weighted;      // |u - a.x| |x - center|^2 / |a|
};

struct NeutralityDefect {
  double defect = 0.0;              // max over the computed directions
  std::vector<double> per_direction;
  std::vector<Vec3> directions;
  std::size_t panels = 0;
  double probe_radius = 0.0;
  std::vector<ProbeValue> probes;   // probes of the first direction
};

NeutralityDefect neutrality_defect(const TransmissionSolution& sol);
// a = e1, e2, e3 with one factorisation.
NeutralityDefect neutrality_defect(const std::shared_ptr<const BemSystem>& system, const LayeredMedium& medium);

// Least-squares fit of u - a.x ~ p.(x - c) / |x - c|^3 at the far probes.
struct DipoleFit {
  Vec3 p = Vec3::Zero();
  double max_remainder = 0.0;  // max |data - fit|
  double dipole_scale = 0.0;   // max |p.(x - c)| / |x - c|^3 over probes
};
DipoleFit fit_dipole(const TransmissionSolution& sol);

// Geodesic frequency 2^(s - 2) used for BEM meshes at subdivision level s, so
// that s = 5 (2 x 1280 panels) fits the dense-LU budget. Throws
// SubdivisionTooLarge outside [2, kMaxBemSubdivisions].
inline constexpr int kMaxBemSubdivisions = 6;
int bem_frequency(int subdivisions);
// Concentric or offset sphere pair meshed at subdivision level s.
std::shared_ptr<const BemSystem> sphere_pair_system(double r_i, double r_e, int subdivisions,
                                                    const Vec3& core_offset = Vec3::Zero(),
                                                    const BemOptions& opts = {});

}  // namespace coatlab
