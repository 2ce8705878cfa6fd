#include "coatlab/bem.hpp"

#include <algorithm>
#include <cmath>

#include "coatlab/error.hpp"
#include "coatlab/parallel.hpp"
#include "coatlab/potential.hpp"
#include "coatlab/quadrature.hpp"
#include "coatlab/sampling.hpp"

namespace coatlab {

namespace {

constexpr double kInv4Pi = 1.0 / (4.0 * kPi);

double triangle_diameter(const Vec3& a, const Vec3& b, const Vec3& c) {
  return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

// int_T (x - y).nu / (4 pi |x - y|^3) dS_y, with x off the closed triangle.
double kernel_integral(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x, const Vec3& nu,
                       double near_factor, int levels) {
  const Vec3 g = (a + b + c) / 3.0;
  const double diam = triangle_diameter(a, b, c);
  if (levels == 0 || (x - g).norm() > near_factor * diam) {
    const double area = 0.5 * (b - a).cross(c - a).norm();
    double s = 0.0;
    for (const auto& q : quad::triangle_rule7()) {
      const Vec3 r = x - (q.l1 * a + q.l2 * b + q.l3 * c);
      const double rn = r.norm();
      s += q.weight * r.dot(nu) / (rn * rn * rn);
    }
    return s * area * kInv4Pi;
  }
  const Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  return kernel_integral(a, ab, ca, x, nu, near_factor, levels - 1) +
         kernel_integral(ab, b, bc, x, nu, near_factor, levels - 1) +
         kernel_integral(ca, bc, c, x, nu, near_factor, levels - 1) +
         kernel_integral(ab, bc, ca, x, nu, near_factor, levels - 1);
}

void check_nested(const TriMesh& core, const TriMesh& shell) {
  const MeshInsideTester in_shell(shell);
  for (const Vec3& v : core.vertices()) {
    if (!in_shell.contains(v)) throw Error(ErrorCode::MeshesIntersect, "core mesh is not inside the shell mesh");
  }
  const MeshInsideTester in_core(core);
  for (const Vec3& v : shell.vertices()) {
    if (in_core.contains(v)) throw Error(ErrorCode::MeshesIntersect, "shell mesh enters the core mesh");
  }
}

void check_aspect(const TriMesh& m, double limit, const char* which) {
  const double ar = m.max_aspect_ratio();
  if (!(ar <= limit)) {
    throw Error(ErrorCode::DegenerateMesh, std::string(which) + " mesh aspect ratio " + std::to_string(ar) +
                                               " exceeds mesh_aspect_max " + std::to_string(limit));
  }
}

}  // namespace

BemSystem::BemSystem(TriMesh core, TriMesh shell, const BemOptions& opts)
    : core_(std::move(core)), shell_(std::move(shell)), opts_(opts) {
  if (!(opts_.near_factor > 0.0) || opts_.max_refine < 0 || opts_.probes < 4 || !(opts_.probe_radius_factor > 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid BEM options");
  }
  check_aspect(core_, opts_.mesh_aspect_max, "core");
  check_aspect(shell_, opts_.mesh_aspect_max, "shell");
  check_nested(core_, shell_);
  center_ = shell_.volume_centroid();
  diameter_ = shell_.diameter();

  const std::size_t n = panels();
  k_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    const Vec3& x = point(i);
    const Vec3& nu = normal(i);
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      if (j != i) {  // flat self panel: (x - y).nu = 0
        const TriMesh& m = j < core_panels() ? core_ : shell_;
        const std::size_t t = j < core_panels() ? j : j - core_panels();
        v = kernel_integral(m.corner(t, 0), m.corner(t, 1), m.corner(t, 2), x, nu, opts_.near_factor,
                            opts_.max_refine);
      }
      k_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  });
  // The flat self panel integrates to zero, which drops the O(h) curvature
  // contribution of the true surface patch. Gauss' law, int_S d/dnu(x)
  // Gamma(x - y) dS_x = 1/2 for y on the closed surface S, fixes it: each
  // diagonal entry restores the area-weighted column sum within its surface.
  const auto nd = static_cast<Eigen::Index>(core_panels());
  const auto nn = static_cast<Eigen::Index>(n);
  parallel_for(n, [&](std::size_t uj) {
    const auto j = static_cast<Eigen::Index>(uj);
    const Eigen::Index lo = j < nd ? 0 : nd;
    const Eigen::Index hi = j < nd ? nd : nn;
    double sum = 0.0;
    for (Eigen::Index i = lo; i < hi; ++i) {
      if (i != j) sum += area(static_cast<std::size_t>(i)) * k_(i, j);
    }
    k_(j, j) = 0.5 - sum / area(uj);
  });
}

const Vec3& BemSystem::point(std::size_t i) const {
  return i < core_panels() ? core_.centroids()[i] : shell_.centroids()[i - core_panels()];
}

const Vec3& BemSystem::normal(std::size_t i) const {
  return i < core_panels() ? core_.normals()[i] : shell_.normals()[i - core_panels()];
}

double BemSystem::area(std::size_t i) const {
  return i < core_panels() ? core_.areas()[i] : shell_.areas()[i - core_panels()];
}

const Eigen::MatrixXd& BemSystem::core_single_layer() const {
  if (!s_core_) {
    const std::size_t nd = core_panels();
    const std::size_t n = panels();
    Eigen::MatrixXd s(static_cast<Eigen::Index>(nd), static_cast<Eigen::Index>(n));
    parallel_for(nd, [&](std::size_t i) {
      const Vec3& x = point(i);
      for (std::size_t j = 0; j < n; ++j) {
        const TriMesh& m = j < nd ? core_ : shell_;
        const std::size_t t = j < nd ? j : j - nd;
        s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            -kInv4Pi * triangle_inverse_distance(m.corner(t, 0), m.corner(t, 1), m.corner(t, 2), x);
      }
    });
    s_core_ = std::move(s);
  }
  return *s_core_;
}

double BemSystem::single_layer(const Eigen::VectorXd& density, const Vec3& x) const {
  const std::size_t nd = core_panels();
  double s = 0.0;
  for (std::size_t j = 0; j < panels(); ++j) {
    const double q = density[static_cast<Eigen::Index>(j)];
    if (q == 0.0) continue;
    const TriMesh& m = j < nd ? core_ : shell_;
    const std::size_t t = j < nd ? j : j - nd;
    s += q * triangle_inverse_distance(m.corner(t, 0), m.corner(t, 1), m.corner(t, 2), x);
  }
  return -kInv4Pi * s;
}

double TransmissionSolution::perturbation(const Vec3& x) const { return system->single_layer(density, x); }

double contrast_lambda(double inner, double outer) {
  if (inner == kInf) return 0.5;
  return (inner + outer) / (2.0 * (inner - outer));
}

std::vector<TransmissionSolution> solve_transmission(const std::shared_ptr<const BemSystem>& system,
                                                     const LayeredMedium& medium,
                                                     const std::vector<Vec3>& directions) {
  if (!system) throw Error(ErrorCode::InvalidArgument, "missing BEM system");
  if (!medium.matrix_isotropic()) {
    throw Error(ErrorCode::InvalidArgument, "the BEM path supports an isotropic matrix only");
  }
  const double sc = medium.sigma_c();
  const double ss = medium.sigma_s();
  const double sm = medium.sigma_m()[0];
  if (sc == ss) throw Error(ErrorCode::ContrastSingular, "sigma_c = sigma_s leaves lambda_D undefined");
  if (ss == sm) throw Error(ErrorCode::ContrastSingular, "sigma_s = sigma_m leaves lambda_Omega undefined");
  for (const Vec3& a : directions) {
    if (!all_finite(a) || a.norm() == 0.0) throw Error(ErrorCode::InvalidArgument, "incident direction must be nonzero");
  }

  const BemSystem& sys = *system;
  const auto n = static_cast<Eigen::Index>(sys.panels());
  const auto nd = static_cast<Eigen::Index>(sys.core_panels());
  const double lambda_d = contrast_lambda(sc, ss);
  const double lambda_o = contrast_lambda(ss, sm);
  const bool dirichlet = medium.core_perfect();
  const Eigen::Index rows = dirichlet ? n + 1 : n;

  // Flux rows: (lambda I - K*) phi = a.nu. Dirichlet core rows (sigma_c = inf):
  // S phi - U = -a.x with the extra unknown U and the row sum area * phi_D = 0.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, rows);
  m.topLeftCorner(n, n) = -sys.adjoint_double_layer();
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) += i < nd ? lambda_d : lambda_o;
  if (dirichlet) {
    m.topLeftCorner(nd, n) = sys.core_single_layer();
    m.block(0, n, nd, 1).setConstant(-1.0);
    for (Eigen::Index j = 0; j < nd; ++j) m(n, j) = sys.area(static_cast<std::size_t>(j));
  }
  Eigen::MatrixXd rhs(rows, static_cast<Eigen::Index>(directions.size()));
  for (std::size_t c = 0; c < directions.size(); ++c) {
    const Vec3& a = directions[c];
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      rhs(i, static_cast<Eigen::Index>(c)) = (dirichlet && i < nd) ? -a.dot(sys.point(ui)) : a.dot(sys.normal(ui));
    }
    if (dirichlet) rhs(n, static_cast<Eigen::Index>(c)) = 0.0;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::MatrixXd x = lu.solve(rhs);
  if (!x.allFinite()) throw Error(ErrorCode::SingularInterfaceSystem, "BEM system is singular");

  std::vector<TransmissionSolution> out;
  for (std::size_t c = 0; c < directions.size(); ++c) {
    TransmissionSolution s;
    s.system = system;
    s.a = directions[c];
    s.density = x.col(static_cast<Eigen::Index>(c)).head(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double q = s.density[j] * sys.area(static_cast<std::size_t>(j));
      (j < nd ? s.charge_core : s.charge_shell) += q;
    }
    if (dirichlet) s.core_potential = x(n, static_cast<Eigen::Index>(c));
    out.push_back(std::move(s));
  }
  return out;
}

TransmissionSolution solve_transmission(const std::shared_ptr<const BemSystem>& system, const LayeredMedium& medium,
                                        const Vec3& a) {
  return std::move(solve_transmission(system, medium, std::vector<Vec3>{a}).front());
}

std::vector<Vec3> far_probes(const BemSystem& system) {
  const double radius = system.options().probe_radius_factor * system.diameter();
  std::vector<Vec3> pts;
  for (const Vec3& u : fibonacci_sphere(system.options().probes)) pts.push_back(system.center() + radius * u);
  return pts;
}

NeutralityDefect neutrality_defect(const TransmissionSolution& sol) {
  const BemSystem& sys = *sol.system;
  NeutralityDefect d;
  d.panels = sys.panels();
  d.probe_radius = sys.options().probe_radius_factor * sys.diameter();
  d.directions = {sol.a};
  const std::vector<Vec3> pts = far_probes(sys);
  std::vector<ProbeValue> probes(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const double v = sol.perturbation(pts[i]);
    probes[i] = {pts[i], v, std::abs(v) * (pts[i] - sys.center()).squaredNorm() / sol.a.norm()};
  });
  double worst = 0.0;
  for (const ProbeValue& p : probes) worst = std::max(worst, p.weighted);
  d.per_direction = {worst};
  d.defect = worst;
  d.probes = std::move(probes);
  return d;
}

NeutralityDefect neutrality_defect(const std::shared_ptr<const BemSystem>& system, const LayeredMedium& medium) {
  const std::vector<TransmissionSolution> sols =
      solve_transmission(system, medium, {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()});
  NeutralityDefect d;
  for (const TransmissionSolution& s : sols) {
    NeutralityDefect one = neutrality_defect(s);
    if (d.directions.empty()) {
      d = one;
    } else {
      d.directions.push_back(s.a);
      d.per_direction.push_back(one.defect);
      d.defect = std::max(d.defect, one.defect);
    }
  }
  return d;
}

DipoleFit fit_dipole(const TransmissionSolution& sol) {
  const BemSystem& sys = *sol.system;
  const std::vector<Vec3> pts = far_probes(sys);
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd m(n, 3);
  Eigen::VectorXd v(n);
  std::vector<double> data(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { data[i] = sol.perturbation(pts[i]); });
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 r = pts[static_cast<std::size_t>(i)] - sys.center();
    m.row(i) = (r / std::pow(r.norm(), 3)).transpose();
    v[i] = data[static_cast<std::size_t>(i)];
  }
  DipoleFit f;
  f.p = m.colPivHouseholderQr().solve(v);
  const Eigen::VectorXd fit = m * f.p;
  f.max_remainder = (v - fit).cwiseAbs().maxCoeff();
  f.dipole_scale = fit.cwiseAbs().maxCoeff();
  return f;
}

int bem_frequency(int subdivisions) {
  if (subdivisions < 2 || subdivisions > kMaxBemSubdivisions) {
    throw Error(ErrorCode::SubdivisionTooLarge, "BEM subdivision level must be in [2, " +
                                                    std::to_string(kMaxBemSubdivisions) + "]");
  }
  // Level s has 20 * 4^(s - 2) panels per surface: each level halves h.
  return 1 << (subdivisions - 2);
}

std::shared_ptr<const BemSystem> sphere_pair_system(double r_i, double r_e, int subdivisions, const Vec3& core_offset,
                                                    const BemOptions& opts) {
  if (!(r_i > 0.0) || !(r_e > r_i)) throw Error(ErrorCode::InvalidArgument, "need 0 < r_i < r_e");
  const int nu = bem_frequency(subdivisions);
  return std::make_shared<const BemSystem>(mesh_ellipsoid_frequency(Ellipsoid::sphere(r_i, core_offset), nu),
                                           mesh_ellipsoid_frequency(Ellipsoid::sphere(r_e), nu), opts);
}

}  // namespace coatlab
