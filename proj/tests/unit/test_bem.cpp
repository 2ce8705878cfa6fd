#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "coatlab/bem.hpp"
#include "coatlab/error.hpp"
#include "coatlab/sampling.hpp"

using namespace coatlab;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

constexpr double kNeutralSigmaM = 16.0 / 13.0;

// Sphere pairs (1, 2) shared across tests: assembly dominates small solves.
std::shared_ptr<const BemSystem> spheres(int s, double offset = 0.0) {
  static std::map<std::pair<int, double>, std::shared_ptr<const BemSystem>> cache;
  auto& slot = cache[{s, offset}];
  if (!slot) slot = sphere_pair_system(1.0, 2.0, s, Vec3(offset, 0.0, 0.0));
  return slot;
}

double analytic_dipole(const LayeredMedium& m) { return sphere_transmission(1.0, 2.0, m).exterior_dipole; }

}  // namespace

TEST(Bem, FrequencyMapping) {
  EXPECT_EQ(bem_frequency(3), 2);
  EXPECT_EQ(bem_frequency(4), 4);
  EXPECT_EQ(bem_frequency(5), 8);
  EXPECT_EQ(spheres(5)->panels(), 2u * 1280u);
  EXPECT_EQ(code_of([] { bem_frequency(1); }), ErrorCode::SubdivisionTooLarge);
  EXPECT_EQ(code_of([] { bem_frequency(kMaxBemSubdivisions + 1); }), ErrorCode::SubdivisionTooLarge);
}

TEST(Bem, GaussCorrectedOperatorOnSphere) {
  // Degree-1 densities are K* eigenfunctions on a sphere with eigenvalue 1/6.
  const BemSystem& sys = *spheres(4);
  const auto nd = static_cast<Eigen::Index>(sys.core_panels());
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.panels()));
  for (Eigen::Index i = 0; i < nd; ++i) phi[i] = sys.normal(static_cast<std::size_t>(i)).z();
  const Eigen::VectorXd k = sys.adjoint_double_layer() * phi;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < nd; ++i) worst = std::max(worst, std::abs(k[i] - phi[i] / 6.0));
  EXPECT_LT(worst, 0.02);
}

TEST(Bem, InputErrors) {
  const auto sys = spheres(3);
  EXPECT_EQ(code_of([&] { solve_transmission(sys, LayeredMedium::isotropic(1, 1, 2), Vec3::UnitZ()); }),
            ErrorCode::ContrastSingular);
  EXPECT_EQ(code_of([&] { solve_transmission(sys, LayeredMedium::isotropic(2, 1, 1), Vec3::UnitZ()); }),
            ErrorCode::ContrastSingular);
  EXPECT_EQ(code_of([&] { solve_transmission(sys, LayeredMedium::isotropic(1, 1, 1), Vec3::UnitZ()); }),
            ErrorCode::ContrastSingular);
  EXPECT_EQ(code_of([&] { solve_transmission(sys, LayeredMedium(2, 1, Vec3(1.5, 1.5, 2.0)), Vec3::UnitZ()); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { solve_transmission(sys, LayeredMedium::isotropic(2, 1, 3), Vec3::Zero()); }),
            ErrorCode::InvalidArgument);
  // Core poking through the shell, and the shell inside the core.
  EXPECT_EQ(code_of([] { sphere_pair_system(1.0, 2.0, 3, Vec3(1.5, 0, 0)); }), ErrorCode::MeshesIntersect);
  EXPECT_EQ(code_of([] {
              BemSystem(mesh_ellipsoid_frequency(Ellipsoid::sphere(2.0), 2),
                        mesh_ellipsoid_frequency(Ellipsoid::sphere(1.0), 2));
            }),
            ErrorCode::MeshesIntersect);
  // Sliver panels are rejected by the aspect-ratio guard.
  const TriMesh needle = mesh_ellipsoid_frequency(Ellipsoid(Vec3(0.01, 0.01, 1.0)), 2);
  ASSERT_GT(needle.max_aspect_ratio(), 50.0);
  EXPECT_EQ(code_of([&] { BemSystem(needle, mesh_ellipsoid_frequency(Ellipsoid::sphere(2.0), 2)); }),
            ErrorCode::DegenerateMesh);
}

TEST(Bem, VanishingContrast) {
  const auto sys = spheres(3);
  for (double eps : {1e-6, 1e-9}) {
    const LayeredMedium m = LayeredMedium::isotropic(1.0 + eps, 1.0, 1.0 - eps);
    const TransmissionSolution sol = solve_transmission(sys, m, Vec3::UnitZ());
    EXPECT_LE(sol.density.cwiseAbs().maxCoeff(), 10.0 * eps);
    EXPECT_LE(neutrality_defect(sol).defect, 10.0 * eps);
  }
  const TransmissionSolution h = solve_transmission(sys, LayeredMedium::isotropic(1.0 + 1e-9, 1.0, 1.0 + 1e-9),
                                                    Vec3::UnitX());
  EXPECT_LE(neutrality_defect(h).defect, 1e-8);
}

TEST(Bem, ChargesVanishAndLinearity) {
  const auto sys = spheres(4);
  const LayeredMedium m = LayeredMedium::isotropic(3.0, 0.7, 1.9);
  const auto sols = solve_transmission(sys, m, {Vec3::UnitX(), Vec3::UnitY(), Vec3(1, 1, 0)});
  for (const auto& s : sols) {
    EXPECT_LE(std::abs(s.charge_core), 1e-10);
    EXPECT_LE(std::abs(s.charge_shell), 1e-10);
  }
  EXPECT_LE((sols[2].density - sols[0].density - sols[1].density).cwiseAbs().maxCoeff(),
            1e-12 * sols[2].density.cwiseAbs().maxCoeff());
  const Vec3 x(5.0, -3.0, 7.0);
  EXPECT_NEAR(sols[2].value(x), sols[0].value(x) + sols[1].value(x), 1e-12);
}

TEST(Bem, NeutralSpheresConverge) {
  const LayeredMedium neutral = LayeredMedium::isotropic(5.0, 1.0, kNeutralSigmaM);
  ASSERT_NEAR(analytic_dipole(neutral), 0.0, 1e-12);
  std::vector<double> d;
  for (int s : {3, 4, 5}) d.push_back(neutrality_defect(spheres(s), neutral).defect);
  EXPECT_LT(d[1], d[0]);
  EXPECT_LT(d[2], d[1]);
  EXPECT_LE(d[1], 5e-3);
  EXPECT_LE(d[2], 0.5 * d[1]);
  // Regression baselines from the refinement study (README, BEM section).
  EXPECT_NEAR(d[1], 2.66e-3, 0.05 * 2.66e-3);
  EXPECT_NEAR(d[2], 7.00e-4, 0.05 * 7.00e-4);
}

TEST(Bem, NonNeutralMatrixDefectMatchesAnalyticDipole) {
  const LayeredMedium m = LayeredMedium::isotropic(5.0, 1.0, 1.5 * kNeutralSigmaM);
  const double p = std::abs(analytic_dipole(m));
  const NeutralityDefect d = neutrality_defect(spheres(4), m);
  EXPECT_NEAR(d.defect, p, 0.05 * p);
  // Directions agree up to the anisotropy of the geodesic mesh.
  for (double v : d.per_direction) EXPECT_NEAR(v, d.defect, 1e-2 * d.defect);
}

TEST(Bem, DipoleMatchesSphereTransmission) {
  Rng rng(2024);
  const auto sys = spheres(5);
  for (int n = 0; n < 3; ++n) {
    const double ss = std::exp(rng.uniform(-1.0, 1.0));
    const double sc = ss * std::exp(rng.uniform(std::log(0.2), std::log(5.0)));
    const double sm = ss * std::exp(rng.uniform(std::log(0.2), std::log(5.0)));
    const LayeredMedium m = LayeredMedium::isotropic(sc, ss, sm);
    const TransmissionSolution sol = solve_transmission(sys, m, Vec3::UnitZ());
    const DipoleFit f = fit_dipole(sol);
    const double p = analytic_dipole(m);
    EXPECT_NEAR(f.p.z(), p, 0.02 * std::abs(p)) << sc << " " << ss << " " << sm;
    EXPECT_LE(std::hypot(f.p.x(), f.p.y()), 1e-3 * std::abs(p));
    EXPECT_LE(f.max_remainder, 0.1 * f.dipole_scale);
  }
}

TEST(Bem, InsulatingAndPerfectlyConductingCores) {
  const auto sys = spheres(5);
  for (double sc : {0.0, kInf}) {
    const LayeredMedium m = LayeredMedium::isotropic(sc, 1.0, 2.0);
    const TransmissionSolution sol = solve_transmission(sys, m, Vec3::UnitZ());
    const double p = analytic_dipole(m);
    EXPECT_NEAR(fit_dipole(sol).p.z(), p, 0.02 * std::abs(p)) << sc;
    EXPECT_LE(std::abs(sol.charge_core), 1e-10);
    EXPECT_LE(std::abs(sol.charge_shell), 1e-10);
  }
  EXPECT_DOUBLE_EQ(contrast_lambda(0.0, 1.0), -0.5);
  EXPECT_DOUBLE_EQ(contrast_lambda(kInf, 1.0), 0.5);
}

TEST(Bem, OffsetCoreBreaksNeutrality) {
  const LayeredMedium neutral = LayeredMedium::isotropic(5.0, 1.0, kNeutralSigmaM);
  const double concentric = neutrality_defect(spheres(5), neutral).defect;
  const double offset = neutrality_defect(spheres(5, 0.3), neutral).defect;
  EXPECT_GE(offset, 10.0 * concentric);
}

TEST(Bem, ProbesAndDefectBookkeeping) {
  const auto sys = spheres(3);
  const NeutralityDefect d = neutrality_defect(solve_transmission(sys, LayeredMedium::isotropic(2, 1, 3), Vec3(0, 0, 2)));
  EXPECT_EQ(d.probes.size(), 242u);
  EXPECT_NEAR(d.probe_radius, 4.0 * sys->diameter(), 1e-12);
  for (const ProbeValue& p : d.probes) EXPECT_NEAR((p.x - sys->center()).norm(), d.probe_radius, 1e-9);
  EXPECT_GE(d.defect, 0.0);
  EXPECT_EQ(d.panels, sys->panels());
}
