// Acceptance suite: one PASS/FAIL line per criterion of the specification
// (README, "Acceptance"). Usage: coatlab_acceptance [criterion numbers...].
// Exit status 0 when every selected criterion passes, 1 otherwise.
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "coatlab/analytic.hpp"
#include "coatlab/bem.hpp"
#include "coatlab/elliptic.hpp"
#include "coatlab/error.hpp"
#include "coatlab/overdet.hpp"
#include "coatlab/potential.hpp"
#include "coatlab/sampling.hpp"
#include "coatlab/scenario.hpp"

using namespace coatlab;
namespace fs = std::filesystem;

namespace {

// Collects the sub-checks of one criterion and renders them as details.
class Report {
 public:
  void check(bool ok, const std::string& what, double value, double limit) {
    ok_ = ok_ && ok;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s%s=%.3g (limit %.3g)", details_.empty() ? "" : "; ", what.c_str(), value, limit);
    details_ += buf;
    if (!ok) failures_.push_back(what);
  }
  void at_most(const std::string& what, double value, double limit) { check(value <= limit, what, value, limit); }
  void at_least(const std::string& what, double value, double limit) { check(value >= limit, what, value, limit); }
  void require(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    details_ += (details_.empty() ? "" : "; ") + what + (ok ? " ok" : " VIOLATED");
    if (!ok) failures_.push_back(what);
  }
  bool ok() const { return ok_; }
  const std::string& details() const { return details_; }

 private:
  bool ok_ = true;
  std::string details_;
  std::vector<std::string> failures_;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Vec3 random_axes(Rng& rng, double lo, double hi) {
  return Vec3(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi));
}

// ---------------------------------------------------------------------------

void criterion1(Report& r) {
  Rng rng(101);
  double worst_sum = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const EllipticContext ctx(random_axes(rng, 0.1, 5.0));
    for (int k = 0; k < 50; ++k) {
      const double rho = std::pow(10.0, -4.0 + 8.0 * k / 49.0);
      worst_sum = std::max(worst_sum, rel(ctx.phi_all(rho).sum(), 2.0 / std::sqrt(ctx.g(rho))));
    }
  }
  r.at_most("sum identity rel", worst_sum, 1e-11);
  double worst_sphere = 0.0;
  for (double c : {0.3, 1.0, 1.7, 4.0}) {
    const EllipticContext ctx(Vec3::Constant(c));
    for (int k = 0; k < 50; ++k) {
      const double rho = std::pow(10.0, -4.0 + 8.0 * k / 49.0);
      const double expected = 2.0 / 3.0 * std::pow(c * c + rho, -1.5);
      for (int j = 0; j < 3; ++j) worst_sphere = std::max(worst_sphere, rel(ctx.phi(rho, j), expected));
    }
  }
  r.at_most("sphere closed form rel", worst_sphere, 1e-12);
}

void criterion2(Report& r) {
  Rng rng(202);
  double outer = 0.0, inner = 0.0, lap = 0.0, max_eig = -kInf;
  for (int trial = 0; trial < 10; ++trial) {
    const Vec3 axes = random_axes(rng, 0.5, 2.0);
    const Vec3 center(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const ConfocalPair pair(Ellipsoid(axes, center), rng.uniform(0.2, 3.0));
    const OverdetSolution w(pair);
    // Finite-difference step in normalized units: the O(h^2) stencil error is
    // then scale invariant and round-off stays near 1e-8 relative.
    ResidualOptions opt;
    opt.fd_step = 1e-4 * pair.diameter();
    const OverdetResiduals res = residuals(ShellGeometry::from_confocal(pair, 4), w, w.k(), w.A(), w.d(), opt);
    outer = std::max(outer, res.outer_normalized());
    inner = std::max(inner, res.inner_normalized());
    lap = std::max(lap, res.interior_normalized());
    max_eig = std::max(max_eig, Eigen::SelfAdjointEigenSolver<Mat3>(w.A()).eigenvalues().maxCoeff());
  }
  r.at_most("max|grad w| on outer", outer, 1e-8);
  r.at_most("max|grad w - Ax - d| on inner", inner, 1e-8);
  r.at_most("max|lap w - k|/k (FD)", lap, 1e-5);
  r.check(max_eig < 0.0, "max eigenvalue of A", max_eig, 0.0);
}

void criterion3(Report& r) {
  const NeutralShell n = neutral_shell_field(1.0, 2.0, 5.0, 1.0);
  r.at_most("|sigma_m - 16/13|", std::abs(n.sigma_m - 16.0 / 13.0), 1e-12);
  r.at_most("|c0 - 2|", std::abs(n.c0 - 2.0), 1e-10);
  r.at_most("|k - 1|", std::abs(n.k - 1.0), 1e-12);
  r.at_most("|A + 7/3 I|", (n.A + Mat3::Identity() * (7.0 / 3.0)).cwiseAbs().maxCoeff(), 1e-10);
  const OverdetSolution w3(ConfocalPair(Ellipsoid::sphere(1.0), 3.0));
  double worst = 0.0;
  for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(n.A(j, j) / n.k - w3.A()(j, j) / w3.k()));
  r.at_most("|A/k (sec 2) - A/k (sec 3)|", worst, 1e-8);
  r.at_most("|A/k + 7/3|", std::abs(w3.A()(0, 0) / w3.k() + 7.0 / 3.0), 1e-8);
}

// MFS fits are shared between criteria 4 and 7.
const MfsFit& mfs(const std::string& which) {
  static std::map<std::string, MfsFit> cache;
  auto it = cache.find(which);
  if (it != cache.end()) return it->second;
  MfsOptions iso;
  MfsOptions sym;
  sym.constraint = AConstraint::Symmetric;
  const int s = 4;
  const Ellipsoid distorted_core(Vec3(1.0, 1.0, 1.2));
  MfsFit fit;
  if (which == "concentric") {
    fit = mfs_fit(ShellGeometry::from_ellipsoids(Ellipsoid::sphere(2.0), Ellipsoid::sphere(1.0), s), iso);
  } else if (which == "offset") {
    fit = mfs_fit(ShellGeometry::from_ellipsoids(Ellipsoid::sphere(2.0), Ellipsoid::sphere(1.0, Vec3(0.3, 0, 0)), s),
                  iso);
  } else if (which == "confocal") {
    fit = mfs_fit(ShellGeometry::from_confocal(ConfocalPair(Ellipsoid(Vec3(1.0, 1.5, 2.0)), 1.0), s), sym);
  } else if (which == "confocal_matched") {
    // Baseline for the distorted geometry: the same core in its confocal shell.
    fit = mfs_fit(ShellGeometry::from_confocal(ConfocalPair(distorted_core, 3.0), s), sym);
  } else if (which == "distorted") {
    fit = mfs_fit(ShellGeometry::from_ellipsoids(Ellipsoid::sphere(2.0), distorted_core, s), sym);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown fit " + which);
  }
  return cache.emplace(which, std::move(fit)).first->second;
}

void criterion4(Report& r) {
  Rng rng(404);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const ConfocalPair pair(Ellipsoid(random_axes(rng, 0.5, 2.0)), rng.uniform(0.2, 3.0));
    const OverdetSolution w(pair);
    worst = std::max(worst, std::abs(trace_check(w)) / (w.k() * pair.shell_volume()));
  }
  const NeutralShell n = neutral_shell_field(1.0, 2.0, 5.0, 1.0);
  const double core = 4.0 * kPi / 3.0;
  worst = std::max(worst, std::abs(trace_check(n.k, n.A, 7.0 * core, core)) / (n.k * 7.0 * core));
  r.at_most("analytic trace defect rel", worst, 1e-10);
  for (const char* name : {"concentric", "confocal"}) {
    const MfsFit& fit = mfs(name);
    r.check(std::abs(fit.trace_defect) <= 10.0 * fit.rho_fit, std::string("MFS ") + name + " |trace defect|",
            std::abs(fit.trace_defect), 10.0 * fit.rho_fit);
  }
}

void criterion5(Report& r) {
  const OverdetSolution w(ConfocalPair(Ellipsoid::sphere(1.0), 3.0));
  std::vector<double> radii;
  for (int i = 0; i < 30; ++i) radii.push_back(1.02 + 0.96 * i / 29.0);
  const RadialProfile p = radial_fit(w, Vec3::Zero(), radii);
  r.at_most("radial fit residual", p.residual, 1e-10);
  r.at_most("|k1 - 2/3|", std::abs(p.k1 - 2.0 / 3.0), 1e-10);
  r.at_most("|(3k1/k)^(1/3) - 2|", std::abs(p.outer_radius() - 2.0), 1e-8);
  const NeutralShell n = neutral_shell_field(1.0, 2.0, 5.0, 1.0);
  Rng rng(505);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 x = rng.uniform(1.0, 2.0) * rng.unit_vector();
    for (const ShellField* f : {static_cast<const ShellField*>(&w), static_cast<const ShellField*>(n.field.get())}) {
      for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) worst = std::max(worst, std::abs(angular_derivative(*f, x, a, b)));
      }
    }
  }
  r.at_most("max|A_ij w| (1e3 points)", worst, 1e-12);
}

void criterion6(Report& r) {
  const Ellipsoid outer = Ellipsoid::sphere(2.0);
  const Ellipsoid inner = Ellipsoid::sphere(1.0);
  const double k_omega = 0.25 * (32.0 * kPi / 3.0);  // k |Omega| with k = 1/4
  const std::vector<Vec3> pts = interior_points(inner, 500);
  const std::vector<double> v = averaged_difference(outer, inner, pts);
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    worst = std::max(worst, std::abs(k_omega * v[i] - (12.0 - 7.0 * pts[i].squaredNorm()) / 24.0));
  }
  r.at_most("pointwise identity", worst, 1e-10);
  const QuadraticFit fit = quadratic_fit(ConfocalPair(inner, 3.0), 256);
  r.at_most("|A + 7/12 I|", (fit.A + Mat3::Identity() * (7.0 / 12.0)).cwiseAbs().maxCoeff(), 1e-10);
  r.at_most("|C* - 1/2|", std::abs(fit.c_star - 0.5), 1e-10);
  std::vector<Vec3> ext;
  for (const Vec3& u : fibonacci_sphere(8)) ext.push_back(3.0 * u);
  double worst_ext = 0.0;
  for (double d : averaged_difference(outer, inner, ext)) worst_ext = std::max(worst_ext, std::abs(d));
  r.at_most("exterior difference (analytic)", worst_ext, 1e-12);
  const std::vector<McEstimate> mc = averaged_difference_mc(McDomain::from_ellipsoid(outer),
                                                            McDomain::from_ellipsoid(inner), ext, 1000000, 606);
  double worst_z = 0.0;
  for (const McEstimate& e : mc) worst_z = std::max(worst_z, std::abs(e.value) / e.stderr_value);
  r.at_most("exterior difference MC |z| (1e6 samples)", worst_z, 3.0);
}

// rho_fit of the non-confocal geometries in the first calibrated run.
constexpr double kRecordedOffset = 2.70e-2;
constexpr double kRecordedDistorted = 4.91e-3;

void criterion7(Report& r) {
  const double concentric = mfs("concentric").rho_fit;
  const double confocal = mfs("confocal").rho_fit;
  r.at_most("rho_fit concentric", concentric, 1e-5);
  r.at_most("rho_fit confocal", confocal, 1e-5);
  r.at_least("rho_fit offset / concentric", mfs("offset").rho_fit / concentric, 20.0);
  r.at_least("rho_fit distorted / confocal-matched", mfs("distorted").rho_fit / mfs("confocal_matched").rho_fit,
             20.0);
  // Regression floors: half the values of the first calibrated run (README).
  r.at_least("rho_fit offset", mfs("offset").rho_fit, 0.5 * kRecordedOffset);
  r.at_least("rho_fit distorted", mfs("distorted").rho_fit, 0.5 * kRecordedDistorted);
}

void criterion8(Report& r) {
  const auto sys = sphere_pair_system(1.0, 2.0, 5);
  Rng rng(808);
  double worst = 0.0;
  for (int n = 0; n < 20; ++n) {
    const double ss = std::exp(rng.uniform(-1.0, 1.0));
    const double sc = ss * std::exp(rng.uniform(std::log(0.2), std::log(5.0)));
    const double sm = ss * std::exp(rng.uniform(std::log(0.2), std::log(5.0)));
    const LayeredMedium m = LayeredMedium::isotropic(sc, ss, sm);
    const double p = sphere_transmission(1.0, 2.0, m).exterior_dipole;
    const DipoleFit f = fit_dipole(solve_transmission(sys, m, Vec3::UnitZ()));
    worst = std::max(worst, std::abs(f.p.z() - p) / std::abs(p));
  }
  r.at_most("dipole rel error (20 triples, s=5)", worst, 0.02);
  const LayeredMedium neutral = LayeredMedium::isotropic(5.0, 1.0, 16.0 / 13.0);
  std::vector<double> d;
  for (int s : {3, 4}) d.push_back(neutrality_defect(sphere_pair_system(1.0, 2.0, s), neutral).defect);
  d.push_back(neutrality_defect(sys, neutral).defect);
  r.require(d[1] < d[0] && d[2] < d[1], "defect decreasing " + std::to_string(d[0]) + " > " +
                                            std::to_string(d[1]) + " > " + std::to_string(d[2]));
  const double offset = neutrality_defect(sphere_pair_system(1.0, 2.0, 5, Vec3(0.3, 0.0, 0.0)), neutral).defect;
  r.at_least("offset / concentric defect", offset / d[2], 10.0);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void criterion9(Report& r) {
  const fs::path base = fs::temp_directory_path() / "coatlab_acceptance_determinism";
  fs::remove_all(base);
  std::size_t compared = 0, differing = 0;
  for (const fs::path& file : list_scenarios(COATLAB_SCENARIO_DIR)) {
    const Scenario sc = Scenario::load(file);
    const ScenarioResult a = run_scenario(sc, base / "a");
    const ScenarioResult b = run_scenario(sc, base / "b");
    for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
      ++compared;
      if (i >= b.artifacts.size() || slurp(a.artifacts[i]) != slurp(b.artifacts[i])) ++differing;
    }
  }
  r.require(compared > 0, std::to_string(compared) + " artifacts compared");
  r.check(differing == 0, "differing artifacts", static_cast<double>(differing), 0.0);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<void(Report&)>>> criteria = {
      {"elliptic identities", criterion1},
      {"section 3 solution certificate", criterion2},
      {"section 2 <-> section 3 cross-check", criterion3},
      {"trace relation", criterion4},
      {"section 4 radial structure", criterion5},
      {"section 5 identity", criterion6},
      {"MFS discrimination", criterion7},
      {"BEM oracle agreement", criterion8},
      {"determinism", criterion9},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && std::find(selected.begin(), selected.end(), id) == selected.end()) continue;
    Report report;
    try {
      criteria[i].second(report);
    } catch (const std::exception& e) {
      report.require(false, std::string("exception: ") + e.what());
    }
    all = all && report.ok();
    std::printf("CRITERION %d %s: %s -- %s\n", id, report.ok() ? "PASS" : "FAIL", criteria[i].first,
                report.details().c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
