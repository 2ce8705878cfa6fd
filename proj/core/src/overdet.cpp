#include "coatlab/overdet.hpp"

#include <algorithm>
#include <cmath>

#include "coatlab/error.hpp"
#include "coatlab/parallel.hpp"
#include "coatlab/sampling.hpp"

namespace coatlab {

namespace {

// grad_x Gamma(x - y) with Gamma(z) = -1 / (4 pi |z|).
Vec3 source_gradient(const Vec3& x, const Vec3& y) {
  const Vec3 z = x - y;
  const double r = z.norm();
  return z / (4.0 * kPi * r * r * r);
}

double source_value(const Vec3& x, const Vec3& y) { return -1.0 / (4.0 * kPi * (x - y).norm()); }

// Indices 0, 2, 4, ... (parity 0) or 1, 3, 5, ... (parity 1), thinned to at most
// `limit` entries by a uniform stride when limit > 0.
std::vector<std::size_t> vertex_subset(std::size_t n, int parity, int limit) {
  std::vector<std::size_t> all;
  for (std::size_t i = static_cast<std::size_t>(parity); i < n; i += 2) all.push_back(i);
  if (limit <= 0 || all.size() <= static_cast<std::size_t>(limit)) return all;
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(limit));
  for (int i = 0; i < limit; ++i) out.push_back(all[static_cast<std::size_t>(i) * all.size() / limit]);
  return out;
}

struct Containment {
  explicit Containment(const ShellGeometry& shell) : shell_(shell), outer_(shell.outer), inner_(shell.inner) {}

  bool in_outer(const Vec3& x) const {
    return shell_.outer_shape ? shell_.outer_shape->implicit(x) < 0.0 : outer_.contains(x);
  }
  bool in_inner(const Vec3& x) const {
    return shell_.inner_shape ? shell_.inner_shape->implicit(x) < 0.0 : inner_.contains(x);
  }
  bool in_shell(const Vec3& x) const { return in_outer(x) && !in_inner(x); }

  const ShellGeometry& shell_;
  MeshInsideTester outer_;
  MeshInsideTester inner_;
};

// Number of parameters and the gradient contribution of the A / d unknowns at x.
int affine_parameter_count(AConstraint c) { return (c == AConstraint::Isotropic ? 1 : 6) + 3; }

// Columns of d(A x + d)/d(params), each a 3-vector.
void affine_columns(AConstraint c, const Vec3& x, std::vector<Vec3>& cols) {
  cols.clear();
  if (c == AConstraint::Isotropic) {
    cols.push_back(x);
  } else {
    cols.push_back(Vec3(x[0], 0, 0));
    cols.push_back(Vec3(0, x[1], 0));
    cols.push_back(Vec3(0, 0, x[2]));
    cols.push_back(Vec3(x[1], x[0], 0));
    cols.push_back(Vec3(x[2], 0, x[0]));
    cols.push_back(Vec3(0, x[2], x[1]));
  }
  cols.push_back(Vec3::UnitX());
  cols.push_back(Vec3::UnitY());
  cols.push_back(Vec3::UnitZ());
}

}  // namespace

// ---------------------------------------------------------------- geometry

ShellGeometry ShellGeometry::from_meshes(TriMesh outer, TriMesh inner) {
  ShellGeometry g;
  g.outer = std::move(outer);
  g.inner = std::move(inner);
  return g;
}

ShellGeometry ShellGeometry::from_ellipsoids(const Ellipsoid& outer, const Ellipsoid& inner, int subdivisions) {
  ShellGeometry g;
  g.outer = mesh_ellipsoid(outer, subdivisions);
  g.inner = mesh_ellipsoid(inner, subdivisions);
  g.outer_shape = outer;
  g.inner_shape = inner;
  return g;
}

ShellGeometry ShellGeometry::from_confocal(const ConfocalPair& pair, int subdivisions) {
  return from_ellipsoids(pair.outer(), pair.inner(), subdivisions);
}

double ShellGeometry::outer_volume() const { return outer_shape ? outer_shape->volume() : outer.volume(); }
double ShellGeometry::inner_volume() const { return inner_shape ? inner_shape->volume() : inner.volume(); }

double ShellGeometry::diameter() const {
  if (outer_shape) return 2.0 * outer_shape->semi_axes().maxCoeff();
  return outer.diameter();
}

bool shell_contains(const ShellGeometry& shell, const Vec3& x) { return Containment(shell).in_shell(x); }

// ---------------------------------------------------------------- residuals

OverdetResiduals residuals(const ShellGeometry& shell, const ShellField& field, double k, const Mat3& A,
                           const Vec3& d, const ResidualOptions& options) {
  if (options.interior_samples < 1) throw Error(ErrorCode::InvalidArgument, "interior_samples must be positive");
  OverdetResiduals r;
  r.k = k;
  r.diameter = shell.diameter();
  auto finite = [](const Vec3& g) {
    if (!all_finite(g)) throw Error(ErrorCode::EvaluationOutsideDomain, "field gradient is not finite");
    return g;
  };
  for (const Vec3& v : shell.outer.vertices()) r.r_outer = std::max(r.r_outer, finite(field.gradient(v)).norm());
  for (const Vec3& v : shell.inner.vertices()) {
    r.r_inner = std::max(r.r_inner, (finite(field.gradient(v)) - A * v - d).norm());
  }
  r.outer_samples = shell.outer.vertex_count();
  r.inner_samples = shell.inner.vertex_count();

  const Containment inside(shell);
  const double h = options.fd_step;
  auto usable = [&](const Vec3& x) {
    if (!inside.in_shell(x) || !field.in_domain(x)) return false;
    for (int j = 0; j < 3; ++j) {
      for (double s : {-h, h}) {
        Vec3 y = x;
        y[j] += s;
        if (!inside.in_shell(y) || !field.in_domain(y)) return false;
      }
    }
    return true;
  };
  const Vec3 lo = shell.outer.bbox_min();
  const Vec3 hi = shell.outer.bbox_max();
  const std::uint64_t max_draws = 200u * static_cast<std::uint64_t>(options.interior_samples);
  for (std::uint64_t i = 0; i < max_draws && r.interior_samples < static_cast<std::size_t>(options.interior_samples);
       ++i) {
    const Vec3 x = halton_point(options.halton_offset + i, lo, hi);
    if (!usable(x)) continue;
    const double lap = laplacian_probe(field, x, h);
    if (!std::isfinite(lap)) throw Error(ErrorCode::EvaluationOutsideDomain, "field Laplacian is not finite");
    r.r_interior = std::max(r.r_interior, std::abs(lap - k));
    ++r.interior_samples;
  }
  if (r.interior_samples == 0) {
    throw Error(ErrorCode::EvaluationOutsideDomain, "no interior shell point admits a finite-difference stencil");
  }
  return r;
}

// ---------------------------------------------------------------- MFS

double MfsFit::value(const Vec3& x) const {
  double v = k * x.squaredNorm() / 6.0;
  for (std::size_t s = 0; s < sources.size(); ++s) v += strengths[static_cast<Eigen::Index>(s)] * source_value(x, sources[s]);
  return v;
}

Vec3 MfsFit::gradient(const Vec3& x) const {
  Vec3 g = k * x / 3.0;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    g += strengths[static_cast<Eigen::Index>(s)] * source_gradient(x, sources[s]);
  }
  return g;
}

MfsFit mfs_fit(const ShellGeometry& shell, const MfsOptions& options) {
  if (options.sources < 4) throw Error(ErrorCode::InvalidArgument, "at least 4 sources per surface required");
  if (!(options.outer_inflation > 1.0) || !(options.inner_deflation > 0.0 && options.inner_deflation < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "source offsets require inflation > 1 and deflation in (0, 1)");
  }
  if (!(options.tsvd_cut > 0.0 && options.tsvd_cut < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "tsvd_cut must lie in (0, 1)");
  }
  const Containment inside(shell);
  for (const Vec3& v : shell.inner.vertices()) {
    if (!inside.in_outer(v)) throw Error(ErrorCode::DisconnectedShell, "inner surface is not enclosed by the outer surface");
  }

  // Auxiliary source surfaces by ray casting from each surface's centroid.
  MfsFit fit;
  const std::vector<Vec3> dirs = fibonacci_sphere(options.sources);
  auto place = [&](const TriMesh& mesh, double factor, bool outer) {
    const Vec3 centroid = mesh.volume_centroid();
    for (const Vec3& u : dirs) {
      Vec3 hit;
      if (!mesh.ray_hit(centroid, u, hit)) {
        throw Error(ErrorCode::SourceSurfaceIntersectsShell, "surface is not star-shaped about its centroid");
      }
      const Vec3 y = centroid + factor * (hit - centroid);
      const bool ok = outer ? !inside.in_outer(y) : inside.in_inner(y);
      if (!ok) throw Error(ErrorCode::SourceSurfaceIntersectsShell, "auxiliary source falls inside the shell");
      fit.sources.push_back(y);
    }
  };
  place(shell.outer, options.outer_inflation, true);
  if (options.confocal_inner_sources && shell.inner_shape) {
    const Ellipsoid& core = *shell.inner_shape;
    const Vec3 c2 = core.semi_axes().cwiseAbs2();
    const double shift = (1.0 - options.inner_deflation * options.inner_deflation) * c2.minCoeff();
    const Vec3 axes = (c2 - Vec3::Constant(shift)).cwiseSqrt();
    for (const Vec3& u : dirs) fit.sources.push_back(core.center() + axes.cwiseProduct(u));
  } else {
    place(shell.inner, options.inner_deflation, false);
  }

  const std::vector<std::size_t> col_outer = vertex_subset(shell.outer.vertex_count(), 0, options.max_collocation);
  const std::vector<std::size_t> col_inner = vertex_subset(shell.inner.vertex_count(), 0, options.max_collocation);
  const std::size_t n_src = fit.sources.size();
  const int n_aff = affine_parameter_count(options.constraint);
  const Eigen::Index cols = static_cast<Eigen::Index>(n_src) + n_aff;
  const Eigen::Index rows = 3 * static_cast<Eigen::Index>(col_outer.size() + col_inner.size());
  fit.unknowns = static_cast<int>(cols);
  fit.collocation_points = col_outer.size() + col_inner.size();
  if (rows < cols) {
    throw Error(ErrorCode::RankDeficient, "fewer equations (" + std::to_string(rows) + ") than unknowns (" +
                                              std::to_string(cols) + ")");
  }

  // Row blocks: grad h(x) = -x/3 on the outer surface and
  // grad h(x) - (A x + d) = -x/3 on the inner one (k = 1).
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::VectorXd rhs(rows);
  const std::size_t n_outer = col_outer.size();
  parallel_for(fit.collocation_points, [&](std::size_t p) {
    const bool on_outer = p < n_outer;
    const Vec3 x = on_outer ? shell.outer.vertices()[col_outer[p]] : shell.inner.vertices()[col_inner[p - n_outer]];
    const Eigen::Index r0 = 3 * static_cast<Eigen::Index>(p);
    for (std::size_t s = 0; s < n_src; ++s) m.block<3, 1>(r0, static_cast<Eigen::Index>(s)) = source_gradient(x, fit.sources[s]);
    if (!on_outer) {
      std::vector<Vec3> aff;
      affine_columns(options.constraint, x, aff);
      for (int a = 0; a < n_aff; ++a) m.block<3, 1>(r0, static_cast<Eigen::Index>(n_src) + a) = -aff[static_cast<std::size_t>(a)];
    }
    rhs.segment<3>(r0) = -x / 3.0;
  });

  // Column-scaled truncated SVD.
  Eigen::VectorXd scale(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double n = m.col(j).norm();
    scale[j] = n > 0.0 ? 1.0 / n : 1.0;
    m.col(j) *= scale[j];
  }
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut = options.tsvd_cut * sv[0];
  Eigen::VectorXd coeff = svd.matrixU().transpose() * rhs;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cut) {
      coeff[i] /= sv[i];
      ++rank;
    } else {
      coeff[i] = 0.0;
    }
  }
  if (rank == 0) throw Error(ErrorCode::RankDeficient, "collocation matrix has rank 0");
  const Eigen::VectorXd sol = (svd.matrixV() * coeff).cwiseProduct(scale);
  fit.rank = rank;
  fit.strengths = sol.head(static_cast<Eigen::Index>(n_src));
  const Eigen::VectorXd aff = sol.tail(n_aff);
  if (options.constraint == AConstraint::Isotropic) {
    fit.A = Mat3::Identity() * aff[0];
  } else {
    fit.A << aff[0], aff[3], aff[4],  //
        aff[3], aff[1], aff[5],       //
        aff[4], aff[5], aff[2];
  }
  fit.d = aff.tail<3>();
  fit.c = fit.A(0, 0);

  // Validation on the complementary vertex halves.
  const std::vector<std::size_t> val_outer = vertex_subset(shell.outer.vertex_count(), 1, 0);
  const std::vector<std::size_t> val_inner = vertex_subset(shell.inner.vertex_count(), 1, 0);
  const std::size_t n_val = val_outer.size() + val_inner.size();
  std::vector<double> sq(n_val);
  std::vector<double> mag(n_val);
  parallel_for(n_val, [&](std::size_t p) {
    const bool on_outer = p < val_outer.size();
    const Vec3 x = on_outer ? shell.outer.vertices()[val_outer[p]]
                            : shell.inner.vertices()[val_inner[p - val_outer.size()]];
    Vec3 misfit = fit.gradient(x);
    if (!on_outer) misfit -= fit.A * x + fit.d;
    sq[p] = misfit.squaredNorm();
    mag[p] = misfit.norm();
  });
  fit.validation_points = n_val;
  const double norm = fit.k * shell.diameter();
  fit.rho_fit = std::sqrt(pairwise_sum(sq.data(), sq.size()) / static_cast<double>(n_val)) / norm;
  fit.max_misfit = *std::max_element(mag.begin(), mag.end()) / norm;
  fit.trace_defect = (fit.k * shell.shell_volume() + fit.A.trace() * shell.inner_volume()) /
                     (fit.k * shell.shell_volume());
  return fit;
}

// ---------------------------------------------------------------- section 4

RadialProfile radial_fit(const ShellField& field, const Vec3& center, const std::vector<double>& radii,
                         int directions) {
  if (radii.size() < 3) throw Error(ErrorCode::InsufficientRadii, "radial fit needs at least 3 radii");
  if (directions < 1) throw Error(ErrorCode::InvalidArgument, "directions must be positive");
  const std::vector<Vec3> dirs = fibonacci_sphere(directions);
  const Eigen::Index n = static_cast<Eigen::Index>(radii.size() * dirs.size());
  Eigen::MatrixXd m(n, 3);
  Eigen::VectorXd w(n);
  Eigen::Index row = 0;
  for (double r : radii) {
    for (const Vec3& u : dirs) {
      const Vec3 x = center + r * u;
      if (!field.in_domain(x)) throw Error(ErrorCode::EvaluationOutsideDomain, "radial sample outside the shell");
      m(row, 0) = r * r / 6.0;
      m(row, 1) = 1.0 / r;
      m(row, 2) = 1.0;
      w[row] = field.value(x);
      ++row;
    }
  }
  const Eigen::Vector3d coef = m.colPivHouseholderQr().solve(w);
  RadialProfile p;
  p.k = coef[0];
  p.k1 = coef[1];
  p.k2 = coef[2];
  p.residual = (m * coef - w).cwiseAbs().maxCoeff();
  p.scale = w.cwiseAbs().maxCoeff();
  p.radii = static_cast<int>(radii.size());
  return p;
}

double angular_derivative(const ShellField& field, const Vec3& x, int i, int j, const Vec3& center) {
  if (i < 0 || i > 2 || j < 0 || j > 2) throw Error(ErrorCode::InvalidArgument, "axis index out of range");
  const Vec3 g = field.gradient(x);
  const Vec3 y = x - center;
  return y[j] * g[i] - y[i] * g[j];
}

std::vector<SweepRow> isotropy_sweep(SweepFamily family, const std::vector<double>& ts, int subdivisions,
                                     const MfsOptions& options) {
  std::vector<SweepRow> rows;
  for (double t : ts) {
    if (!std::isfinite(t) || t < 0.0) throw Error(ErrorCode::InvalidArgument, "sweep parameter must be >= 0");
    const Ellipsoid core(Vec3(1.0, 1.0, 1.0 + 0.2 * t));
    const ShellGeometry shell = family == SweepFamily::DistortedCore
                                    ? ShellGeometry::from_ellipsoids(Ellipsoid::sphere(2.0), core, subdivisions)
                                    : ShellGeometry::from_confocal(ConfocalPair(core, 3.0), subdivisions);
    const MfsFit fit = mfs_fit(shell, options);
    rows.push_back({t, fit.rho_fit, fit.trace_defect, fit.rank});
  }
  return rows;
}

}  // namespace coatlab
