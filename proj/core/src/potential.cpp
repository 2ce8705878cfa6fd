#include "coatlab/potential.hpp"

#include <algorithm>
#include <cmath>

#include "coatlab/elliptic.hpp"
#include "coatlab/error.hpp"
#include "coatlab/parallel.hpp"
#include "coatlab/sampling.hpp"

namespace coatlab {

namespace {

constexpr std::uint64_t kChunk = 1u << 16;

double lambda_of(const Ellipsoid& e, const Vec3& local) {
  return e.implicit(local + e.center()) <= 0.0 ? 0.0 : confocal_coords(local, e.semi_axes()).rho;
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

}  // namespace

double gamma(const Vec3& x) {
  const double r = x.norm();
  if (r == 0.0) throw Error(ErrorCode::SingularPoint, "Gamma is singular at the origin");
  return -1.0 / (4.0 * kPi * r);
}

Vec3 gamma_gradient(const Vec3& x) {
  const double r = x.norm();
  if (r == 0.0) throw Error(ErrorCode::SingularPoint, "Gamma is singular at the origin");
  return x / (4.0 * kPi * r * r * r);
}

double triangle_inverse_distance(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x) {
  const Vec3 normal_raw = (b - a).cross(c - a);
  const double twice_area = normal_raw.norm();
  if (twice_area == 0.0) return 0.0;
  const Vec3 n = normal_raw / twice_area;
  const double d = (x - a).dot(n);
  const double ad = std::abs(d);
  const Vec3 rho = x - d * n;  // projection onto the plane
  const Vec3 p[3] = {a, b, c};
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec3& pm = p[i];
    const Vec3& pp = p[(i + 1) % 3];
    const Vec3 edge = pp - pm;
    const double len = edge.norm();
    const Vec3 l = edge / len;
    const Vec3 u = l.cross(n);  // outward in-plane edge normal
    const double lp = (pp - rho).dot(l);
    const double lm = (pm - rho).dot(l);
    const double t = (pm - rho).dot(u);
    const double r0sq = t * t + d * d;
    const double rp = (x - pp).norm();
    const double rm = (x - pm).norm();
    if (r0sq > 0.0) {
      const double r0 = std::sqrt(r0sq);
      total += t * (std::asinh(lp / r0) - std::asinh(lm / r0));
    }
    if (ad > 0.0) {
      total -= ad * (std::atan2(t * lp, r0sq + ad * rp) - std::atan2(t * lm, r0sq + ad * rm));
    }
  }
  return total;
}

double newtonian_ellipsoid(const Ellipsoid& e, const Vec3& x) {
  if (!all_finite(x)) throw Error(ErrorCode::NonFiniteInput, "evaluation point must be finite");
  const EllipticContext ctx(e.semi_axes());
  const Vec3 local = x - e.center();
  const double lambda = lambda_of(e, local);
  return e.semi_axes().prod() / 4.0 * (ctx.phi_all(lambda).dot(local.cwiseAbs2()) - ctx.i0(lambda));
}

Vec3 newtonian_ellipsoid_gradient(const Ellipsoid& e, const Vec3& x) {
  if (!all_finite(x)) throw Error(ErrorCode::NonFiniteInput, "evaluation point must be finite");
  const EllipticContext ctx(e.semi_axes());
  const Vec3 local = x - e.center();
  // The lambda-derivative terms cancel because sum x_j^2 / (c_j^2 + rho) = 1.
  return e.semi_axes().prod() / 2.0 * ctx.phi_all(lambda_of(e, local)).cwiseProduct(local);
}

double newtonian_polyhedron(const TriMesh& mesh, const Vec3& x) {
  std::vector<double> terms(mesh.triangle_count());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const Vec3 a = mesh.corner(t, 0);
    const double h = (a - x).dot(mesh.normals()[t]);
    terms[t] = h == 0.0 ? 0.0 : h * triangle_inverse_distance(a, mesh.corner(t, 1), mesh.corner(t, 2), x);
  }
  return -pairwise_sum(terms.data(), terms.size()) / (8.0 * kPi);
}

McDomain McDomain::from_ellipsoid(const Ellipsoid& e) {
  McDomain d;
  d.contains = [e](const Vec3& y) { return e.implicit(y) < 0.0; };
  d.lo = e.center() - e.semi_axes();
  d.hi = e.center() + e.semi_axes();
  d.volume = e.volume();
  return d;
}

McDomain McDomain::from_mesh(const TriMesh& mesh) {
  auto owned = std::make_shared<const TriMesh>(mesh);
  auto tester = std::make_shared<const MeshInsideTester>(*owned);
  McDomain d;
  d.contains = [owned, tester](const Vec3& y) { return tester->contains(y); };
  d.lo = owned->bbox_min();
  d.hi = owned->bbox_max();
  d.volume = owned->volume();
  return d;
}

McEstimate newtonian_mc(const McDomain& domain, const Vec3& x, std::uint64_t samples,
                        std::optional<std::uint64_t> seed, std::uint64_t stream_offset) {
  if (!seed) throw Error(ErrorCode::SeedRequired, "Monte Carlo potentials need an explicit seed");
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "at least 2 samples required");
  if (!all_finite(x)) throw Error(ErrorCode::NonFiniteInput, "evaluation point must be finite");
  const Vec3 extent = domain.hi - domain.lo;
  const double box_volume = extent.prod();
  const double rb = 0.25 * extent.minCoeff();
  // The ball is used only when it can meet the box.
  const Vec3 gap = (domain.lo - x).cwiseMax(x - domain.hi).cwiseMax(Vec3::Zero());
  const bool use_ball = gap.norm() < rb;
  const std::uint64_t n_ball = use_ball ? samples / 2 : 0;
  const std::uint64_t n_box = samples - n_ball;

  auto run = [&](std::uint64_t n, bool ball, std::uint64_t stream_base) {
    const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<Moments> parts(chunks);
    parallel_for(chunks, [&](std::size_t k) {
      Rng rng(stream_seed(*seed, stream_base + 2 * k + (ball ? 0 : 1)));
      const std::uint64_t count = std::min<std::uint64_t>(kChunk, n - k * kChunk);
      Moments m;
      for (std::uint64_t i = 0; i < count; ++i) {
        double f = 0.0;
        if (ball) {
          const double r = rb * std::sqrt(rng.uniform());
          const Vec3 y = x + r * rng.unit_vector();
          if (domain.contains(y)) f = -0.5 * rb * rb;
        } else {
          const Vec3 y(rng.uniform(domain.lo[0], domain.hi[0]), rng.uniform(domain.lo[1], domain.hi[1]),
                       rng.uniform(domain.lo[2], domain.hi[2]));
          const double dist = (y - x).norm();
          if ((!use_ball || dist >= rb) && dist > 0.0 && domain.contains(y)) f = -box_volume / (4.0 * kPi * dist);
        }
        m.sum += f;
        m.sum_sq += f * f;
      }
      parts[k] = m;
    });
    std::vector<double> s(chunks), q(chunks);
    for (std::size_t k = 0; k < chunks; ++k) {
      s[k] = parts[k].sum;
      q[k] = parts[k].sum_sq;
    }
    const double mean = pairwise_sum(s.data(), s.size()) / static_cast<double>(n);
    const double mean_sq = pairwise_sum(q.data(), q.size()) / static_cast<double>(n);
    const double var = std::max(0.0, mean_sq - mean * mean) / static_cast<double>(n - 1);
    return std::pair<double, double>(mean, var);
  };

  McEstimate est;
  est.samples = samples;
  const auto [box_mean, box_var] = run(n_box, false, stream_offset);
  est.value = box_mean;
  double var = box_var;
  if (n_ball > 0) {
    const auto [ball_mean, ball_var] = run(n_ball, true, stream_offset);
    est.value += ball_mean;
    var += ball_var;
  }
  est.stderr_value = std::sqrt(var);
  return est;
}

std::vector<double> averaged_difference(const Ellipsoid& outer, const Ellipsoid& inner,
                                        const std::vector<Vec3>& points) {
  std::vector<double> out(points.size());
  const double vo = outer.volume();
  const double vi = inner.volume();
  parallel_for(points.size(), [&](std::size_t i) {
    out[i] = newtonian_ellipsoid(outer, points[i]) / vo - newtonian_ellipsoid(inner, points[i]) / vi;
  });
  return out;
}

std::vector<McEstimate> averaged_difference_mc(const McDomain& outer, const McDomain& inner,
                                               const std::vector<Vec3>& points, std::uint64_t samples,
                                               std::optional<std::uint64_t> seed) {
  if (!seed) throw Error(ErrorCode::SeedRequired, "Monte Carlo potentials need an explicit seed");
  std::vector<McEstimate> out;
  out.reserve(points.size());
  // Disjoint stream ranges per point and per domain.
  const std::uint64_t span = 4 * ((samples + kChunk - 1) / kChunk) + 4;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const McEstimate o = newtonian_mc(outer, points[i], samples, seed, (2 * i) * span);
    const McEstimate d = newtonian_mc(inner, points[i], samples, seed, (2 * i + 1) * span);
    McEstimate e;
    e.samples = 2 * samples;
    e.value = o.value / outer.volume - d.value / inner.volume;
    e.stderr_value = std::hypot(o.stderr_value / outer.volume, d.stderr_value / inner.volume);
    out.push_back(e);
  }
  return out;
}

QuadraticFit quadratic_fit(const std::vector<Vec3>& points, const std::vector<double>& values) {
  if (points.size() != values.size()) throw Error(ErrorCode::InvalidArgument, "points and values differ in length");
  if (points.size() < 200) throw Error(ErrorCode::InvalidArgument, "quadratic fit needs at least 200 points");
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd m(n, 10);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3& x = points[static_cast<std::size_t>(i)];
    m.row(i) << 0.5 * x[0] * x[0], 0.5 * x[1] * x[1], 0.5 * x[2] * x[2], x[0] * x[1], x[0] * x[2], x[1] * x[2], x[0],
        x[1], x[2], 1.0;
    v[i] = values[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd scale(10);
  for (int j = 0; j < 10; ++j) {
    const double s = m.col(j).norm();
    if (s == 0.0) throw Error(ErrorCode::IllConditionedFit, "sample points do not determine every coefficient");
    scale[j] = 1.0 / s;
    m.col(j) *= scale[j];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-10);
  if (qr.rank() < 10) throw Error(ErrorCode::IllConditionedFit, "sample points do not determine every coefficient");
  const Eigen::VectorXd coef = qr.solve(v).cwiseProduct(scale);
  QuadraticFit fit;
  fit.A << coef[0], coef[3], coef[4],  //
      coef[3], coef[1], coef[5],       //
      coef[4], coef[5], coef[2];
  fit.d = coef.segment<3>(6);
  fit.c_star = coef[9];
  const Eigen::VectorXd unscaled = m * coef.cwiseQuotient(scale);
  fit.residual = (unscaled - v).cwiseAbs().maxCoeff();
  fit.value_scale = v.cwiseAbs().maxCoeff();
  fit.points = points.size();
  return fit;
}

std::vector<Vec3> interior_points(const Ellipsoid& e, int n, double shrink) {
  std::vector<Vec3> pts;
  const Vec3 lo = e.center() - e.semi_axes();
  const Vec3 hi = e.center() + e.semi_axes();
  for (std::uint64_t i = 1; pts.size() < static_cast<std::size_t>(n); ++i) {
    const Vec3 x = halton_point(i, lo, hi);
    if (e.implicit(e.center() + (x - e.center()) / shrink) < 0.0) pts.push_back(x);
  }
  return pts;
}

QuadraticFit quadratic_fit(const ConfocalPair& pair, int n_points) {
  const Ellipsoid outer = pair.outer();
  const double k = 2.0 / std::sqrt(EllipticContext(pair.inner().semi_axes()).g(pair.rho0()));
  const std::vector<Vec3> pts = interior_points(pair.inner(), n_points);
  std::vector<double> values = averaged_difference(outer, pair.inner(), pts);
  for (double& v : values) v *= k * outer.volume();
  return quadratic_fit(pts, values);
}

double trace_check(double k, const Mat3& A, double shell_volume, double core_volume) {
  return k * shell_volume + A.trace() * core_volume;
}

double trace_check(const OverdetSolution& w) {
  const double core = w.pair().inner().volume();
  return trace_check(w.k(), w.A(), w.pair().outer().volume() - core, core);
}

}  // namespace coatlab
