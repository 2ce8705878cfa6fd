#include "coatlab/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "coatlab/error.hpp"

namespace coatlab {

namespace {

void require_axes(const Vec3& c) {
  if (!all_finite(c)) throw Error(ErrorCode::NonFiniteInput, "semi-axes must be finite");
  if (c.minCoeff() <= 0.0) throw Error(ErrorCode::DegenerateAxes, "semi-axes must be positive");
}

struct AxisGroup {
  double a;     // c_j^2
  double mass;  // sum of x_j^2 over axes sharing this c_j^2
  int count;
};

// Root of the decreasing function f(s) = sum mass_i/(a_i + s) - 1 on (lo, hi).
// Bisection narrows the bracket, Newton finishes inside it.
double bracketed_root(const std::vector<AxisGroup>& groups, double lo, double hi) {
  auto f = [&](double s) {
    double v = -1.0;
    for (const auto& g : groups) v += g.mass / (g.a + s);
    return v;
  };
  auto df = [&](double s) {
    double v = 0.0;
    for (const auto& g : groups) {
      const double t = g.a + s;
      v -= g.mass / (t * t);
    }
    return v;
  };
  const double scale = std::max({std::abs(lo), std::abs(hi), 1e-300});
  for (int it = 0; it < 200 && hi - lo > 1e-6 * scale; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double fs = f(s);
    if (fs == 0.0) return s;
    (fs > 0.0 ? lo : hi) = s;
    const double d = df(s);
    double next = (d != 0.0) ? s - fs / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == s || !(next > lo && next < hi)) break;
    const double step = std::abs(next - s);
    s = next;
    if (step <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(s)) break;
  }
  return s;
}

}  // namespace

Ellipsoid::Ellipsoid(const Vec3& semi_axes, const Vec3& center) : semi_axes_(semi_axes), center_(center) {
  require_axes(semi_axes);
  if (!all_finite(center)) throw Error(ErrorCode::NonFiniteInput, "ellipsoid center must be finite");
}

double Ellipsoid::volume() const { return 4.0 * kPi / 3.0 * semi_axes_.prod(); }

double Ellipsoid::implicit(const Vec3& x) const {
  return (x - center_).cwiseQuotient(semi_axes_).squaredNorm() - 1.0;
}

Vec3 Ellipsoid::radial_point(const Vec3& direction) const {
  const double t = 1.0 / direction.cwiseQuotient(semi_axes_).norm();
  return center_ + t * direction;
}

Vec3 Ellipsoid::normal(const Vec3& surface_point) const {
  const Vec3 local = surface_point - center_;
  return local.cwiseQuotient(semi_axes_.cwiseProduct(semi_axes_)).normalized();
}

ConfocalPair::ConfocalPair(const Ellipsoid& base, double rho0) : base_(base), rho0_(rho0) {
  if (!std::isfinite(rho0)) throw Error(ErrorCode::NonFiniteInput, "rho0 must be finite");
  if (rho0 <= 0.0) throw Error(ErrorCode::InvalidArgument, "rho0 must be positive");
}

Vec3 ConfocalPair::outer_semi_axes() const {
  const Vec3& c = base_.semi_axes();
  return (c.cwiseProduct(c).array() + rho0_).sqrt().matrix();
}

Ellipsoid ConfocalPair::outer() const { return Ellipsoid(outer_semi_axes(), base_.center()); }

double ConfocalPair::diameter() const { return 2.0 * outer_semi_axes().maxCoeff(); }

double ConfocalPair::shell_volume() const { return outer().volume() - base_.volume(); }

double confocal_cubic(double s, const Vec3& x, const Vec3& c) {
  const Vec3 t = (c.cwiseProduct(c).array() + s).matrix();
  return t.prod() - x[0] * x[0] * t[1] * t[2] - x[1] * x[1] * t[0] * t[2] - x[2] * x[2] * t[0] * t[1];
}

ConfocalCoords confocal_coords(const Vec3& x, const Vec3& semi_axes) {
  if (!all_finite(x)) throw Error(ErrorCode::NonFiniteInput, "point has non-finite components");
  require_axes(semi_axes);

  std::array<AxisGroup, 3> axes{};
  for (int j = 0; j < 3; ++j) axes[j] = {semi_axes[j] * semi_axes[j], x[j] * x[j], 1};
  std::sort(axes.begin(), axes.end(), [](const AxisGroup& l, const AxisGroup& r) { return l.a < r.a; });

  // Equal axes merge; each merge and each empty group contributes a root at
  // -a from the factor (a + s) that divides the cubic.
  std::vector<AxisGroup> groups;
  for (const auto& g : axes) {
    if (!groups.empty() && groups.back().a == g.a) {
      groups.back().mass += g.mass;
      groups.back().count += 1;
    } else {
      groups.push_back(g);
    }
  }
  std::vector<double> roots;
  std::vector<AxisGroup> active;
  for (const auto& g : groups) {
    for (int m = 1; m < g.count; ++m) roots.push_back(-g.a);
    if (g.mass == 0.0) {
      roots.push_back(-g.a);
    } else {
      active.push_back(g);
    }
  }
  for (std::size_t i = 0; i + 1 < active.size(); ++i) {
    roots.push_back(bracketed_root(active, -active[i + 1].a, -active[i].a));
  }
  if (!active.empty()) {
    double mass = 0.0;
    for (const auto& g : active) mass += g.mass;
    const double lo = -active.front().a;
    const double hi = std::max(mass - active.front().a, lo + mass);
    roots.push_back(bracketed_root(active, lo, hi));
  }
  std::sort(roots.begin(), roots.end());
  return {roots[2], roots[1], roots[0]};
}

std::string_view to_string(Region region) {
  switch (region) {
    case Region::Core: return "core";
    case Region::Shell: return "shell";
    case Region::Exterior: return "exterior";
    case Region::OnInner: return "on_inner";
    case Region::OnOuter: return "on_outer";
  }
  return "unknown";
}

Region classify(const ConfocalPair& pair, const Vec3& x, double tol) {
  const Vec3 local = x - pair.inner().center();
  const double rho = confocal_coords(local, pair.inner().semi_axes()).rho;
  const double scale = pair.inner().semi_axes().squaredNorm();
  if (std::abs(rho) <= tol * scale) return Region::OnInner;
  if (std::abs(rho - pair.rho0()) <= tol * scale) return Region::OnOuter;
  if (rho < 0.0) return Region::Core;
  if (rho < pair.rho0()) return Region::Shell;
  return Region::Exterior;
}

}  // namespace coatlab
