#pragma once

#include <string_view>

#include "coatlab/types.hpp"

namespace coatlab {

// Axis-aligned ellipsoid sum_j (x_j - center_j)^2 / c_j^2 = 1.
class Ellipsoid {
 public:
  explicit Ellipsoid(const Vec3& semi_axes, const Vec3& center = Vec3::Zero());

  static Ellipsoid sphere(double radius, const Vec3& center = Vec3::Zero()) {
    return Ellipsoid(Vec3::Constant(radius), center);
  }

  const Vec3& semi_axes() const { return semi_axes_; }
  const Vec3& center() const { return center_; }

  double volume() const;
  // sum_j x_j^2 / c_j^2 - 1 in local coordinates; negative inside.
  double implicit(const Vec3& x) const;
  // Point of the surface on the ray from the center along direction.
  Vec3 radial_point(const Vec3& direction) const;
  // center + c * u for a unit vector u.
  Vec3 surface_point(const Vec3& unit) const { return center_ + semi_axes_.cwiseProduct(unit); }
  // Outward unit normal at a surface point.
  Vec3 normal(const Vec3& surface_point) const;

 private:
  Vec3 semi_axes_;
  Vec3 center_;
};

// Core ellipsoid D and the confocal shell boundary rho = rho0.
class ConfocalPair {
 public:
  ConfocalPair(const Ellipsoid& base, double rho0);

  const Ellipsoid& inner() const { return base_; }
  Ellipsoid outer() const;
  double rho0() const { return rho0_; }
  Vec3 outer_semi_axes() const;
  double diameter() const;
  double shell_volume() const;

 private:
  Ellipsoid base_;
  double rho0_;
};

// Ordered roots xi <= mu <= rho of the confocal cubic at a point.
struct ConfocalCoords {
  double rho;
  double mu;
  double xi;
};

// x is in the ellipsoid's local frame (centre at the origin).
ConfocalCoords confocal_coords(const Vec3& x, const Vec3& semi_axes);

// Monic confocal cubic prod(c_j^2 + s) - sum_j x_j^2 prod_{i != j}(c_i^2 + s).
double confocal_cubic(double s, const Vec3& x, const Vec3& semi_axes);

enum class Region { Core, Shell, Exterior, OnInner, OnOuter };

std::string_view to_string(Region region);

Region classify(const ConfocalPair& pair, const Vec3& x, double tol = 1e-10);

}  // namespace coatlab
