#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "coatlab/geometry.hpp"
#include "coatlab/types.hpp"

namespace coatlab {

// Closed, consistently oriented triangle surface. Per-triangle geometry is
// derived once at construction; the mesh is immutable afterwards.
class TriMesh {
 public:
  using Triangle = std::array<int, 3>;

  TriMesh() = default;
  // Throws DegenerateMesh on zero-area triangles or out-of-range indices.
  TriMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Vec3>& centroids() const { return centroids_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  const std::vector<double>& areas() const { return areas_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  Vec3 corner(std::size_t t, int k) const { return vertices_[triangles_[t][k]]; }

  double total_area() const;
  // Divergence-theorem volume (1/3) sum centroid . normal * area.
  double volume() const;
  Vec3 volume_centroid() const;
  // |sum area * normal| / total area; zero for a closed surface.
  double closure_defect() const;
  double diameter() const;
  double max_aspect_ratio() const;
  Vec3 bbox_min() const;
  Vec3 bbox_max() const;

  // Generalised winding number; ~1 inside, ~0 outside.
  double winding_number(const Vec3& x) const;
  bool contains(const Vec3& x) const { return winding_number(x) > 0.5; }
  // Nearest intersection of the ray origin + t * dir, t > 0; false if none.
  bool ray_hit(const Vec3& origin, const Vec3& dir, Vec3& hit) const;

  TriMesh translated(const Vec3& offset) const;
  TriMesh mapped(const std::function<Vec3(const Vec3&)>& map) const;

  void write_off(std::ostream& os) const;
  void write_off(const std::string& path) const;
  static TriMesh read_off(std::istream& is);
  static TriMesh read_off(const std::string& path);

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Vec3> centroids_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
};

// Fast inside test for a closed mesh: parity of crossings of the ray
// x + t e_3, t > 0, with triangles bucketed on an xy grid. Exact ties on
// projected edges fall back to the winding number. Holds a reference to mesh.
class MeshInsideTester {
 public:
  explicit MeshInsideTester(const TriMesh& mesh);
  bool contains(const Vec3& x) const;

 private:
  const TriMesh* mesh_;
  Vec3 lo_;
  Vec3 hi_;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

inline constexpr int kMaxSubdivisions = 7;

// Geodesic unit sphere: every icosahedron face split into frequency^2
// triangles, vertices projected to the sphere. 10 f^2 + 2 vertices.
TriMesh geodesic_sphere(int frequency);

// Icosahedron refined by repeated edge-midpoint splitting, each new vertex
// projected to the unit sphere. 10 * 4^s + 2 vertices.
TriMesh icosphere(int subdivisions);

// Icosphere of the given subdivision level mapped onto the ellipsoid by
// u -> center + c * u (componentwise), which keeps every vertex on the surface. Throws SubdivisionTooLarge above kMaxSubdivisions.
TriMesh mesh_ellipsoid(const Ellipsoid& e, int subdivisions);

// Geodesic sphere of the given frequency mapped onto the ellipsoid as above.
TriMesh mesh_ellipsoid_frequency(const Ellipsoid& e, int frequency);

// Star-shaped surface center + r(u) u over the geodesic sphere directions.
TriMesh mesh_star_shaped(const std::function<double(const Vec3&)>& radius, const Vec3& center, int frequency);

}  // namespace coatlab
