#include "coatlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

#include "coatlab/error.hpp"

namespace coatlab {

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const int nv = static_cast<int>(vertices_.size());
  centroids_.reserve(triangles_.size());
  normals_.reserve(triangles_.size());
  areas_.reserve(triangles_.size());
  for (const auto& t : triangles_) {
    for (int k : t) {
      if (k < 0 || k >= nv) throw Error(ErrorCode::DegenerateMesh, "triangle index out of range");
    }
    const Vec3& a = vertices_[t[0]];
    const Vec3& b = vertices_[t[1]];
    const Vec3& c = vertices_[t[2]];
    const Vec3 cross = (b - a).cross(c - a);
    const double norm = cross.norm();
    if (!(norm > 0.0)) throw Error(ErrorCode::DegenerateMesh, "zero-area triangle");
    centroids_.push_back((a + b + c) / 3.0);
    normals_.push_back(cross / norm);
    areas_.push_back(0.5 * norm);
  }
}

double TriMesh::total_area() const {
  double s = 0.0;
  for (double a : areas_) s += a;
  return s;
}

double TriMesh::volume() const {
  double v = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) v += centroids_[t].dot(normals_[t]) * areas_[t];
  return v / 3.0;
}

Vec3 TriMesh::volume_centroid() const {
  // Signed tetrahedra against the origin.
  Vec3 moment = Vec3::Zero();
  double vol = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const Vec3 a = corner(t, 0), b = corner(t, 1), c = corner(t, 2);
    const double v = a.dot(b.cross(c)) / 6.0;
    vol += v;
    moment += v * (a + b + c) / 4.0;
  }
  return moment / vol;
}

double TriMesh::closure_defect() const {
  Vec3 s = Vec3::Zero();
  for (std::size_t t = 0; t < triangles_.size(); ++t) s += areas_[t] * normals_[t];
  return s.norm() / total_area();
}

double TriMesh::diameter() const {
  const std::size_t n = vertices_.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 3000);
  double best = 0.0;
  for (std::size_t i = 0; i < n; i += stride) {
    for (std::size_t j = i + stride; j < n; j += stride) {
      best = std::max(best, (vertices_[i] - vertices_[j]).squaredNorm());
    }
  }
  return std::sqrt(best);
}

double TriMesh::max_aspect_ratio() const {
  double worst = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const Vec3 a = corner(t, 0), b = corner(t, 1), c = corner(t, 2);
    const double longest = std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
    // Equilateral triangles give exactly 1.
    worst = std::max(worst, longest * std::sqrt(3.0) / (4.0 * areas_[t]));
  }
  return worst;
}

Vec3 TriMesh::bbox_min() const {
  Vec3 m = Vec3::Constant(kInf);
  for (const auto& v : vertices_) m = m.cwiseMin(v);
  return m;
}

Vec3 TriMesh::bbox_max() const {
  Vec3 m = Vec3::Constant(-kInf);
  for (const auto& v : vertices_) m = m.cwiseMax(v);
  return m;
}

double TriMesh::winding_number(const Vec3& x) const {
  double total = 0.0;
  for (const auto& t : triangles_) {
    const Vec3 a = vertices_[t[0]] - x;
    const Vec3 b = vertices_[t[1]] - x;
    const Vec3 c = vertices_[t[2]] - x;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * kPi);
}

MeshInsideTester::MeshInsideTester(const TriMesh& mesh) : mesh_(&mesh), lo_(mesh.bbox_min()), hi_(mesh.bbox_max()) {
  const int side = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.triangle_count()))));
  nx_ = side;
  ny_ = side;
  cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  const double wx = (hi_[0] - lo_[0]) / nx_;
  const double wy = (hi_[1] - lo_[1]) / ny_;
  auto cell_x = [&](double x) { return std::clamp(static_cast<int>((x - lo_[0]) / wx), 0, nx_ - 1); };
  auto cell_y = [&](double y) { return std::clamp(static_cast<int>((y - lo_[1]) / wy), 0, ny_ - 1); };
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const Vec3 a = mesh.corner(t, 0), b = mesh.corner(t, 1), c = mesh.corner(t, 2);
    const int x0 = cell_x(std::min({a[0], b[0], c[0]})), x1 = cell_x(std::max({a[0], b[0], c[0]}));
    const int y0 = cell_y(std::min({a[1], b[1], c[1]})), y1 = cell_y(std::max({a[1], b[1], c[1]}));
    for (int i = x0; i <= x1; ++i) {
      for (int j = y0; j <= y1; ++j) cells_[static_cast<std::size_t>(i) * ny_ + j].push_back(static_cast<int>(t));
    }
  }
}

bool MeshInsideTester::contains(const Vec3& x) const {
  if ((x.array() < lo_.array()).any() || (x.array() > hi_.array()).any()) return false;
  const double wx = (hi_[0] - lo_[0]) / nx_;
  const double wy = (hi_[1] - lo_[1]) / ny_;
  const int i = std::clamp(static_cast<int>((x[0] - lo_[0]) / wx), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>((x[1] - lo_[1]) / wy), 0, ny_ - 1);
  int crossings = 0;
  for (int t : cells_[static_cast<std::size_t>(i) * ny_ + j]) {
    const Vec3 a = mesh_->corner(t, 0), b = mesh_->corner(t, 1), c = mesh_->corner(t, 2);
    auto edge = [&](const Vec3& p, const Vec3& q) {
      return (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0]);
    };
    const double e0 = edge(a, b), e1 = edge(b, c), e2 = edge(c, a);
    if (e0 == 0.0 || e1 == 0.0 || e2 == 0.0) return mesh_->contains(x);
    const bool pos = e0 > 0.0 && e1 > 0.0 && e2 > 0.0;
    const bool neg = e0 < 0.0 && e1 < 0.0 && e2 < 0.0;
    if (!pos && !neg) continue;
    // Height of the triangle's plane above (x, y).
    const double sum = e0 + e1 + e2;
    const double z = (e1 * a[2] + e2 * b[2] + e0 * c[2]) / sum;
    if (z == x[2]) return mesh_->contains(x);
    if (z > x[2]) ++crossings;
  }
  return (crossings & 1) != 0;
}

bool TriMesh::ray_hit(const Vec3& origin, const Vec3& dir, Vec3& hit) const {
  double best = kInf;
  for (const auto& t : triangles_) {
    const Vec3& v0 = vertices_[t[0]];
    const Vec3 e1 = vertices_[t[1]] - v0;
    const Vec3 e2 = vertices_[t[2]] - v0;
    const Vec3 p = dir.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-300) continue;
    const Vec3 s = origin - v0;
    const double u = s.dot(p) / det;
    if (u < 0.0 || u > 1.0) continue;
    const Vec3 q = s.cross(e1);
    const double v = dir.dot(q) / det;
    if (v < 0.0 || u + v > 1.0) continue;
    const double dist = e2.dot(q) / det;
    if (dist > 0.0 && dist < best) best = dist;
  }
  if (!std::isfinite(best)) return false;
  hit = origin + best * dir;
  return true;
}

TriMesh TriMesh::translated(const Vec3& offset) const {
  return mapped([&](const Vec3& v) { return Vec3(v + offset); });
}

TriMesh TriMesh::mapped(const std::function<Vec3(const Vec3&)>& map) const {
  std::vector<Vec3> verts;
  verts.reserve(vertices_.size());
  for (const auto& v : vertices_) verts.push_back(map(v));
  return TriMesh(std::move(verts), triangles_);
}

void TriMesh::write_off(std::ostream& os) const {
  os << "OFF\n" << vertices_.size() << ' ' << triangles_.size() << " 0\n";
  os << std::setprecision(17);
  for (const auto& v : vertices_) os << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const auto& t : triangles_) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void TriMesh::write_off(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  write_off(os);
}

TriMesh TriMesh::read_off(std::istream& is) {
  // Tokenise with comments stripped.
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(is, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  std::size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) throw Error(ErrorCode::IoError, "truncated OFF file");
    return tokens[pos++];
  };
  auto number = [&](auto& out) {
    const std::string& tok = next();
    std::istringstream ss(tok);
    if (!(ss >> out)) throw Error(ErrorCode::IoError, "malformed OFF token '" + tok + "'");
  };
  if (next() != "OFF") throw Error(ErrorCode::IoError, "missing OFF header");
  long nv = 0, nf = 0, ne = 0;
  number(nv);
  number(nf);
  number(ne);
  if (nv <= 0 || nf <= 0) throw Error(ErrorCode::IoError, "OFF file has no geometry");
  std::vector<Vec3> verts(nv);
  for (auto& v : verts) {
    number(v[0]);
    number(v[1]);
    number(v[2]);
  }
  std::vector<Triangle> tris;
  tris.reserve(nf);
  for (long f = 0; f < nf; ++f) {
    int count = 0;
    number(count);
    if (count != 3) throw Error(ErrorCode::IoError, "only triangular OFF faces are supported");
    Triangle t{};
    number(t[0]);
    number(t[1]);
    number(t[2]);
    tris.push_back(t);
  }
  return TriMesh(std::move(verts), std::move(tris));
}

TriMesh TriMesh::read_off(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_off(is);
}

namespace {

struct Icosahedron {
  std::array<Vec3, 12> vertices;
  std::array<std::array<int, 3>, 20> faces;
};

const Icosahedron& icosahedron() {
  static const Icosahedron ico = [] {
    Icosahedron out;
    const double p = (1.0 + std::sqrt(5.0)) / 2.0;
    const double raw[12][3] = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
                               {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
    for (int i = 0; i < 12; ++i) out.vertices[i] = Vec3(raw[i][0], raw[i][1], raw[i][2]).normalized();
    out.faces = {{{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                  {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
                  {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}}};
    for (auto& f : out.faces) {
      const Vec3& a = out.vertices[f[0]];
      const Vec3& b = out.vertices[f[1]];
      const Vec3& c = out.vertices[f[2]];
      if ((b - a).cross(c - a).dot(a + b + c) < 0.0) std::swap(f[1], f[2]);
    }
    return out;
  }();
  return ico;
}

}  // namespace

TriMesh geodesic_sphere(int frequency) {
  if (frequency < 1) throw Error(ErrorCode::InvalidArgument, "geodesic frequency must be >= 1");
  const auto& ico = icosahedron();
  const int f = frequency;
  std::vector<Vec3> verts(ico.vertices.begin(), ico.vertices.end());
  // Shared points keyed canonically: corners by index, edge points by
  // (low vertex, high vertex, steps from low), interior points by face.
  std::map<std::tuple<int, int, int, int>, int> lookup;
  std::vector<TriMesh::Triangle> tris;
  tris.reserve(20 * f * f);
  for (int face = 0; face < 20; ++face) {
    const auto& fv = ico.faces[face];
    auto index = [&](int i, int j) -> int {
      const int w[3] = {f - i - j, i, j};
      int nonzero = 0;
      for (int k = 0; k < 3; ++k) nonzero += (w[k] != 0);
      if (nonzero == 1) {
        for (int k = 0; k < 3; ++k)
          if (w[k] == f) return fv[k];
      }
      std::tuple<int, int, int, int> key;
      if (nonzero == 2) {
        int p = -1, q = -1, wq = 0;
        for (int k = 0; k < 3; ++k) {
          if (w[k] == 0) continue;
          if (p < 0) {
            p = k;
          } else {
            q = k;
          }
        }
        int lo = fv[p], hi = fv[q];
        wq = w[q];
        if (lo > hi) {
          std::swap(lo, hi);
          wq = w[p];
        }
        key = {-1, lo, hi, wq};
      } else {
        key = {face, i, j, 0};
      }
      auto it = lookup.find(key);
      if (it != lookup.end()) return it->second;
      Vec3 pos;
      if (std::get<0>(key) == -1) {
        const int lo = std::get<1>(key), hi = std::get<2>(key), steps = std::get<3>(key);
        pos = (static_cast<double>(f - steps) * ico.vertices[lo] + static_cast<double>(steps) * ico.vertices[hi]) / f;
      } else {
        pos = (w[0] * ico.vertices[fv[0]] + w[1] * ico.vertices[fv[1]] + w[2] * ico.vertices[fv[2]]) / f;
      }
      verts.push_back(pos.normalized());
      const int id = static_cast<int>(verts.size()) - 1;
      lookup.emplace(key, id);
      return id;
    };
    for (int i = 0; i < f; ++i) {
      for (int j = 0; i + j < f; ++j) {
        tris.push_back({index(i, j), index(i + 1, j), index(i, j + 1)});
        if (i + j < f - 1) tris.push_back({index(i + 1, j), index(i + 1, j + 1), index(i, j + 1)});
      }
    }
  }
  return TriMesh(std::move(verts), std::move(tris));
}

TriMesh icosphere(int subdivisions) {
  if (subdivisions < 0) throw Error(ErrorCode::InvalidArgument, "subdivisions must be non-negative");
  const auto& ico = icosahedron();
  std::vector<Vec3> verts(ico.vertices.begin(), ico.vertices.end());
  std::vector<TriMesh::Triangle> tris(ico.faces.begin(), ico.faces.end());
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoints;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      const int id = static_cast<int>(verts.size()) - 1;
      midpoints.emplace(key, id);
      return id;
    };
    std::vector<TriMesh::Triangle> next;
    next.reserve(4 * tris.size());
    for (const auto& t : tris) {
      const int ab = midpoint(t[0], t[1]);
      const int bc = midpoint(t[1], t[2]);
      const int ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  return TriMesh(std::move(verts), std::move(tris));
}

TriMesh mesh_ellipsoid_frequency(const Ellipsoid& e, int frequency) {
  return geodesic_sphere(frequency).mapped([&](const Vec3& u) { return e.surface_point(u); });
}

TriMesh mesh_ellipsoid(const Ellipsoid& e, int subdivisions) {
  if (subdivisions < 0) throw Error(ErrorCode::InvalidArgument, "subdivisions must be non-negative");
  if (subdivisions > kMaxSubdivisions) {
    throw Error(ErrorCode::SubdivisionTooLarge,
                "subdivisions " + std::to_string(subdivisions) + " exceeds " + std::to_string(kMaxSubdivisions));
  }
  return icosphere(subdivisions).mapped([&](const Vec3& u) { return e.surface_point(u); });
}

TriMesh mesh_star_shaped(const std::function<double(const Vec3&)>& radius, const Vec3& center, int frequency) {
  return geodesic_sphere(frequency).mapped([&](const Vec3& u) { return Vec3(center + radius(u) * u); });
}

}  // namespace coatlab
