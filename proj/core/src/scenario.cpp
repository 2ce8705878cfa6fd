#include "coatlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "coatlab/analytic.hpp"
#include "coatlab/bem.hpp"
#include "coatlab/elliptic.hpp"
#include "coatlab/error.hpp"
#include "coatlab/mesh.hpp"
#include "coatlab/overdet.hpp"
#include "coatlab/potential.hpp"
#include "coatlab/sampling.hpp"

namespace coatlab {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::SchemaError, (path.empty() ? std::string("/") : path) + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }

// ---------------------------------------------------------------------------
// Typed, path-aware accessors. Validation and execution share them, so a
// document that validates is read exactly as it was checked.

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
}

void check_keys(const Json& obj, const std::string& path, const std::vector<std::string_view>& allowed) {
  require_object(obj, path);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      std::string list;
      for (std::string_view a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      schema_error(path, "unknown key \"" + it.key() + "\" (allowed: " + list + ")");
    }
  }
}

const Json* find(const Json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) schema_error(path, "expected a finite number");
  return x;
}

struct Range {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
};

Range positive() { return {0.0, std::numeric_limits<double>::infinity(), true}; }
Range at_least(double lo) { return {lo, std::numeric_limits<double>::infinity(), false}; }
Range between(double lo, double hi) { return {lo, hi, false}; }

double check_range(double x, const Range& r, const std::string& path) {
  if (r.lo_open ? !(x > r.lo) : !(x >= r.lo)) {
    schema_error(path, "value " + std::to_string(x) + (r.lo_open ? " must be > " : " must be >= ") + std::to_string(r.lo));
  }
  if (!(x <= r.hi)) schema_error(path, "value " + std::to_string(x) + " must be <= " + std::to_string(r.hi));
  return x;
}

double number(const Json& obj, const std::string& path, const std::string& key, std::optional<double> fallback,
              Range range = {}) {
  const Json* v = find(obj, key);
  if (!v) {
    if (!fallback) schema_error(join(path, key), "required number is missing");
    return *fallback;
  }
  return check_range(as_number(*v, join(path, key)), range, join(path, key));
}

long long integer(const Json& obj, const std::string& path, const std::string& key, std::optional<long long> fallback,
                  long long lo, long long hi) {
  const Json* v = find(obj, key);
  if (!v) {
    if (!fallback) schema_error(join(path, key), "required integer is missing");
    return *fallback;
  }
  if (!v->is_number_integer()) schema_error(join(path, key), "expected an integer");
  const long long x = v->get<long long>();
  if (x < lo || x > hi) {
    schema_error(join(path, key), "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                                      std::to_string(hi) + "]");
  }
  return x;
}

bool boolean(const Json& obj, const std::string& path, const std::string& key, bool fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) schema_error(join(path, key), "expected true or false");
  return v->get<bool>();
}

std::string string(const Json& obj, const std::string& path, const std::string& key,
                   std::optional<std::string> fallback) {
  const Json* v = find(obj, key);
  if (!v) {
    if (!fallback) schema_error(join(path, key), "required string is missing");
    return *fallback;
  }
  if (!v->is_string()) schema_error(join(path, key), "expected a string");
  return v->get<std::string>();
}

std::string choice(const Json& obj, const std::string& path, const std::string& key,
                   std::optional<std::string> fallback, std::initializer_list<std::string_view> options) {
  const std::string s = string(obj, path, key, std::move(fallback));
  if (std::find(options.begin(), options.end(), s) == options.end()) {
    std::string list;
    for (std::string_view o : options) list += (list.empty() ? "" : ", ") + std::string(o);
    schema_error(join(path, key), "\"" + s + "\" is not one of: " + list);
  }
  return s;
}

Vec3 vec3(const Json& obj, const std::string& path, const std::string& key, std::optional<Vec3> fallback,
          Range range = {}) {
  const Json* v = find(obj, key);
  const std::string p = join(path, key);
  if (!v) {
    if (!fallback) schema_error(p, "required 3-vector is missing");
    return *fallback;
  }
  if (!v->is_array() || v->size() != 3) schema_error(p, "expected an array of 3 numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    const std::string pi = p + "/" + std::to_string(i);
    out[i] = check_range(as_number((*v)[static_cast<std::size_t>(i)], pi), range, pi);
  }
  return out;
}

std::vector<double> numbers(const Json& obj, const std::string& path, const std::string& key,
                            std::optional<std::vector<double>> fallback, Range range = {}) {
  const Json* v = find(obj, key);
  const std::string p = join(path, key);
  if (!v) {
    if (!fallback) schema_error(p, "required array is missing");
    return *fallback;
  }
  if (!v->is_array() || v->empty()) schema_error(p, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    const std::string pi = p + "/" + std::to_string(i);
    out.push_back(check_range(as_number((*v)[i], pi), range, pi));
  }
  return out;
}

// sigma_c: a positive number, 0 (insulating) or "inf" (perfectly conducting).
double sigma_core(const Json& obj, const std::string& path) {
  const Json* v = find(obj, "sigma_c");
  if (!v) schema_error(join(path, "sigma_c"), "required conductivity is missing");
  if (v->is_string()) {
    if (v->get<std::string>() != "inf") schema_error(join(path, "sigma_c"), "expected a number >= 0 or \"inf\"");
    return kInf;
  }
  return check_range(as_number(*v, join(path, "sigma_c")), at_least(0.0), join(path, "sigma_c"));
}

const Json& section(const Json& doc, const std::string& key) {
  static const Json empty = Json::object();
  const Json* v = find(doc, key);
  return v ? *v : empty;
}

// ---------------------------------------------------------------------------
// Schema tables.

struct TaskInfo {
  Task task;
  std::string_view name;
  std::vector<std::string_view> geometry_kinds;  // empty: no geometry section
  bool medium;
  bool csv;
  std::vector<std::string> metrics;
};

const std::vector<TaskInfo>& task_table() {
  static const std::vector<TaskInfo> table = {
      {Task::Phi, "phi", {"axes", "confocal"}, false, true, {"max_identity_defect", "points"}},
      {Task::SolveEllipsoid,
       "solve-ellipsoid",
       {"confocal", "spheres"},
       false,
       false,
       {"k", "A11", "A22", "A33", "A_max_eigenvalue", "residual_outer", "residual_inner", "residual_laplacian",
        "trace_defect"}},
      {Task::NeutralSphere,
       "neutral-sphere",
       {"spheres"},
       true,
       true,
       {"sigma_m", "c0", "k", "A11", "A_over_k", "exterior_dipole", "psi_quadrature_defect", "residual_outer",
        "residual_inner", "trace_defect"}},
      {Task::MfsFit,
       "mfs-fit",
       {"confocal", "spheres", "ellipsoids", "meshes"},
       false,
       true,
       {"rho_fit", "max_misfit", "trace_defect", "rank", "c", "A11", "A22", "A33", "d_norm"}},
      {Task::NewtonianCheck,
       "newtonian-check",
       {"confocal", "spheres", "ellipsoids"},
       false,
       true,
       {"exterior_max_abs", "fit_residual", "fit_A11", "fit_A22", "fit_A33", "fit_c_star", "fit_d_norm",
        "mc_max_abs_z", "mc_mean_z"}},
      {Task::BemDefect,
       "bem-defect",
       {"confocal", "spheres", "ellipsoids", "meshes"},
       true,
       true,
       {"defect", "defect_e1", "defect_e2", "defect_e3", "dipole", "dipole_remainder_ratio", "analytic_dipole",
        "dipole_rel_error", "max_charge", "panels", "sigma_m"}},
      {Task::Sweep, "sweep", {}, false, true, {"rows", "rho_fit_first", "rho_fit_last", "rho_fit_min", "rho_fit_max"}},
  };
  return table;
}

const TaskInfo& info(Task t) {
  for (const TaskInfo& i : task_table()) {
    if (i.task == t) return i;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown task");
}

// Numeric knobs accepted per task (all optional).
std::vector<std::string_view> numeric_keys(Task t) {
  switch (t) {
    case Task::Phi: return {"rho"};
    case Task::SolveEllipsoid: return {"subdivisions", "interior_samples", "fd_step", "halton_offset"};
    case Task::NeutralSphere:
      return {"subdivisions", "interior_samples", "fd_step", "halton_offset", "profile_points"};
    case Task::MfsFit:
    case Task::Sweep:
      return {"subdivisions", "constraint", "sources", "outer_inflation", "inner_deflation",
              "confocal_inner_sources", "tsvd_cut", "max_collocation"};
    case Task::NewtonianCheck:
      return {"interior_points", "shrink", "exterior_points", "exterior_radius_factor", "mc_samples", "mc_points",
              "k"};
    case Task::BemDefect:
      return {"subdivisions", "near_factor", "max_refine", "mesh_aspect_max", "probes", "probe_radius_factor"};
  }
  return {};
}

void validate_ellipsoid_object(const Json& e, const std::string& path) {
  check_keys(e, path, {"axes", "center"});
  vec3(e, path, "axes", std::nullopt, positive());
  vec3(e, path, "center", Vec3::Zero());
}

void validate_geometry(const Json& doc, const TaskInfo& ti) {
  const std::string path = "/geometry";
  const Json* g = find(doc, "geometry");
  if (ti.geometry_kinds.empty()) {
    if (g) schema_error(path, "task " + std::string(ti.name) + " takes no geometry section");
    return;
  }
  if (!g) schema_error(path, "required section is missing");
  require_object(*g, path);
  const std::string kind = string(*g, path, "kind", std::nullopt);
  if (std::find(ti.geometry_kinds.begin(), ti.geometry_kinds.end(), kind) == ti.geometry_kinds.end()) {
    std::string list;
    for (std::string_view k : ti.geometry_kinds) list += (list.empty() ? "" : ", ") + std::string(k);
    schema_error(join(path, "kind"), "\"" + kind + "\" not supported by task " + std::string(ti.name) +
                                          " (supported: " + list + ")");
  }
  if (kind == "axes") {
    check_keys(*g, path, {"kind", "axes"});
    vec3(*g, path, "axes", std::nullopt, positive());
  } else if (kind == "confocal") {
    check_keys(*g, path, {"kind", "axes", "center", "rho0"});
    vec3(*g, path, "axes", std::nullopt, positive());
    vec3(*g, path, "center", Vec3::Zero());
    if (ti.task != Task::Phi || find(*g, "rho0")) number(*g, path, "rho0", std::nullopt, positive());
  } else if (kind == "spheres") {
    check_keys(*g, path, {"kind", "r_i", "r_e", "core_offset"});
    const double ri = number(*g, path, "r_i", std::nullopt, positive());
    number(*g, path, "r_e", std::nullopt, {ri, std::numeric_limits<double>::infinity(), true});
    const Vec3 off = vec3(*g, path, "core_offset", Vec3::Zero());
    if (off != Vec3::Zero() && (ti.task == Task::SolveEllipsoid || ti.task == Task::NeutralSphere)) {
      schema_error(join(path, "core_offset"), "task " + std::string(ti.name) + " needs concentric spheres");
    }
  } else if (kind == "ellipsoids") {
    check_keys(*g, path, {"kind", "inner", "outer"});
    if (!find(*g, "inner")) schema_error(join(path, "inner"), "required section is missing");
    if (!find(*g, "outer")) schema_error(join(path, "outer"), "required section is missing");
    validate_ellipsoid_object((*g)["inner"], join(path, "inner"));
    validate_ellipsoid_object((*g)["outer"], join(path, "outer"));
  } else if (kind == "meshes") {
    check_keys(*g, path, {"kind", "core", "shell"});
    string(*g, path, "core", std::nullopt);
    string(*g, path, "shell", std::nullopt);
  } else {
    schema_error(join(path, "kind"), "unknown geometry kind \"" + kind + "\"");
  }
}

void validate_medium(const Json& doc, const TaskInfo& ti) {
  const std::string path = "/medium";
  const Json* m = find(doc, "medium");
  if (!ti.medium) {
    if (m) schema_error(path, "task " + std::string(ti.name) + " takes no medium section");
    return;
  }
  if (!m) schema_error(path, "required section is missing");
  if (ti.task == Task::NeutralSphere) {
    check_keys(*m, path, {"sigma_c", "sigma_s"});
    number(*m, path, "sigma_c", std::nullopt, positive());
    number(*m, path, "sigma_s", std::nullopt, positive());
    return;
  }
  check_keys(*m, path, {"sigma_c", "sigma_s", "sigma_m"});
  sigma_core(*m, path);
  number(*m, path, "sigma_s", std::nullopt, positive());
  const Json* sm = find(*m, "sigma_m");
  if (!sm) schema_error(join(path, "sigma_m"), "required conductivity is missing");
  if (sm->is_string()) {
    if (sm->get<std::string>() != "neutral") schema_error(join(path, "sigma_m"), "expected a number or \"neutral\"");
    if (string(doc["geometry"], "/geometry", "kind", std::nullopt) != "spheres") {
      schema_error(join(path, "sigma_m"), "\"neutral\" needs spheres geometry");
    }
  } else {
    number(*m, path, "sigma_m", std::nullopt, positive());
  }
}

MfsOptions mfs_options(const Json& n, const std::string& path) {
  MfsOptions o;
  o.constraint = choice(n, path, "constraint", "isotropic", {"isotropic", "symmetric"}) == "symmetric"
                     ? AConstraint::Symmetric
                     : AConstraint::Isotropic;
  o.sources = static_cast<int>(integer(n, path, "sources", o.sources, 4, 100000));
  o.outer_inflation = number(n, path, "outer_inflation", o.outer_inflation, {1.0, 100.0, true});
  o.inner_deflation = number(n, path, "inner_deflation", o.inner_deflation, {0.0, 1.0, true});
  if (!(o.inner_deflation < 1.0)) schema_error(join(path, "inner_deflation"), "must be < 1");
  o.confocal_inner_sources = boolean(n, path, "confocal_inner_sources", o.confocal_inner_sources);
  o.tsvd_cut = number(n, path, "tsvd_cut", o.tsvd_cut, between(0.0, 1.0));
  o.max_collocation = static_cast<int>(integer(n, path, "max_collocation", o.max_collocation, 0, 1000000));
  return o;
}

ResidualOptions residual_options(const Json& n, const std::string& path) {
  ResidualOptions o;
  o.interior_samples = static_cast<int>(integer(n, path, "interior_samples", o.interior_samples, 1, 10000000));
  o.fd_step = number(n, path, "fd_step", o.fd_step, {0.0, 1.0, true});
  o.halton_offset =
      static_cast<std::uint64_t>(integer(n, path, "halton_offset", static_cast<long long>(o.halton_offset), 0,
                                         std::numeric_limits<int>::max()));
  return o;
}

BemOptions bem_options(const Json& n, const std::string& path) {
  BemOptions o;
  o.near_factor = number(n, path, "near_factor", o.near_factor, positive());
  o.max_refine = static_cast<int>(integer(n, path, "max_refine", o.max_refine, 0, 10));
  o.mesh_aspect_max = number(n, path, "mesh_aspect_max", o.mesh_aspect_max, at_least(1.0));
  o.probes = static_cast<int>(integer(n, path, "probes", o.probes, 4, 100000));
  o.probe_radius_factor = number(n, path, "probe_radius_factor", o.probe_radius_factor, {1.0, 1e6, true});
  return o;
}

int subdivisions(const Json& n, Task t) {
  if (t == Task::BemDefect) {
    return static_cast<int>(integer(n, "/numerics", "subdivisions", 4, 2, kMaxBemSubdivisions));
  }
  return static_cast<int>(integer(n, "/numerics", "subdivisions", 4, 0, kMaxSubdivisions));
}

std::uint64_t mc_samples(const Json& n) {
  return static_cast<std::uint64_t>(integer(n, "/numerics", "mc_samples", 100000, 0, 1'000'000'000));
}

void validate_numerics(const Json& doc, const TaskInfo& ti) {
  const std::string path = "/numerics";
  const Json& n = section(doc, "numerics");
  check_keys(n, path, numeric_keys(ti.task));
  switch (ti.task) {
    case Task::Phi: numbers(n, path, "rho", std::vector<double>{0.0}, at_least(0.0)); break;
    case Task::SolveEllipsoid:
      subdivisions(n, ti.task);
      residual_options(n, path);
      break;
    case Task::NeutralSphere:
      subdivisions(n, ti.task);
      residual_options(n, path);
      integer(n, path, "profile_points", 50, 2, 100000);
      break;
    case Task::MfsFit:
    case Task::Sweep:
      subdivisions(n, ti.task);
      mfs_options(n, path);
      break;
    case Task::NewtonianCheck:
      integer(n, path, "interior_points", 256, 200, 1000000);
      number(n, path, "shrink", 0.95, {0.0, 1.0, true});
      integer(n, path, "exterior_points", 64, 1, 1000000);
      number(n, path, "exterior_radius_factor", 1.5, {1.0, 1e6, true});
      mc_samples(n);
      integer(n, path, "mc_points", 8, 0, 1000000);
      if (find(n, "k")) number(n, path, "k", std::nullopt, positive());
      break;
    case Task::BemDefect:
      subdivisions(n, ti.task);
      bem_options(n, path);
      break;
  }
}

void validate_sweep(const Json& doc, const TaskInfo& ti) {
  const Json* s = find(doc, "sweep");
  if (ti.task != Task::Sweep) {
    if (s) schema_error("/sweep", "only the sweep task takes a sweep section");
    return;
  }
  if (!s) schema_error("/sweep", "required section is missing");
  check_keys(*s, "/sweep", {"family", "t"});
  choice(*s, "/sweep", "family", std::nullopt, {"distorted", "confocal"});
  numbers(*s, "/sweep", "t", std::nullopt, between(0.0, 10.0));
}

void validate_thresholds(const Json& doc, const TaskInfo& ti) {
  const Json* t = find(doc, "thresholds");
  if (!t) return;
  require_object(*t, "/thresholds");
  for (auto it = t->begin(); it != t->end(); ++it) {
    const std::string p = join("/thresholds", it.key());
    if (std::find(ti.metrics.begin(), ti.metrics.end(), it.key()) == ti.metrics.end()) {
      std::string list;
      for (const std::string& m : ti.metrics) list += (list.empty() ? "" : ", ") + m;
      schema_error(p, "unknown metric for task " + std::string(ti.name) + " (metrics: " + list + ")");
    }
    check_keys(it.value(), p, {"min", "max"});
    if (!find(it.value(), "min") && !find(it.value(), "max")) schema_error(p, "needs \"min\" and/or \"max\"");
    if (find(it.value(), "min")) as_number(it.value()["min"], join(p, "min"));
    if (find(it.value(), "max")) as_number(it.value()["max"], join(p, "max"));
  }
}

void validate_outputs(const Json& doc, const TaskInfo& ti) {
  const Json* o = find(doc, "outputs");
  if (!o) return;
  if (ti.csv) {
    check_keys(*o, "/outputs", {"json", "csv"});
  } else {
    check_keys(*o, "/outputs", {"json"});
  }
  for (const char* key : {"json", "csv"}) {
    if (!find(*o, key)) continue;
    const std::string s = string(*o, "/outputs", key, std::nullopt);
    if (s.empty() || fs::path(s).is_absolute() || s.find("..") != std::string::npos) {
      schema_error(join("/outputs", key), "must be a relative path inside the output directory");
    }
  }
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
           c == '.';
  });
}

// ---------------------------------------------------------------------------
// Output helpers.

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json vec_json(const Vec3& v) { return Json::array({num(v[0]), num(v[1]), num(v[2])}); }

Json mat_json(const Mat3& m) {
  Json rows = Json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(Json::array({num(m(i, 0)), num(m(i, 1)), num(m(i, 2))}));
  return rows;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(const std::vector<std::string>& cells) { rows_.push_back(cells); }
  void row_numbers(const std::vector<double>& cells) {
    std::vector<std::string> s;
    for (double c : cells) s.push_back(fmt(c));
    rows_.push_back(std::move(s));
  }
  void write(const fs::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    write_line(os, header_);
    for (const auto& r : rows_) write_line(os, r);
    if (!os) throw Error(ErrorCode::IoError, "failed writing " + path.string());
  }
  std::size_t size() const { return rows_.size(); }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  }
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// ---------------------------------------------------------------------------
// Geometry construction.

struct ShellSpec {
  std::string kind;
  std::optional<ConfocalPair> pair;  // confocal, concentric spheres
  std::optional<Ellipsoid> outer;
  std::optional<Ellipsoid> inner;
  std::string core_mesh;
  std::string shell_mesh;
};

ShellSpec shell_spec(const Scenario& sc) {
  const Json& g = sc.doc()["geometry"];
  const std::string path = "/geometry";
  ShellSpec s;
  s.kind = string(g, path, "kind", std::nullopt);
  if (s.kind == "confocal") {
    const Ellipsoid base(vec3(g, path, "axes", std::nullopt), vec3(g, path, "center", Vec3::Zero()));
    s.pair.emplace(base, number(g, path, "rho0", std::nullopt));
    s.inner = s.pair->inner();
    s.outer = s.pair->outer();
  } else if (s.kind == "spheres") {
    const double ri = number(g, path, "r_i", std::nullopt);
    const double re = number(g, path, "r_e", std::nullopt);
    const Vec3 off = vec3(g, path, "core_offset", Vec3::Zero());
    s.inner = Ellipsoid::sphere(ri, off);
    s.outer = Ellipsoid::sphere(re);
    if (off == Vec3::Zero()) s.pair.emplace(Ellipsoid::sphere(ri), re * re - ri * ri);
  } else if (s.kind == "ellipsoids") {
    const Json& in = g["inner"];
    const Json& out = g["outer"];
    s.inner = Ellipsoid(vec3(in, "/geometry/inner", "axes", std::nullopt),
                        vec3(in, "/geometry/inner", "center", Vec3::Zero()));
    s.outer = Ellipsoid(vec3(out, "/geometry/outer", "axes", std::nullopt),
                        vec3(out, "/geometry/outer", "center", Vec3::Zero()));
  } else if (s.kind == "meshes") {
    s.core_mesh = (sc.source_dir() / string(g, path, "core", std::nullopt)).string();
    s.shell_mesh = (sc.source_dir() / string(g, path, "shell", std::nullopt)).string();
  }
  return s;
}

double max_eigenvalue(const Mat3& a) {
  const Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (a + a.transpose()));
  return es.eigenvalues().maxCoeff();
}

using Metrics = std::map<std::string, double>;

struct TaskOutput {
  Metrics metrics;
  Json details = Json::object();
  std::optional<Csv> csv;
};

// ---------------------------------------------------------------------------
// Tasks.

TaskOutput run_phi(const Scenario& sc) {
  const Json& g = sc.doc()["geometry"];
  const Vec3 axes = vec3(g, "/geometry", "axes", std::nullopt);
  const std::vector<double> rhos = numbers(section(sc.doc(), "numerics"), "/numerics", "rho", std::vector<double>{0.0});
  const EllipticContext ctx(axes);
  TaskOutput out;
  out.csv.emplace(std::vector<std::string>{"rho", "phi1", "phi2", "phi3", "i0", "g", "identity_defect"});
  double worst = 0.0;
  Json rows = Json::array();
  for (double rho : rhos) {
    const Vec3 phi = ctx.phi_all(rho);
    const double target = 2.0 / std::sqrt(ctx.g(rho));
    const double defect = std::abs(phi.sum() - target) / target;
    worst = std::max(worst, defect);
    out.csv->row_numbers({rho, phi[0], phi[1], phi[2], ctx.i0(rho), ctx.g(rho), defect});
    rows.push_back({{"rho", num(rho)}, {"phi", vec_json(phi)}, {"i0", num(ctx.i0(rho))}});
  }
  out.metrics = {{"max_identity_defect", worst}, {"points", static_cast<double>(rhos.size())}};
  out.details["axes"] = vec_json(axes);
  out.details["values"] = rows;
  return out;
}

TaskOutput run_solve_ellipsoid(const Scenario& sc) {
  const ShellSpec s = shell_spec(sc);
  const Json& n = section(sc.doc(), "numerics");
  const OverdetSolution w(*s.pair);
  const OverdetResiduals r = residuals(ShellGeometry::from_confocal(*s.pair, subdivisions(n, sc.task())), w, w.k(),
                                       w.A(), w.d(), residual_options(n, "/numerics"));
  const double trace = trace_check(w) / (w.k() * s.pair->shell_volume());
  TaskOutput out;
  out.metrics = {{"k", w.k()},
                 {"A11", w.A()(0, 0)},
                 {"A22", w.A()(1, 1)},
                 {"A33", w.A()(2, 2)},
                 {"A_max_eigenvalue", max_eigenvalue(w.A())},
                 {"residual_outer", r.outer_normalized()},
                 {"residual_inner", r.inner_normalized()},
                 {"residual_laplacian", r.interior_normalized()},
                 {"trace_defect", trace}};
  out.details["inner_axes"] = vec_json(s.pair->inner().semi_axes());
  out.details["outer_axes"] = vec_json(s.pair->outer_semi_axes());
  out.details["center"] = vec_json(s.pair->inner().center());
  out.details["rho0"] = num(s.pair->rho0());
  out.details["k"] = num(w.k());
  out.details["A"] = mat_json(w.A());
  out.details["d"] = vec_json(w.d());
  out.details["residual_samples"] = {{"outer", r.outer_samples}, {"inner", r.inner_samples},
                                     {"interior", r.interior_samples}};
  return out;
}

TaskOutput run_neutral_sphere(const Scenario& sc) {
  const Json& g = sc.doc()["geometry"];
  const Json& m = sc.doc()["medium"];
  const Json& n = section(sc.doc(), "numerics");
  const double ri = number(g, "/geometry", "r_i", std::nullopt);
  const double re = number(g, "/geometry", "r_e", std::nullopt);
  const NeutralShell ns =
      neutral_shell_field(ri, re, number(m, "/medium", "sigma_c", std::nullopt), number(m, "/medium", "sigma_s", std::nullopt));
  const ShellGeometry shell =
      ShellGeometry::from_ellipsoids(Ellipsoid::sphere(re), Ellipsoid::sphere(ri), subdivisions(n, sc.task()));
  const OverdetResiduals r = residuals(shell, *ns.field, ns.k, ns.A, ns.d, residual_options(n, "/numerics"));
  const double shell_vol = 4.0 * kPi / 3.0 * (re * re * re - ri * ri * ri);
  const double core_vol = 4.0 * kPi / 3.0 * ri * ri * ri;

  const int profile = static_cast<int>(integer(n, "/numerics", "profile_points", 50, 2, 100000));
  TaskOutput out;
  out.csv.emplace(std::vector<std::string>{"r", "u_profile", "psi", "psi_quadrature"});
  double psi_defect = 0.0;
  for (int i = 0; i < profile; ++i) {
    const double rr = ri + (re - ri) * i / (profile - 1);
    const double psi = ns.field->value(Vec3(rr, 0, 0)) + rr * rr / (2.0 * ns.beta);
    const double quad = ns.field->psi_by_quadrature(rr);
    psi_defect = std::max(psi_defect, std::abs(psi - quad));
    out.csv->row_numbers({rr, ns.transmission.profile(rr), psi, quad});
  }
  out.metrics = {{"sigma_m", ns.sigma_m},
                 {"c0", ns.c0},
                 {"k", ns.k},
                 {"A11", ns.A(0, 0)},
                 {"A_over_k", ns.A(0, 0) / ns.k},
                 {"exterior_dipole", ns.transmission.exterior_dipole},
                 {"psi_quadrature_defect", psi_defect},
                 {"residual_outer", r.outer_normalized()},
                 {"residual_inner", r.inner_normalized()},
                 {"trace_defect", trace_check(ns.k, ns.A, shell_vol, core_vol) / (ns.k * shell_vol)}};
  out.details["beta"] = num(ns.beta);
  out.details["A"] = mat_json(ns.A);
  out.details["transmission"] = {{"core_slope", num(ns.transmission.core_slope)},
                                 {"shell_slope", num(ns.transmission.shell_slope)},
                                 {"shell_dipole", num(ns.transmission.shell_dipole)},
                                 {"exterior_dipole", num(ns.transmission.exterior_dipole)},
                                 {"interface_residual", num(ns.transmission.interface_residual)}};
  return out;
}

ShellGeometry mfs_shell(const Scenario& sc, int s) {
  const ShellSpec spec = shell_spec(sc);
  if (spec.kind == "confocal") return ShellGeometry::from_confocal(*spec.pair, s);
  if (spec.kind == "meshes") {
    return ShellGeometry::from_meshes(TriMesh::read_off(spec.shell_mesh), TriMesh::read_off(spec.core_mesh));
  }
  return ShellGeometry::from_ellipsoids(*spec.outer, *spec.inner, s);
}

TaskOutput run_mfs_fit(const Scenario& sc) {
  const Json& n = section(sc.doc(), "numerics");
  const ShellGeometry shell = mfs_shell(sc, subdivisions(n, sc.task()));
  const MfsFit fit = mfs_fit(shell, mfs_options(n, "/numerics"));
  TaskOutput out;
  out.metrics = {{"rho_fit", fit.rho_fit},
                 {"max_misfit", fit.max_misfit},
                 {"trace_defect", fit.trace_defect},
                 {"rank", fit.rank},
                 {"c", fit.c},
                 {"A11", fit.A(0, 0)},
                 {"A22", fit.A(1, 1)},
                 {"A33", fit.A(2, 2)},
                 {"d_norm", fit.d.norm()}};
  out.details["A"] = mat_json(fit.A);
  out.details["d"] = vec_json(fit.d);
  out.details["unknowns"] = fit.unknowns;
  out.details["collocation_points"] = fit.collocation_points;
  out.details["validation_points"] = fit.validation_points;
  out.csv.emplace(std::vector<std::string>{"x", "y", "z", "strength"});
  for (std::size_t i = 0; i < fit.sources.size(); ++i) {
    const Vec3& y = fit.sources[i];
    out.csv->row_numbers({y[0], y[1], y[2], fit.strengths[static_cast<Eigen::Index>(i)]});
  }
  return out;
}

TaskOutput run_newtonian_check(const Scenario& sc) {
  const ShellSpec s = shell_spec(sc);
  const Json& n = section(sc.doc(), "numerics");
  const Ellipsoid& outer = *s.outer;
  const Ellipsoid& inner = *s.inner;
  const int n_in = static_cast<int>(integer(n, "/numerics", "interior_points", 256, 200, 1000000));
  const double shrink = number(n, "/numerics", "shrink", 0.95);
  const int n_out = static_cast<int>(integer(n, "/numerics", "exterior_points", 64, 1, 1000000));
  const double out_factor = number(n, "/numerics", "exterior_radius_factor", 1.5);
  const std::uint64_t samples = mc_samples(n);
  const auto mc_points = static_cast<std::size_t>(integer(n, "/numerics", "mc_points", 8, 0, 1000000));
  // Default k: the section 3 value 2 / sqrt(g(rho0)) for confocal pairs, else 1.
  double k = 1.0;
  if (s.pair) k = 2.0 / std::sqrt(EllipticContext(s.pair->inner().semi_axes()).g(s.pair->rho0()));
  if (find(n, "k")) k = number(n, "/numerics", "k", std::nullopt);

  const std::vector<Vec3> interior = interior_points(inner, n_in, shrink);
  const std::vector<double> diff_in = averaged_difference(outer, inner, interior);
  std::vector<double> values;
  for (double v : diff_in) values.push_back(k * outer.volume() * v);
  const QuadraticFit fit = quadratic_fit(interior, values);

  const double radius = out_factor * outer.semi_axes().maxCoeff();
  std::vector<Vec3> exterior;
  for (const Vec3& u : fibonacci_sphere(n_out)) exterior.push_back(outer.center() + radius * u);
  const std::vector<double> diff_out = averaged_difference(outer, inner, exterior);
  double ext_max = 0.0;
  for (double v : diff_out) ext_max = std::max(ext_max, std::abs(v));

  TaskOutput out;
  out.csv.emplace(std::vector<std::string>{"region", "x", "y", "z", "exact", "mc", "mc_stderr"});
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const Vec3& x = interior[i];
    out.csv->row({"interior", fmt(x[0]), fmt(x[1]), fmt(x[2]), fmt(values[i]), "", ""});
  }
  double max_z = kNaN;
  double mean_z = kNaN;
  std::vector<McEstimate> mc;
  if (samples > 0 && mc_points > 0) {
    const std::vector<Vec3> pts(exterior.begin(), exterior.begin() + static_cast<std::ptrdiff_t>(
                                                                          std::min(mc_points, exterior.size())));
    mc = averaged_difference_mc(McDomain::from_ellipsoid(outer), McDomain::from_ellipsoid(inner), pts, samples,
                                static_cast<std::uint64_t>(sc.doc()["seed"].get<long long>()));
    max_z = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < mc.size(); ++i) {
      const double z = (mc[i].value - diff_out[i]) / mc[i].stderr_value;
      max_z = std::max(max_z, std::abs(z));
      sum += z;
    }
    mean_z = sum / static_cast<double>(mc.size());
  }
  for (std::size_t i = 0; i < exterior.size(); ++i) {
    const Vec3& x = exterior[i];
    const bool has_mc = i < mc.size();
    out.csv->row({"exterior", fmt(x[0]), fmt(x[1]), fmt(x[2]), fmt(diff_out[i]), has_mc ? fmt(mc[i].value) : "",
                  has_mc ? fmt(mc[i].stderr_value) : ""});
  }
  out.metrics = {{"exterior_max_abs", ext_max},    {"fit_residual", fit.residual}, {"fit_A11", fit.A(0, 0)},
                 {"fit_A22", fit.A(1, 1)},         {"fit_A33", fit.A(2, 2)},       {"fit_c_star", fit.c_star},
                 {"fit_d_norm", fit.d.norm()},     {"mc_max_abs_z", max_z},        {"mc_mean_z", mean_z}};
  out.details["k"] = num(k);
  out.details["fit_A"] = mat_json(fit.A);
  out.details["fit_d"] = vec_json(fit.d);
  out.details["exterior_radius"] = num(radius);
  out.details["mc_samples"] = samples;
  if (s.pair) out.details["section3_A"] = mat_json(OverdetSolution(*s.pair).A() / OverdetSolution(*s.pair).k() * k);
  return out;
}

TaskOutput run_bem_defect(const Scenario& sc) {
  const ShellSpec s = shell_spec(sc);
  const Json& n = section(sc.doc(), "numerics");
  const Json& m = sc.doc()["medium"];
  const int sub = subdivisions(n, sc.task());
  const BemOptions opts = bem_options(n, "/numerics");
  std::shared_ptr<const BemSystem> sys;
  if (s.kind == "meshes") {
    sys = std::make_shared<const BemSystem>(TriMesh::read_off(s.core_mesh), TriMesh::read_off(s.shell_mesh), opts);
  } else {
    const int nu = bem_frequency(sub);
    sys = std::make_shared<const BemSystem>(mesh_ellipsoid_frequency(*s.inner, nu),
                                            mesh_ellipsoid_frequency(*s.outer, nu), opts);
  }
  const double sigma_c = sigma_core(m, "/medium");
  const double sigma_s = number(m, "/medium", "sigma_s", std::nullopt);
  double sigma_m = 0.0;
  if (m["sigma_m"].is_string()) {
    const Json& g = sc.doc()["geometry"];
    sigma_m = neutral_sigma_m(number(g, "/geometry", "r_i", std::nullopt), number(g, "/geometry", "r_e", std::nullopt),
                              sigma_c, sigma_s);
  } else {
    sigma_m = number(m, "/medium", "sigma_m", std::nullopt);
  }
  const LayeredMedium medium = LayeredMedium::isotropic(sigma_c, sigma_s, sigma_m);
  const std::vector<TransmissionSolution> sols =
      solve_transmission(sys, medium, {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()});
  std::vector<NeutralityDefect> defects;
  double charge = 0.0;
  for (const auto& sol : sols) {
    defects.push_back(neutrality_defect(sol));
    charge = std::max({charge, std::abs(sol.charge_core), std::abs(sol.charge_shell)});
  }
  const DipoleFit dip = fit_dipole(sols[2]);
  double analytic = kNaN;
  double rel = kNaN;
  if (s.kind == "spheres" && s.pair) {
    analytic = sphere_transmission(s.inner->semi_axes()[0], s.outer->semi_axes()[0], medium).exterior_dipole;
    rel = std::abs(dip.p.z() - analytic) / std::abs(analytic);
  }
  TaskOutput out;
  const double worst = std::max({defects[0].defect, defects[1].defect, defects[2].defect});
  out.metrics = {{"defect", worst},
                 {"defect_e1", defects[0].defect},
                 {"defect_e2", defects[1].defect},
                 {"defect_e3", defects[2].defect},
                 {"dipole", dip.p.z()},
                 {"dipole_remainder_ratio", dip.dipole_scale > 0.0 ? dip.max_remainder / dip.dipole_scale : kNaN},
                 {"analytic_dipole", analytic},
                 {"dipole_rel_error", rel},
                 {"max_charge", charge},
                 {"panels", static_cast<double>(sys->panels())},
                 {"sigma_m", sigma_m}};
  out.details["subdivisions"] = s.kind == "meshes" ? Json(nullptr) : Json(sub);
  out.details["probe_radius"] = num(defects[0].probe_radius);
  out.details["dipole_e3"] = vec_json(dip.p);
  out.details["sigma"] = {num(sigma_c), num(sigma_s), num(sigma_m)};
  out.csv.emplace(std::vector<std::string>{"direction", "x", "y", "z", "perturbation", "weighted"});
  for (std::size_t d = 0; d < defects.size(); ++d) {
    for (const ProbeValue& p : defects[d].probes) {
      out.csv->row({"e" + std::to_string(d + 1), fmt(p.x[0]), fmt(p.x[1]), fmt(p.x[2]), fmt(p.perturbation),
                    fmt(p.weighted)});
    }
  }
  return out;
}

TaskOutput run_sweep(const Scenario& sc) {
  const Json& n = section(sc.doc(), "numerics");
  const Json& sw = sc.doc()["sweep"];
  const SweepFamily family = choice(sw, "/sweep", "family", std::nullopt, {"distorted", "confocal"}) == "confocal"
                                 ? SweepFamily::ConfocalCore
                                 : SweepFamily::DistortedCore;
  const std::vector<double> ts = numbers(sw, "/sweep", "t", std::nullopt);
  const std::vector<SweepRow> rows = isotropy_sweep(family, ts, subdivisions(n, sc.task()), mfs_options(n, "/numerics"));
  TaskOutput out;
  out.csv.emplace(std::vector<std::string>{"t", "rho_fit", "trace_defect", "rank"});
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const SweepRow& r : rows) {
    out.csv->row({fmt(r.t), fmt(r.rho_fit), fmt(r.trace_defect), std::to_string(r.rank)});
    lo = std::min(lo, r.rho_fit);
    hi = std::max(hi, r.rho_fit);
  }
  out.metrics = {{"rows", static_cast<double>(rows.size())},
                 {"rho_fit_first", rows.front().rho_fit},
                 {"rho_fit_last", rows.back().rho_fit},
                 {"rho_fit_min", lo},
                 {"rho_fit_max", hi}};
  out.details["family"] = family == SweepFamily::ConfocalCore ? "confocal" : "distorted";
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  os << text;
  if (!os) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(Task task) noexcept {
  for (const TaskInfo& i : task_table()) {
    if (i.task == task) return i.name;
  }
  return "unknown";
}

Task parse_task(std::string_view name) {
  for (const TaskInfo& i : task_table()) {
    if (i.name == name) return i.task;
  }
  std::string list;
  for (const TaskInfo& i : task_table()) list += (list.empty() ? "" : ", ") + std::string(i.name);
  throw Error(ErrorCode::SchemaError, "/task: unknown task \"" + std::string(name) + "\" (tasks: " + list + ")");
}

const std::vector<Task>& all_tasks() {
  static const std::vector<Task> tasks = [] {
    std::vector<Task> t;
    for (const TaskInfo& i : task_table()) t.push_back(i.task);
    return t;
  }();
  return tasks;
}

const std::vector<std::string>& task_metrics(Task task) { return info(task).metrics; }

Scenario Scenario::parse(const std::string& text, const fs::path& source_dir) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // nlohmann reports "line L, column C" in the message.
    throw Error(ErrorCode::SchemaError, std::string("invalid JSON: ") + e.what());
  }
  return from_json(std::move(doc), source_dir);
}

Scenario Scenario::load(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot read scenario " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse(ss.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SchemaError) throw;
    const std::string what = e.what();
    const std::string prefix = "SchemaError: ";
    throw Error(ErrorCode::SchemaError, path.string() + ": " + what.substr(what.rfind(prefix, 0) == 0 ? prefix.size() : 0));
  }
}

Scenario Scenario::from_json(Json doc, const fs::path& source_dir) {
  check_keys(doc, "", {"name", "description", "task", "geometry", "medium", "numerics", "sweep", "seed", "thresholds",
                       "outputs"});
  Scenario s;
  s.name_ = string(doc, "", "name", std::nullopt);
  if (!valid_name(s.name_)) schema_error("/name", "use letters, digits, '_', '-' and '.' only");
  if (find(doc, "description")) string(doc, "", "description", std::nullopt);
  s.task_ = parse_task(string(doc, "", "task", std::nullopt));
  const TaskInfo& ti = info(s.task_);
  validate_geometry(doc, ti);
  validate_medium(doc, ti);
  validate_numerics(doc, ti);
  validate_sweep(doc, ti);
  validate_thresholds(doc, ti);
  validate_outputs(doc, ti);
  s.doc_ = std::move(doc);
  s.source_dir_ = source_dir;
  if (find(s.doc_, "seed")) {
    integer(s.doc_, "", "seed", std::nullopt, 0, std::numeric_limits<long long>::max());
  } else if (s.stochastic()) {
    schema_error("/seed", "seed required for the Monte Carlo task " + std::string(ti.name));
  }
  return s;
}

bool Scenario::stochastic() const {
  return task_ == Task::NewtonianCheck && mc_samples(section(doc_, "numerics")) > 0 &&
         integer(section(doc_, "numerics"), "/numerics", "mc_points", 8, 0, 1000000) > 0;
}

double ScenarioResult::metric(const std::string& name) const {
  for (const auto& [k, v] : metrics) {
    if (k == name) return v;
  }
  throw Error(ErrorCode::InvalidArgument, "no metric named " + name);
}

std::string ScenarioResult::summary() const {
  std::string key;
  if (!checks.empty()) {
    key = checks.front().metric + "=" + fmt(checks.front().value);
  } else if (!metrics.empty()) {
    key = metrics.front().first + "=" + fmt(metrics.front().second);
  }
  return std::string(to_string(task)) + " " + name + " " + key + " " + (pass ? "PASS" : "FAIL") + " (" +
         std::to_string(std::count_if(checks.begin(), checks.end(), [](const ThresholdCheck& c) { return c.pass; })) +
         "/" + std::to_string(checks.size()) + " thresholds)";
}

ScenarioResult run_scenario(const Scenario& sc, const fs::path& out_dir) {
  TaskOutput out;
  switch (sc.task()) {
    case Task::Phi: out = run_phi(sc); break;
    case Task::SolveEllipsoid: out = run_solve_ellipsoid(sc); break;
    case Task::NeutralSphere: out = run_neutral_sphere(sc); break;
    case Task::MfsFit: out = run_mfs_fit(sc); break;
    case Task::NewtonianCheck: out = run_newtonian_check(sc); break;
    case Task::BemDefect: out = run_bem_defect(sc); break;
    case Task::Sweep: out = run_sweep(sc); break;
  }

  ScenarioResult res;
  res.name = sc.name();
  res.task = sc.task();
  for (const std::string& m : task_metrics(sc.task())) {
    const auto it = out.metrics.find(m);
    res.metrics.emplace_back(m, it == out.metrics.end() ? kNaN : it->second);
  }
  if (const Json* t = find(sc.doc(), "thresholds")) {
    for (auto it = t->begin(); it != t->end(); ++it) {
      ThresholdCheck c;
      c.metric = it.key();
      c.value = res.metric(it.key());
      if (find(it.value(), "min")) c.min = it.value()["min"].get<double>();
      if (find(it.value(), "max")) c.max = it.value()["max"].get<double>();
      // NaN (metric not applicable) never passes a threshold.
      c.pass = !std::isnan(c.value) && (!c.min || c.value >= *c.min) && (!c.max || c.value <= *c.max);
      res.pass = res.pass && c.pass;
      res.checks.push_back(c);
    }
  }
  res.details = std::move(out.details);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + out_dir.string());
  const Json& outputs = section(sc.doc(), "outputs");
  const fs::path json_path = out_dir / string(outputs, "/outputs", "json", sc.name() + ".json");

  Json doc;
  doc["name"] = sc.name();
  doc["task"] = std::string(to_string(sc.task()));
  if (find(sc.doc(), "seed")) doc["seed"] = sc.doc()["seed"];
  Json metrics = Json::object();
  for (const auto& [k, v] : res.metrics) metrics[k] = num(v);
  doc["metrics"] = metrics;
  Json checks = Json::array();
  for (const ThresholdCheck& c : res.checks) {
    Json j = {{"metric", c.metric}, {"value", num(c.value)}};
    if (c.min) j["min"] = *c.min;
    if (c.max) j["max"] = *c.max;
    j["pass"] = c.pass;
    checks.push_back(j);
  }
  doc["thresholds"] = checks;
  doc["details"] = res.details;
  doc["status"] = res.pass ? "pass" : "fail";
  doc["scenario"] = sc.doc();
  write_text(json_path, doc.dump(2) + "\n");
  res.artifacts.push_back(json_path);
  if (out.csv) {
    const fs::path csv_path = out_dir / string(outputs, "/outputs", "csv", sc.name() + ".csv");
    out.csv->write(csv_path);
    res.artifacts.push_back(csv_path);
  }
  return res;
}

std::vector<fs::path> list_scenarios(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace coatlab
