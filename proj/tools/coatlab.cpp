// coatlab: scenario runner and task front-end.
//
//   coatlab run --config scenario.json --out-dir out
//   coatlab validate --config scenario.json
//   coatlab list-scenarios [--dir scenarios]
//   coatlab <task> [task flags] --out-dir out
//
// Exit status: 0 pass, 2 threshold failure, 1 error. The only environment
// knob is COATLAB_THREADS (worker count).

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coatlab/error.hpp"
#include "coatlab/scenario.hpp"

#ifndef COATLAB_SCENARIO_DIR
#define COATLAB_SCENARIO_DIR "scenarios"
#endif

namespace {

using coatlab::Json;
namespace fs = std::filesystem;

std::vector<double> parse_list(const std::string& text, std::size_t expected, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw coatlab::Error(coatlab::ErrorCode::InvalidArgument, flag + ": cannot parse \"" + item + "\" as a number");
    }
    out.push_back(v);
  }
  if (expected != 0 && out.size() != expected) {
    throw coatlab::Error(coatlab::ErrorCode::InvalidArgument,
                         flag + ": expected " + std::to_string(expected) + " comma-separated numbers");
  }
  return out;
}

Json vec_json(const std::string& text, const std::string& flag) {
  const std::vector<double> v = parse_list(text, 3, flag);
  return Json::array({v[0], v[1], v[2]});
}

// Flags shared by the task subcommands.
struct TaskFlags {
  std::string name;
  std::string out_dir = "out";
  std::string config;
  // geometry
  std::string spheres;
  std::string offset;
  std::string axes;
  std::string center;
  double rho0 = 0.0;
  std::string core;
  std::string shell;
  // medium
  std::string sigma;
  // numerics
  int subdiv = -1;
  std::string rho;
  std::string constraint;
  int sources = 0;
  std::uint64_t samples = 0;
  long long seed = -1;
  std::string family;
  std::string ts;
};

void add_common(CLI::App* app, TaskFlags& f) {
  app->add_option("--config", f.config, "Scenario file whose task matches this subcommand (flags override)");
  app->add_option("--out-dir", f.out_dir, "Directory for JSON/CSV artifacts")->capture_default_str();
  app->add_option("--name", f.name, "Scenario name used for artifact file names");
}

void add_geometry(CLI::App* app, TaskFlags& f, bool meshes) {
  app->add_option("--spheres", f.spheres, "Concentric sphere radii r_i,r_e");
  app->add_option("--offset", f.offset, "Core centre offset x,y,z (with --spheres)");
  app->add_option("--axes", f.axes, "Core semi-axes c1,c2,c3 (confocal geometry)");
  app->add_option("--center", f.center, "Centre x,y,z (confocal geometry)");
  app->add_option("--rho0", f.rho0, "Confocal parameter of the outer ellipsoid");
  if (meshes) {
    app->add_option("--core", f.core, "Core OFF mesh");
    app->add_option("--shell", f.shell, "Shell (outer) OFF mesh");
  }
}

Json geometry_json(const TaskFlags& f) {
  if (!f.core.empty() || !f.shell.empty()) {
    return {{"kind", "meshes"}, {"core", fs::absolute(f.core).string()}, {"shell", fs::absolute(f.shell).string()}};
  }
  if (!f.spheres.empty()) {
    const std::vector<double> r = parse_list(f.spheres, 2, "--spheres");
    Json g = {{"kind", "spheres"}, {"r_i", r[0]}, {"r_e", r[1]}};
    if (!f.offset.empty()) g["core_offset"] = vec_json(f.offset, "--offset");
    return g;
  }
  if (!f.axes.empty()) {
    Json g = {{"kind", "confocal"}, {"axes", vec_json(f.axes, "--axes")}, {"rho0", f.rho0}};
    if (!f.center.empty()) g["center"] = vec_json(f.center, "--center");
    return g;
  }
  return Json();
}

Json medium_json(const std::string& sigma, bool neutral_task) {
  std::vector<std::string> parts;
  std::stringstream ss(sigma);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  const auto value = [](const std::string& s) -> Json {
    if (s == "inf" || s == "neutral") return s;
    return parse_list(s, 1, "--sigma")[0];
  };
  if (neutral_task) {
    if (parts.size() != 2) throw coatlab::Error(coatlab::ErrorCode::InvalidArgument, "--sigma: expected sigma_c,sigma_s");
    return {{"sigma_c", value(parts[0])}, {"sigma_s", value(parts[1])}};
  }
  if (parts.size() != 3) {
    throw coatlab::Error(coatlab::ErrorCode::InvalidArgument, "--sigma: expected sigma_c,sigma_s,sigma_m");
  }
  return {{"sigma_c", value(parts[0])}, {"sigma_s", value(parts[1])}, {"sigma_m", value(parts[2])}};
}

int report(const coatlab::ScenarioResult& r) {
  std::cout << r.summary() << "\n";
  for (const auto& a : r.artifacts) std::cout << "  wrote " << a.string() << "\n";
  return r.pass ? coatlab::kExitPass : coatlab::kExitThresholdFail;
}

int run_task(coatlab::Task task, const TaskFlags& f) {
  Json doc;
  fs::path source_dir = fs::current_path();
  if (!f.config.empty()) {
    const coatlab::Scenario base = coatlab::Scenario::load(f.config);
    if (base.task() != task) {
      throw coatlab::Error(coatlab::ErrorCode::SchemaError,
                           f.config + ": task is " + std::string(coatlab::to_string(base.task())) + ", not " +
                               std::string(coatlab::to_string(task)));
    }
    doc = base.doc();
    source_dir = base.source_dir();
  } else {
    doc["name"] = std::string(coatlab::to_string(task));
    doc["task"] = std::string(coatlab::to_string(task));
  }
  if (!f.name.empty()) doc["name"] = f.name;
  const Json geometry = geometry_json(f);
  if (!geometry.is_null()) doc["geometry"] = geometry;
  if (task == coatlab::Task::Phi && !f.axes.empty()) doc["geometry"] = {{"kind", "axes"}, {"axes", vec_json(f.axes, "--axes")}};
  if (!f.sigma.empty()) doc["medium"] = medium_json(f.sigma, task == coatlab::Task::NeutralSphere);
  Json& n = doc["numerics"];
  if (n.is_null()) n = Json::object();
  if (f.subdiv >= 0) n["subdivisions"] = f.subdiv;
  if (!f.rho.empty()) n["rho"] = parse_list(f.rho, 0, "--rho");
  if (!f.constraint.empty()) n["constraint"] = f.constraint;
  if (f.sources > 0) n["sources"] = f.sources;
  if (f.samples > 0) n["mc_samples"] = f.samples;
  if (f.seed >= 0) doc["seed"] = f.seed;
  if (!f.family.empty() || !f.ts.empty()) {
    if (!doc.contains("sweep")) doc["sweep"] = Json::object();
    if (!f.family.empty()) doc["sweep"]["family"] = f.family;
    if (!f.ts.empty()) doc["sweep"]["t"] = parse_list(f.ts, 0, "--t");
  }
  const coatlab::Scenario sc = coatlab::Scenario::from_json(doc, source_dir);
  return report(coatlab::run_scenario(sc, f.out_dir));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coatlab: neutral coated inclusions and the overdetermined shell problem"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = "out";
  CLI::App* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("--config", config, "Scenario JSON")->required();
  run->add_option("--out-dir", out_dir, "Directory for JSON/CSV artifacts")->capture_default_str();

  CLI::App* validate = app.add_subcommand("validate", "Validate scenario files without running them");
  std::vector<std::string> validate_files;
  validate->add_option("--config", validate_files, "Scenario JSON (repeatable)")->required();

  std::string dir = COATLAB_SCENARIO_DIR;
  CLI::App* list = app.add_subcommand("list-scenarios", "List bundled scenarios as JSON");
  list->add_option("--dir", dir, "Scenario directory")->capture_default_str();

  TaskFlags f;
  struct Sub {
    coatlab::Task task;
    CLI::App* app;
  };
  std::vector<Sub> subs;

  CLI::App* phi = app.add_subcommand("phi", "Elliptic functions phi_j(rho), I0(rho) and the identity check");
  add_common(phi, f);
  phi->add_option("--axes", f.axes, "Semi-axes c1,c2,c3")->required();
  phi->add_option("--rho", f.rho, "Comma-separated rho values");
  subs.push_back({coatlab::Task::Phi, phi});

  CLI::App* solve = app.add_subcommand("solve-ellipsoid", "Section 3 solution on a confocal pair");
  add_common(solve, f);
  add_geometry(solve, f, false);
  solve->add_option("--subdiv", f.subdiv, "Residual mesh subdivision level");
  subs.push_back({coatlab::Task::SolveEllipsoid, solve});

  CLI::App* neutral = app.add_subcommand("neutral-sphere", "Section 2 neutral coated sphere");
  add_common(neutral, f);
  neutral->add_option("--spheres", f.spheres, "Radii r_i,r_e");
  neutral->add_option("--sigma", f.sigma, "sigma_c,sigma_s");
  neutral->add_option("--subdiv", f.subdiv, "Residual mesh subdivision level");
  subs.push_back({coatlab::Task::NeutralSphere, neutral});

  CLI::App* mfs = app.add_subcommand("mfs-fit", "Method of fundamental solutions fit of problem (1.5)");
  add_common(mfs, f);
  add_geometry(mfs, f, true);
  mfs->add_option("--subdiv", f.subdiv, "Mesh subdivision level");
  mfs->add_option("--constraint", f.constraint, "isotropic | symmetric");
  mfs->add_option("--sources", f.sources, "Sources per auxiliary surface");
  subs.push_back({coatlab::Task::MfsFit, mfs});

  CLI::App* newton = app.add_subcommand("newtonian-check", "Averaged Newtonian potential identity (section 5)");
  add_common(newton, f);
  add_geometry(newton, f, false);
  newton->add_option("--samples", f.samples, "Monte Carlo samples per domain");
  newton->add_option("--seed", f.seed, "Monte Carlo seed (required when sampling)");
  subs.push_back({coatlab::Task::NewtonianCheck, newton});

  CLI::App* bem = app.add_subcommand("bem-defect", "BEM transmission solve and neutrality defect");
  add_common(bem, f);
  add_geometry(bem, f, true);
  bem->add_option("--sigma", f.sigma, "sigma_c,sigma_s,sigma_m (sigma_c may be inf, sigma_m may be neutral)");
  bem->add_option("--subdiv", f.subdiv, "BEM subdivision level (2-6)");
  subs.push_back({coatlab::Task::BemDefect, bem});

  CLI::App* sweep = app.add_subcommand("sweep", "Isotropy sweep of MFS fits");
  add_common(sweep, f);
  sweep->add_option("--family", f.family, "distorted | confocal");
  sweep->add_option("--t", f.ts, "Comma-separated t values");
  sweep->add_option("--subdiv", f.subdiv, "Mesh subdivision level");
  subs.push_back({coatlab::Task::Sweep, sweep});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? coatlab::kExitPass : coatlab::kExitError;
  }

  try {
    if (run->parsed()) {
      return report(coatlab::run_scenario(coatlab::Scenario::load(config), out_dir));
    }
    if (validate->parsed()) {
      int status = coatlab::kExitPass;
      for (const std::string& file : validate_files) {
        Json line = {{"file", file}};
        try {
          const coatlab::Scenario sc = coatlab::Scenario::load(file);
          line["status"] = "ok";
          line["name"] = sc.name();
          line["task"] = std::string(coatlab::to_string(sc.task()));
        } catch (const coatlab::Error& e) {
          line["status"] = "error";
          line["code"] = std::string(coatlab::to_string(e.code()));
          line["message"] = e.what();
          status = coatlab::kExitError;
        }
        std::cout << line.dump() << "\n";
      }
      return status;
    }
    if (list->parsed()) {
      Json out = Json::array();
      for (const fs::path& p : coatlab::list_scenarios(dir)) {
        Json entry = {{"file", p.filename().string()}};
        try {
          const coatlab::Scenario sc = coatlab::Scenario::load(p);
          entry["name"] = sc.name();
          entry["task"] = std::string(coatlab::to_string(sc.task()));
          entry["description"] = sc.doc().value("description", "");
          entry["status"] = "ok";
        } catch (const coatlab::Error& e) {
          entry["status"] = "error";
          entry["message"] = e.what();
        }
        out.push_back(entry);
      }
      std::cout << out.dump(2) << "\n";
      return coatlab::kExitPass;
    }
    for (const Sub& s : subs) {
      if (s.app->parsed()) return run_task(s.task, f);
    }
  } catch (const coatlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return coatlab::kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return coatlab::kExitError;
  }
  return coatlab::kExitError;
}
