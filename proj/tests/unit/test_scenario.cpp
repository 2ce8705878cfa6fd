#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "coatlab/error.hpp"
#include "coatlab/scenario.hpp"

using namespace coatlab;
namespace fs = std::filesystem;

namespace {

// Returns the SchemaError message, or fails the test.
std::string schema_message(const std::string& text) {
  try {
    Scenario::parse(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaError) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "expected SchemaError for " << text;
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("coatlab_test_" + name);
  fs::remove_all(p);
  return p;
}

const char* kConfocalSphere = R"({
  "name": "cs", "task": "solve-ellipsoid",
  "geometry": {"kind": "confocal", "axes": [1, 1, 1], "rho0": 3},
  "numerics": {"subdivisions": 2},
  "thresholds": {"k": {"min": 0.249999999999, "max": 0.250000000001}}
})";

}  // namespace

TEST(Scenario, ValidDocumentParses) {
  const Scenario s = Scenario::parse(kConfocalSphere);
  EXPECT_EQ(s.name(), "cs");
  EXPECT_EQ(s.task(), Task::SolveEllipsoid);
  EXPECT_FALSE(s.stochastic());
}

TEST(Scenario, UnknownKeysAreRejectedEverywhere) {
  EXPECT_NE(schema_message(R"({"name": "a", "task": "phi", "geometry": {"kind": "axes", "axes": [1,1,1]}, "sed": 1})")
                .find("unknown key \"sed\""),
            std::string::npos);
  const std::string typo = schema_message(
      R"({"name": "a", "task": "solve-ellipsoid", "geometry": {"kind": "confocal", "axes": [1,1,1], "rho_0": 3}})");
  EXPECT_NE(typo.find("/geometry"), std::string::npos);
  EXPECT_NE(typo.find("rho_0"), std::string::npos);
  EXPECT_NE(schema_message(R"({"name": "a", "task": "mfs-fit", "geometry": {"kind": "spheres", "r_i": 1, "r_e": 2},
                              "numerics": {"source": 10}})")
                .find("/numerics"),
            std::string::npos);
  EXPECT_NE(schema_message(R"({"name": "a", "task": "solve-ellipsoid",
                              "geometry": {"kind": "confocal", "axes": [1,1,1], "rho0": 3},
                              "thresholds": {"kk": {"max": 1}}})")
                .find("/thresholds/kk"),
            std::string::npos);
  EXPECT_NE(schema_message(R"({"name": "a", "task": "solve-ellipsoid",
                              "geometry": {"kind": "confocal", "axes": [1,1,1], "rho0": 3},
                              "thresholds": {"k": {"maximum": 1}}})")
                .find("maximum"),
            std::string::npos);
}

TEST(Scenario, SeedRequiredForMonteCarlo) {
  const std::string base =
      R"({"name": "n", "task": "newtonian-check", "geometry": {"kind": "spheres", "r_i": 1, "r_e": 2}})";
  EXPECT_NE(schema_message(base).find("seed required"), std::string::npos);
  const std::string seeded = base.substr(0, base.size() - 1) + R"(, "seed": 3})";
  EXPECT_TRUE(Scenario::parse(seeded).stochastic());
  // Without sampling the task is deterministic and needs no seed.
  const std::string exact = base.substr(0, base.size() - 1) + R"(, "numerics": {"mc_samples": 0}})";
  EXPECT_FALSE(Scenario::parse(exact).stochastic());
}

TEST(Scenario, TypesRangesAndSections) {
  EXPECT_NE(schema_message(R"({"name": "a", "task": "phi", "geometry": {"kind": "axes", "axes": [1, 1]}})")
                .find("/geometry/axes"),
            std::string::npos);
  EXPECT_NE(schema_message(R"({"name": "a", "task": "phi", "geometry": {"kind": "axes", "axes": [1, -1, 1]}})")
                .find("/geometry/axes/1"),
            std::string::npos);
  EXPECT_NE(schema_message(R"({"name": "a", "task": "phi", "geometry": {"kind": "axes", "axes": [1,1,1]},
                              "medium": {"sigma_c": 1, "sigma_s": 2, "sigma_m": 3}})")
                .find("/medium"),
            std::string::npos);
  EXPECT_NE(schema_message(R"({"name": "a", "task": "neutral-sphere",
                              "geometry": {"kind": "confocal", "axes": [1,1,1], "rho0": 3},
                              "medium": {"sigma_c": 5, "sigma_s": 1}})")
                .find("not supported"),
            std::string::npos);
  EXPECT_NE(schema_message(R"({"name": "a", "task": "bem-defect", "geometry": {"kind": "spheres", "r_i": 1, "r_e": 2},
                              "medium": {"sigma_c": 5, "sigma_s": 1, "sigma_m": 2}, "numerics": {"subdivisions": 9}})")
                .find("/numerics/subdivisions"),
            std::string::npos);
  EXPECT_NE(schema_message(R"({"name": "a", "task": "nope"})").find("unknown task"), std::string::npos);
  EXPECT_NE(schema_message(R"({"name": "bad name", "task": "phi"})").find("/name"), std::string::npos);
  EXPECT_NE(schema_message(R"({"name": "a", "task": "sweep", "sweep": {"family": "distorted"}})").find("/sweep/t"),
            std::string::npos);
  EXPECT_NE(schema_message("{\n  \"name\": \"a\",\n  \"task\": \n}").find("line 4"), std::string::npos);
  // Extended conductivities and the neutral keyword.
  EXPECT_NO_THROW(Scenario::parse(R"({"name": "a", "task": "bem-defect", "geometry": {"kind": "spheres", "r_i": 1, "r_e": 2},
                                     "medium": {"sigma_c": "inf", "sigma_s": 1, "sigma_m": "neutral"}})"));
}

TEST(Scenario, RunWritesArtifactsAndChecksThresholds) {
  const fs::path dir = temp_dir("run");
  const ScenarioResult r = run_scenario(Scenario::parse(kConfocalSphere), dir);
  EXPECT_TRUE(r.pass);
  EXPECT_DOUBLE_EQ(r.metric("k"), 0.25);
  EXPECT_NEAR(r.metric("A11"), -7.0 / 12.0, 1e-10);
  ASSERT_EQ(r.artifacts.size(), 1u);
  const Json out = Json::parse(slurp(r.artifacts[0]));
  EXPECT_EQ(out["status"], "pass");
  EXPECT_EQ(out["metrics"]["k"].get<double>(), 0.25);
  EXPECT_NE(r.summary().find("PASS"), std::string::npos);

  Json failing = Json::parse(kConfocalSphere);
  failing["thresholds"]["k"] = {{"min", 0.3}};
  const ScenarioResult f = run_scenario(Scenario::from_json(failing), dir);
  EXPECT_FALSE(f.pass);
  EXPECT_NE(f.summary().find("FAIL"), std::string::npos);
}

TEST(Scenario, ArtifactsAreByteIdentical) {
  const std::string text = R"({
    "name": "mc", "task": "newtonian-check", "seed": 11,
    "geometry": {"kind": "confocal", "axes": [1, 1.5, 2], "rho0": 1},
    "numerics": {"mc_samples": 20000, "mc_points": 2, "exterior_points": 8}
  })";
  const ScenarioResult a = run_scenario(Scenario::parse(text), temp_dir("det_a"));
  const ScenarioResult b = run_scenario(Scenario::parse(text), temp_dir("det_b"));
  ASSERT_EQ(a.artifacts.size(), 2u);
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) EXPECT_EQ(slurp(a.artifacts[i]), slurp(b.artifacts[i]));
  Json other = Json::parse(text);
  other["seed"] = 12;
  const ScenarioResult c = run_scenario(Scenario::from_json(other), temp_dir("det_c"));
  EXPECT_NE(slurp(a.artifacts[1]), slurp(c.artifacts[1]));
}

TEST(Scenario, ModuleErrorsPropagate) {
  const Scenario s = Scenario::parse(R"({"name": "cs", "task": "bem-defect",
    "geometry": {"kind": "spheres", "r_i": 1, "r_e": 2},
    "medium": {"sigma_c": 1, "sigma_s": 1, "sigma_m": 2}, "numerics": {"subdivisions": 2}})");
  try {
    run_scenario(s, temp_dir("err"));
    ADD_FAILURE() << "expected ContrastSingular";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ContrastSingular);
  }
}

TEST(Scenario, EveryTaskHasMetrics) {
  for (Task t : all_tasks()) {
    EXPECT_FALSE(task_metrics(t).empty());
    EXPECT_EQ(parse_task(to_string(t)), t);
  }
}
