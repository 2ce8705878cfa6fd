#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace coatlab {

using Json = nlohmann::ordered_json;

enum class Task { Phi, SolveEllipsoid, NeutralSphere, MfsFit, NewtonianCheck, BemDefect, Sweep };

std::string_view to_string(Task task) noexcept;
// Throws SchemaError for an unknown task name.
Task parse_task(std::string_view name);
const std::vector<Task>& all_tasks();
// Metric names a task reports; thresholds may only name these.
const std::vector<std::string>& task_metrics(Task task);

// A validated scenario document. Every key is checked against the schema
// (README, "Scenario schema"); unknown keys, wrong types, out-of-range values
// and a missing seed on a Monte Carlo task raise SchemaError naming the field.
class Scenario {
 public:
  // source_dir resolves relative mesh paths. JSON syntax errors report line
  // and column.
  static Scenario parse(const std::string& text, const std::filesystem::path& source_dir = ".");
  static Scenario load(const std::filesystem::path& path);
  static Scenario from_json(Json doc, const std::filesystem::path& source_dir = ".");

  const Json& doc() const { return doc_; }
  const std::string& name() const { return name_; }
  Task task() const { return task_; }
  const std::filesystem::path& source_dir() const { return source_dir_; }
  bool stochastic() const;

 private:
  Json doc_;
  std::string name_;
  Task task_ = Task::Phi;
  std::filesystem::path source_dir_;
};

struct ThresholdCheck {
  std::string metric;
  double value = 0.0;
  std::optional<double> min;
  std::optional<double> max;
  bool pass = true;
};

struct ScenarioResult {
  std::string name;
  Task task = Task::Phi;
  std::vector<std::pair<std::string, double>> metrics;  // in task_metrics order
  Json details;
  std::vector<ThresholdCheck> checks;
  bool pass = true;
  std::vector<std::filesystem::path> artifacts;

  double metric(const std::string& name) const;  // throws InvalidArgument if absent
  // One line: task, key metric, pass/fail.
  std::string summary() const;
};

// Executes the task, writes the JSON result (and CSV table where the task
// has one) under out_dir, and evaluates the thresholds. Module errors
// propagate as coatlab::Error.
ScenarioResult run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir);

// Scenario files (*.json) in a directory, sorted by file name.
std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir);

// Exit status convention of the command line tool.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitThresholdFail = 2;

}  // namespace coatlab
