#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coatlab {

enum class ErrorCode {
  NonFiniteInput,
  DegenerateAxes,
  SubdivisionTooLarge,
  DegenerateMesh,
  ConvergenceFailure,
  StencilLeavesShell,
  SingularInterfaceSystem,
  NoPositiveRoot,
  VacuousNeutrality,
  AssumptionViolated,
  EvaluationOutsideDomain,
  RankDeficient,
  SourceSurfaceIntersectsShell,
  DisconnectedShell,
  InsufficientRadii,
  SingularPoint,
  SeedRequired,
  IllConditionedFit,
  ContrastSingular,
  MeshesIntersect,
  InvalidArgument,
  SchemaError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; the code is stable and
// is what the CLI surfaces in its diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace coatlab
