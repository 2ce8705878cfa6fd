#include "coatlab/error.hpp"

namespace coatlab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::DegenerateAxes: return "DegenerateAxes";
    case ErrorCode::SubdivisionTooLarge: return "SubdivisionTooLarge";
    case ErrorCode::DegenerateMesh: return "DegenerateMesh";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::StencilLeavesShell: return "StencilLeavesShell";
    case ErrorCode::SingularInterfaceSystem: return "SingularInterfaceSystem";
    case ErrorCode::NoPositiveRoot: return "NoPositiveRoot";
    case ErrorCode::VacuousNeutrality: return "VacuousNeutrality";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::EvaluationOutsideDomain: return "EvaluationOutsideDomain";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SourceSurfaceIntersectsShell: return "SourceSurfaceIntersectsShell";
    case ErrorCode::DisconnectedShell: return "DisconnectedShell";
    case ErrorCode::InsufficientRadii: return "InsufficientRadii";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::SeedRequired: return "SeedRequired";
    case ErrorCode::IllConditionedFit: return "IllConditionedFit";
    case ErrorCode::ContrastSingular: return "ContrastSingular";
    case ErrorCode::MeshesIntersect: return "MeshesIntersect";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace coatlab
