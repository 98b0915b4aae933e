#include "coherent/errors.hpp"

namespace coherent {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::HermiticityFailure: return "HERMITICITY_FAILURE";
    case ErrorCode::ClosureFailure: return "CLOSURE_FAILURE";
    case ErrorCode::LinearDependence: return "LINEAR_DEPENDENCE";
    case ErrorCode::JacobiFailure: return "JACOBI_FAILURE";
    case ErrorCode::NotUnitary: return "NOT_UNITARY";
    case ErrorCode::ProjectionResidual: return "PROJECTION_RESIDUAL";
    case ErrorCode::Normalization: return "NORMALIZATION";
    case ErrorCode::RankAmbiguous: return "RANK_AMBIGUOUS";
    case ErrorCode::ContainmentViolation: return "CONTAINMENT_VIOLATION";
    case ErrorCode::UnsupportedAlgebra: return "UNSUPPORTED_ALGEBRA";
    case ErrorCode::CanonicalizationRequired: return "CANONICALIZATION_REQUIRED";
    case ErrorCode::DegenerateOrbit: return "DEGENERATE_ORBIT";
    case ErrorCode::ChartExit: return "CHART_EXIT";
    case ErrorCode::NonsmoothPath: return "NONSMOOTH_PATH";
    case ErrorCode::QuadratureUnderresolved: return "QUADRATURE_UNDERRESOLVED";
    case ErrorCode::CostLimit: return "COST_LIMIT";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::ValidationError: return "VALIDATION_ERROR";
  }
  return "UNKNOWN";
}

bool is_domain_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankAmbiguous:
    case ErrorCode::ContainmentViolation:
    case ErrorCode::DegenerateOrbit:
    case ErrorCode::ChartExit:
    case ErrorCode::NonsmoothPath:
    case ErrorCode::ProjectionResidual:
    case ErrorCode::QuadratureUnderresolved:
    case ErrorCode::CostLimit:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, std::string operation, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + " in " + operation + ": " + message),
      code_(code),
      operation_(std::move(operation)),
      detail_(message) {}

}  // namespace coherent
