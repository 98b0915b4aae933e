#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coherent {

enum class ErrorCode {
  InvalidArgument,
  HermiticityFailure,
  ClosureFailure,
  LinearDependence,
  JacobiFailure,
  NotUnitary,
  ProjectionResidual,
  Normalization,
  RankAmbiguous,
  ContainmentViolation,
  UnsupportedAlgebra,
  CanonicalizationRequired,
  DegenerateOrbit,
  ChartExit,
  NonsmoothPath,
  QuadratureUnderresolved,
  CostLimit,
  ParseError,
  ValidationError,
};

/// Upper-snake name used in reports, e.g. "RANK_AMBIGUOUS".
std::string_view to_string(ErrorCode code);

/// Numerical outcomes of a well-formed request (as opposed to bad input or
/// usage). The CLI maps these to exit code 2.
bool is_domain_error(ErrorCode code);

/// Every failure raised by the library. Carries the operation that raised
/// it so that reports can point back at the originating call.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string operation, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& operation() const noexcept { return operation_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string operation_;
  std::string detail_;
};

}  // namespace coherent
