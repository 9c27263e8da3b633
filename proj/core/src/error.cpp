#include "blockade/error.hpp"

namespace blockade {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimension: return "invalid-dimension";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kNonHermitian: return "non-hermitian";
    case ErrorCode::kDegenerateSteadyState: return "degenerate-steady-state";
    case ErrorCode::kUndefinedCorrelation: return "undefined-correlation";
    case ErrorCode::kStepSizeViolation: return "step-size-violation";
    case ErrorCode::kUndefinedEstimator: return "undefined-estimator";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

bool Error::is_config_error() const noexcept {
  switch (code_) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidDimension:
    case ErrorCode::kIo:
      return true;
    default:
      return false;
  }
}

}  // namespace blockade
