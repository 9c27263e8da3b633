#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blockade {

enum class ErrorCode {
  kInvalidDimension,
  kDimensionMismatch,
  kInvalidArgument,
  kNonHermitian,
  kDegenerateSteadyState,
  kUndefinedCorrelation,
  kStepSizeViolation,
  kUndefinedEstimator,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code selects the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

  // True for errors the caller caused through bad input or configuration,
  // false for failures of the numerics themselves.
  bool is_config_error() const noexcept;

 private:
  ErrorCode code_;
};

}  // namespace blockade
