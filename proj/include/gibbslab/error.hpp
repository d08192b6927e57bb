#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gibbslab {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  EmptyFamily,
  InvalidPatch,
  UncoveredSite,
  AsymmetricJ,
  NotPositiveDefinite,
  InvalidGrid,
  GridMismatch,
  ModeMismatch,
  GaussianUnsupported,
  SizeLimit,
  Indeterminate,
  DegenerateConditional,
  NonpositiveConvexity,
  NotContractive,
  NonConvergence,
  EmptySet,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; `code()` is the
// machine-readable part, `what()` carries the diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace gibbslab
