#include "gibbslab/error.hpp"

namespace gibbslab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyFamily: return "EmptyFamily";
    case ErrorCode::InvalidPatch: return "InvalidPatch";
    case ErrorCode::UncoveredSite: return "UncoveredSite";
    case ErrorCode::AsymmetricJ: return "AsymmetricJ";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::GaussianUnsupported: return "GaussianUnsupported";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::Indeterminate: return "Indeterminate";
    case ErrorCode::DegenerateConditional: return "DegenerateConditional";
    case ErrorCode::NonpositiveConvexity: return "NonpositiveConvexity";
    case ErrorCode::NotContractive: return "NotContractive";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace gibbslab
