#include "vcc/error.hpp"

namespace vcc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInfeasibleDimension: return "infeasible-dimension";
    case ErrorCode::kOverheadExceedsCoherence: return "overhead-exceeds-coherence";
    case ErrorCode::kInvalidConfiguration: return "invalid-configuration";
    case ErrorCode::kNotHermitian: return "not-hermitian";
    case ErrorCode::kNumericalSingularity: return "numerical-singularity";
    case ErrorCode::kUnsupportedConfiguration: return "unsupported-configuration";
    case ErrorCode::kGridMismatch: return "grid-mismatch";
    case ErrorCode::kUnknownKey: return "unknown-key";
    case ErrorCode::kTypeMismatch: return "type-mismatch";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kInvariantViolation: return "invariant-violation";
  }
  return "unknown";
}

}  // namespace vcc
