#pragma once

#include <stdexcept>
#include <string>

namespace vcc {

enum class ErrorCode {
  kInvalidArgument = 1,
  kInfeasibleDimension,
  kOverheadExceedsCoherence,
  kInvalidConfiguration,
  kNotHermitian,
  kNumericalSingularity,
  kUnsupportedConfiguration,
  kGridMismatch,
  kUnknownKey,
  kTypeMismatch,
  kIo,
  kInvariantViolation,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vcc
