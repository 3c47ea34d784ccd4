#pragma once

#include <stdexcept>
#include <string>

namespace tlbt {

enum class ErrorCode {
  InvalidArgument,
  Dimension,
  Parse,
  Io,
  Singular,
  NotSeparated,
  NotPsd,
  Unstable,
  Order,
  Degenerate,
  Overflow,
  Numerical,
  VerificationUnavailable,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a category code; the C API maps the code to a status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tlbt
