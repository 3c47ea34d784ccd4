#include "tlbt/error.hpp"

namespace tlbt {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Dimension: return "dimension-mismatch";
    case ErrorCode::Parse: return "parse-error";
    case ErrorCode::Io: return "io-error";
    case ErrorCode::Singular: return "singular";
    case ErrorCode::NotSeparated: return "spectra-not-separated";
    case ErrorCode::NotPsd: return "not-positive-semidefinite";
    case ErrorCode::Unstable: return "unstable";
    case ErrorCode::Order: return "invalid-order";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::Overflow: return "overflow";
    case ErrorCode::Numerical: return "numerical-failure";
    case ErrorCode::VerificationUnavailable: return "verification-unavailable";
  }
  return "unknown";
}

}  // namespace tlbt
