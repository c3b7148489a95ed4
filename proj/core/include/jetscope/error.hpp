#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jetscope {

/// Stable machine-readable failure categories. The CLI reports these verbatim
/// in the `code` field of its error JSON.
enum class ErrorCode {
  InvalidArgument,
  SupportViolation,
  MissingDerivativeData,
  EmptyRegion,
  UnsupportedExponent,
  SolverDivergence,
  IllConditioned,
  BoundaryPoint,
  HypothesisUnverified,
  NoConvergence,
  SingularSystem,
  ResidualTooLarge,
  EmptySet,
  DegenerateSum,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::InvalidArgument, message);
}

}  // namespace jetscope
