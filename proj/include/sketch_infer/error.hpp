#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sketch_infer {

enum class ErrorCode {
  DimensionMismatch,
  RankDeficient,
  NonFinite,
  DomainError,
  ConvergenceError,
  Overflow,
  MissingWStar,
  NotPositiveDefinite,
  GammaNonpositive,
  AssumptionViolated,
  NegativeVariance,
  NegativeDenominator,
  DegenerateSSR,
  IndexOutOfRange,
  DivideByZero,
  EmptyInput,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is an Error carrying a code the
/// callers (notably the simulation harness and the CLI) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace sketch_infer
