#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ard {

/// Machine-readable failure categories. The CLI prints these verbatim.
enum class ErrorCode {
  Domain,             // invalid geometry, mode, or parameters
  TruncationRange,    // eigenfunction series left the representable range
  NonConvergence,     // mesh relaxation did not settle
  SolverStagnation,   // linear solver hit its iteration cap
  MethodDisagreement, // dual-route curve extraction mismatch
  NonFinite,          // NaN/Inf appeared in a simulation state
  Io,
  Config,
  Usage,
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

}  // namespace ard
