#include "ard/error.hpp"

namespace ard {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Domain: return "E_DOMAIN";
    case ErrorCode::TruncationRange: return "E_TRUNCATION_RANGE";
    case ErrorCode::NonConvergence: return "E_NONCONVERGENCE";
    case ErrorCode::SolverStagnation: return "E_SOLVER_STAGNATION";
    case ErrorCode::MethodDisagreement: return "E_METHOD_DISAGREEMENT";
    case ErrorCode::NonFinite: return "E_NONFINITE";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::Config: return "E_CONFIG";
    case ErrorCode::Usage: return "E_USAGE";
  }
  return "E_UNKNOWN";
}

}  // namespace ard
