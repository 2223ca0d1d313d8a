#include "ulam/error.hpp"

namespace ulam {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::SingularJacobian: return "singular jacobian";
    case ErrorCode::MaxIterations: return "max iterations";
    case ErrorCode::Overflow: return "overflow";
    case ErrorCode::TrackingFailed: return "tracking failed";
    case ErrorCode::DegenerateEigenvalues: return "degenerate eigenvalues";
    case ErrorCode::Collision: return "collision";
    case ErrorCode::Inadmissible: return "inadmissible";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace ulam
