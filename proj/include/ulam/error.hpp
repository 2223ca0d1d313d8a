#pragma once

#include <stdexcept>
#include <string>

namespace ulam {

enum class ErrorCode {
  InvalidArgument,
  NonConvergence,
  SingularJacobian,
  MaxIterations,
  Overflow,
  TrackingFailed,
  DegenerateEigenvalues,
  Collision,
  Inadmissible,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a code so the C layer can map
// it to a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ulam
