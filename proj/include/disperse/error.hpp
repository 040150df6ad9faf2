#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace disperse {

enum class ErrorKind {
  InvalidArgument,
  NonConvergent,
  DegeneracyOutOfRange,
  SingularInput,
  QuadratureFailure,
  NoConvergence,
  SingularJacobian,
  SeedFailure,
  GridResonanceUnderresolved,
  NumericalBlowup,
  FitAmbiguous,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit code or a row flag.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::DegeneracyOutOfRange: return "DegeneracyOutOfRange";
    case ErrorKind::SingularInput: return "SingularInput";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::SeedFailure: return "SeedFailure";
    case ErrorKind::GridResonanceUnderresolved: return "GridResonanceUnderresolved";
    case ErrorKind::NumericalBlowup: return "NumericalBlowup";
    case ErrorKind::FitAmbiguous: return "FitAmbiguous";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace disperse
