#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace calabi {

enum class ErrorCode {
  DivisionByZero,
  DimensionMismatch,
  DegeneratePairing,
  UnknownName,
  ParseError,
  NotASphere,
  DegenerateTriangle,
  InternalTopologyError,
  DomainError,
  ZeroNorm,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegeneratePairing: return "DegeneratePairing";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotASphere: return "NotASphere";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::InternalTopologyError: return "InternalTopologyError";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace calabi
