#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smpx {

enum class ErrorKind {
  InconsistentMerge,
  NonPivotalDivision,
  EmptyInput,
  NonPositiveEpsilon,
  ParseError,
  DuplicateTransition,
  UnknownState,
  NotInReducedSet,
  LastState,
  LeadingCancellation,
  PermutationMismatch,
  DiagnosticFailure,
  NotStochasticAtEpsilon,
  SingularSystem,
  InvalidArgument,
  InsufficientOrder,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InconsistentMerge: return "InconsistentMerge";
    case ErrorKind::NonPivotalDivision: return "NonPivotalDivision";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateTransition: return "DuplicateTransition";
    case ErrorKind::UnknownState: return "UnknownState";
    case ErrorKind::NotInReducedSet: return "NotInReducedSet";
    case ErrorKind::LastState: return "LastState";
    case ErrorKind::LeadingCancellation: return "LeadingCancellation";
    case ErrorKind::PermutationMismatch: return "PermutationMismatch";
    case ErrorKind::DiagnosticFailure: return "DiagnosticFailure";
    case ErrorKind::NotStochasticAtEpsilon: return "NotStochasticAtEpsilon";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InsufficientOrder: return "InsufficientOrder";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace smpx
