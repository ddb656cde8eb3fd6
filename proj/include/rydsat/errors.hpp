#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rydsat {

enum class ErrorKind {
  // atomic-core
  SingularLiouvillian,
  StepSizeUnderflow,
  InvalidState,
  // field-inference
  NonpositiveInput,
  NoSplitting,
  InsufficientData,
  // heterodyne-dsp
  AliasingRejected,
  RbwTooFine,
  EmptyBand,
  WrongKind,
  // cli-io
  ParseError,
  ValidationError,
  IoError,
};

/// Coarse grouping used for process exit codes.
enum class ErrorCategory { Validation, Solver, Dsp, Io };

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularLiouvillian: return "SingularLiouvillian";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::NonpositiveInput: return "NonpositiveInput";
    case ErrorKind::NoSplitting: return "NoSplitting";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::AliasingRejected: return "AliasingRejected";
    case ErrorKind::RbwTooFine: return "RbwTooFine";
    case ErrorKind::EmptyBand: return "EmptyBand";
    case ErrorKind::WrongKind: return "WrongKind";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

constexpr ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularLiouvillian:
    case ErrorKind::StepSizeUnderflow:
    case ErrorKind::InvalidState:
    case ErrorKind::NoSplitting:
    case ErrorKind::InsufficientData:
      return ErrorCategory::Solver;
    case ErrorKind::AliasingRejected:
    case ErrorKind::RbwTooFine:
    case ErrorKind::EmptyBand:
    case ErrorKind::WrongKind:
      return ErrorCategory::Dsp;
    case ErrorKind::IoError:
      return ErrorCategory::Io;
    case ErrorKind::NonpositiveInput:
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError:
      return ErrorCategory::Validation;
  }
  return ErrorCategory::Validation;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace rydsat
