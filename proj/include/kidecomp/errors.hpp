#pragma once

#include <stdexcept>
#include <string>

namespace kid {

enum class ErrorKind {
  InvalidInput,
  ShapeMismatch,
  NotHermitian,
  NotPSD,
  DomainError,
  ConvergenceFailure,
  AmbiguousRank,
  NonConvergence,
  RetriesExhausted,
  NotFaithful,
  NotInvariant,
  NonIntegralMultiplicity,
  NotClassical,
  MatchingFailed,
  VerificationFailed,
};

// Status codes shared by the C API and the CLI exit codes.
enum StatusCode : int {
  kOk = 0,
  kInputError = 1,
  kNumericalError = 2,
  kVerificationError = 3,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::AmbiguousRank: return "AmbiguousRank";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::RetriesExhausted: return "RetriesExhausted";
    case ErrorKind::NotFaithful: return "NotFaithful";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::NonIntegralMultiplicity: return "NonIntegralMultiplicity";
    case ErrorKind::NotClassical: return "NotClassical";
    case ErrorKind::MatchingFailed: return "MatchingFailed";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
  }
  return "Unknown";
}

inline int status_code_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::NotClassical:
      return kInputError;
    case ErrorKind::VerificationFailed:
    case ErrorKind::MatchingFailed:
      return kVerificationError;
    default:
      return kNumericalError;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int status_code() const noexcept { return status_code_of(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) fail(kind, msg);
}

}  // namespace kid
