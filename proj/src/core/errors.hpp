#pragma once

#include <stdexcept>
#include <string>

namespace lvq {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  SingularBasis,
  NonFinite,
  SearchTooLarge,
  AlphabetOverflow,
  CorruptStream,
  EmptyInput,
  BadSourceSpec,
  IndexOutOfRange,
  TooFewPoints,
  InsufficientOverlap,
  RoundTripMismatch,
  Io,
  Format,
};

// Single exception type carrying a stable code so the C API can map
// failures to numeric statuses without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularBasis: return "SingularBasis";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::SearchTooLarge: return "SearchTooLarge";
    case ErrorCode::AlphabetOverflow: return "AlphabetOverflow";
    case ErrorCode::CorruptStream: return "CorruptStream";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::BadSourceSpec: return "BadSourceSpec";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::RoundTripMismatch: return "RoundTripMismatch";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Format: return "Format";
  }
  return "Unknown";
}

}  // namespace lvq
