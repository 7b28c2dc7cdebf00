#pragma once

#include <stdexcept>
#include <string>

namespace hetreg {

enum class ErrorCode {
  InvalidArgument,
  InsufficientData,
  NeedTwoGroups,
  NonFiniteInput,
  SchemaError,
  ParseError,
  RankDeficient,
  DegenerateFit,
  NotSymmetric,
  NotPositiveDefinite,
  DimensionMismatch,
  NumericallySingular,
  InternalConsistency,
};

const char* to_string(ErrorCode code);

/// Library-wide failure type. code() separates problems with the input data
/// from numerical breakdowns; the CLI maps that to its exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  bool input_error() const noexcept {
    switch (code_) {
      case ErrorCode::InvalidArgument:
      case ErrorCode::InsufficientData:
      case ErrorCode::NeedTwoGroups:
      case ErrorCode::NonFiniteInput:
      case ErrorCode::SchemaError:
      case ErrorCode::ParseError:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hetreg
