#include "hetreg/error.hpp"

namespace hetreg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return "InvalidArgument";
    case ErrorCode::InsufficientData:
      return "InsufficientData";
    case ErrorCode::NeedTwoGroups:
      return "NeedTwoGroups";
    case ErrorCode::NonFiniteInput:
      return "NonFiniteInput";
    case ErrorCode::SchemaError:
      return "SchemaError";
    case ErrorCode::ParseError:
      return "ParseError";
    case ErrorCode::RankDeficient:
      return "RankDeficient";
    case ErrorCode::DegenerateFit:
      return "DegenerateFit";
    case ErrorCode::NotSymmetric:
      return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite:
      return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::NumericallySingular:
      return "NumericallySingular";
    case ErrorCode::InternalConsistency:
      return "InternalConsistency";
  }
  return "Unknown";
}

}  // namespace hetreg
