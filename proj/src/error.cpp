#include "contrastshap/error.hpp"

namespace contrastshap {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingCoalition: return "MissingCoalition";
    case ErrorCode::kDuplicateCell: return "DuplicateCell";
    case ErrorCode::kMetricOutOfRange: return "MetricOutOfRange";
    case ErrorCode::kUnknownContrast: return "UnknownContrast";
    case ErrorCode::kInvalidContrastSet: return "InvalidContrastSet";
    case ErrorCode::kInvalidRankVector: return "InvalidRankVector";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kIncompleteCell: return "IncompleteCell";
    case ErrorCode::kNTooLargeForOracle: return "NTooLargeForOracle";
    case ErrorCode::kNTooSmall: return "NTooSmall";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMismatchedContrasts: return "MismatchedContrasts";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kTooFewFolds: return "TooFewFolds";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kEmptyGroup: return "EmptyGroup";
    case ErrorCode::kEmptyBaseline: return "EmptyBaseline";
    case ErrorCode::kSubjectMissingFolds: return "SubjectMissingFolds";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

ErrorClass error_class(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingCoalition:
    case ErrorCode::kDuplicateCell:
    case ErrorCode::kMetricOutOfRange:
    case ErrorCode::kUnknownContrast:
    case ErrorCode::kInvalidContrastSet:
    case ErrorCode::kInvalidRankVector:
    case ErrorCode::kLengthMismatch:
    case ErrorCode::kConfigInvalid:
    case ErrorCode::kParseError:
    case ErrorCode::kSchemaViolation:
      return ErrorClass::kValidation;
    case ErrorCode::kIo:
      return ErrorClass::kIo;
    default:
      return ErrorClass::kComputation;
  }
}

}  // namespace contrastshap
