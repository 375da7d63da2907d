#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace contrastshap {

// Failure classes map onto distinct CLI exit codes.
enum class ErrorClass { kValidation, kComputation, kIo };

enum class ErrorCode {
  // validation
  kMissingCoalition,
  kDuplicateCell,
  kMetricOutOfRange,
  kUnknownContrast,
  kInvalidContrastSet,
  kInvalidRankVector,
  kLengthMismatch,
  kConfigInvalid,
  kParseError,
  kSchemaViolation,
  // computation
  kIncompleteCell,
  kNTooLargeForOracle,
  kNTooSmall,
  kEmptyInput,
  kMismatchedContrasts,
  kNonFiniteInput,
  kTooFewFolds,
  kTooFewSamples,
  kZeroVariance,
  kEmptyGroup,
  kEmptyBaseline,
  kSubjectMissingFolds,
  // io
  kIo,
};

std::string_view error_code_name(ErrorCode code);
ErrorClass error_class(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorClass error_class() const noexcept { return contrastshap::error_class(code_); }

 private:
  ErrorCode code_;
};

}  // namespace contrastshap
