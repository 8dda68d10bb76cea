#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace bos {

enum class ErrorCode {
  kMissingColumn,
  kNonMonotonicFrameIndex,
  kValueOutOfRange,
  kMalformedInput,
  kTooManyInvalid,
  kTrackTooShort,
  kSeriesTooShort,
  kSegmentTooShort,
  kNotEnoughData,
  kTooFewPoints,
  kEmptySegmentList,
  kIndexOutOfRange,
  kSingleClassTraining,
  kInvalidProbability,
  kDimensionMismatch,
  kLengthMismatch,
  kLabelOutOfRange,
  kInfeasibleRecipe,
  kConfigMismatch,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (and the CLI
// exit-status mapping) can branch without parsing messages.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  /// For errors tied to a location in an input table.
  Error(ErrorCode code, std::string subject, long row, const std::string &what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code),
        subject_(std::move(subject)), row_(row) {}

  ErrorCode code() const noexcept { return code_; }
  /// Column or field name, when the error names one.
  const std::string &subject() const noexcept { return subject_; }
  /// 1-based data row (header excluded), or -1.
  long row() const noexcept { return row_; }

private:
  ErrorCode code_;
  std::string subject_;
  long row_ = -1;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::kMissingColumn: return "MissingColumn";
  case ErrorCode::kNonMonotonicFrameIndex: return "NonMonotonicFrameIndex";
  case ErrorCode::kValueOutOfRange: return "ValueOutOfRange";
  case ErrorCode::kMalformedInput: return "MalformedInput";
  case ErrorCode::kTooManyInvalid: return "TooManyInvalid";
  case ErrorCode::kTrackTooShort: return "TrackTooShort";
  case ErrorCode::kSeriesTooShort: return "SeriesTooShort";
  case ErrorCode::kSegmentTooShort: return "SegmentTooShort";
  case ErrorCode::kNotEnoughData: return "NotEnoughData";
  case ErrorCode::kTooFewPoints: return "TooFewPoints";
  case ErrorCode::kEmptySegmentList: return "EmptySegmentList";
  case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
  case ErrorCode::kSingleClassTraining: return "SingleClassTraining";
  case ErrorCode::kInvalidProbability: return "InvalidProbability";
  case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
  case ErrorCode::kLengthMismatch: return "LengthMismatch";
  case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
  case ErrorCode::kInfeasibleRecipe: return "InfeasibleRecipe";
  case ErrorCode::kConfigMismatch: return "ConfigMismatch";
  case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

} // namespace bos
