#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vforge {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kLengthMismatch,
  kResolutionMismatch,
  kShapeMismatch,
  kEmptyMask,
  kSchemaViolation,
  kDuplicateId,
  kNoFeasiblePlacement,
  kDonorTooShort,
  kEmptyDonorPool,
  kBackendTimeout,
  kBackendError,
  kProtocolError,
  kValidationFailure,
  kEmptyTag,
  kWrongAnswerCount,
  kMissingPrefix,
  kMissingTag,
  kNonPositiveAttempts,
  kEmptyPool,
  kNoBackgroundPixels,
  kTooFewFrames,
  kUnknownSample,
  kConflict,
  kMpPresenceViolation,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Caption parsing failures name the 1-based answer they refer to (0 when the
// failure concerns the answer count).
class CaptionError : public Error {
 public:
  CaptionError(ErrorCode code, int answer_index, const std::string& message);

  int answer_index() const noexcept { return answer_index_; }

 private:
  int answer_index_;
};

}  // namespace vforge
