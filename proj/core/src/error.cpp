#include "vforge/error.hpp"

namespace vforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kResolutionMismatch: return "ResolutionMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kNoFeasiblePlacement: return "NoFeasiblePlacement";
    case ErrorCode::kDonorTooShort: return "DonorTooShort";
    case ErrorCode::kEmptyDonorPool: return "EmptyDonorPool";
    case ErrorCode::kBackendTimeout: return "BackendTimeout";
    case ErrorCode::kBackendError: return "BackendError";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kValidationFailure: return "ValidationFailure";
    case ErrorCode::kEmptyTag: return "EmptyTag";
    case ErrorCode::kWrongAnswerCount: return "WrongAnswerCount";
    case ErrorCode::kMissingPrefix: return "MissingPrefix";
    case ErrorCode::kMissingTag: return "MissingTag";
    case ErrorCode::kNonPositiveAttempts: return "NonPositiveAttempts";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kNoBackgroundPixels: return "NoBackgroundPixels";
    case ErrorCode::kTooFewFrames: return "TooFewFrames";
    case ErrorCode::kUnknownSample: return "UnknownSample";
    case ErrorCode::kConflict: return "Conflict";
    case ErrorCode::kMpPresenceViolation: return "MpPresenceViolation";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

CaptionError::CaptionError(ErrorCode code, int answer_index, const std::string& message)
    : Error(code, message), answer_index_(answer_index) {}

}  // namespace vforge
