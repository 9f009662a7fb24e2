#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace legalrag {

enum class ErrorCode {
  kInvalidArgument,
  kMissingFile,
  kSchemaViolation,
  kDuplicateId,
  kDegenerateConfig,
  kEmptyText,
  kDimensionMismatch,
  kProviderUnavailable,
  kDuplicateChunkId,
  kCorruptIndexFile,
  kVersionMismatch,
  kBudgetExceeded,
  kMalformedProviderReply,
  kParseFailure,
  kCountMismatch,
  kEmptyField,
  kEmptyQuestion,
  kEmptyJudgments,
  kSatisfactionOutOfBand,
  kBindFailure,
  kIndexLoadFailure,
  kIoError,
};

/// Stable snake_case name, used in logs and in the HTTP error envelope.
std::string_view ErrorCodeName(ErrorCode code);

/// The single exception type thrown by the library. Callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Remote transport failures are the only retryable class.
  bool retryable() const noexcept { return retryable_; }
  Error& set_retryable(bool v) noexcept {
    retryable_ = v;
    return *this;
  }

 private:
  ErrorCode code_;
  bool retryable_ = false;
};

}  // namespace legalrag
