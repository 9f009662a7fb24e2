#include "legalrag/error.hpp"

namespace legalrag {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kMissingFile: return "missing_file";
    case ErrorCode::kSchemaViolation: return "schema_violation";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kDegenerateConfig: return "degenerate_config";
    case ErrorCode::kEmptyText: return "empty_text";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kProviderUnavailable: return "provider_unavailable";
    case ErrorCode::kDuplicateChunkId: return "duplicate_chunk_id";
    case ErrorCode::kCorruptIndexFile: return "corrupt_index_file";
    case ErrorCode::kVersionMismatch: return "version_mismatch";
    case ErrorCode::kBudgetExceeded: return "budget_exceeded";
    case ErrorCode::kMalformedProviderReply: return "malformed_provider_reply";
    case ErrorCode::kParseFailure: return "parse_failure";
    case ErrorCode::kCountMismatch: return "count_mismatch";
    case ErrorCode::kEmptyField: return "empty_field";
    case ErrorCode::kEmptyQuestion: return "empty_question";
    case ErrorCode::kEmptyJudgments: return "empty_judgments";
    case ErrorCode::kSatisfactionOutOfBand: return "satisfaction_out_of_band";
    case ErrorCode::kBindFailure: return "bind_failure";
    case ErrorCode::kIndexLoadFailure: return "index_load_failure";
    case ErrorCode::kIoError: return "io_error";
  }
  return "unknown";
}

}  // namespace legalrag
