#include "legalrag/llm_gateway.hpp"

#include "legalrag/error.hpp"
#include "legalrag/text.hpp"

namespace legalrag {

std::string_view ToString(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

size_t CountPromptTokens(const std::vector<ChatMessage>& messages, const Tokenizer& tokenizer) {
  size_t n = 0;
  for (const auto& m : messages) n += tokenizer.CountTokens(m.content);
  return n;
}

LlmGateway::LlmGateway(size_t model_limit, const Tokenizer& tokenizer)
    : model_limit_(model_limit), tokenizer_(tokenizer) {
  if (model_limit_ == 0) throw Error(ErrorCode::kInvalidArgument, "model_limit must be positive");
}

CompletionResponse LlmGateway::Complete(const CompletionRequest& request) {
  if (request.messages.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "completion request has no messages");
  }
  for (const auto& m : request.messages) {
    if (text::IsBlank(m.content)) {
      throw Error(ErrorCode::kInvalidArgument, "completion request contains an empty message");
    }
  }
  if (request.max_answer_tokens == 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_answer_tokens must be positive");
  }
  if (request.temperature < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  }
  const size_t prompt_tokens = CountPromptTokens(request.messages, tokenizer_);
  if (prompt_tokens + request.max_answer_tokens > model_limit_) {
    throw Error(ErrorCode::kBudgetExceeded,
                "prompt of " + std::to_string(prompt_tokens) + " tokens plus " +
                    std::to_string(request.max_answer_tokens) + " answer tokens exceeds the model limit of " +
                    std::to_string(model_limit_));
  }
  ++calls_;
  return DoComplete(request, prompt_tokens);
}

}  // namespace legalrag
