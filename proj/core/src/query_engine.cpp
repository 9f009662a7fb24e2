#include "legalrag/query_engine.hpp"

#include <chrono>

#include "legalrag/error.hpp"
#include "legalrag/text.hpp"

namespace legalrag {

std::string DefaultSystemInstruction() {
  return "You are a legal advisor for cooperatives. Answer the question using the provided context "
         "from the cooperative law, its bylaws and the prepared question-answer records. When the context "
         "supports it, cite the law and the article number. Answer in the language of the question.";
}

std::optional<std::string> EngineConfig::CheckBudget(size_t chunk_size, const Tokenizer& tokenizer) const {
  if (k == 0) throw Error(ErrorCode::kDegenerateConfig, "k must be >= 1");
  if (max_answer_tokens == 0) throw Error(ErrorCode::kDegenerateConfig, "max_answer_tokens must be >= 1");
  const size_t fixed = tokenizer.CountTokens(system_instruction) + max_answer_tokens;
  if (fixed >= model_limit) {
    throw Error(ErrorCode::kDegenerateConfig,
                "instruction plus answer allowance (" + std::to_string(fixed) + " tokens) leaves no room in a " +
                    std::to_string(model_limit) + "-token window");
  }
  const size_t worst = fixed + k * chunk_size;
  if (worst >= model_limit) {
    return "k=" + std::to_string(k) + " chunks of " + std::to_string(chunk_size) + " tokens need " +
           std::to_string(worst) + " of " + std::to_string(model_limit) +
           " tokens before the question; low-scoring chunks will be dropped";
  }
  return std::nullopt;
}

std::vector<ChatMessage> RenderPrompt(std::string_view question, std::span<const SearchHit> hits,
                                      const EngineConfig& config, std::string_view language_hint) {
  std::string system = config.system_instruction;
  if (language_hint == "ar") {
    system += "\nAnswer in Arabic.";
  } else if (language_hint == "en") {
    system += "\nAnswer in English.";
  }

  std::string user;
  if (!hits.empty()) {
    user += "Context:\n";
    for (const auto& h : hits) {
      user += "[" + h.source.Label() + "]\n";
      user += h.text;
      user += "\n\n";
    }
  }
  user += "Question: ";
  user += question;
  return {ChatMessage{Role::kSystem, std::move(system)}, ChatMessage{Role::kUser, std::move(user)}};
}

Answer AnswerQuestion(std::string_view question, const VectorIndex& index, const EngineConfig& config,
                      LlmGateway& gateway, EmbeddingProvider& embedder, const Tokenizer& tokenizer,
                      std::string_view language_hint) {
  const auto started = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started)
        .count();
  };
  if (text::IsBlank(question)) throw Error(ErrorCode::kEmptyQuestion, "question is empty");

  Answer answer;
  if (index.empty()) {
    answer.text = std::string(kNoCorpusMessage);
    answer.no_index = true;
    answer.timing_ms = elapsed_ms();
    return answer;
  }

  const EmbeddingVector query = embedder.Embed(std::string(question));
  std::vector<SearchHit> hits = index.Search(query, config.k);

  std::vector<ChatMessage> messages = RenderPrompt(question, hits, config, language_hint);
  size_t prompt_tokens = CountPromptTokens(messages, tokenizer);
  while (prompt_tokens + config.max_answer_tokens > config.model_limit && !hits.empty()) {
    hits.pop_back();
    messages = RenderPrompt(question, hits, config, language_hint);
    prompt_tokens = CountPromptTokens(messages, tokenizer);
  }
  if (prompt_tokens + config.max_answer_tokens > config.model_limit) {
    throw Error(ErrorCode::kBudgetExceeded, "question of " + std::to_string(tokenizer.CountTokens(question)) +
                                                " tokens does not fit the model window");
  }

  CompletionRequest request;
  request.messages = std::move(messages);
  request.max_answer_tokens = config.max_answer_tokens;
  request.temperature = config.temperature;
  CompletionResponse response = gateway.Complete(request);

  answer.text = std::move(response.text);
  answer.sources = std::move(hits);
  answer.prompt_tokens = prompt_tokens;
  answer.timing_ms = elapsed_ms();
  return answer;
}

}  // namespace legalrag
