#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "legalrag/embedding.hpp"
#include "legalrag/llm_gateway.hpp"
#include "legalrag/tokenizer.hpp"
#include "legalrag/vector_index.hpp"

namespace legalrag {

std::string DefaultSystemInstruction();

struct EngineConfig {
  size_t k = 3;
  size_t model_limit = kDefaultModelLimit;
  size_t max_answer_tokens = kDefaultMaxAnswerTokens;
  double temperature = kAnswerTemperature;
  std::string system_instruction = DefaultSystemInstruction();

  /// Throws Error{kDegenerateConfig} when no prompt could ever fit (k == 0, or
  /// the instruction plus the answer allowance already fills the window).
  /// Returns a warning when k worst-case chunks of `chunk_size` tokens do not
  /// fit, meaning answers will be trimmed to fewer sources.
  std::optional<std::string> CheckBudget(size_t chunk_size, const Tokenizer& tokenizer) const;
};

inline constexpr std::string_view kNoCorpusMessage =
    "No corpus is loaded, so there is nothing to answer from. Build an index first.";

struct Answer {
  std::string text;
  /// Exactly the hits that were placed in the prompt, best first.
  std::vector<SearchHit> sources;
  size_t prompt_tokens = 0;
  int64_t timing_ms = 0;
  /// Set when the index was empty and no model call was made.
  bool no_index = false;
};

/// One system message with the instruction, one user message with a
/// "Context:" block (each chunk under its source label) and the question.
/// `language_hint` ("ar"/"en") adds an explicit answer-language line.
std::vector<ChatMessage> RenderPrompt(std::string_view question, std::span<const SearchHit> hits,
                                      const EngineConfig& config, std::string_view language_hint = {});

/// Embed, retrieve k, drop lowest-scoring chunks until the prompt plus the
/// answer allowance fits model_limit, then call the gateway once.
/// Throws Error{kEmptyQuestion}, Error{kBudgetExceeded} if the question alone
/// does not fit, and propagates provider errors.
Answer AnswerQuestion(std::string_view question, const VectorIndex& index, const EngineConfig& config,
                      LlmGateway& gateway, EmbeddingProvider& embedder,
                      const Tokenizer& tokenizer = DefaultTokenizer(), std::string_view language_hint = {});

}  // namespace legalrag
