#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "legalrag/corpus.hpp"
#include "legalrag/llm_gateway.hpp"

namespace legalrag {

struct SynthesisConfig {
  size_t questions_per_article = 5;
  size_t max_parse_retries = 3;
  /// "{article_number}" is replaced with the article's number.
  std::string answer_style_rule =
      "Write each answer the way a legal advisor would, and begin it by citing the article, "
      "for example \"According to Article {article_number}, ...\".";
  size_t max_answer_tokens = 2048;
  double temperature = kSynthesisTemperature;
  /// Articles processed concurrently; the gateway's own cap still applies.
  size_t parallelism = 1;

  void Validate() const;
};

struct QuestionAnswer {
  std::string question;
  std::string answer;
};

struct SynthesisFailure {
  std::string doc_id;
  int article_number = 0;
  std::string reason;
};

struct SynthesisReport {
  std::vector<QAPair> pairs;
  std::vector<SynthesisFailure> failures;
  size_t articles_processed = 0;
  /// Answers kept even though they do not cite their article number.
  size_t style_warnings = 0;
};

/// Three messages, in order: the generation request, the labelled article,
/// and the output-format instruction with the answer style rule.
std::vector<ChatMessage> BuildSynthesisPrompt(const Article& article, const SynthesisConfig& config);

/// Extracts the first JSON array of objects from `reply` (surrounding prose is
/// ignored). Throws Error{kParseFailure} when there is none or an object does
/// not have exactly the keys "question" and "answer" with string values,
/// Error{kEmptyField} for a blank value, Error{kCountMismatch} when the array
/// does not hold exactly `expected` pairs.
std::vector<QuestionAnswer> ParseSynthesisReply(std::string_view reply, size_t expected);

/// True when `answer` mentions `article_number` as a standalone number.
bool CitesArticle(std::string_view answer, int article_number);

/// Receives each article's pairs, in article order, as soon as they and all
/// earlier articles are done. Used for incremental output.
using SynthesisSink = std::function<void(const std::vector<QAPair>&)>;

/// Runs synthesis over every article of every law document. Per-article
/// failures are recorded in the report and never abort the run. Throws
/// Error{kInvalidArgument} when the corpus has no law articles.
SynthesisReport SynthesizeDataset(const Corpus& corpus, const SynthesisConfig& config, LlmGateway& gateway,
                                  const SynthesisSink& sink = {});

}  // namespace legalrag
