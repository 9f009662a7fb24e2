#include "legalrag/qa_synthesis.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "legalrag/error.hpp"
#include "legalrag/text.hpp"

namespace legalrag {
namespace {

using nlohmann::json;

std::string ReplaceAll(std::string s, std::string_view from, std::string_view to) {
  for (size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

// End (exclusive) of the bracketed structure opening at `open`, or nullopt if
// the brackets do not balance. String literals are skipped.
std::optional<size_t> MatchBrackets(std::string_view s, size_t open) {
  std::string stack;
  bool in_string = false;
  for (size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"': in_string = true; break;
      case '[': stack.push_back(']'); break;
      case '{': stack.push_back('}'); break;
      case ']':
      case '}':
        if (stack.empty() || stack.back() != c) return std::nullopt;
        stack.pop_back();
        if (stack.empty()) return i + 1;
        break;
      default: break;
    }
  }
  return std::nullopt;
}

std::optional<json> FirstArrayOfObjects(std::string_view reply) {
  for (size_t open = reply.find('['); open != std::string_view::npos; open = reply.find('[', open + 1)) {
    const auto end = MatchBrackets(reply, open);
    if (!end) continue;
    json candidate = json::parse(reply.substr(open, *end - open), nullptr, /*allow_exceptions=*/false);
    if (candidate.is_discarded() || !candidate.is_array()) continue;
    bool all_objects = true;
    for (const auto& item : candidate) all_objects = all_objects && item.is_object();
    if (all_objects) return candidate;
  }
  return std::nullopt;
}

bool IsRetryableParseError(ErrorCode code) {
  return code == ErrorCode::kParseFailure || code == ErrorCode::kCountMismatch || code == ErrorCode::kEmptyField;
}

struct ArticleJob {
  const Document* doc;
  const Article* article;
};

struct ArticleResult {
  std::vector<QAPair> pairs;
  std::optional<SynthesisFailure> failure;
  size_t style_warnings = 0;
};

ArticleResult SynthesizeArticle(const ArticleJob& job, const SynthesisConfig& config, LlmGateway& gateway) {
  const Article& article = *job.article;
  CompletionRequest request;
  request.messages = BuildSynthesisPrompt(article, config);
  request.max_answer_tokens = config.max_answer_tokens;
  request.temperature = config.temperature;

  ArticleResult result;
  std::string last_error;
  for (size_t attempt = 0; attempt <= config.max_parse_retries; ++attempt) {
    try {
      const CompletionResponse response = gateway.Complete(request);
      const auto parsed = ParseSynthesisReply(response.text, config.questions_per_article);
      for (size_t j = 0; j < parsed.size(); ++j) {
        QAPair pair;
        pair.qa_id = job.doc->doc_id + "/gen-a" + std::to_string(article.article_number) + "-" +
                     std::to_string(j + 1);
        pair.question = parsed[j].question;
        pair.answer = parsed[j].answer;
        pair.article_number = article.article_number;
        pair.source = QaSource::kGenerated;
        if (!CitesArticle(pair.answer, article.article_number)) {
          ++result.style_warnings;
          spdlog::warn("generated answer for {} article {} does not cite the article number", job.doc->doc_id,
                       article.article_number);
        }
        result.pairs.push_back(std::move(pair));
      }
      return result;
    } catch (const Error& e) {
      last_error = std::string(ErrorCodeName(e.code())) + ": " + e.what();
      if (!IsRetryableParseError(e.code())) break;
      spdlog::debug("article {} attempt {} failed: {}", article.article_number, attempt + 1, last_error);
    }
  }
  result.failure = SynthesisFailure{job.doc->doc_id, article.article_number, last_error};
  spdlog::warn("synthesis failed for {} article {}: {}", job.doc->doc_id, article.article_number, last_error);
  return result;
}

}  // namespace

void SynthesisConfig::Validate() const {
  if (questions_per_article == 0) {
    throw Error(ErrorCode::kInvalidArgument, "questions_per_article must be >= 1");
  }
  if (max_answer_tokens == 0) throw Error(ErrorCode::kInvalidArgument, "max_answer_tokens must be >= 1");
}

std::vector<ChatMessage> BuildSynthesisPrompt(const Article& article, const SynthesisConfig& config) {
  const size_t n = config.questions_per_article;
  const std::string number = std::to_string(article.article_number);
  const bool one = n == 1;

  std::string request = "Generate " + std::to_string(n) + (one ? " question" : " questions") +
                        " and " + (one ? "its corresponding answer" : "their corresponding answers") +
                        " about the following article of the law.";

  std::string body = "Article " + number + ":\n";
  if (article.heading) body += *article.heading + "\n";
  body += article.text;

  std::string format = "Return only a JSON array of exactly " + std::to_string(n) +
                       (one ? " object" : " objects") +
                       ". Each object is a dictionary with exactly two keys: \"question\" and \"answer\". " +
                       ReplaceAll(config.answer_style_rule, "{article_number}", number);

  return {ChatMessage{Role::kUser, std::move(request)}, ChatMessage{Role::kUser, std::move(body)},
          ChatMessage{Role::kUser, std::move(format)}};
}

std::vector<QuestionAnswer> ParseSynthesisReply(std::string_view reply, size_t expected) {
  const auto array = FirstArrayOfObjects(reply);
  if (!array) throw Error(ErrorCode::kParseFailure, "no JSON array of objects found in reply");

  std::vector<QuestionAnswer> out;
  out.reserve(array->size());
  for (const auto& item : *array) {
    if (item.size() != 2 || !item.contains("question") || !item.contains("answer")) {
      throw Error(ErrorCode::kParseFailure, "each object needs exactly the keys \"question\" and \"answer\"");
    }
    if (!item["question"].is_string() || !item["answer"].is_string()) {
      throw Error(ErrorCode::kParseFailure, "\"question\" and \"answer\" must be strings");
    }
    QuestionAnswer qa{item["question"].get<std::string>(), item["answer"].get<std::string>()};
    if (text::IsBlank(qa.question) || text::IsBlank(qa.answer)) {
      throw Error(ErrorCode::kEmptyField, "empty question or answer in reply");
    }
    out.push_back(std::move(qa));
  }
  if (out.size() != expected) {
    throw Error(ErrorCode::kCountMismatch,
                "expected " + std::to_string(expected) + " pairs, got " + std::to_string(out.size()));
  }
  return out;
}

bool CitesArticle(std::string_view answer, int article_number) {
  const std::string needle = std::to_string(article_number);
  const auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  for (size_t pos = answer.find(needle); pos != std::string_view::npos; pos = answer.find(needle, pos + 1)) {
    const bool left_ok = pos == 0 || !is_digit(answer[pos - 1]);
    const size_t end = pos + needle.size();
    const bool right_ok = end == answer.size() || !is_digit(answer[end]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

SynthesisReport SynthesizeDataset(const Corpus& corpus, const SynthesisConfig& config, LlmGateway& gateway,
                                  const SynthesisSink& sink) {
  config.Validate();
  std::vector<ArticleJob> jobs;
  for (const auto& doc : corpus.documents) {
    if (doc.kind != DocumentKind::kLaw) continue;
    for (const auto& a : doc.articles) jobs.push_back({&doc, &a});
  }
  if (jobs.empty()) throw Error(ErrorCode::kInvalidArgument, "corpus contains no law articles to synthesize from");

  std::vector<ArticleResult> results(jobs.size());
  std::vector<bool> done(jobs.size(), false);
  size_t next_to_emit = 0;
  std::mutex mu;
  std::atomic<size_t> next_job{0};

  const auto worker = [&] {
    for (size_t i = next_job++; i < jobs.size(); i = next_job++) {
      ArticleResult r = SynthesizeArticle(jobs[i], config, gateway);
      std::lock_guard lock(mu);
      results[i] = std::move(r);
      done[i] = true;
      while (next_to_emit < jobs.size() && done[next_to_emit]) {
        if (sink && !results[next_to_emit].pairs.empty()) sink(results[next_to_emit].pairs);
        ++next_to_emit;
      }
    }
  };

  const size_t threads = std::clamp<size_t>(config.parallelism, 1, jobs.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  // Jobs are already in (doc_id, article_number) order.
  SynthesisReport report;
  report.articles_processed = jobs.size();
  for (auto& r : results) {
    report.style_warnings += r.style_warnings;
    report.pairs.insert(report.pairs.end(), std::make_move_iterator(r.pairs.begin()),
                        std::make_move_iterator(r.pairs.end()));
    if (r.failure) report.failures.push_back(std::move(*r.failure));
  }
  return report;
}

}  // namespace legalrag
