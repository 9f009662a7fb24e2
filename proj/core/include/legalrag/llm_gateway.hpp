#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "legalrag/retry.hpp"
#include "legalrag/tokenizer.hpp"

namespace legalrag {

enum class Role { kSystem, kUser, kAssistant };
std::string_view ToString(Role role);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

inline constexpr size_t kDefaultModelLimit = 8192;
inline constexpr size_t kDefaultMaxAnswerTokens = 512;
inline constexpr double kAnswerTemperature = 0.0;
inline constexpr double kSynthesisTemperature = 0.7;

struct CompletionRequest {
  std::vector<ChatMessage> messages;
  size_t max_answer_tokens = kDefaultMaxAnswerTokens;
  double temperature = kAnswerTemperature;
};

struct CompletionResponse {
  std::string text;
  size_t prompt_tokens = 0;
  size_t completion_tokens = 0;
};

/// Sum of message content tokens; the unit every budget check uses.
size_t CountPromptTokens(const std::vector<ChatMessage>& messages, const Tokenizer& tokenizer);

/// Chat-completion backend. Complete() enforces the request invariants and the
/// token budget before any backend sees the request, so no implementation can
/// send an over-budget prompt.
class LlmGateway {
 public:
  LlmGateway(size_t model_limit, const Tokenizer& tokenizer);
  virtual ~LlmGateway() = default;

  /// Throws Error{kInvalidArgument} for an empty/blank message list,
  /// Error{kBudgetExceeded} when prompt + max_answer_tokens > model_limit, and
  /// whatever the backend throws (kProviderUnavailable, kMalformedProviderReply).
  CompletionResponse Complete(const CompletionRequest& request);

  size_t model_limit() const { return model_limit_; }
  const Tokenizer& tokenizer() const { return tokenizer_; }
  size_t calls() const { return calls_.load(); }

 protected:
  virtual CompletionResponse DoComplete(const CompletionRequest& request, size_t prompt_tokens) = 0;

 private:
  size_t model_limit_;
  const Tokenizer& tokenizer_;
  std::atomic<size_t> calls_{0};
};

enum class MockAction { kReply, kUnavailable, kMalformed };

struct MockRule {
  /// Substring that must occur in some message's content.
  std::string contains;
  std::optional<Role> role;
  MockAction action = MockAction::kReply;
  std::string reply;
};

using MockResponder = std::function<std::string(const CompletionRequest&)>;

// Scripted deterministic backend. Rules are tried in order; the first match
// wins. Replies longer than max_answer_tokens are cut at a token boundary.
//
// Fixture file (mock_llm.json):
//   {"rules": [{"contains": "...", "role": "user"?, "reply": "..."} |
//              {"contains": "...", "error": "unavailable"|"malformed"}],
//    "default_reply": "..."?, "latency_ms": 0?}
class MockLlmGateway final : public LlmGateway {
 public:
  MockLlmGateway(std::vector<MockRule> rules, std::optional<std::string> default_reply,
                 size_t model_limit = kDefaultModelLimit, const Tokenizer& tokenizer = DefaultTokenizer());
  explicit MockLlmGateway(MockResponder responder, size_t model_limit = kDefaultModelLimit,
                          const Tokenizer& tokenizer = DefaultTokenizer());

  static std::unique_ptr<MockLlmGateway> FromFile(const std::filesystem::path& path, size_t model_limit = kDefaultModelLimit,
                                 const Tokenizer& tokenizer = DefaultTokenizer());

  void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }
  void set_max_inflight(size_t n);
  const InflightLimiter& limiter() const { return *limiter_; }

 protected:
  CompletionResponse DoComplete(const CompletionRequest& request, size_t prompt_tokens) override;

 private:
  std::string Respond(const CompletionRequest& request) const;

  std::vector<MockRule> rules_;
  std::optional<std::string> default_reply_;
  MockResponder responder_;
  std::chrono::milliseconds latency_{0};
  std::unique_ptr<InflightLimiter> limiter_;
};

struct RemoteLlmOptions {
  std::string url;      // LLM_API_URL
  std::string api_key;  // LLM_API_KEY
  std::string model = "gpt-4";
  size_t max_inflight = 2;
  RetryPolicy retry;
  std::chrono::milliseconds timeout{120000};
  Sleeper sleeper = ThreadSleeper();

  /// Throws Error{kInvalidArgument} when LLM_API_URL is unset.
  static RemoteLlmOptions FromEnvironment(std::string model);
};

// POST {"model", "messages": [{"role", "content"}], "max_tokens", "temperature"}
// and read choices[0].message.content plus usage.{prompt,completion}_tokens.
class RemoteLlmGateway final : public LlmGateway {
 public:
  RemoteLlmGateway(RemoteLlmOptions options, size_t model_limit = kDefaultModelLimit,
                   const Tokenizer& tokenizer = DefaultTokenizer());

  const InflightLimiter& limiter() const { return limiter_; }

  /// The exact JSON body sent for `request`.
  std::string RequestBody(const CompletionRequest& request) const;

 protected:
  CompletionResponse DoComplete(const CompletionRequest& request, size_t prompt_tokens) override;

 private:
  RemoteLlmOptions options_;
  InflightLimiter limiter_;
};

}  // namespace legalrag
