#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "legalrag/error.hpp"
#include "legalrag/llm_gateway.hpp"

namespace legalrag {
namespace {

using nlohmann::json;

[[noreturn]] void BadFixture(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, path.string() + ": " + what);
}

Role ParseRole(const std::string& s, const std::filesystem::path& path) {
  if (s == "system") return Role::kSystem;
  if (s == "user") return Role::kUser;
  if (s == "assistant") return Role::kAssistant;
  BadFixture(path, "unknown role '" + s + "'");
}

}  // namespace

MockLlmGateway::MockLlmGateway(std::vector<MockRule> rules, std::optional<std::string> default_reply,
                               size_t model_limit, const Tokenizer& tokenizer)
    : LlmGateway(model_limit, tokenizer),
      rules_(std::move(rules)),
      default_reply_(std::move(default_reply)),
      limiter_(std::make_unique<InflightLimiter>(2)) {}

MockLlmGateway::MockLlmGateway(MockResponder responder, size_t model_limit, const Tokenizer& tokenizer)
    : LlmGateway(model_limit, tokenizer),
      responder_(std::move(responder)),
      limiter_(std::make_unique<InflightLimiter>(2)) {}

void MockLlmGateway::set_max_inflight(size_t n) { limiter_ = std::make_unique<InflightLimiter>(n); }

std::unique_ptr<MockLlmGateway> MockLlmGateway::FromFile(const std::filesystem::path& path,
                                                         size_t model_limit, const Tokenizer& tokenizer) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open mock fixture " + path.string());
  const json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) BadFixture(path, "not a JSON object");

  std::vector<MockRule> rules;
  if (auto it = j.find("rules"); it != j.end()) {
    if (!it->is_array()) BadFixture(path, "'rules' must be an array");
    for (const auto& r : *it) {
      if (!r.is_object() || !r.contains("contains") || !r["contains"].is_string()) {
        BadFixture(path, "every rule needs a string 'contains'");
      }
      MockRule rule;
      rule.contains = r["contains"].get<std::string>();
      if (r.contains("role")) rule.role = ParseRole(r["role"].get<std::string>(), path);
      if (r.contains("error")) {
        const auto err = r["error"].get<std::string>();
        if (err == "unavailable") {
          rule.action = MockAction::kUnavailable;
        } else if (err == "malformed") {
          rule.action = MockAction::kMalformed;
        } else {
          BadFixture(path, "unknown rule error '" + err + "'");
        }
      } else {
        if (!r.contains("reply") || !r["reply"].is_string()) BadFixture(path, "rule lacks a string 'reply'");
        rule.reply = r["reply"].get<std::string>();
      }
      rules.push_back(std::move(rule));
    }
  }
  std::optional<std::string> fallback;
  if (auto it = j.find("default_reply"); it != j.end() && it->is_string()) fallback = it->get<std::string>();

  auto gateway = std::make_unique<MockLlmGateway>(std::move(rules), std::move(fallback), model_limit, tokenizer);
  if (auto it = j.find("latency_ms"); it != j.end() && it->is_number_unsigned()) {
    gateway->set_latency(std::chrono::milliseconds(it->get<long long>()));
  }
  return gateway;
}

std::string MockLlmGateway::Respond(const CompletionRequest& request) const {
  if (responder_) return responder_(request);
  for (const auto& rule : rules_) {
    bool hit = false;
    for (const auto& m : request.messages) {
      if (rule.role && m.role != *rule.role) continue;
      if (m.content.find(rule.contains) != std::string::npos) {
        hit = true;
        break;
      }
    }
    if (!hit) continue;
    switch (rule.action) {
      case MockAction::kReply: return rule.reply;
      case MockAction::kUnavailable:
        throw Error(ErrorCode::kProviderUnavailable, "mock backend scripted as unavailable");
      case MockAction::kMalformed:
        throw Error(ErrorCode::kMalformedProviderReply, "mock backend scripted as malformed");
    }
  }
  if (default_reply_) return *default_reply_;
  throw Error(ErrorCode::kMalformedProviderReply, "no mock rule matched the request");
}

CompletionResponse MockLlmGateway::DoComplete(const CompletionRequest& request, size_t prompt_tokens) {
  InflightLimiter::Slot slot(*limiter_);
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);

  std::string reply = Respond(request);
  const auto spans = tokenizer().Tokenize(reply);
  if (spans.size() > request.max_answer_tokens) {
    reply.resize(spans[request.max_answer_tokens - 1].end);
  }
  CompletionResponse response;
  response.completion_tokens = std::min(spans.size(), request.max_answer_tokens);
  response.prompt_tokens = prompt_tokens;
  response.text = std::move(reply);
  return response;
}

}  // namespace legalrag
