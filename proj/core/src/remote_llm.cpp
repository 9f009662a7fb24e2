#include <cstdlib>

#include <nlohmann/json.hpp>

#include "http_util.hpp"
#include "legalrag/error.hpp"
#include "legalrag/llm_gateway.hpp"

namespace legalrag {

using nlohmann::json;

RemoteLlmOptions RemoteLlmOptions::FromEnvironment(std::string model) {
  RemoteLlmOptions o;
  const char* url = std::getenv("LLM_API_URL");
  if (url == nullptr || *url == '\0') throw Error(ErrorCode::kInvalidArgument, "LLM_API_URL is not set");
  o.url = url;
  if (const char* key = std::getenv("LLM_API_KEY")) o.api_key = key;
  o.model = std::move(model);
  return o;
}

RemoteLlmGateway::RemoteLlmGateway(RemoteLlmOptions options, size_t model_limit, const Tokenizer& tokenizer)
    : LlmGateway(model_limit, tokenizer), options_(std::move(options)), limiter_(options_.max_inflight) {
  detail::ParseEndpoint(options_.url);
}

std::string RemoteLlmGateway::RequestBody(const CompletionRequest& request) const {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", ToString(m.role)}, {"content", m.content}});
  }
  return json{{"model", options_.model},
              {"messages", std::move(messages)},
              {"max_tokens", request.max_answer_tokens},
              {"temperature", request.temperature}}
      .dump();
}

CompletionResponse RemoteLlmGateway::DoComplete(const CompletionRequest& request, size_t prompt_tokens) {
  const detail::Endpoint endpoint = detail::ParseEndpoint(options_.url);
  const std::string body = RequestBody(request);
  // Retries of one request run back to back on the caller's thread.
  const std::string reply = CallWithRetry(options_.retry, options_.sleeper, "LLM backend", [&] {
    InflightLimiter::Slot slot(limiter_);
    return detail::PostJson(endpoint, options_.api_key, body, options_.timeout);
  });

  const json j = json::parse(reply, nullptr, /*allow_exceptions=*/false);
  const auto malformed = [](const std::string& why) {
    return Error(ErrorCode::kMalformedProviderReply, "completion reply: " + why);
  };
  if (j.is_discarded() || !j.is_object()) throw malformed("not a JSON object");
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) throw malformed("no 'choices'");
  const auto& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object() ||
      !first["message"].contains("content") || !first["message"]["content"].is_string()) {
    throw malformed("choices[0].message.content missing");
  }
  CompletionResponse response;
  response.text = first["message"]["content"].get<std::string>();
  if (response.text.empty()) throw malformed("empty content");
  response.prompt_tokens = prompt_tokens;
  response.completion_tokens = tokenizer().CountTokens(response.text);
  if (auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
    if (usage->contains("prompt_tokens") && (*usage)["prompt_tokens"].is_number_unsigned()) {
      response.prompt_tokens = (*usage)["prompt_tokens"].get<size_t>();
    }
    if (usage->contains("completion_tokens") && (*usage)["completion_tokens"].is_number_unsigned()) {
      response.completion_tokens = (*usage)["completion_tokens"].get<size_t>();
    }
  }
  return response;
}

}  // namespace legalrag
