#include <cstdlib>

#include <nlohmann/json.hpp>

#include "http_util.hpp"
#include "legalrag/embedding.hpp"
#include "legalrag/error.hpp"
#include "legalrag/text.hpp"

namespace legalrag {

using nlohmann::json;

RemoteEmbeddingOptions RemoteEmbeddingOptions::FromEnvironment(std::string model, size_t dimension) {
  RemoteEmbeddingOptions o;
  const char* url = std::getenv("EMBED_API_URL");
  if (url == nullptr || *url == '\0') {
    throw Error(ErrorCode::kInvalidArgument, "EMBED_API_URL is not set");
  }
  o.url = url;
  if (const char* key = std::getenv("EMBED_API_KEY")) o.api_key = key;
  o.model = std::move(model);
  o.dimension = dimension;
  return o;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(RemoteEmbeddingOptions options)
    : options_(std::move(options)),
      spec_{"remote:" + options_.model, options_.dimension, ProviderKind::kRemote},
      limiter_(options_.max_inflight) {
  spec_.Validate();
  detail::ParseEndpoint(options_.url);
}

RemoteEmbeddingProvider::~RemoteEmbeddingProvider() = default;

std::vector<EmbeddingVector> RemoteEmbeddingProvider::EmbedBatch(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::kEmptyText, "embed_batch called with no texts");
  for (const auto& t : texts) {
    if (text::IsBlank(t)) throw Error(ErrorCode::kEmptyText, "cannot embed an empty text");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  const size_t batch = std::max<size_t>(1, options_.max_batch);
  for (size_t begin = 0; begin < texts.size(); begin += batch) {
    const size_t n = std::min(batch, texts.size() - begin);
    auto part = EmbedOnce(std::span<const std::string>(texts).subspan(begin, n));
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<EmbeddingVector> RemoteEmbeddingProvider::EmbedOnce(std::span<const std::string> texts) {
  const detail::Endpoint endpoint = detail::ParseEndpoint(options_.url);
  const std::string body =
      json{{"input", std::vector<std::string>(texts.begin(), texts.end())}, {"model", options_.model}}.dump();

  const std::string reply = CallWithRetry(options_.retry, options_.sleeper, "embedding provider", [&] {
    InflightLimiter::Slot slot(limiter_);
    return detail::PostJson(endpoint, options_.api_key, body, options_.timeout);
  });

  const json j = json::parse(reply, nullptr, /*allow_exceptions=*/false);
  const auto malformed = [](const std::string& why) {
    return Error(ErrorCode::kMalformedProviderReply, "embedding reply: " + why);
  };
  if (j.is_discarded() || !j.is_object() || !j.contains("data") || !j["data"].is_array()) {
    throw malformed("missing 'data' array");
  }
  const auto& data = j["data"];
  if (data.size() != texts.size()) {
    throw malformed("expected " + std::to_string(texts.size()) + " embeddings, got " +
                    std::to_string(data.size()));
  }
  std::vector<std::vector<double>> slots(texts.size());
  for (size_t i = 0; i < data.size(); ++i) {
    const auto& item = data[i];
    if (!item.is_object() || !item.contains("embedding") || !item["embedding"].is_array()) {
      throw malformed("item " + std::to_string(i) + " lacks 'embedding'");
    }
    size_t pos = i;
    if (item.contains("index")) {
      if (!item["index"].is_number_unsigned() || item["index"].get<size_t>() >= slots.size()) {
        throw malformed("item " + std::to_string(i) + " has a bad 'index'");
      }
      pos = item["index"].get<size_t>();
    }
    std::vector<double> values;
    values.reserve(spec_.dimension);
    for (const auto& v : item["embedding"]) {
      if (!v.is_number()) throw malformed("non-numeric embedding component");
      values.push_back(v.get<double>());
    }
    if (values.size() != spec_.dimension) {
      throw Error(ErrorCode::kDimensionMismatch, "provider returned dimension " + std::to_string(values.size()) +
                                                     ", expected " + std::to_string(spec_.dimension));
    }
    if (!slots[pos].empty()) throw malformed("duplicate 'index' " + std::to_string(pos));
    slots[pos] = std::move(values);
  }
  std::vector<EmbeddingVector> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.emplace_back(std::move(s));
  return out;
}

}  // namespace legalrag
