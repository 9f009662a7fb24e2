#include "legalrag/service.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "legalrag/error.hpp"
#include "legalrag/pipeline.hpp"

namespace legalrag {
namespace {

using nlohmann::json;

HttpReply ErrorReply(int status, std::string_view code, std::string_view message) {
  return {status, ErrorEnvelope(code, message)};
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyQuestion:
    case ErrorCode::kEmptyText:
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kBudgetExceeded: return 413;
    case ErrorCode::kMalformedProviderReply: return 502;
    case ErrorCode::kProviderUnavailable: return 503;
    default: return 500;
  }
}

json SourcesJson(const std::vector<SearchHit>& hits) {
  json out = json::array();
  for (const auto& h : hits) {
    out.push_back({{"doc_id", h.source.doc_id},
                   {"article_number", h.source.article_number ? json(*h.source.article_number) : json(nullptr)},
                   {"score", h.score},
                   {"chunk_id", h.chunk_id},
                   {"label", h.source.Label()}});
  }
  return out;
}

}  // namespace

std::string ErrorEnvelope(std::string_view code, std::string_view message) {
  return json{{"error", {{"code", code}, {"message", message}}}}.dump();
}

Service::Service(ServiceConfig config, std::shared_ptr<LlmGateway> gateway,
                 std::shared_ptr<EmbeddingProvider> embedder, const Tokenizer& tokenizer)
    : config_(std::move(config)), gateway_(std::move(gateway)), embedder_(std::move(embedder)), tokenizer_(tokenizer) {
  if (!gateway_ || !embedder_) throw Error(ErrorCode::kInvalidArgument, "service needs a gateway and an embedder");
  try {
    if (!config_.corpus_path.empty()) corpus_ = LoadCorpus(config_.corpus_path);

    std::shared_ptr<const VectorIndex> index;
    if (!config_.index_path.empty() && std::filesystem::exists(config_.index_path)) {
      index = std::make_shared<const VectorIndex>(VectorIndex::Load(config_.index_path));
    } else if (config_.build_on_start) {
      if (!corpus_) throw Error(ErrorCode::kInvalidArgument, "--build-on-start needs a corpus path");
      BuildStats stats;
      auto built = BuildIndex(*corpus_, config_.chunking, *embedder_, tokenizer_, &stats);
      if (!config_.index_path.empty()) built.Save(config_.index_path);
      spdlog::info("built index with {} chunks from {} passages", stats.chunks, stats.passages);
      index = std::make_shared<const VectorIndex>(std::move(built));
    } else {
      throw Error(ErrorCode::kMissingFile,
                  "index '" + config_.index_path.string() + "' does not exist and --build-on-start is not set");
    }
    if (index->provider_id() != embedder_->spec().provider_id ||
        index->dimension() != embedder_->spec().dimension) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "index was built with '" + index->provider_id() + "' (d=" + std::to_string(index->dimension()) +
                      ") but the service embedder is '" + embedder_->spec().provider_id + "' (d=" +
                      std::to_string(embedder_->spec().dimension) + ")");
    }
    index_ = std::move(index);
  } catch (const Error& e) {
    throw Error(ErrorCode::kIndexLoadFailure, std::string("cannot load index: ") + e.what());
  }
  if (auto warning = config_.engine.CheckBudget(config_.chunking.chunk_size, tokenizer_)) {
    spdlog::warn("{}", *warning);
  }
}

Service::~Service() { Stop(); }

void Service::SwapIndex(std::shared_ptr<const VectorIndex> index) {
  std::lock_guard lock(snapshot_mu_);
  index_ = std::move(index);
}

std::shared_ptr<const VectorIndex> Service::Snapshot() const {
  std::lock_guard lock(snapshot_mu_);
  return index_;
}

HttpReply Service::HandleChat(std::string_view body) const {
  const json req = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (req.is_discarded() || !req.is_object()) return ErrorReply(400, "bad_request", "body must be a JSON object");
  auto q = req.find("question");
  if (q == req.end() || !q->is_string()) {
    return ErrorReply(400, "bad_request", "field 'question' must be a string");
  }
  std::string hint;
  if (auto h = req.find("language_hint"); h != req.end() && !h->is_null()) {
    if (!h->is_string() || (*h != "ar" && *h != "en")) {
      return ErrorReply(400, "bad_request", "field 'language_hint' must be \"ar\" or \"en\"");
    }
    hint = h->get<std::string>();
  }

  const auto snapshot = Snapshot();
  try {
    const Answer answer = AnswerQuestion(q->get_ref<const std::string&>(), *snapshot, config_.engine, *gateway_,
                                         *embedder_, tokenizer_, hint);
    json out = {{"answer", answer.text},
                {"sources", SourcesJson(answer.sources)},
                {"timing_ms", answer.timing_ms},
                {"prompt_tokens", answer.prompt_tokens}};
    if (answer.no_index) out["no_index"] = true;
    return {200, out.dump()};
  } catch (const Error& e) {
    return ErrorReply(StatusFor(e.code()), ErrorCodeName(e.code()), e.what());
  } catch (const std::exception& e) {
    return ErrorReply(500, "internal", e.what());
  }
}

HttpReply Service::HandleHealth() const {
  return {200, json{{"status", "ok"}, {"index_entries", Snapshot()->size()}}.dump()};
}

HttpReply Service::HandleStats() const {
  json out = {{"documents", corpus_ ? corpus_->documents.size() : 0},
              {"articles", corpus_ ? corpus_->article_count() : 0},
              {"qa_pairs", corpus_ ? corpus_->qa_pair_count() : 0},
              {"index_entries", Snapshot()->size()}};
  return {200, out.dump()};
}

void Service::Start() {
  if (server_) return;
  auto server = std::make_unique<httplib::Server>();
  const size_t threads = std::max<size_t>(1, config_.worker_threads);
  server->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  // httplib defaults to SO_REUSEPORT, which would let a second instance share
  // the port silently. Plain SO_REUSEADDR still allows quick restarts.
  server->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  const auto send = [](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  };
  server->Post("/api/chat", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, HandleChat(req.body));
  });
  server->Get("/api/health",
              [this, send](const httplib::Request&, httplib::Response& res) { send(res, HandleHealth()); });
  server->Get("/api/corpus/stats",
              [this, send](const httplib::Request&, httplib::Response& res) { send(res, HandleStats()); });
  if (config_.static_dir) {
    if (!server->set_mount_point("/", config_.static_dir->string())) {
      spdlog::warn("static assets directory '{}' not found", config_.static_dir->string());
    }
  }

  int port = config_.port;
  if (port == 0) {
    port = server->bind_to_any_port(config_.host);
    if (port < 0) port = 0;
  } else if (!server->bind_to_port(config_.host, port)) {
    port = 0;
  }
  if (port == 0) {
    throw Error(ErrorCode::kBindFailure,
                "cannot bind " + config_.host + ":" + std::to_string(config_.port));
  }
  bound_port_ = port;
  server_ = std::move(server);
  listener_ = std::thread([srv = server_.get()] { srv->listen_after_bind(); });
  server_->wait_until_ready();
  spdlog::info("serving on http://{}:{}", config_.host, bound_port_);
}

void Service::Stop() {
  if (!server_) return;
  server_->stop();
  if (listener_.joinable()) listener_.join();
  server_.reset();
}

}  // namespace legalrag
