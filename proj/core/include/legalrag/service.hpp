#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "legalrag/chunker.hpp"
#include "legalrag/corpus.hpp"
#include "legalrag/embedding.hpp"
#include "legalrag/llm_gateway.hpp"
#include "legalrag/query_engine.hpp"
#include "legalrag/vector_index.hpp"

namespace httplib {
class Server;
}

namespace legalrag {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path index_path;
  std::filesystem::path corpus_path;  // optional; feeds /api/corpus/stats and --build-on-start
  std::optional<std::filesystem::path> static_dir;
  bool build_on_start = false;
  EngineConfig engine;
  ChunkingConfig chunking;
  size_t worker_threads = 16;
};

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

/// JSON API over the query engine. Requests share an immutable index
/// snapshot; SwapIndex() replaces it atomically for subsequent requests.
///
///   POST /api/chat          {"question", "language_hint"?: "ar"|"en"}
///                           -> {"answer", "sources": [...], "timing_ms"}
///   GET  /api/health        -> {"status": "ok", "index_entries"}
///   GET  /api/corpus/stats  -> {"documents", "articles", "qa_pairs", "index_entries"}
/// Errors use {"error": {"code", "message"}}.
class Service {
 public:
  /// Loads (or builds) the index. Throws Error{kIndexLoadFailure}.
  Service(ServiceConfig config, std::shared_ptr<LlmGateway> gateway, std::shared_ptr<EmbeddingProvider> embedder,
          const Tokenizer& tokenizer = DefaultTokenizer());
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and starts serving on a background thread. Throws Error{kBindFailure}.
  void Start();
  /// Stops accepting connections and waits for in-flight requests to finish.
  void Stop();
  int port() const { return bound_port_; }

  void SwapIndex(std::shared_ptr<const VectorIndex> index);
  std::shared_ptr<const VectorIndex> Snapshot() const;

  HttpReply HandleChat(std::string_view body) const;
  HttpReply HandleHealth() const;
  HttpReply HandleStats() const;

 private:
  ServiceConfig config_;
  std::shared_ptr<LlmGateway> gateway_;
  std::shared_ptr<EmbeddingProvider> embedder_;
  const Tokenizer& tokenizer_;

  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const VectorIndex> index_;
  std::optional<Corpus> corpus_;

  std::unique_ptr<httplib::Server> server_;
  std::thread listener_;
  int bound_port_ = 0;
};

std::string ErrorEnvelope(std::string_view code, std::string_view message);

}  // namespace legalrag
