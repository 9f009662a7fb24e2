#include "cli.hpp"

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <pthread.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "legalrag/chunker.hpp"
#include "legalrag/corpus.hpp"
#include "legalrag/embedding.hpp"
#include "legalrag/error.hpp"
#include "legalrag/evaluation.hpp"
#include "legalrag/llm_gateway.hpp"
#include "legalrag/pipeline.hpp"
#include "legalrag/qa_synthesis.hpp"
#include "legalrag/query_engine.hpp"
#include "legalrag/service.hpp"
#include "legalrag/text.hpp"
#include "legalrag/vector_index.hpp"

namespace legalrag::cli {
namespace {

using nlohmann::json;

struct ChunkFlags {
  size_t chunk_size = 600;
  size_t chunk_overlap = 50;
  size_t model_limit = kDefaultModelLimit;

  void Attach(CLI::App* cmd) {
    cmd->add_option("--chunk-size", chunk_size, "Tokens per chunk")->capture_default_str();
    cmd->add_option("--chunk-overlap", chunk_overlap, "Tokens shared by consecutive chunks")->capture_default_str();
    cmd->add_option("--model-limit", model_limit, "Model context window in tokens")->capture_default_str();
  }
  ChunkingConfig Config() const { return {chunk_size, chunk_overlap, model_limit}; }
};

struct EmbedFlags {
  std::string embedder = "mock";
  std::string model = "text-embedding-3-small";
  size_t dimension = 64;

  void Attach(CLI::App* cmd) {
    cmd->add_option("--embedder", embedder, "mock | remote (EMBED_API_URL, EMBED_API_KEY)")
        ->check(CLI::IsMember({"mock", "remote"}))
        ->capture_default_str();
    cmd->add_option("--embed-model", model, "Remote embedding model")->capture_default_str();
    cmd->add_option("--embed-dim", dimension, "Embedding dimension")->capture_default_str();
  }
  std::unique_ptr<EmbeddingProvider> Make() const {
    if (embedder == "remote") return MakeEmbeddingProvider("remote:" + model, dimension);
    return std::make_unique<MockEmbeddingProvider>("mock", dimension);
  }
};

struct LlmFlags {
  std::string llm = "auto";
  std::string mock_fixture;
  std::string model = "gpt-4";

  void Attach(CLI::App* cmd) {
    cmd->add_option("--llm", llm, "auto | mock | remote (LLM_API_URL, LLM_API_KEY)")
        ->check(CLI::IsMember({"auto", "mock", "remote"}))
        ->capture_default_str();
    cmd->add_option("--mock-llm", mock_fixture, "Scripted mock fixture (mock_llm.json)");
    cmd->add_option("--llm-model", model, "Remote chat model")->capture_default_str();
  }

  std::unique_ptr<LlmGateway> Make(size_t model_limit) const {
    const char* url = std::getenv("LLM_API_URL");
    const bool remote = llm == "remote" || (llm == "auto" && mock_fixture.empty() && url != nullptr && *url);
    if (remote) {
      return std::make_unique<RemoteLlmGateway>(RemoteLlmOptions::FromEnvironment(model), model_limit);
    }
    if (!mock_fixture.empty()) return MockLlmGateway::FromFile(mock_fixture, model_limit);
    return std::make_unique<MockLlmGateway>(EchoSources, model_limit);
  }

  // Fallback mock with no fixture: names the context blocks it was given.
  static std::string EchoSources(const CompletionRequest& request) {
    std::string labels;
    for (const auto& m : request.messages) {
      if (m.role != Role::kUser) continue;
      std::istringstream lines(m.content);
      for (std::string line; std::getline(lines, line);) {
        if (line.size() < 3 || line.front() != '[' || line.back() != ']') continue;
        if (!labels.empty()) labels += ", ";
        labels += line.substr(1, line.size() - 2);
      }
    }
    if (labels.empty()) return "(mock) No context was retrieved for this question.";
    return "(mock) Answer drawn from: " + labels + ".";
  }
};

struct EngineFlags {
  size_t k = 3;
  size_t model_limit = kDefaultModelLimit;
  size_t max_answer_tokens = kDefaultMaxAnswerTokens;
  std::string language_hint;

  void Attach(CLI::App* cmd) {
    cmd->add_option("--k", k, "Chunks retrieved per question")->capture_default_str();
    cmd->add_option("--model-limit", model_limit, "Model context window in tokens")->capture_default_str();
    cmd->add_option("--max-answer-tokens", max_answer_tokens, "Answer token allowance")->capture_default_str();
    cmd->add_option("--language-hint", language_hint, "ar | en")->check(CLI::IsMember({"ar", "en"}));
  }
  EngineConfig Config() const {
    EngineConfig c;
    c.k = k;
    c.model_limit = model_limit;
    c.max_answer_tokens = max_answer_tokens;
    return c;
  }
};

void PrintAnswer(const Answer& answer, std::ostream& out) {
  out << answer.text << "\n\nSources:\n";
  if (answer.sources.empty()) out << "  (none)\n";
  for (size_t i = 0; i < answer.sources.size(); ++i) {
    const auto& h = answer.sources[i];
    out << "  [" << i + 1 << "] " << h.source.Label() << "  score " << std::fixed << std::setprecision(4)
        << h.score << "  (" << h.chunk_id << ")\n";
  }
  out.unsetf(std::ios::floatfield);
}

std::string Snippet(const std::string& s, size_t max_bytes) {
  std::string one_line = s.substr(0, max_bytes);
  for (char& c : one_line) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  // Do not cut a UTF-8 sequence in half.
  while (!one_line.empty() && !text::IsValidUtf8(one_line)) one_line.pop_back();
  return one_line.size() < s.size() ? one_line + "..." : one_line;
}

// Explicit flags win over the config file; the file wins over defaults.
template <typename T>
void FromConfig(const json& cfg, const char* key, CLI::App* cmd, const std::string& flag, T& target) {
  auto it = cfg.find(key);
  if (it == cfg.end() || cmd->get_option(flag)->count() > 0) return;
  try {
    target = it->get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("config key '") + key + "': " + e.what());
  }
}

int Serve(ServiceConfig config, const LlmFlags& llm_flags, const EmbedFlags& embed_flags) {
  std::shared_ptr<EmbeddingProvider> embedder;
  if (!config.build_on_start && std::filesystem::exists(config.index_path)) {
    const VectorIndex probe = VectorIndex::Load(config.index_path);
    embedder = MakeEmbeddingProvider(probe.provider_id(), probe.dimension());
  } else {
    embedder = embed_flags.Make();
  }
  std::shared_ptr<LlmGateway> gateway = llm_flags.Make(config.engine.model_limit);

  // Block termination signals before any worker thread exists, then wait for
  // one on this thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Service service(std::move(config), gateway, embedder);
  service.Start();
  int sig = 0;
  sigwait(&signals, &sig);
  spdlog::info("signal {} received, draining in-flight requests", sig);
  service.Stop();
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Retrieval-augmented question answering over a cooperative-law corpus", "legalrag"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load and validate a corpus directory");
  std::string ingest_corpus;
  bool ingest_dump = false;
  ingest->add_option("--corpus", ingest_corpus, "Corpus directory")->required();
  ingest->add_flag("--dump", ingest_dump, "Print the normalized corpus as JSON");

  // index build | search
  auto* index_cmd = app.add_subcommand("index", "Build or query a vector index");
  index_cmd->require_subcommand(1);
  auto* build = index_cmd->add_subcommand("build", "Chunk, embed and index a corpus");
  std::string build_corpus, build_out;
  ChunkFlags chunk_flags;
  EmbedFlags build_embed;
  build->add_option("--corpus", build_corpus, "Corpus directory")->required();
  build->add_option("--out", build_out, "Index file to write (*.vidx)")->required();
  chunk_flags.Attach(build);
  build_embed.Attach(build);

  auto* search = index_cmd->add_subcommand("search", "Top-k similarity search");
  std::string search_index, search_query;
  size_t search_k = 3;
  search->add_option("--index", search_index, "Index file")->required();
  search->add_option("--query", search_query, "Query text")->required();
  search->add_option("--k", search_k, "Number of hits")->capture_default_str();

  // qa-gen
  auto* qagen = app.add_subcommand("qa-gen", "Generate question/answer pairs for every law article");
  std::string qagen_corpus, qagen_out;
  SynthesisConfig synth;
  LlmFlags qagen_llm;
  size_t qagen_limit = kDefaultModelLimit;
  qagen->add_option("--corpus", qagen_corpus, "Corpus directory")->required();
  qagen->add_option("--out", qagen_out, "Output file (*.qa.jsonl)")->required();
  qagen->add_option("--per-article", synth.questions_per_article, "Pairs per article")->capture_default_str();
  qagen->add_option("--max-parse-retries", synth.max_parse_retries, "Retries on unparseable replies")
      ->capture_default_str();
  qagen->add_option("--parallel", synth.parallelism, "Articles processed concurrently")->capture_default_str();
  qagen->add_option("--model-limit", qagen_limit, "Model context window in tokens")->capture_default_str();
  qagen_llm.Attach(qagen);

  // ask / chat
  auto* ask = app.add_subcommand("ask", "Answer one question");
  std::string ask_index, ask_question;
  EngineFlags ask_engine;
  LlmFlags ask_llm;
  ask->add_option("--index", ask_index, "Index file")->required();
  ask->add_option("--question", ask_question, "Question text")->required();
  ask_engine.Attach(ask);
  ask_llm.Attach(ask);

  auto* chat = app.add_subcommand("chat", "Interactive question loop (each question is independent)");
  std::string chat_index;
  EngineFlags chat_engine;
  LlmFlags chat_llm;
  chat->add_option("--index", chat_index, "Index file")->required();
  chat_engine.Attach(chat);
  chat_llm.Attach(chat);

  // eval
  auto* eval = app.add_subcommand("eval", "Compute accuracy, satisfaction and confusion metrics");
  std::string eval_judgments, eval_out;
  eval->add_option("--judgments", eval_judgments, "Judgment file (JSONL)")->required();
  eval->add_option("--out", eval_out, "Write the JSON report here");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API (and optional static chat UI)");
  std::string serve_config, serve_index, serve_corpus, serve_static, serve_host = "127.0.0.1";
  int serve_port = 8080;
  bool build_on_start = false;
  EngineFlags serve_engine;
  LlmFlags serve_llm;
  EmbedFlags serve_embed;
  size_t serve_chunk_size = 600, serve_chunk_overlap = 50;
  serve->add_option("--config", serve_config, "JSON config file; explicit flags take precedence");
  serve->add_option("--index", serve_index, "Index file");
  serve->add_option("--corpus", serve_corpus, "Corpus directory");
  serve->add_option("--static", serve_static, "Directory of static UI assets");
  serve->add_option("--host", serve_host, "Listen address")->capture_default_str();
  serve->add_option("--port", serve_port, "Listen port")->capture_default_str();
  serve->add_flag("--build-on-start", build_on_start, "Build the index from --corpus at startup");
  serve->add_option("--chunk-size", serve_chunk_size, "Tokens per chunk (build-on-start)")->capture_default_str();
  serve->add_option("--chunk-overlap", serve_chunk_overlap, "Chunk overlap (build-on-start)")->capture_default_str();
  serve_engine.Attach(serve);
  serve_llm.Attach(serve);
  serve_embed.Attach(serve);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (ingest->parsed()) {
      const Corpus corpus = LoadCorpus(ingest_corpus);
      if (ingest_dump) {
        out << SerializeCorpus(corpus) << "\n";
      } else {
        out << "documents: " << corpus.documents.size() << "\n"
            << "articles:  " << corpus.article_count() << "\n"
            << "qa_pairs:  " << corpus.qa_pair_count() << "\n"
            << "passages:  " << FlattenToPassages(corpus).size() << "\n";
        for (const auto& d : corpus.documents) {
          out << "  " << d.doc_id << " [" << ToString(d.kind) << ", " << ToString(d.language) << "] "
              << (d.kind == DocumentKind::kQaDataset ? d.qa_pairs.size() : d.articles.size())
              << (d.kind == DocumentKind::kQaDataset ? " pairs" : " articles") << "  " << d.title << "\n";
        }
      }
      return kExitOk;
    }

    if (build->parsed()) {
      const Corpus corpus = LoadCorpus(build_corpus);
      auto embedder = build_embed.Make();
      BuildStats stats;
      const VectorIndex index = BuildIndex(corpus, chunk_flags.Config(), *embedder, DefaultTokenizer(), &stats);
      index.Save(build_out);
      out << "indexed " << stats.chunks << " chunks from " << stats.passages << " passages into " << build_out
          << " (" << index.provider_id() << ", d=" << index.dimension() << ")\n";
      return kExitOk;
    }

    if (search->parsed()) {
      const VectorIndex index = VectorIndex::Load(search_index);
      auto embedder = MakeEmbeddingProvider(index.provider_id(), index.dimension());
      const auto hits = index.Search(embedder->Embed(search_query), search_k);
      for (size_t i = 0; i < hits.size(); ++i) {
        out << i + 1 << ". " << std::fixed << std::setprecision(6) << hits[i].score << "  " << hits[i].chunk_id
            << "\n   " << Snippet(hits[i].text, 160) << "\n";
      }
      if (hits.empty()) out << "index is empty\n";
      return kExitOk;
    }

    if (qagen->parsed()) {
      const Corpus corpus = LoadCorpus(qagen_corpus);
      auto gateway = qagen_llm.Make(qagen_limit);
      std::ofstream file(qagen_out, std::ios::binary | std::ios::trunc);
      if (!file) throw Error(ErrorCode::kIoError, "cannot write " + qagen_out);
      const auto report = SynthesizeDataset(corpus, synth, *gateway, [&](const std::vector<QAPair>& pairs) {
        for (const auto& p : pairs) file << QaPairToJsonLine(p) << '\n';
        file.flush();
      });
      out << "articles: " << report.articles_processed << "\npairs:    " << report.pairs.size()
          << "\nfailures: " << report.failures.size() << "\n";
      for (const auto& f : report.failures) {
        out << "  " << f.doc_id << " article " << f.article_number << ": " << f.reason << "\n";
      }
      if (report.style_warnings > 0) {
        out << "answers not citing their article: " << report.style_warnings << "\n";
      }
      return kExitOk;
    }

    if (ask->parsed() || chat->parsed()) {
      const bool is_ask = ask->parsed();
      const EngineFlags& ef = is_ask ? ask_engine : chat_engine;
      const VectorIndex index = VectorIndex::Load(is_ask ? ask_index : chat_index);
      auto embedder = MakeEmbeddingProvider(index.provider_id(), index.dimension());
      auto gateway = (is_ask ? ask_llm : chat_llm).Make(ef.model_limit);
      const EngineConfig engine = ef.Config();
      if (auto warning = engine.CheckBudget(ChunkingConfig{}.chunk_size, DefaultTokenizer())) {
        spdlog::warn("{}", *warning);
      }

      if (is_ask) {
        PrintAnswer(AnswerQuestion(ask_question, index, engine, *gateway, *embedder, DefaultTokenizer(),
                                   ef.language_hint),
                    out);
        return kExitOk;
      }
      out << "Ask a question (empty line or /quit to exit).\n";
      std::string line;
      while (out << "> " << std::flush, std::getline(in, line)) {
        if (line == "/quit" || text::IsBlank(line)) break;
        try {
          PrintAnswer(AnswerQuestion(line, index, engine, *gateway, *embedder, DefaultTokenizer(), ef.language_hint),
                      out);
        } catch (const Error& e) {
          err << "error: " << e.what() << "\n";
        }
        out << "\n";
      }
      return kExitOk;
    }

    if (eval->parsed()) {
      const auto judgments = LoadJudgments(eval_judgments);
      const EvalReport report = Evaluate(judgments);
      out << FormatReport(report);
      if (!eval_out.empty()) WriteReport(report, eval_out);
      return kExitOk;
    }

    if (serve->parsed()) {
      if (!serve_config.empty()) {
        std::ifstream cfg_in(serve_config);
        if (!cfg_in) throw Error(ErrorCode::kMissingFile, "cannot open config " + serve_config);
        const json cfg = json::parse(cfg_in, nullptr, /*allow_exceptions=*/false);
        if (cfg.is_discarded() || !cfg.is_object()) {
          throw Error(ErrorCode::kSchemaViolation, serve_config + " is not a JSON object");
        }
        FromConfig(cfg, "index", serve, "--index", serve_index);
        FromConfig(cfg, "corpus", serve, "--corpus", serve_corpus);
        FromConfig(cfg, "static_dir", serve, "--static", serve_static);
        FromConfig(cfg, "host", serve, "--host", serve_host);
        FromConfig(cfg, "port", serve, "--port", serve_port);
        FromConfig(cfg, "build_on_start", serve, "--build-on-start", build_on_start);
        FromConfig(cfg, "chunk_size", serve, "--chunk-size", serve_chunk_size);
        FromConfig(cfg, "chunk_overlap", serve, "--chunk-overlap", serve_chunk_overlap);
        FromConfig(cfg, "k", serve, "--k", serve_engine.k);
        FromConfig(cfg, "model_limit", serve, "--model-limit", serve_engine.model_limit);
        FromConfig(cfg, "max_answer_tokens", serve, "--max-answer-tokens", serve_engine.max_answer_tokens);
        FromConfig(cfg, "llm", serve, "--llm", serve_llm.llm);
        FromConfig(cfg, "mock_llm", serve, "--mock-llm", serve_llm.mock_fixture);
        FromConfig(cfg, "llm_model", serve, "--llm-model", serve_llm.model);
        FromConfig(cfg, "embedder", serve, "--embedder", serve_embed.embedder);
        FromConfig(cfg, "embed_model", serve, "--embed-model", serve_embed.model);
        FromConfig(cfg, "embed_dim", serve, "--embed-dim", serve_embed.dimension);
      }
      if (serve_index.empty() && !build_on_start) {
        err << "error: serve needs --index (or --build-on-start with --corpus)\n\n" << serve->help();
        return kExitUsage;
      }
      ServiceConfig config;
      config.host = serve_host;
      config.port = serve_port;
      config.index_path = serve_index;
      config.corpus_path = serve_corpus;
      if (!serve_static.empty()) config.static_dir = serve_static;
      config.build_on_start = build_on_start;
      config.engine = serve_engine.Config();
      config.chunking = {serve_chunk_size, serve_chunk_overlap, serve_engine.model_limit};
      return Serve(std::move(config), serve_llm, serve_embed);
    }
  } catch (const Error& e) {
    err << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace legalrag::cli
