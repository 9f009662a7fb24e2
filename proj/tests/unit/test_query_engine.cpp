#include <doctest.h>

#include "legalrag/pipeline.hpp"
#include "legalrag/query_engine.hpp"
#include "test_support.hpp"

using namespace legalrag;

namespace {

struct Fixture {
  Corpus corpus = LoadCorpus(testing::Fixture("corpus"));
  MockEmbeddingProvider embedder;
  VectorIndex index = BuildIndex(corpus, ChunkingConfig{}, embedder, DefaultTokenizer());
  std::vector<CompletionRequest> seen;
  MockLlmGateway gateway{[this](const CompletionRequest& r) {
    seen.push_back(r);
    return std::string("answer");
  }};
};

}  // namespace

TEST_CASE("index build covers every passage") {
  Fixture f;
  BuildStats stats;
  const auto index = BuildIndex(f.corpus, ChunkingConfig{}, f.embedder, DefaultTokenizer(), &stats);
  CHECK(stats.passages == 15);
  CHECK(stats.chunks == 15);  // every fixture passage is shorter than one chunk
  CHECK(index.size() == 15);
  CHECK(index.provider_id() == "mock");
}

TEST_CASE("prompt layout") {
  EngineConfig cfg;
  std::vector<SearchHit> hits = {{"coop_law/art-2#c0", 0.9, "Registration text", SourceRef{"coop_law", 2, {}}},
                                 {"coop_qa/q1#c0", 0.5, "Q: a\nA: b", SourceRef{"coop_qa", 2, "coop_qa/q1"}}};
  const auto msgs = RenderPrompt("How to register?", hits, cfg, "ar");
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0].role == Role::kSystem);
  CHECK(msgs[0].content == cfg.system_instruction + "\nAnswer in Arabic.");
  CHECK(msgs[1].content ==
        "Context:\n[coop_law/art-2]\nRegistration text\n\n[coop_qa/q1]\nQ: a\nA: b\n\nQuestion: How to register?");
  CHECK(RenderPrompt("q", {}, cfg)[1].content == "Question: q");
}

TEST_CASE("answer uses k hits, deterministic, temperature zero") {
  Fixture f;
  const Answer a = AnswerQuestion("How many founding members are needed?", f.index, EngineConfig{}, f.gateway,
                                  f.embedder);
  CHECK(a.text == "answer");
  CHECK(a.sources.size() == 3);
  CHECK_FALSE(a.no_index);
  REQUIRE(f.seen.size() == 1);
  CHECK(f.seen[0].temperature == 0.0);
  CHECK(a.prompt_tokens == CountPromptTokens(f.seen[0].messages, DefaultTokenizer()));
  for (const auto& h : a.sources) {
    CHECK(f.seen[0].messages[1].content.find("[" + h.source.Label() + "]") != std::string::npos);
  }
  const Answer b = AnswerQuestion("How many founding members are needed?", f.index, EngineConfig{}, f.gateway,
                                  f.embedder);
  REQUIRE(b.sources.size() == a.sources.size());
  for (size_t i = 0; i < a.sources.size(); ++i) CHECK(a.sources[i].chunk_id == b.sources[i].chunk_id);
  CHECK(f.seen[0].messages == f.seen[1].messages);
}

TEST_CASE("tight budget drops the lowest-scoring chunks") {
  Fixture f;
  EngineConfig cfg;
  const Answer full = AnswerQuestion("board of directors", f.index, cfg, f.gateway, f.embedder);
  REQUIRE(full.sources.size() == 3);
  // Leave room for the prompt with only the best chunk.
  const auto one = RenderPrompt("board of directors", std::span(full.sources).first(1), cfg);
  cfg.model_limit = CountPromptTokens(one, DefaultTokenizer()) + cfg.max_answer_tokens;
  const Answer trimmed = AnswerQuestion("board of directors", f.index, cfg, f.gateway, f.embedder);
  REQUIRE(trimmed.sources.size() == 1);
  CHECK(trimmed.sources[0].chunk_id == full.sources[0].chunk_id);
  CHECK(trimmed.prompt_tokens + cfg.max_answer_tokens <= cfg.model_limit);
}

TEST_CASE("errors and the empty index") {
  Fixture f;
  CHECK_THROWS_CODE(AnswerQuestion("  ", f.index, EngineConfig{}, f.gateway, f.embedder), ErrorCode::kEmptyQuestion);

  EngineConfig tiny;
  tiny.max_answer_tokens = 10;
  tiny.model_limit = CountTokens(tiny.system_instruction) + 12;
  CHECK_THROWS_CODE(AnswerQuestion("a question that is much too long to fit", f.index, tiny, f.gateway, f.embedder),
                    ErrorCode::kBudgetExceeded);

  const VectorIndex empty(64, "mock");
  const Answer a = AnswerQuestion("anything?", empty, EngineConfig{}, f.gateway, f.embedder);
  CHECK(a.no_index);
  CHECK(a.text == kNoCorpusMessage);
  CHECK(f.seen.empty());
}

TEST_CASE("startup budget check") {
  EngineConfig cfg;
  CHECK_FALSE(cfg.CheckBudget(600, DefaultTokenizer()).has_value());
  cfg.model_limit = 800;
  CHECK(cfg.CheckBudget(600, DefaultTokenizer()).has_value());
  cfg.model_limit = 100;
  CHECK_THROWS_CODE(cfg.CheckBudget(600, DefaultTokenizer()), ErrorCode::kDegenerateConfig);
  cfg = EngineConfig{};
  cfg.k = 0;
  CHECK_THROWS_CODE(cfg.CheckBudget(600, DefaultTokenizer()), ErrorCode::kDegenerateConfig);
}
