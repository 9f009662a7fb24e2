#include <doctest.h>

#include <random>
#include <set>

#include "legalrag/chunker.hpp"
#include "legalrag/tokenizer.hpp"
#include "test_support.hpp"

using namespace legalrag;

namespace {

// Independent restatement of the window plan, used as the oracle.
std::vector<std::pair<size_t, size_t>> OracleWindows(size_t n, size_t size, size_t overlap) {
  std::vector<std::pair<size_t, size_t>> out;
  if (n == 0) return out;
  for (size_t start = 0;; start += size - overlap) {
    const size_t end = std::min(start + size, n);
    out.emplace_back(start, end - start);
    if (end == n) break;
  }
  return out;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(ChunkingConfig{}.Validate());
  CHECK_THROWS_CODE((ChunkingConfig{100, 100, 8192}.Validate()), ErrorCode::kDegenerateConfig);
  CHECK_THROWS_CODE((ChunkingConfig{100, 150, 8192}.Validate()), ErrorCode::kDegenerateConfig);
  CHECK_THROWS_CODE((ChunkingConfig{0, 0, 8192}.Validate()), ErrorCode::kDegenerateConfig);
  CHECK_THROWS_CODE((ChunkingConfig{9000, 50, 8192}.Validate()), ErrorCode::kDegenerateConfig);
  CHECK_NOTHROW((ChunkingConfig{1, 0, 1}.Validate()));
}

TEST_CASE("1200 tokens at 600/50") {
  const auto w = PlanWindows(1200, ChunkingConfig{});
  REQUIRE(w.size() == 3);
  CHECK(w[0].token_start == 0);
  CHECK(w[0].token_count == 600);
  CHECK(w[1].token_start == 550);
  CHECK(w[1].token_count == 600);
  CHECK(w[2].token_start == 1100);
  CHECK(w[2].token_count == 100);
}

TEST_CASE("edge lengths") {
  const ChunkingConfig cfg{};
  CHECK(PlanWindows(0, cfg).empty());
  CHECK(PlanWindows(1, cfg).size() == 1);
  CHECK(PlanWindows(600, cfg).size() == 1);
  CHECK(PlanWindows(601, cfg).size() == 2);
  CHECK(PlanWindows(1150, cfg).size() == 2);
  CHECK(PlanWindows(1151, cfg).size() == 3);
}

TEST_CASE("window plan matches the oracle across configs") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<size_t> n_dist(0, 5000), size_dist(1, 700);
  for (int trial = 0; trial < 500; ++trial) {
    const size_t size = size_dist(rng);
    const size_t overlap = std::uniform_int_distribution<size_t>(0, size - 1)(rng);
    const size_t n = n_dist(rng);
    const auto w = PlanWindows(n, ChunkingConfig{size, overlap, 8192});
    const auto o = OracleWindows(n, size, overlap);
    REQUIRE(w.size() == o.size());
    for (size_t i = 0; i < w.size(); ++i) {
      CHECK(w[i].token_start == o[i].first);
      CHECK(w[i].token_count == o[i].second);
    }
  }
}

TEST_CASE("chunks are exact substrings with provenance") {
  std::mt19937_64 rng(5);
  const std::string text = testing::RandomText(rng, 1300);
  const SourceRef src{"law", 4, {}};
  const auto chunks = ChunkPassage(text, src, ChunkingConfig{});
  REQUIRE(chunks.size() == 3);
  const auto spans = DefaultTokenizer().Tokenize(text);
  for (size_t i = 0; i < chunks.size(); ++i) {
    const auto& c = chunks[i];
    CHECK(c.source == src);
    CHECK(c.chunk_id == "law/art-4#c" + std::to_string(i));
    const auto& first = spans[c.token_start];
    const auto& last = spans[c.token_start + c.token_count - 1];
    CHECK(c.text == text.substr(first.begin, last.end - first.begin));
    CHECK(CountTokens(c.text) == c.token_count);
  }
  // Overlap: the last 50 tokens of chunk i open chunk i+1.
  CHECK(chunks[1].token_start == chunks[0].token_start + 550);
}

TEST_CASE("blank passage yields nothing; ids are unique across passages") {
  CHECK(ChunkPassage("   ", SourceRef{"d", 1, {}}, ChunkingConfig{}).empty());

  std::mt19937_64 rng(9);
  std::vector<Passage> passages;
  for (int i = 1; i <= 5; ++i) passages.push_back({SourceRef{"d", i, {}}, testing::RandomText(rng, 100 * i)});
  const auto chunks = ChunkPassages(passages, ChunkingConfig{120, 20, 8192});
  std::set<std::string> ids;
  for (const auto& c : chunks) CHECK(ids.insert(c.chunk_id).second);
}
