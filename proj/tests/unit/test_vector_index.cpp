#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <random>

#include "legalrag/vector_index.hpp"
#include "test_support.hpp"

using namespace legalrag;
using legalrag::testing::TempDir;

namespace {

EmbeddingVector RandomUnit(std::mt19937_64& rng, size_t d) {
  std::normal_distribution<double> g;
  std::vector<double> v(d);
  for (auto& x : v) x = g(rng);
  return EmbeddingVector(std::move(v));
}

std::vector<IndexEntry> RandomEntries(std::mt19937_64& rng, size_t n, size_t d, const std::string& prefix = "c") {
  std::vector<IndexEntry> out;
  for (size_t i = 0; i < n; ++i) {
    out.push_back({prefix + std::to_string(i), SourceRef{"doc", static_cast<int>(i % 7) + 1, {}}, RandomUnit(rng, d),
                   "text " + std::to_string(i)});
  }
  return out;
}

// Full sort by (score desc, chunk_id asc).
std::vector<std::pair<double, std::string>> BruteForce(const std::vector<IndexEntry>& entries,
                                                        const EmbeddingVector& q, size_t k) {
  std::vector<std::pair<double, std::string>> all;
  for (const auto& e : entries) all.emplace_back(CosineSimilarity(q, e.vector), e.chunk_id);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  all.resize(std::min(k, all.size()));
  return all;
}

}  // namespace

TEST_CASE("search agrees with brute force") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const size_t n = std::uniform_int_distribution<size_t>(0, 300)(rng);
    VectorIndex index(16, "mock");
    auto entries = RandomEntries(rng, n, 16);
    index.Add(entries);
    const auto q = RandomUnit(rng, 16);
    for (size_t k : {1u, 5u, 10u, 400u}) {
      const auto hits = index.Search(q, k);
      const auto expect = BruteForce(entries, q, k);
      REQUIRE(hits.size() == expect.size());
      for (size_t i = 0; i < hits.size(); ++i) {
        CHECK(hits[i].chunk_id == expect[i].second);
        CHECK(hits[i].score == expect[i].first);
      }
    }
  }
}

TEST_CASE("ties break by chunk id") {
  VectorIndex index(8, "mock");
  const EmbeddingVector v({1, 2, 3, 4, 5, 6, 7, 8});
  index.Add({{"b", {"d", 1, {}}, v, "x"}, {"a", {"d", 2, {}}, v, "y"}, {"c", {"d", 3, {}}, -v, "z"}});
  const auto hits = index.Search(v, 3);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].chunk_id == "a");
  CHECK(hits[1].chunk_id == "b");
  CHECK(hits[2].chunk_id == "c");
  CHECK(hits[0].source.article_number == 2);
  CHECK(hits[0].text == "y");
}

TEST_CASE("add is all-or-nothing") {
  std::mt19937_64 rng(1);
  VectorIndex index(8, "mock");
  index.Add(RandomEntries(rng, 3, 8));
  SUBCASE("duplicate against existing") {
    auto batch = RandomEntries(rng, 2, 8, "n");
    batch.push_back(RandomEntries(rng, 1, 8)[0]);  // "c0" again
    CHECK_THROWS_CODE(index.Add(batch), ErrorCode::kDuplicateChunkId);
    CHECK(index.size() == 3);
  }
  SUBCASE("duplicate within the batch") {
    auto batch = RandomEntries(rng, 2, 8, "n");
    batch.push_back(batch[0]);
    CHECK_THROWS_CODE(index.Add(batch), ErrorCode::kDuplicateChunkId);
    CHECK(index.size() == 3);
  }
  SUBCASE("dimension mismatch") {
    auto batch = RandomEntries(rng, 2, 8, "n");
    batch.push_back(RandomEntries(rng, 1, 9, "m")[0]);
    CHECK_THROWS_CODE(index.Add(batch), ErrorCode::kDimensionMismatch);
    CHECK(index.size() == 3);
  }
}

TEST_CASE("search argument checks") {
  std::mt19937_64 rng(2);
  VectorIndex index(8, "mock");
  CHECK(index.Search(RandomUnit(rng, 8), 3).empty());
  index.Add(RandomEntries(rng, 4, 8));
  CHECK_THROWS_CODE(index.Search(RandomUnit(rng, 8), 0), ErrorCode::kInvalidArgument);
  CHECK_THROWS_CODE(index.Search(RandomUnit(rng, 7), 1), ErrorCode::kDimensionMismatch);
}

TEST_CASE("save and load round-trip bit-exactly") {
  std::mt19937_64 rng(4);
  VectorIndex index(32, "mock");
  auto entries = RandomEntries(rng, 50, 32);
  entries[3].source = SourceRef{"qa", 7, "qa/q3"};
  entries[4].source = SourceRef{"qa", std::nullopt, "qa/q4"};
  entries[5].text = "المادة الخامسة";
  index.Add(entries);
  TempDir dir;
  index.Save(dir / "i.vidx");
  const VectorIndex loaded = VectorIndex::Load(dir / "i.vidx");
  CHECK(loaded.size() == 50);
  CHECK(loaded.dimension() == 32);
  CHECK(loaded.provider_id() == "mock");
  for (int i = 0; i < 10; ++i) {
    const auto q = RandomUnit(rng, 32);
    const auto a = index.Search(q, 50);
    const auto b = loaded.Search(q, 50);
    REQUIRE(a.size() == b.size());
    for (size_t j = 0; j < a.size(); ++j) {
      CHECK(a[j].chunk_id == b[j].chunk_id);
      CHECK(std::memcmp(&a[j].score, &b[j].score, sizeof(double)) == 0);
      CHECK(a[j].source == b[j].source);
      CHECK(a[j].text == b[j].text);
    }
  }
}

TEST_CASE("load rejects damaged files") {
  std::mt19937_64 rng(6);
  VectorIndex index(8, "mock");
  index.Add(RandomEntries(rng, 5, 8));
  TempDir dir;
  const auto path = dir / "i.vidx";
  index.Save(path);
  std::string bytes = testing::ReadFile(path);

  CHECK_THROWS_CODE(VectorIndex::Load(dir / "absent.vidx"), ErrorCode::kMissingFile);

  SUBCASE("flipped body byte") {
    bytes[bytes.size() - 3] ^= 0x5a;
    testing::WriteFile(path, bytes);
    CHECK_THROWS_CODE(VectorIndex::Load(path), ErrorCode::kCorruptIndexFile);
  }
  SUBCASE("truncated") {
    testing::WriteFile(path, bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_CODE(VectorIndex::Load(path), ErrorCode::kCorruptIndexFile);
  }
  SUBCASE("bad magic") {
    bytes[0] = 'X';
    testing::WriteFile(path, bytes);
    CHECK_THROWS_CODE(VectorIndex::Load(path), ErrorCode::kCorruptIndexFile);
  }
  SUBCASE("future version") {
    bytes[8] = 2;
    testing::WriteFile(path, bytes);
    CHECK_THROWS_CODE(VectorIndex::Load(path), ErrorCode::kVersionMismatch);
  }
}
