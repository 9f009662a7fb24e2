#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "legalrag/chunker.hpp"
#include "legalrag/embedding.hpp"
#include "legalrag/tokenizer.hpp"
#include "legalrag/vector_index.hpp"

namespace {

using namespace legalrag;

std::string Text(size_t tokens, uint64_t seed) {
  static const char* const kWords[] = {"cooperative", "المادة", "member", "الجمعية", "board", "2017", ",", "."};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, std::size(kWords) - 1);
  std::string out;
  for (size_t i = 0; i < tokens; ++i) {
    if (i) out += ' ';
    out += kWords[pick(rng)];
  }
  return out;
}

VectorIndex RandomIndex(size_t n, size_t d) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  VectorIndex index(d, "bench");
  std::vector<IndexEntry> entries;
  entries.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> v(d);
    for (auto& x : v) x = g(rng);
    entries.push_back({"c" + std::to_string(i), SourceRef{"doc", 1, {}}, EmbeddingVector(std::move(v)), ""});
  }
  index.Add(std::move(entries));
  return index;
}

void BM_CountTokens(benchmark::State& state) {
  const std::string text = Text(static_cast<size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(CountTokens(text));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_CountTokens)->Arg(600)->Arg(10000);

void BM_ChunkPassage(benchmark::State& state) {
  const std::string text = Text(static_cast<size_t>(state.range(0)), 11);
  const SourceRef src{"doc", 1, {}};
  const ChunkingConfig cfg{};
  for (auto _ : state) benchmark::DoNotOptimize(ChunkPassage(text, src, cfg));
}
BENCHMARK(BM_ChunkPassage)->Arg(1200)->Arg(10000);

void BM_MockEmbed(benchmark::State& state) {
  MockEmbeddingProvider embedder("mock", 64);
  const std::string text = Text(200, 3);
  for (auto _ : state) benchmark::DoNotOptimize(embedder.Embed(text));
}
BENCHMARK(BM_MockEmbed);

void BM_IndexSearch(benchmark::State& state) {
  const size_t d = static_cast<size_t>(state.range(1));
  const VectorIndex index = RandomIndex(static_cast<size_t>(state.range(0)), d);
  std::vector<double> q(d, 1.0);
  const EmbeddingVector query(std::move(q));
  for (auto _ : state) benchmark::DoNotOptimize(index.Search(query, 10));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_IndexSearch)->Args({1000, 64})->Args({10000, 64})->Args({10000, 1536});

}  // namespace

BENCHMARK_MAIN();
