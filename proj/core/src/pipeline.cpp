#include "legalrag/pipeline.hpp"

#include <algorithm>

namespace legalrag {

VectorIndex BuildIndex(const Corpus& corpus, const ChunkingConfig& chunking, EmbeddingProvider& embedder,
                       const Tokenizer& tokenizer, BuildStats* stats, size_t embed_batch) {
  chunking.Validate();
  const std::vector<Passage> passages = FlattenToPassages(corpus);
  std::vector<Chunk> chunks = ChunkPassages(passages, chunking, tokenizer);

  VectorIndex index(embedder.spec().dimension, embedder.spec().provider_id);
  embed_batch = std::max<size_t>(1, embed_batch);
  for (size_t begin = 0; begin < chunks.size(); begin += embed_batch) {
    const size_t end = std::min(chunks.size(), begin + embed_batch);
    std::vector<std::string> texts;
    texts.reserve(end - begin);
    for (size_t i = begin; i < end; ++i) texts.push_back(chunks[i].text);
    std::vector<EmbeddingVector> vectors = embedder.EmbedBatch(texts);

    std::vector<IndexEntry> entries;
    entries.reserve(end - begin);
    for (size_t i = begin; i < end; ++i) {
      entries.push_back(IndexEntry{std::move(chunks[i].chunk_id), std::move(chunks[i].source),
                                   std::move(vectors[i - begin]), std::move(chunks[i].text)});
    }
    index.Add(std::move(entries));
  }
  if (stats != nullptr) {
    stats->passages = passages.size();
    stats->chunks = chunks.size();
  }
  return index;
}

}  // namespace legalrag
