#pragma once

#include "legalrag/chunker.hpp"
#include "legalrag/corpus.hpp"
#include "legalrag/embedding.hpp"
#include "legalrag/vector_index.hpp"

namespace legalrag {

struct BuildStats {
  size_t passages = 0;
  size_t chunks = 0;
};

/// Corpus -> passages -> chunks -> embeddings -> index.
VectorIndex BuildIndex(const Corpus& corpus, const ChunkingConfig& chunking, EmbeddingProvider& embedder,
                       const Tokenizer& tokenizer = DefaultTokenizer(), BuildStats* stats = nullptr,
                       size_t embed_batch = 64);

}  // namespace legalrag
