#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "legalrag/corpus.hpp"
#include "legalrag/tokenizer.hpp"

namespace legalrag {

struct ChunkingConfig {
  size_t chunk_size = 600;
  size_t chunk_overlap = 50;
  size_t model_limit = 8192;

  /// Throws Error{kDegenerateConfig} unless 0 <= overlap < size <= model_limit.
  void Validate() const;
  size_t stride() const { return chunk_size - chunk_overlap; }
};

/// Token window [token_start, token_start + token_count).
struct ChunkWindow {
  size_t token_start = 0;
  size_t token_count = 0;
};

struct Chunk {
  std::string chunk_id;
  SourceRef source;
  size_t token_start = 0;
  size_t token_count = 0;
  /// Exact substring of the passage from the first to the last token.
  std::string text;
};

/// Sliding windows over `total_tokens` tokens: starts at 0, stride, 2*stride...
/// until a window reaches the end. Zero tokens yields no windows.
std::vector<ChunkWindow> PlanWindows(size_t total_tokens, const ChunkingConfig& config);

std::vector<Chunk> ChunkPassage(std::string_view text, const SourceRef& source,
                                const ChunkingConfig& config,
                                const Tokenizer& tokenizer = DefaultTokenizer());

std::vector<Chunk> ChunkPassages(const std::vector<Passage>& passages, const ChunkingConfig& config,
                                 const Tokenizer& tokenizer = DefaultTokenizer());

}  // namespace legalrag
