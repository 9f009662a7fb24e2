#include "legalrag/chunker.hpp"

#include <algorithm>

#include "legalrag/error.hpp"

namespace legalrag {

void ChunkingConfig::Validate() const {
  if (chunk_size == 0) {
    throw Error(ErrorCode::kDegenerateConfig, "chunk_size must be positive");
  }
  if (chunk_overlap >= chunk_size) {
    throw Error(ErrorCode::kDegenerateConfig,
                "chunk_overlap (" + std::to_string(chunk_overlap) + ") must be smaller than chunk_size (" +
                    std::to_string(chunk_size) + ")");
  }
  if (chunk_size > model_limit) {
    throw Error(ErrorCode::kDegenerateConfig,
                "chunk_size (" + std::to_string(chunk_size) + ") exceeds model_limit (" +
                    std::to_string(model_limit) + ")");
  }
}

std::vector<ChunkWindow> PlanWindows(size_t total_tokens, const ChunkingConfig& config) {
  config.Validate();
  std::vector<ChunkWindow> windows;
  if (total_tokens == 0) return windows;
  const size_t stride = config.stride();
  windows.reserve(total_tokens / stride + 1);
  for (size_t start = 0;; start += stride) {
    const size_t count = std::min(config.chunk_size, total_tokens - start);
    windows.push_back({start, count});
    if (start + count >= total_tokens) break;
  }
  return windows;
}

std::vector<Chunk> ChunkPassage(std::string_view text, const SourceRef& source,
                                const ChunkingConfig& config, const Tokenizer& tokenizer) {
  const std::vector<TokenSpan> tokens = tokenizer.Tokenize(text);
  const std::vector<ChunkWindow> windows = PlanWindows(tokens.size(), config);
  const std::string label = source.Label();

  std::vector<Chunk> chunks;
  chunks.reserve(windows.size());
  for (size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    const size_t byte_begin = tokens[w.token_start].begin;
    const size_t byte_end = tokens[w.token_start + w.token_count - 1].end;
    Chunk c;
    c.chunk_id = label + "#c" + std::to_string(i);
    c.source = source;
    c.token_start = w.token_start;
    c.token_count = w.token_count;
    c.text = std::string(text.substr(byte_begin, byte_end - byte_begin));
    chunks.push_back(std::move(c));
  }
  return chunks;
}

std::vector<Chunk> ChunkPassages(const std::vector<Passage>& passages, const ChunkingConfig& config,
                                 const Tokenizer& tokenizer) {
  std::vector<Chunk> all;
  for (const auto& p : passages) {
    auto chunks = ChunkPassage(p.text, p.source, config, tokenizer);
    all.insert(all.end(), std::make_move_iterator(chunks.begin()),
               std::make_move_iterator(chunks.end()));
  }
  return all;
}

}  // namespace legalrag
