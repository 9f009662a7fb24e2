#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

#include "legalrag/corpus.hpp"
#include "legalrag/embedding.hpp"

namespace legalrag {

struct IndexEntry {
  std::string chunk_id;
  SourceRef source;
  EmbeddingVector vector;
  std::string text;
};

struct SearchHit {
  std::string chunk_id;
  double score = 0.0;
  std::string text;
  SourceRef source;
};

inline constexpr uint32_t kIndexFormatVersion = 1;

/// Flat exact cosine index. Readers may search concurrently; Add() must not
/// run concurrently with anything else.
///
/// On-disk layout (`*.vidx`, little-endian):
///   "LRAGVIDX" | u32 version | u32 dimension | u64 count | u64 checksum |
///   str provider_id | count x (u32 record_len | record)
/// where record = str chunk_id | str doc_id | u8 has_article | i32 article |
///   str qa_id | dimension x f64 | str text, str = u32 length + bytes, and the
/// checksum is FNV-1a over every byte after the checksum field.
class VectorIndex {
 public:
  VectorIndex(size_t dimension, std::string provider_id);

  size_t dimension() const { return dimension_; }
  const std::string& provider_id() const { return provider_id_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<IndexEntry>& entries() const { return entries_; }

  /// All-or-nothing. Throws Error{kDimensionMismatch, kDuplicateChunkId}.
  void Add(std::vector<IndexEntry> entries);

  /// Top min(k, size) entries by cosine score, ties by ascending chunk_id.
  std::vector<SearchHit> Search(const EmbeddingVector& query, size_t k) const;

  void Save(const std::filesystem::path& path) const;
  /// Throws Error{kMissingFile, kCorruptIndexFile, kVersionMismatch}.
  static VectorIndex Load(const std::filesystem::path& path);

 private:
  size_t dimension_;
  std::string provider_id_;
  std::vector<IndexEntry> entries_;
  std::unordered_set<std::string> ids_;
};

}  // namespace legalrag
