#include "legalrag/vector_index.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "legalrag/error.hpp"

namespace legalrag {
namespace {

constexpr char kMagic[8] = {'L', 'R', 'A', 'G', 'V', 'I', 'D', 'X'};
constexpr size_t kHeaderSize = 8 + 4 + 4 + 8 + 8;

class Writer {
 public:
  void U8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) U8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) U8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void I32(int32_t v) { U32(static_cast<uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<uint64_t>(v)); }
  void Str(const std::string& s) {
    U32(static_cast<uint32_t>(s.size()));
    buf_.append(s);
  }
  void Raw(const std::string& s) { buf_.append(s); }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const std::string& buf, size_t pos, size_t end) : buf_(buf), pos_(pos), end_(end) {}

  uint8_t U8() {
    Need(1);
    return static_cast<uint8_t>(buf_[pos_++]);
  }
  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(buf_[pos_++])) << (8 * i);
    return v;
  }
  uint64_t U64() {
    Need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(buf_[pos_++])) << (8 * i);
    return v;
  }
  int32_t I32() { return static_cast<int32_t>(U32()); }
  double F64() { return std::bit_cast<double>(U64()); }
  std::string Str() {
    const uint32_t n = U32();
    Need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void Skip(size_t n) {
    Need(n);
    pos_ += n;
  }
  size_t pos() const { return pos_; }
  bool done() const { return pos_ == end_; }

 private:
  void Need(size_t n) const {
    if (end_ - pos_ < n) throw Error(ErrorCode::kCorruptIndexFile, "index file truncated");
  }

  const std::string& buf_;
  size_t pos_;
  size_t end_;
};

}  // namespace

VectorIndex::VectorIndex(size_t dimension, std::string provider_id)
    : dimension_(dimension), provider_id_(std::move(provider_id)) {
  if (dimension_ == 0) throw Error(ErrorCode::kInvalidArgument, "index dimension must be positive");
}

void VectorIndex::Add(std::vector<IndexEntry> entries) {
  std::unordered_set<std::string> incoming;
  for (const auto& e : entries) {
    if (e.vector.dimension() != dimension_) {
      throw Error(ErrorCode::kDimensionMismatch, "entry '" + e.chunk_id + "' has dimension " +
                                                     std::to_string(e.vector.dimension()) + ", index has " +
                                                     std::to_string(dimension_));
    }
    if (ids_.contains(e.chunk_id) || !incoming.insert(e.chunk_id).second) {
      throw Error(ErrorCode::kDuplicateChunkId, "duplicate chunk_id '" + e.chunk_id + "'");
    }
  }
  ids_.merge(incoming);
  entries_.insert(entries_.end(), std::make_move_iterator(entries.begin()),
                  std::make_move_iterator(entries.end()));
}

std::vector<SearchHit> VectorIndex::Search(const EmbeddingVector& query, size_t k) const {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  if (query.dimension() != dimension_) {
    throw Error(ErrorCode::kDimensionMismatch, "query dimension " + std::to_string(query.dimension()) +
                                                   " does not match index dimension " +
                                                   std::to_string(dimension_));
  }
  struct Scored {
    double score;
    const IndexEntry* entry;
  };
  std::vector<Scored> scored;
  scored.reserve(entries_.size());
  for (const auto& e : entries_) scored.push_back({CosineSimilarity(query, e.vector), &e});

  const size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    [](const Scored& a, const Scored& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.entry->chunk_id < b.entry->chunk_id;
                    });
  std::vector<SearchHit> hits;
  hits.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const IndexEntry& e = *scored[i].entry;
    hits.push_back({e.chunk_id, scored[i].score, e.text, e.source});
  }
  return hits;
}

void VectorIndex::Save(const std::filesystem::path& path) const {
  Writer body;
  body.Str(provider_id_);
  for (const auto& e : entries_) {
    Writer rec;
    rec.Str(e.chunk_id);
    rec.Str(e.source.doc_id);
    rec.U8(e.source.article_number ? 1 : 0);
    rec.I32(e.source.article_number.value_or(0));
    rec.Str(e.source.qa_id);
    for (double v : e.vector.values()) rec.F64(v);
    rec.Str(e.text);
    body.U32(static_cast<uint32_t>(rec.buffer().size()));
    body.Raw(rec.buffer());
  }

  Writer file;
  file.Raw(std::string(kMagic, sizeof(kMagic)));
  file.U32(kIndexFormatVersion);
  file.U32(static_cast<uint32_t>(dimension_));
  file.U64(entries_.size());
  file.U64(StableHash64(body.buffer()));
  file.Raw(body.buffer());

  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out.write(file.buffer().data(), static_cast<std::streamsize>(file.buffer().size()));
    if (!out) throw Error(ErrorCode::kIoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot move index into place: " + ec.message());
}

VectorIndex VectorIndex::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open index " + path.string());
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < kHeaderSize || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kCorruptIndexFile, path.string() + " is not an index file");
  }
  Reader header(buf, sizeof(kMagic), kHeaderSize);
  const uint32_t version = header.U32();
  if (version != kIndexFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch, "index format version " + std::to_string(version) +
                                                 ", expected " + std::to_string(kIndexFormatVersion));
  }
  const uint32_t dimension = header.U32();
  const uint64_t count = header.U64();
  const uint64_t checksum = header.U64();
  if (StableHash64(std::string_view(buf).substr(kHeaderSize)) != checksum) {
    throw Error(ErrorCode::kCorruptIndexFile, path.string() + ": checksum mismatch");
  }
  if (dimension == 0) throw Error(ErrorCode::kCorruptIndexFile, "index header has dimension 0");

  Reader body(buf, kHeaderSize, buf.size());
  VectorIndex index(dimension, body.Str());
  std::vector<IndexEntry> entries;
  entries.reserve(static_cast<size_t>(std::min<uint64_t>(count, buf.size())));
  for (uint64_t i = 0; i < count; ++i) {
    const uint32_t len = body.U32();
    const size_t start = body.pos();
    if (buf.size() - start < len) throw Error(ErrorCode::kCorruptIndexFile, "index record truncated");
    Reader rec(buf, start, start + len);
    IndexEntry e;
    e.chunk_id = rec.Str();
    e.source.doc_id = rec.Str();
    const bool has_article = rec.U8() != 0;
    const int32_t article = rec.I32();
    if (has_article) e.source.article_number = article;
    e.source.qa_id = rec.Str();
    std::vector<double> values(dimension);
    for (double& v : values) v = rec.F64();
    e.vector = EmbeddingVector::FromNormalized(std::move(values));
    e.text = rec.Str();
    if (!rec.done()) throw Error(ErrorCode::kCorruptIndexFile, "index record has trailing bytes");
    entries.push_back(std::move(e));
    body.Skip(len);
  }
  if (!body.done()) throw Error(ErrorCode::kCorruptIndexFile, "index file has trailing bytes");
  try {
    index.Add(std::move(entries));
  } catch (const Error& e) {
    throw Error(ErrorCode::kCorruptIndexFile, std::string("index content invalid: ") + e.what());
  }
  return index;
}

}  // namespace legalrag
