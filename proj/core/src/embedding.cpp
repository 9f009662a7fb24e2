#include "legalrag/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "legalrag/error.hpp"
#include "legalrag/text.hpp"

namespace legalrag {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

// Uniform on (0, 1]; never 0 so log() below is finite.
double UnitOpen(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot normalize a zero or non-finite vector");
  }
  for (double& v : values_) v /= n;
}

EmbeddingVector EmbeddingVector::FromNormalized(std::vector<double> values) {
  EmbeddingVector v;
  v.values_ = std::move(values);
  return v;
}

double EmbeddingVector::norm() const { return std::sqrt(Dot(values_, values_)); }

EmbeddingVector EmbeddingVector::operator-() const {
  std::vector<double> neg(values_.size());
  std::transform(values_.begin(), values_.end(), neg.begin(), [](double v) { return -v; });
  return FromNormalized(std::move(neg));
}

double CosineSimilarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "cosine of vectors with dimensions " +
                                                   std::to_string(a.dimension()) + " and " +
                                                   std::to_string(b.dimension()));
  }
  return std::clamp(Dot(a.values(), b.values()), -1.0, 1.0);
}

void EmbeddingProviderSpec::Validate() const {
  if (provider_id.empty()) throw Error(ErrorCode::kInvalidArgument, "provider_id is empty");
  if (dimension < 8) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding dimension must be >= 8, got " + std::to_string(dimension));
  }
}

EmbeddingVector EmbeddingProvider::Embed(const std::string& text) {
  return std::move(EmbedBatch({text}).front());
}

uint64_t StableHash64(std::string_view bytes, uint64_t seed) {
  uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

MockEmbeddingProvider::MockEmbeddingProvider(std::string provider_id, size_t dimension)
    : spec_{std::move(provider_id), dimension, ProviderKind::kMock} {
  spec_.Validate();
}

std::vector<EmbeddingVector> MockEmbeddingProvider::EmbedBatch(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::kEmptyText, "embed_batch called with no texts");
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  const uint64_t id_hash = StableHash64(std::string_view("\0", 1), StableHash64(spec_.provider_id));
  for (const auto& t : texts) {
    if (text::IsBlank(t)) throw Error(ErrorCode::kEmptyText, "cannot embed an empty text");
    std::mt19937_64 rng(StableHash64(t, id_hash));
    std::vector<double> values(spec_.dimension);
    for (size_t i = 0; i < values.size(); i += 2) {
      const double radius = std::sqrt(-2.0 * std::log(UnitOpen(rng)));
      const double theta = 2.0 * std::numbers::pi * UnitOpen(rng);
      values[i] = radius * std::cos(theta);
      if (i + 1 < values.size()) values[i + 1] = radius * std::sin(theta);
    }
    out.emplace_back(std::move(values));
  }
  return out;
}

std::unique_ptr<EmbeddingProvider> MakeEmbeddingProvider(const std::string& provider_id, size_t dimension) {
  constexpr std::string_view kRemotePrefix = "remote:";
  if (provider_id.starts_with(kRemotePrefix)) {
    auto options = RemoteEmbeddingOptions::FromEnvironment(provider_id.substr(kRemotePrefix.size()), dimension);
    return std::make_unique<RemoteEmbeddingProvider>(std::move(options));
  }
  return std::make_unique<MockEmbeddingProvider>(provider_id, dimension);
}

}  // namespace legalrag
