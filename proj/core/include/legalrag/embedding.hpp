#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "legalrag/retry.hpp"

namespace legalrag {

/// Unit-norm embedding. Construction normalizes; a zero vector is rejected.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values);

  /// Wraps values that are already unit norm (e.g. read back from an index
  /// file) without renormalizing, so round trips are bit-exact.
  static EmbeddingVector FromNormalized(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  size_t dimension() const { return values_.size(); }
  double norm() const;

  EmbeddingVector operator-() const;
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

/// Dot product of two unit vectors, clamped to [-1, 1].
/// Throws Error{kDimensionMismatch}.
double CosineSimilarity(const EmbeddingVector& a, const EmbeddingVector& b);

enum class ProviderKind { kMock, kRemote };

struct EmbeddingProviderSpec {
  std::string provider_id;
  size_t dimension = 64;
  ProviderKind kind = ProviderKind::kMock;

  void Validate() const;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual const EmbeddingProviderSpec& spec() const = 0;

  /// One vector per text, order preserved. Throws Error{kEmptyText} for an
  /// empty list or blank element, Error{kProviderUnavailable} on transport
  /// failure after retries.
  virtual std::vector<EmbeddingVector> EmbedBatch(const std::vector<std::string>& texts) = 0;

  EmbeddingVector Embed(const std::string& text);
};

/// FNV-1a, 64 bit. Stable across platforms; used to seed the mock provider and
/// to checksum index files.
uint64_t StableHash64(std::string_view bytes, uint64_t seed = 0xcbf29ce484222325ULL);

// Deterministic stand-in: seeds mt19937_64 from a hash of (provider_id, text),
// draws `dimension` standard normals by Box-Muller and normalizes. The result
// is uniform on the sphere and depends on nothing but its inputs.
class MockEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit MockEmbeddingProvider(std::string provider_id = "mock", size_t dimension = 64);

  const EmbeddingProviderSpec& spec() const override { return spec_; }
  std::vector<EmbeddingVector> EmbedBatch(const std::vector<std::string>& texts) override;

 private:
  EmbeddingProviderSpec spec_;
};

struct RemoteEmbeddingOptions {
  std::string url;      // EMBED_API_URL
  std::string api_key;  // EMBED_API_KEY
  std::string model = "text-embedding-3-small";
  size_t dimension = 1536;
  size_t max_inflight = 4;
  size_t max_batch = 64;
  RetryPolicy retry;
  std::chrono::milliseconds timeout{30000};
  Sleeper sleeper = ThreadSleeper();

  /// Fills url and api_key from the environment. Throws Error{kInvalidArgument}
  /// when EMBED_API_URL is unset.
  static RemoteEmbeddingOptions FromEnvironment(std::string model, size_t dimension);
};

// POST {"input": [...], "model": "..."}; reads data[i].embedding (ordered by
// data[i].index when present) and normalizes each vector.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingProvider(RemoteEmbeddingOptions options);
  ~RemoteEmbeddingProvider() override;

  const EmbeddingProviderSpec& spec() const override { return spec_; }
  std::vector<EmbeddingVector> EmbedBatch(const std::vector<std::string>& texts) override;

  const InflightLimiter& limiter() const { return limiter_; }

 private:
  std::vector<EmbeddingVector> EmbedOnce(std::span<const std::string> texts);

  RemoteEmbeddingOptions options_;
  EmbeddingProviderSpec spec_;
  InflightLimiter limiter_;
};

/// Builds the provider that produced an index: "mock" style ids map to the
/// mock provider, "remote:<model>" to the remote one configured from the
/// environment.
std::unique_ptr<EmbeddingProvider> MakeEmbeddingProvider(const std::string& provider_id, size_t dimension);

}  // namespace legalrag
