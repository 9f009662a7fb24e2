#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <string>

#include "legalrag/error.hpp"

namespace legalrag {

/// Exponential backoff: attempt k (1-based) that failed waits
/// initial_backoff * multiplier^(k-1), capped at max_backoff.
struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{2000};

  std::chrono::milliseconds BackoffAfter(int failed_attempt) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Real sleep. Tests substitute a recorder.
Sleeper ThreadSleeper();

/// Runs `op` until it succeeds, throws a non-retryable error, or the policy is
/// exhausted; exhaustion surfaces as Error{kProviderUnavailable}.
template <typename Op>
auto CallWithRetry(const RetryPolicy& policy, const Sleeper& sleep, const std::string& what, Op&& op)
    -> decltype(op()) {
  std::string last;
  for (int attempt = 1;; ++attempt) {
    try {
      return op();
    } catch (const Error& e) {
      if (!e.retryable()) throw;
      last = e.what();
      if (attempt >= policy.max_attempts) break;
    }
    sleep(policy.BackoffAfter(attempt));
  }
  throw Error(ErrorCode::kProviderUnavailable,
              what + " unavailable after " + std::to_string(policy.max_attempts) + " attempts: " + last);
}

/// Caps concurrent requests against one backend.
class InflightLimiter {
 public:
  explicit InflightLimiter(size_t limit);

  class Slot {
   public:
    explicit Slot(InflightLimiter& owner) : owner_(owner) { owner_.Acquire(); }
    ~Slot() { owner_.Release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    InflightLimiter& owner_;
  };

  size_t limit() const { return limit_; }
  /// Highest number of simultaneously held slots seen so far.
  size_t peak() const;

 private:
  void Acquire();
  void Release();

  const size_t limit_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  size_t in_use_ = 0;
  size_t peak_ = 0;
};

}  // namespace legalrag
