#include "legalrag/retry.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace legalrag {

std::chrono::milliseconds RetryPolicy::BackoffAfter(int failed_attempt) const {
  const double factor = std::pow(multiplier, std::max(0, failed_attempt - 1));
  const auto ms = static_cast<long long>(static_cast<double>(initial_backoff.count()) * factor);
  return std::min(std::chrono::milliseconds(ms), max_backoff);
}

Sleeper ThreadSleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

InflightLimiter::InflightLimiter(size_t limit) : limit_(std::max<size_t>(1, limit)) {}

size_t InflightLimiter::peak() const {
  std::lock_guard lock(mu_);
  return peak_;
}

void InflightLimiter::Acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return in_use_ < limit_; });
  ++in_use_;
  peak_ = std::max(peak_, in_use_);
}

void InflightLimiter::Release() {
  {
    std::lock_guard lock(mu_);
    --in_use_;
  }
  cv_.notify_one();
}

}  // namespace legalrag
