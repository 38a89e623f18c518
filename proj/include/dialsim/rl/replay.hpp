#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "dialsim/core/random.hpp"
#include "dialsim/env/environment.hpp"

namespace dialsim::rl {

/// FIFO experience pool; the oldest transition is dropped at capacity.
class ReplayPool {
 public:
  explicit ReplayPool(std::size_t capacity);

  void add(env::Experience e);
  void clear() { items_.clear(); }
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  bool full() const { return items_.size() >= capacity_; }
  const env::Experience& operator[](std::size_t i) const { return items_[i]; }

  /// Uniform draws with replacement.
  std::vector<const env::Experience*> sample(std::size_t n, core::Rng& rng) const;

 private:
  std::size_t capacity_;
  std::deque<env::Experience> items_;
};

/// Decides when the pool is flushed after an epoch's evaluation. Until the
/// success rate first reaches the threshold the pool only accumulates; the
/// first crossing flushes; afterwards a flush needs a rate strictly above the
/// best seen so far.
class FlushPolicy {
 public:
  explicit FlushPolicy(double threshold);

  /// Feeds one evaluated success rate; returns true when the pool is to be flushed.
  bool observe(double success_rate);

  bool crossed() const { return crossed_; }
  double best() const { return best_; }
  double threshold() const { return threshold_; }

 private:
  double threshold_;
  bool crossed_ = false;
  double best_ = 0.0;
};

}  // namespace dialsim::rl
