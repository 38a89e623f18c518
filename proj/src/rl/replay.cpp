#include "dialsim/rl/replay.hpp"

#include <stdexcept>

namespace dialsim::rl {

ReplayPool::ReplayPool(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay pool capacity must be positive");
}

void ReplayPool::add(env::Experience e) {
  items_.push_back(std::move(e));
  while (items_.size() > capacity_) items_.pop_front();
}

std::vector<const env::Experience*> ReplayPool::sample(std::size_t n, core::Rng& rng) const {
  if (items_.empty()) throw std::logic_error("sampling from an empty replay pool");
  std::vector<const env::Experience*> out(n);
  for (auto& p : out) p = &items_[core::uniform_index(rng, items_.size())];
  return out;
}

FlushPolicy::FlushPolicy(double threshold) : threshold_(threshold) {
  if (threshold < 0.0 || threshold > 1.0) throw std::invalid_argument("flush threshold must lie in [0, 1]");
}

bool FlushPolicy::observe(double success_rate) {
  if (!crossed_) {
    if (success_rate < threshold_) return false;
    crossed_ = true;
    best_ = success_rate;
    return true;
  }
  if (success_rate > best_) {
    best_ = success_rate;
    return true;
  }
  return false;
}

}  // namespace dialsim::rl
