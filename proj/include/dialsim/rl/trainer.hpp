#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialsim/env/environment.hpp"
#include "dialsim/rl/dqn_agent.hpp"
#include "dialsim/rl/q_network.hpp"
#include "dialsim/rl/replay.hpp"

namespace dialsim::rl {

enum class WarmStart { Off, RuleFill };

struct TrainerConfig {
  double gamma = 0.9;
  double epsilon = 0.1;
  std::size_t batch_size = 16;
  std::size_t num_batches = 100;
  std::size_t simulation_epoch_size = 16;  // N
  int epochs = 100;
  double success_rate_threshold = 0.30;
  std::size_t buffer_capacity = 1000;
  double learning_rate = 0.01;
  std::size_t hidden_width = 80;
  WarmStart warm_start = WarmStart::RuleFill;
  std::size_t eval_episodes = 50;
  double grad_clip = 1.0;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

nlohmann::json to_json(const TrainerConfig& c);
TrainerConfig trainer_config_from_json(const nlohmann::json& j);

struct EpochMetrics {
  int epoch = 0;
  double success_rate = 0.0;
  double avg_reward = 0.0;
  double avg_turns = 0.0;
  std::size_t buffer_size = 0;
  bool flushed = false;
  double loss = 0.0;
};

/// Runs `episodes` episodes of `agent` as configured (pass an epsilon-0 agent
/// for greedy evaluation) without recording. Seeds derive from `seed`.
env::Metrics evaluate(const env::Environment& env, const agents::Agent& agent,
                      std::size_t episodes, std::uint64_t seed);

/// Fraction of goals the KB can satisfy: the ceiling on success rate.
double compute_upper_bound(const corpus::GoalDatabase& goals, const kb::KnowledgeBase& kb);

class Trainer {
 public:
  Trainer(const env::Environment& env, TrainerConfig cfg);

  /// Rule-fills the pool up to capacity (no-op when warm start is off).
  void warm_start();
  /// One epoch: simulate N, train, evaluate greedily, maybe flush and
  /// re-fill, then copy the network into the target.
  EpochMetrics run_epoch(int epoch);
  /// warm_start() followed by cfg.epochs epochs; `on_epoch` sees each result.
  std::vector<EpochMetrics> train(const std::function<void(const EpochMetrics&)>& on_epoch = {});

  /// Training updates for one epoch over the current pool; returns mean loss.
  double train_on_pool();

  const QNetwork& network() const { return *net_; }
  QNetwork& mutable_network() { return *net_; }
  const QNetwork& target_network() const { return target_; }
  const ReplayPool& pool() const { return pool_; }
  ReplayPool& pool() { return pool_; }
  const TrainerConfig& config() const { return cfg_; }
  const FlushPolicy& flush_policy() const { return flush_; }
  /// An agent over the current network; epsilon 0 and no warm start when greedy.
  DqnAgent agent(bool greedy) const;

 private:
  void simulate_into_pool(std::size_t episodes, std::uint64_t stream, int epoch);

  const env::Environment* env_;
  TrainerConfig cfg_;
  std::shared_ptr<QNetwork> net_;
  QNetwork target_;
  ReplayPool pool_;
  FlushPolicy flush_;
  core::Rng rng_;
};

/// JSON checkpoint: layout descriptor, shapes, parameters and trainer config.
void save_checkpoint(const std::filesystem::path& path, const QNetwork& net,
                     const TrainerConfig& cfg, const dst::StateTracker& layout);

struct Checkpoint {
  QNetwork net;
  TrainerConfig config;
  nlohmann::json layout;
};

/// Throws core::SchemaError when the file is malformed or, with `layout`
/// given, when the stored layout differs from it.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const dst::StateTracker* layout = nullptr);

nlohmann::json layout_descriptor(const dst::StateTracker& tracker);

inline constexpr const char* kCurveHeader = "epoch,success_rate,avg_reward,avg_turns,buffer_size,flushed";
void write_curve_csv(std::ostream& out, const std::vector<EpochMetrics>& rows);

}  // namespace dialsim::rl
