#pragma once

#include <memory>
#include <optional>

#include "dialsim/agents/agent.hpp"
#include "dialsim/rl/q_network.hpp"

namespace dialsim::rl {

/// Epsilon-greedy DQN agent (agt = 9). The network is shared read-only
/// between clones; the trainer mutates it only between simulation phases.
class DqnAgent : public agents::Agent {
 public:
  DqnAgent(std::shared_ptr<const QNetwork> net, double epsilon, bool warm_start);

  void initialize_episode(std::uint64_t seed) override;
  agents::AgentResponse state_to_action(const dst::StateTracker& tracker) override;
  std::unique_ptr<agents::Agent> clone() const override { return std::make_unique<DqnAgent>(*this); }
  std::string name() const override { return "dqn"; }
  std::optional<std::size_t> last_action_index() const override { return last_action_; }

  /// With probability epsilon a uniform action; otherwise the request_basics
  /// rule policy while warm-starting, else the greedy action.
  std::size_t run_policy(const std::vector<double>& features, const dst::StateTracker& tracker);

  void set_epsilon(double e) { epsilon_ = e; }
  double epsilon() const { return epsilon_; }
  void set_warm_start(bool on) { warm_start_ = on; }
  bool warm_start() const { return warm_start_; }
  const QNetwork& network() const { return *net_; }

 private:
  std::size_t rule_policy(const dst::StateTracker& tracker);

  std::shared_ptr<const QNetwork> net_;
  double epsilon_;
  bool warm_start_;
  agents::RuleAgent rule_{agents::RuleAgentKind::RequestBasics};
  core::Rng rng_;
  bool initialized_ = false;
  std::optional<std::size_t> last_action_;
};

}  // namespace dialsim::rl
