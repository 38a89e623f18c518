#include "dialsim/rl/dqn_agent.hpp"

#include <stdexcept>

namespace dialsim::rl {

DqnAgent::DqnAgent(std::shared_ptr<const QNetwork> net, double epsilon, bool warm_start)
    : net_(std::move(net)), epsilon_(epsilon), warm_start_(warm_start) {
  if (!net_) throw std::invalid_argument("DqnAgent needs a network");
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must lie in [0, 1]");
}

void DqnAgent::initialize_episode(std::uint64_t seed) {
  rng_.seed(seed);
  rule_.initialize_episode(seed);
  initialized_ = true;
  last_action_.reset();
}

std::size_t DqnAgent::rule_policy(const dst::StateTracker& tracker) {
  // Past its script the rule agent would raise; finish the dialogue instead.
  if (rule_.exhausted()) return tracker.action_space_size() - 2;
  auto act = rule_.state_to_action(tracker).act_slot_response;
  auto idx = tracker.action_index_of(act);
  if (!idx) throw std::logic_error("rule policy act outside the action space: " + core::format_act(act));
  return *idx;
}

std::size_t DqnAgent::run_policy(const std::vector<double>& features,
                                 const dst::StateTracker& tracker) {
  if (epsilon_ > 0.0 && core::bernoulli(rng_, epsilon_))
    return core::uniform_index(rng_, net_->out_dim());
  if (warm_start_) return rule_policy(tracker);
  return net_->greedy_action(features);
}

agents::AgentResponse DqnAgent::state_to_action(const dst::StateTracker& tracker) {
  if (!initialized_) throw std::logic_error("state_to_action before initialize_episode");
  if (net_->out_dim() != tracker.action_space_size())
    throw std::invalid_argument("network output size does not match the action space");
  const auto idx = run_policy(tracker.featurize(), tracker);
  last_action_ = idx;
  return {tracker.materialize_agent_action(idx), std::nullopt};
}

}  // namespace dialsim::rl
