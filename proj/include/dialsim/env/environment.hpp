#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dialsim/agents/agent.hpp"
#include "dialsim/core/goal.hpp"
#include "dialsim/corpus/corpus.hpp"
#include "dialsim/kb/knowledge_base.hpp"
#include "dialsim/nlg/templates.hpp"
#include "dialsim/noise/error_model.hpp"

namespace dialsim::env {

struct Experience {
  std::vector<double> s;
  std::size_t a = 0;
  double r = 0.0;
  std::vector<double> s_next;
  bool done = false;

  bool operator==(const Experience&) const = default;
};

struct EpisodeOutcome {
  core::UserGoal goal;
  core::DialogueStatus status = core::DialogueStatus::NoOutcomeYet;
  int total_turns = 0;
  double reward = 0.0;
  std::vector<core::DialogAct> transcript;
  std::vector<Experience> experiences;
};

struct EnvConfig {
  noise::ErrorModelConfig noise;
  /// 0: acts pass directly (error model applies); 1: every user act is
  /// rendered to text and parsed back by the template parser (error model bypassed).
  int act_level = 0;
};

/// Bundles what one episode needs. All referenced objects must outlive it.
class Environment {
 public:
  Environment(const core::DomainSchema& schema, const kb::KnowledgeBase& kb,
              const corpus::GoalDatabase& goals, const nlg::TemplateSet* templates, EnvConfig cfg);

  /// Runs one episode to termination. Reentrant: all mutable state is local.
  EpisodeOutcome run_episode(agents::Agent& agent, std::uint64_t seed, bool record = false,
                             const core::UserGoal* goal = nullptr) const;

  /// What the agent side receives for a user act under the configured level.
  core::DialogAct deliver_user_act(const core::DialogAct& spoken, core::Rng& rng) const;

  const core::DomainSchema& schema() const { return *schema_; }
  const kb::KnowledgeBase& kb() const { return *kb_; }
  const corpus::GoalDatabase& goals() const { return *goals_; }
  const nlg::TemplateSet* templates() const { return templates_; }
  const EnvConfig& config() const { return cfg_; }

 private:
  const core::DomainSchema* schema_;
  const kb::KnowledgeBase* kb_;
  const corpus::GoalDatabase* goals_;
  const nlg::TemplateSet* templates_;
  EnvConfig cfg_;
};

/// Episode i runs on a clone of `prototype` with seed seeds[i]; results are in
/// index order and identical between the two versions.
std::vector<EpisodeOutcome> run_episodes(const Environment& env, const agents::Agent& prototype,
                                         const std::vector<std::uint64_t>& seeds, bool record);
std::vector<EpisodeOutcome> run_episodes_serial(const Environment& env,
                                                const agents::Agent& prototype,
                                                const std::vector<std::uint64_t>& seeds,
                                                bool record);

struct Metrics {
  double success_rate = 0.0;
  double avg_reward = 0.0;
  double avg_turns = 0.0;
  std::size_t episodes = 0;
};

Metrics summarize(const std::vector<EpisodeOutcome>& outcomes);

}  // namespace dialsim::env
