#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dialsim/core/dialog_act.hpp"
#include "dialsim/core/random.hpp"
#include "dialsim/dst/state_tracker.hpp"
#include "dialsim/nlg/templates.hpp"

namespace dialsim::agents {

struct AgentResponse {
  core::DialogAct act_slot_response;
  std::optional<core::DialogAct> act_slot_value_response;
};

class Agent {
 public:
  virtual ~Agent() = default;

  /// Resets per-episode state. `seed` feeds any per-episode randomness.
  virtual void initialize_episode(std::uint64_t seed) = 0;
  /// Throws std::logic_error when called before initialize_episode.
  virtual AgentResponse state_to_action(const dst::StateTracker& tracker) = 0;
  /// Independent copy for running another episode concurrently; learned
  /// parameters may be shared read-only.
  virtual std::unique_ptr<Agent> clone() const = 0;
  virtual std::string name() const = 0;

  /// Abstract action index of the last response, when the agent has one.
  virtual std::optional<std::size_t> last_action_index() const { return std::nullopt; }
};

enum class RuleAgentKind { InformAll, RequestAll, RandomRequest, Echo, RequestBasics };

std::string to_string(RuleAgentKind k);
/// CLI selector 1..5, in the order listed above.
RuleAgentKind rule_kind_from_agt(int agt);

inline const std::vector<std::string>& request_basics_set() {
  static const std::vector<std::string> set{"moviename", "starttime", "city",
                                            "date",      "theater",   "numberofpeople"};
  return set;
}

/// The five baselines.
class RuleAgent : public Agent {
 public:
  explicit RuleAgent(RuleAgentKind kind) : kind_(kind) {}

  void initialize_episode(std::uint64_t seed) override;
  AgentResponse state_to_action(const dst::StateTracker& tracker) override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<RuleAgent>(*this); }
  std::string name() const override { return to_string(kind_); }
  RuleAgentKind kind() const { return kind_; }
  /// request_basics only: true once thanks() has been issued.
  bool exhausted() const { return phase_ >= 2; }

 private:
  core::DialogAct inform_from_tracker(const dst::StateTracker& tracker, const std::string& slot,
                                      int turn) const;

  RuleAgentKind kind_;
  bool initialized_ = false;
  std::size_t cursor_ = 0;
  int phase_ = 0;
  core::Rng rng_;
};

/// Human agent (agt = 0): reads acts or natural language from a stream and
/// shows the user's turns and suggested values on another.
class CommandLineAgent : public Agent {
 public:
  enum class InputMode { NaturalLanguage = 0, DialogAct = 1 };

  CommandLineAgent(std::istream& in, std::ostream& out, InputMode mode,
                   const nlg::TemplateSet* templates);

  void initialize_episode(std::uint64_t seed) override;
  AgentResponse state_to_action(const dst::StateTracker& tracker) override;
  std::unique_ptr<Agent> clone() const override;
  std::string name() const override { return "command_line"; }

 private:
  std::istream* in_;
  std::ostream* out_;
  InputMode mode_;
  const nlg::TemplateSet* templates_;
  bool initialized_ = false;
};

/// "(Suggested Values: {'theater': ['carmike summit 16']})" for the slots
/// the last user act requests; empty string when it requests nothing.
std::string suggestion_line(const dst::StateTracker& tracker);

}  // namespace dialsim::agents
