#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "dialsim/core/dialog_act.hpp"
#include "dialsim/core/goal.hpp"
#include "dialsim/core/random.hpp"
#include "dialsim/corpus/corpus.hpp"
#include "dialsim/kb/knowledge_base.hpp"
#include "dialsim/noise/error_model.hpp"

namespace dialsim::usersim {

struct AgendaItem {
  enum class Kind { Inform, Request };
  Kind kind;
  std::string slot;

  bool operator==(const AgendaItem&) const = default;
};

struct UserState {
  core::UserGoal goal;
  /// Constraints not yet conveyed and requests not yet asked; front is next.
  std::deque<AgendaItem> agenda;
  /// Values the user has conveyed or received.
  core::SlotValues history_slots;
  /// The frame being emitted this turn.
  std::string intent;
  core::SlotValues inform_slots;
  core::SlotSet request_slots;
  /// Everything the agent has informed, latest value per slot.
  core::SlotValues agent_offered;
  /// Goal request slots the agent has answered; the default request slot
  /// (ticket) enters only through a passed booking check.
  core::SlotSet answered;
  /// Result of the most recent inform(taskcomplete) check.
  std::optional<bool> booking_passed;
  bool closing_pending = false;
  int turn = 0;
  bool episode_over = false;
  core::DialogueStatus status = core::DialogueStatus::NoOutcomeYet;
};

struct StepResult {
  core::DialogAct act;     // as delivered: error model applied when enabled
  core::DialogAct spoken;  // the simulator's own, uncorrupted act
  bool episode_over = false;
  core::DialogueStatus status = core::DialogueStatus::NoOutcomeYet;
};

/// Per agent action: -1; on the terminal action additionally +2*max_turn for
/// success or -max_turn for failure.
double turn_reward(bool episode_over, core::DialogueStatus status, int max_turn);

/// Agenda-based rule user simulator.
///
/// Holds references to the schema and KB; both must outlive the simulator.
class UserSimulator {
 public:
  UserSimulator(const core::DomainSchema& schema, const kb::KnowledgeBase& kb);

  /// Samples a goal uniformly and produces the opening user act (turn 0).
  core::DialogAct initialize_episode(const corpus::GoalDatabase& goals, core::Rng& rng);
  core::DialogAct initialize_episode(const core::UserGoal& goal, core::Rng& rng);

  /// Consumes the agent's act and generates the next user act.
  StepResult next(const core::DialogAct& system_action, core::Rng& rng,
                  const noise::ErrorModelConfig* noise = nullptr);

  /// Throws std::logic_error if the episode has not ended.
  core::DialogueStatus evaluate_final_status() const;

  /// Whether the agent's current commitments form a correct, bookable ticket.
  bool booking_is_correct() const;

  const UserState& state() const { return state_; }
  core::DialogAct current_act() const;

 private:
  core::DialogueStatus final_status() const;
  void emit(std::string intent, core::SlotValues informs = {}, core::SlotSet requests = {});
  void drop_from_agenda(AgendaItem::Kind kind, const std::string& slot);
  std::vector<std::string> unanswered_requests() const;
  void next_agenda_act();
  void respond_request(const core::DialogAct& act);
  void respond_inform(const core::DialogAct& act);
  void respond_taskcomplete(const std::string& value);
  void respond_multiple_choice(const core::DialogAct& act, core::Rng& rng);
  void finish(core::DialogueStatus status, std::string closing_intent);
  bool value_matches(const std::string& constraint, const std::string& value) const;

  const core::DomainSchema* schema_;
  const kb::KnowledgeBase* kb_;
  UserState state_;
};

}  // namespace dialsim::usersim
