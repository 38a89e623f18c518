#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dialsim/core/dialog_act.hpp"
#include "dialsim/kb/knowledge_base.hpp"

namespace dialsim::dst {

struct DialogState {
  int turn = -1;
  std::optional<core::DialogAct> last_user_act;
  std::optional<core::DialogAct> last_agent_act;
  core::SlotValues user_constraints;
  core::SlotSet user_requests_seen;
  core::SlotValues agent_informed;
  kb::QueryResult kb_result;
  std::vector<core::DialogAct> history;
};

/// Dimension of the feature vector: 2|I| + 7|S| + 3.
std::size_t feature_dim(const core::DomainSchema& schema);

/// Agent-side tracker. Holds references; schema and KB must outlive it.
class StateTracker {
 public:
  StateTracker(const core::DomainSchema& schema, const kb::KnowledgeBase& kb);

  void reset();

  /// Applies one act. User acts are absorbed as delivered. Agent acts are
  /// value-corrected against the KB first; the corrected act is returned and
  /// is what the user receives. Throws std::logic_error on a parity or
  /// alternation violation.
  core::DialogAct update(const core::DialogAct& act);

  const DialogState& state() const { return state_; }

  /// Constraints usable for KB search: informable, non-pseudo user values.
  core::SlotValues search_constraints() const;
  std::vector<std::string> suggested_values(const std::string& slot) const;

  /// request(s) for every content slot, inform(s) for the same slots,
  /// inform(taskcomplete), thanks(), closing(), in registry order.
  std::size_t action_space_size() const { return 2 * content_.size() + 3; }
  /// Concrete act for an abstract index, turn set to the next agent turn.
  core::DialogAct materialize_agent_action(std::size_t index) const;
  /// Index of the abstract action an agent act corresponds to, if any.
  std::optional<std::size_t> action_index_of(const core::DialogAct& act) const;

  std::vector<double> featurize() const;

  const core::DomainSchema& schema() const { return *schema_; }
  const kb::KnowledgeBase& kb() const { return *kb_; }

 private:
  std::string corrected_value(const std::string& slot, const std::string& value) const;
  int next_agent_turn() const;

  const core::DomainSchema* schema_;
  const kb::KnowledgeBase* kb_;
  std::vector<std::string> content_;
  DialogState state_;
};

}  // namespace dialsim::dst
