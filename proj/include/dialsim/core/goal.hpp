#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialsim/core/dialog_act.hpp"

namespace dialsim::core {

/// Constraints (inform_slots) and requests (request_slots) a simulated user pursues.
struct UserGoal {
  SlotValues inform_slots;
  SlotSet request_slots;

  bool operator==(const UserGoal&) const = default;
};

enum class DialogueStatus { NoOutcomeYet, Success, Failure };

std::string to_string(DialogueStatus s);

/// {"inform_slots": {...}, "request_slots": {"ticket": "UNK", ...}}
nlohmann::json to_json(const UserGoal& goal);
UserGoal goal_from_json(const nlohmann::json& j);

/// Canonical string used for deduplication; std::map ordering makes it stable.
std::string canonical_key(const UserGoal& goal);

/// Empty when the goal satisfies every invariant against the schema.
std::vector<std::string> goal_violations(const DomainSchema& schema, const UserGoal& goal);

}  // namespace dialsim::core
