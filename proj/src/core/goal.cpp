#include "dialsim/core/goal.hpp"

namespace dialsim::core {

std::string to_string(DialogueStatus s) {
  switch (s) {
    case DialogueStatus::NoOutcomeYet: return "no_outcome_yet";
    case DialogueStatus::Success: return "success";
    case DialogueStatus::Failure: return "failure";
  }
  return "unknown";
}

nlohmann::json to_json(const UserGoal& goal) {
  nlohmann::json req = nlohmann::json::object();
  for (const auto& r : goal.request_slots) req[r] = kUnknownValue;
  return {{"inform_slots", goal.inform_slots}, {"request_slots", req}};
}

UserGoal goal_from_json(const nlohmann::json& j) {
  try {
    UserGoal g;
    if (j.contains("inform_slots")) g.inform_slots = j.at("inform_slots").get<SlotValues>();
    if (j.contains("request_slots")) {
      const auto& r = j.at("request_slots");
      if (r.is_array()) {
        for (const auto& s : r) g.request_slots.insert(s.get<std::string>());
      } else {
        for (auto it = r.begin(); it != r.end(); ++it) g.request_slots.insert(it.key());
      }
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed goal: ") + e.what());
  }
}

std::string canonical_key(const UserGoal& goal) { return to_json(goal).dump(); }

std::vector<std::string> goal_violations(const DomainSchema& schema, const UserGoal& goal) {
  std::vector<std::string> out;
  for (const auto& [slot, value] : goal.inform_slots) {
    if (!schema.is_informable(slot)) out.push_back("constraint slot not informable: " + slot);
    if (DomainSchema::is_pseudo(slot)) out.push_back("pseudo slot in goal: " + slot);
    if (goal.request_slots.count(slot)) out.push_back("slot both constrained and requested: " + slot);
  }
  for (const auto& slot : goal.request_slots) {
    if (!schema.is_requestable(slot)) out.push_back("request slot not requestable: " + slot);
  }
  for (const auto& req : schema.required_slots()) {
    if (!goal.inform_slots.count(req) && !goal.request_slots.count(req))
      out.push_back("missing required slot: " + req);
  }
  if (!goal.request_slots.count(schema.default_request_slot()))
    out.push_back("missing default request slot: " + schema.default_request_slot());
  return out;
}

}  // namespace dialsim::core
