#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialsim/core/schema.hpp"

namespace dialsim::core {

enum class Speaker { User, Agent };

std::string to_string(Speaker s);
Speaker speaker_from_string(std::string_view s);

using SlotValues = std::map<std::string, std::string>;
using SlotSet = std::set<std::string>;

/// One turn's semantic frame: a single intent, inform pairs and requested slots.
struct DialogAct {
  Speaker speaker = Speaker::User;
  std::string intent;
  SlotValues inform_slots;
  SlotSet request_slots;
  int turn = 0;
  std::optional<std::string> nl;

  /// Equality ignores the surface string.
  bool operator==(const DialogAct& o) const {
    return speaker == o.speaker && intent == o.intent && inform_slots == o.inform_slots &&
           request_slots == o.request_slots && turn == o.turn;
  }
  bool same_content(const DialogAct& o) const {
    return speaker == o.speaker && intent == o.intent && inform_slots == o.inform_slots &&
           request_slots == o.request_slots;
  }
};

DialogAct make_act(Speaker speaker, std::string intent, SlotValues informs = {},
                   SlotSet requests = {}, int turn = 0);

/// Request slots serialize as {"slot": "UNK"} to keep the familiar dump shape.
nlohmann::json to_json(const DialogAct& act);
DialogAct act_from_json(const nlohmann::json& j);

/// Compact bracket form used on the console and in run_mode 1 logs, e.g.
/// `inform(theater=carmike summit 16)` or `request(city)`. Values containing
/// delimiter characters are double-quoted.
std::string format_act(const DialogAct& act);

/// Inverse of format_act. A bare slot is a request slot, except under an
/// inform intent where it becomes an inform slot with an empty value for the
/// state tracker to fill. `slot=UNK` is always a request slot.
/// Throws SchemaError on syntax errors.
DialogAct parse_act(std::string_view text, Speaker speaker, int turn = 0);

enum class Violation {
  UnknownIntent,
  UnknownSlot,
  Disjointness,
  TurnParity,
};

std::string to_string(Violation v);

struct ValidationIssue {
  Violation kind;
  std::string detail;
};

struct ValidationResult {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  bool has(Violation v) const;
};

ValidationResult validate_act(const DomainSchema& schema, const DialogAct& act);

}  // namespace dialsim::core
