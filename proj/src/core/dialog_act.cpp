#include "dialsim/core/dialog_act.hpp"

#include <algorithm>
#include <cctype>

namespace dialsim::core {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool needs_quotes(const std::string& v) {
  if (v.empty()) return true;
  if (std::isspace(static_cast<unsigned char>(v.front())) ||
      std::isspace(static_cast<unsigned char>(v.back())))
    return true;
  return v.find_first_of(",=()\"\\") != std::string::npos;
}

std::string quote(const std::string& v) {
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Splits on top-level commas, honoring double quotes.
std::vector<std::string> split_args(std::string_view body) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (in_quotes) {
      cur.push_back(c);
      if (c == '\\' && i + 1 < body.size()) {
        cur.push_back(body[++i]);
      } else if (c == '"') {
        in_quotes = false;
      }
    } else if (c == '"') {
      in_quotes = true;
      cur.push_back(c);
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (in_quotes) throw SchemaError("unterminated quote in act");
  out.push_back(cur);
  return out;
}

std::string unquote(const std::string& raw) {
  std::string v = trim(raw);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) ++i;
      out.push_back(v[i]);
    }
    return out;
  }
  if (v.find('"') != std::string::npos) throw SchemaError("stray quote in act value: " + v);
  return v;
}

bool is_ident(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::islower(c) || std::isdigit(c) || c == '_';
  });
}

}  // namespace

std::string to_string(Speaker s) { return s == Speaker::User ? "user" : "agent"; }

Speaker speaker_from_string(std::string_view s) {
  if (s == "user" || s == "usr") return Speaker::User;
  if (s == "agent" || s == "sys" || s == "system") return Speaker::Agent;
  throw SchemaError("unknown speaker: " + std::string(s));
}

DialogAct make_act(Speaker speaker, std::string intent, SlotValues informs, SlotSet requests,
                   int turn) {
  DialogAct a;
  a.speaker = speaker;
  a.intent = std::move(intent);
  a.inform_slots = std::move(informs);
  a.request_slots = std::move(requests);
  a.turn = turn;
  return a;
}

nlohmann::json to_json(const DialogAct& act) {
  nlohmann::json req = nlohmann::json::object();
  for (const auto& r : act.request_slots) req[r] = kUnknownValue;
  nlohmann::json j = {{"speaker", to_string(act.speaker)},
                      {"diaact", act.intent},
                      {"inform_slots", act.inform_slots},
                      {"request_slots", req},
                      {"turn", act.turn}};
  if (act.nl) j["nl"] = *act.nl;
  return j;
}

DialogAct act_from_json(const nlohmann::json& j) {
  try {
    DialogAct a;
    a.speaker = speaker_from_string(j.value("speaker", std::string("user")));
    a.intent = j.contains("diaact") ? j.at("diaact").get<std::string>()
                                     : j.at("intent").get<std::string>();
    if (j.contains("inform_slots")) a.inform_slots = j.at("inform_slots").get<SlotValues>();
    if (j.contains("request_slots")) {
      const auto& r = j.at("request_slots");
      if (r.is_array()) {
        for (const auto& s : r) a.request_slots.insert(s.get<std::string>());
      } else {
        for (auto it = r.begin(); it != r.end(); ++it) a.request_slots.insert(it.key());
      }
    }
    a.turn = j.value("turn", 0);
    if (j.contains("nl") && j.at("nl").is_string()) a.nl = j.at("nl").get<std::string>();
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed act: ") + e.what());
  }
}

std::string format_act(const DialogAct& act) {
  std::string out = act.intent + "(";
  bool first = true;
  auto sep = [&] {
    if (!first) out += ", ";
    first = false;
  };
  for (const auto& [slot, value] : act.inform_slots) {
    sep();
    out += slot + "=" + (needs_quotes(value) ? quote(value) : value);
  }
  for (const auto& slot : act.request_slots) {
    sep();
    out += slot;
    if (act.intent == "inform") out += "=" + std::string(kUnknownValue);
  }
  out += ")";
  return out;
}

DialogAct parse_act(std::string_view text, Speaker speaker, int turn) {
  std::string s = trim(text);
  DialogAct act;
  act.speaker = speaker;
  act.turn = turn;
  auto open = s.find('(');
  if (open == std::string::npos) {
    if (!is_ident(s)) throw SchemaError("cannot parse act: '" + s + "'");
    act.intent = s;
    return act;
  }
  if (s.back() != ')') throw SchemaError("act must end with ')': '" + s + "'");
  act.intent = trim(s.substr(0, open));
  if (!is_ident(act.intent)) throw SchemaError("bad intent in act: '" + s + "'");
  std::string body = s.substr(open + 1, s.size() - open - 2);
  if (trim(body).empty()) return act;
  for (const auto& raw : split_args(body)) {
    auto eq = raw.find('=');
    // '=' inside a quoted value is not a separator, but the slot name never contains quotes.
    auto q = raw.find('"');
    if (eq != std::string::npos && q != std::string::npos && q < eq) eq = std::string::npos;
    std::string slot = trim(eq == std::string::npos ? std::string_view(raw)
                                                    : std::string_view(raw).substr(0, eq));
    if (!is_ident(slot)) throw SchemaError("bad slot name in act: '" + raw + "'");
    if (eq == std::string::npos) {
      if (act.intent == "inform") {
        act.inform_slots[slot] = "";
      } else {
        act.request_slots.insert(slot);
      }
      continue;
    }
    std::string value = unquote(raw.substr(eq + 1));
    if (value == kUnknownValue) {
      act.request_slots.insert(slot);
    } else {
      act.inform_slots[slot] = value;
    }
  }
  return act;
}

std::string to_string(Violation v) {
  switch (v) {
    case Violation::UnknownIntent: return "unknown_intent";
    case Violation::UnknownSlot: return "unknown_slot";
    case Violation::Disjointness: return "disjointness";
    case Violation::TurnParity: return "turn_parity";
  }
  return "unknown";
}

bool ValidationResult::has(Violation v) const {
  return std::any_of(issues.begin(), issues.end(), [v](const auto& i) { return i.kind == v; });
}

ValidationResult validate_act(const DomainSchema& schema, const DialogAct& act) {
  ValidationResult r;
  if (!schema.has_intent(act.intent))
    r.issues.push_back({Violation::UnknownIntent, act.intent});
  for (const auto& [slot, value] : act.inform_slots) {
    if (!schema.has_slot(slot)) r.issues.push_back({Violation::UnknownSlot, slot});
    if (act.request_slots.count(slot)) r.issues.push_back({Violation::Disjointness, slot});
  }
  for (const auto& slot : act.request_slots) {
    if (!schema.has_slot(slot)) r.issues.push_back({Violation::UnknownSlot, slot});
  }
  const bool even = act.turn % 2 == 0;
  if (act.turn < 0 || (act.speaker == Speaker::User) != even)
    r.issues.push_back({Violation::TurnParity, std::to_string(act.turn)});
  return r;
}

}  // namespace dialsim::core
