#include "dialsim/nlg/templates.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <stdexcept>

#include "dialsim/kb/knowledge_base.hpp"

namespace dialsim::nlg {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits "$slot$" placeholders out of a template. Throws on an unterminated one.
std::vector<std::pair<bool, std::string>> split_template(const std::string& text) {
  std::vector<std::pair<bool, std::string>> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto open = text.find('$', pos);
    if (open == std::string::npos) {
      out.emplace_back(false, text.substr(pos));
      break;
    }
    if (open > pos) out.emplace_back(false, text.substr(pos, open - pos));
    auto close = text.find('$', open + 1);
    if (close == std::string::npos) throw core::SchemaError("unterminated placeholder in template: " + text);
    out.emplace_back(true, text.substr(open + 1, close - open - 1));
    pos = close + 1;
  }
  return out;
}

std::string compose(const std::vector<std::string>& order, const core::DialogAct& act) {
  std::string out = act.intent;
  std::replace(out.begin(), out.end(), '_', ' ');
  std::string informs, requests;
  for (const auto& name : order) {
    if (auto it = act.inform_slots.find(name); it != act.inform_slots.end())
      informs += (informs.empty() ? "" : ", ") + name + " is " + it->second;
    if (act.request_slots.count(name)) requests += (requests.empty() ? "" : ", ") + name;
  }
  if (!informs.empty() || !requests.empty()) out += ":";
  if (!informs.empty()) out += " " + informs;
  if (!requests.empty()) out += std::string(informs.empty() ? "" : ";") + " asking about " + requests;
  return out;
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TemplateKey key_of(const core::DialogAct& act) {
  TemplateKey k;
  k.speaker = act.speaker;
  k.intent = act.intent;
  for (const auto& [slot, value] : act.inform_slots) k.inform_slots.push_back(slot);
  k.request_slots.assign(act.request_slots.begin(), act.request_slots.end());
  return k;
}

TemplateSet::TemplateSet(const core::DomainSchema& schema, std::vector<TemplateEntry> entries)
    : entries_(std::move(entries)) {
  for (const auto& s : schema.slots()) slot_order_.push_back(s.name);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto& e = entries_[i];
    const auto where = "template " + std::to_string(i) + " (" + e.text + ")";
    if (!schema.has_intent(e.key.intent)) throw core::SchemaError(where + ": unknown intent " + e.key.intent);
    e.key.inform_slots = sorted(e.key.inform_slots);
    e.key.request_slots = sorted(e.key.request_slots);
    std::set<std::string> inform(e.key.inform_slots.begin(), e.key.inform_slots.end());
    for (const auto& s : e.key.inform_slots) {
      if (!schema.has_slot(s)) throw core::SchemaError(where + ": unknown slot " + s);
    }
    for (const auto& s : e.key.request_slots) {
      if (!schema.has_slot(s)) throw core::SchemaError(where + ": unknown slot " + s);
      if (inform.count(s)) throw core::SchemaError(where + ": slot " + s + " both informed and requested");
    }
    for (const auto& [s, v] : e.fixed) {
      if (!inform.count(s)) throw core::SchemaError(where + ": pinned slot " + s + " not in inform_slots");
    }

    Compiled c{i, {}, 0};
    std::set<std::string> seen;
    for (auto& [is_ph, text] : split_template(e.text)) {
      if (is_ph) {
        if (!schema.has_slot(text)) throw core::SchemaError(where + ": placeholder names unknown slot " + text);
        if (!inform.count(text) || e.fixed.count(text))
          throw core::SchemaError(where + ": placeholder " + text + " has no free inform slot");
        if (!seen.insert(text).second) throw core::SchemaError(where + ": repeated placeholder " + text);
        if (!c.segments.empty() && c.segments.back().placeholder)
          throw core::SchemaError(where + ": adjacent placeholders cannot be parsed");
        c.segments.push_back({true, text});
      } else {
        c.literal_length += text.size();
        c.segments.push_back({false, lower(text)});
      }
    }
    for (const auto& s : e.key.inform_slots) {
      if (!seen.count(s) && !e.fixed.count(s))
        throw core::SchemaError(where + ": inform slot " + s + " neither rendered nor pinned");
    }
    compiled_.push_back(std::move(c));
  }
  std::stable_sort(compiled_.begin(), compiled_.end(), [](const Compiled& a, const Compiled& b) {
    return a.literal_length > b.literal_length;
  });
}

TemplateSet TemplateSet::from_json(const core::DomainSchema& schema, const nlohmann::json& j) {
  if (!j.is_array()) throw core::SchemaError("template file must hold a JSON list");
  std::vector<TemplateEntry> entries;
  for (const auto& item : j) {
    TemplateEntry e;
    try {
      e.key.speaker = core::speaker_from_string(item.at("speaker").get<std::string>());
      e.key.intent = item.at("intent").get<std::string>();
      e.key.inform_slots = item.value("inform_slots", std::vector<std::string>{});
      e.key.request_slots = item.value("request_slots", std::vector<std::string>{});
      if (item.contains("values")) e.fixed = item.at("values").get<core::SlotValues>();
      e.text = item.at("template").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
      throw core::SchemaError(std::string("malformed template entry: ") + ex.what());
    }
    entries.push_back(std::move(e));
  }
  return TemplateSet(schema, std::move(entries));
}

TemplateSet TemplateSet::load(const core::DomainSchema& schema, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw core::SchemaError("cannot open template file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw core::SchemaError("template parse error in " + path.string() + ": " + e.what());
  }
  return from_json(schema, j);
}

nlohmann::json TemplateSet::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& e : entries_) {
    nlohmann::json j{{"speaker", core::to_string(e.key.speaker)},
                     {"intent", e.key.intent},
                     {"inform_slots", e.key.inform_slots},
                     {"request_slots", e.key.request_slots},
                     {"template", e.text}};
    if (!e.fixed.empty()) j["values"] = e.fixed;
    arr.push_back(std::move(j));
  }
  return arr;
}

const TemplateEntry* TemplateSet::find(const core::DialogAct& act) const {
  const auto key = key_of(act);
  const TemplateEntry* best = nullptr;
  for (const auto& e : entries_) {
    if (e.key != key) continue;
    bool agrees = std::all_of(e.fixed.begin(), e.fixed.end(), [&](const auto& kv) {
      return kb::normalize_value(act.inform_slots.at(kv.first)) == kb::normalize_value(kv.second);
    });
    if (agrees && (!best || e.fixed.size() > best->fixed.size())) best = &e;
  }
  return best;
}

std::string fallback_render(const core::DomainSchema& schema, const core::DialogAct& act) {
  std::vector<std::string> order;
  for (const auto& s : schema.slots()) order.push_back(s.name);
  return compose(order, act);
}

std::string TemplateSet::render(const core::DialogAct& act) const {
  const TemplateEntry* e = find(act);
  if (!e) return compose(slot_order_, act);
  std::string out;
  for (auto& [is_ph, text] : split_template(e->text)) {
    if (!is_ph) {
      out += text;
      continue;
    }
    auto it = act.inform_slots.find(text);
    if (it == act.inform_slots.end() || it->second.empty())
      throw std::invalid_argument("no value for placeholder $" + text + "$");
    out += it->second;
  }
  return out;
}

bool TemplateSet::match(const std::vector<Segment>& segs, std::size_t si, std::string_view low,
                        std::string_view original, std::size_t pos, core::SlotValues& out) const {
  if (si == segs.size()) return pos == low.size();
  const auto& seg = segs[si];
  if (!seg.placeholder) {
    if (low.compare(pos, seg.text.size(), seg.text) != 0) return false;
    return match(segs, si + 1, low, original, pos + seg.text.size(), out);
  }
  if (si + 1 == segs.size()) {
    auto v = trim(original.substr(pos));
    if (v.empty()) return false;
    out[seg.text] = std::string(v);
    return true;
  }
  const auto& next = segs[si + 1].text;
  for (auto p = low.find(next, pos + 1); p != std::string_view::npos; p = low.find(next, p + 1)) {
    auto v = trim(original.substr(pos, p - pos));
    if (v.empty()) continue;
    out[seg.text] = std::string(v);
    if (match(segs, si + 1, low, original, p, out)) return true;
    out.erase(seg.text);
  }
  return false;
}

std::optional<core::DialogAct> TemplateSet::parse_nl(std::string_view utterance,
                                                     std::optional<core::Speaker> speaker,
                                                     int turn) const {
  const auto original = trim(utterance);
  if (original.empty()) return std::nullopt;
  const auto low = lower(original);
  for (const auto& c : compiled_) {
    const auto& e = entries_[c.entry];
    if (speaker && e.key.speaker != *speaker) continue;
    core::SlotValues values;
    if (!match(c.segments, 0, low, original, 0, values)) continue;
    for (const auto& [s, v] : e.fixed) values[s] = v;
    auto act = core::make_act(e.key.speaker, e.key.intent, std::move(values),
                              core::SlotSet(e.key.request_slots.begin(), e.key.request_slots.end()),
                              turn);
    act.nl = std::string(original);
    return act;
  }
  return std::nullopt;
}

}  // namespace dialsim::nlg
