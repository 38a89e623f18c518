#include "dialsim/core/schema.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace dialsim::core {
namespace {

void check_name(const std::string& name, const char* what) {
  if (name.empty()) throw SchemaError(std::string(what) + " name is empty");
  for (unsigned char c : name) {
    if (std::isupper(c)) throw SchemaError(std::string(what) + " name not lowercase: " + name);
  }
}

}  // namespace

DomainSchema::DomainSchema(std::vector<std::string> intents, std::vector<SlotSpec> slots,
                           std::vector<std::string> required_slots,
                           std::string default_request_slot, int max_turn)
    : intents_(std::move(intents)),
      slots_(std::move(slots)),
      required_(std::move(required_slots)),
      default_request_(std::move(default_request_slot)),
      max_turn_(max_turn) {
  for (std::size_t i = 0; i < intents_.size(); ++i) {
    check_name(intents_[i], "intent");
    if (!intent_pos_.emplace(intents_[i], i).second)
      throw SchemaError("duplicate intent: " + intents_[i]);
  }
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    check_name(slots_[i].name, "slot");
    if (!slot_pos_.emplace(slots_[i].name, i).second)
      throw SchemaError("duplicate slot: " + slots_[i].name);
  }
  for (const auto& r : required_) {
    auto it = slot_pos_.find(r);
    if (it == slot_pos_.end()) throw SchemaError("required slot not in registry: " + r);
    if (!slots_[it->second].informable) throw SchemaError("required slot not informable: " + r);
  }
  auto d = slot_pos_.find(default_request_);
  if (d == slot_pos_.end() || !slots_[d->second].requestable)
    throw SchemaError("default request slot must be a requestable slot: " + default_request_);
  if (max_turn_ <= 0 || max_turn_ % 2 != 0)
    throw SchemaError("max_turn must be a positive even integer");
  if (intents_.empty() || slots_.empty()) throw SchemaError("schema has no intents or slots");
}

DomainSchema DomainSchema::from_json(const nlohmann::json& j) {
  try {
    std::vector<std::string> intents = j.at("intents").get<std::vector<std::string>>();
    std::vector<SlotSpec> slots;
    for (const auto& s : j.at("slots")) {
      slots.push_back(SlotSpec{s.at("name").get<std::string>(), s.value("informable", true),
                               s.value("requestable", false)});
    }
    return DomainSchema(std::move(intents), std::move(slots),
                        j.value("required_slots", std::vector<std::string>{}),
                        j.value("default_request_slot", std::string("ticket")),
                        j.value("max_turn", 40));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("schema parse error: ") + e.what());
  }
}

DomainSchema DomainSchema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open schema file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("schema parse error in " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json DomainSchema::to_json() const {
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& s : slots_) {
    slots.push_back({{"name", s.name}, {"informable", s.informable}, {"requestable", s.requestable}});
  }
  return {{"intents", intents_},
          {"slots", slots},
          {"required_slots", required_},
          {"default_request_slot", default_request_},
          {"max_turn", max_turn_}};
}

std::optional<std::size_t> DomainSchema::intent_index(std::string_view intent) const {
  auto it = intent_pos_.find(std::string(intent));
  if (it == intent_pos_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> DomainSchema::slot_index(std::string_view slot) const {
  auto it = slot_pos_.find(std::string(slot));
  if (it == slot_pos_.end()) return std::nullopt;
  return it->second;
}

const SlotSpec& DomainSchema::slot(std::string_view name) const {
  auto idx = slot_index(name);
  if (!idx) throw SchemaError("unknown slot: " + std::string(name));
  return slots_[*idx];
}

bool DomainSchema::is_informable(std::string_view slot) const {
  auto idx = slot_index(slot);
  return idx && slots_[*idx].informable;
}

bool DomainSchema::is_requestable(std::string_view slot) const {
  auto idx = slot_index(slot);
  return idx && slots_[*idx].requestable;
}

bool DomainSchema::is_required(std::string_view slot) const {
  return std::find(required_.begin(), required_.end(), slot) != required_.end();
}

std::vector<std::string> DomainSchema::content_slots() const {
  std::vector<std::string> out;
  for (const auto& s : slots_) {
    if (s.informable && !is_pseudo(s.name)) out.push_back(s.name);
  }
  return out;
}

std::vector<std::string> DomainSchema::requestable_slots() const {
  std::vector<std::string> out;
  for (const auto& s : slots_) {
    if (s.requestable) out.push_back(s.name);
  }
  return out;
}

}  // namespace dialsim::core
