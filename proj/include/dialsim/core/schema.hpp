#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace dialsim::core {

/// Thrown for malformed schema, act, goal or data files.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SlotSpec {
  std::string name;
  bool informable = true;
  bool requestable = false;
};

/// Reserved names shared by every schema.
inline constexpr std::string_view kUnknownValue = "UNK";
inline constexpr std::string_view kDontCare = "anything";
inline constexpr std::string_view kTaskComplete = "taskcomplete";
inline constexpr std::string_view kNoTicket = "no ticket available";
inline constexpr std::string_view kNoMatch = "no match available";

/// Intent and slot registries for one domain.
///
/// Registry order is significant: the featurizer layout and the agent action
/// space are laid out in it, so a schema is immutable once constructed.
class DomainSchema {
 public:
  DomainSchema(std::vector<std::string> intents, std::vector<SlotSpec> slots,
               std::vector<std::string> required_slots,
               std::string default_request_slot, int max_turn);

  static DomainSchema from_json(const nlohmann::json& j);
  static DomainSchema load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const std::vector<std::string>& intents() const { return intents_; }
  const std::vector<SlotSpec>& slots() const { return slots_; }
  const std::vector<std::string>& required_slots() const { return required_; }
  const std::string& default_request_slot() const { return default_request_; }
  int max_turn() const { return max_turn_; }

  std::size_t num_intents() const { return intents_.size(); }
  std::size_t num_slots() const { return slots_.size(); }

  std::optional<std::size_t> intent_index(std::string_view intent) const;
  std::optional<std::size_t> slot_index(std::string_view slot) const;
  bool has_intent(std::string_view intent) const { return intent_index(intent).has_value(); }
  bool has_slot(std::string_view slot) const { return slot_index(slot).has_value(); }

  /// Throws SchemaError for unknown names.
  const SlotSpec& slot(std::string_view name) const;

  bool is_informable(std::string_view slot) const;
  bool is_requestable(std::string_view slot) const;
  bool is_required(std::string_view slot) const;
  /// Pseudo slots carry control signals and never appear in goals or the KB.
  static bool is_pseudo(std::string_view slot) { return slot == kTaskComplete; }

  /// Informable slots minus pseudo slots, registry order.
  std::vector<std::string> content_slots() const;
  std::vector<std::string> requestable_slots() const;

 private:
  std::vector<std::string> intents_;
  std::vector<SlotSpec> slots_;
  std::vector<std::string> required_;
  std::string default_request_;
  int max_turn_;
  std::unordered_map<std::string, std::size_t> intent_pos_;
  std::unordered_map<std::string, std::size_t> slot_pos_;
};

}  // namespace dialsim::core
