#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialsim/core/dialog_act.hpp"

namespace dialsim::nlg {

struct TemplateKey {
  core::Speaker speaker = core::Speaker::User;
  std::string intent;
  std::vector<std::string> inform_slots;   // sorted
  std::vector<std::string> request_slots;  // sorted

  auto operator<=>(const TemplateKey&) const = default;
  bool operator==(const TemplateKey&) const = default;
};

TemplateKey key_of(const core::DialogAct& act);

/// One template. `fixed` pins inform values (e.g. taskcomplete=no ticket
/// available); such variants win over the plain entry when the values agree
/// and need no placeholder for the pinned slots.
struct TemplateEntry {
  TemplateKey key;
  core::SlotValues fixed;
  std::string text;
};

/// Template inventory with $slot$ placeholders.
class TemplateSet {
 public:
  TemplateSet() = default;
  TemplateSet(const core::DomainSchema& schema, std::vector<TemplateEntry> entries);

  static TemplateSet from_json(const core::DomainSchema& schema, const nlohmann::json& j);
  static TemplateSet load(const core::DomainSchema& schema, const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const std::vector<TemplateEntry>& entries() const { return entries_; }

  /// Best entry for the act, or nullptr when the act's key is not templated.
  const TemplateEntry* find(const core::DialogAct& act) const;

  /// Template text with placeholders filled, else the fallback composition.
  /// Throws std::invalid_argument if a placeholder has no value in the act.
  std::string render(const core::DialogAct& act) const;

  /// Inverse of the templated branch of render. Returns nullopt when no
  /// template matches. Candidates are tried longest literal text first.
  std::optional<core::DialogAct> parse_nl(std::string_view utterance,
                                          std::optional<core::Speaker> speaker = std::nullopt,
                                          int turn = 0) const;

 private:
  struct Segment {
    bool placeholder;
    std::string text;  // literal (lowercased) or slot name
  };
  struct Compiled {
    std::size_t entry;
    std::vector<Segment> segments;
    std::size_t literal_length;
  };

  bool match(const std::vector<Segment>& segs, std::size_t si, std::string_view lower,
             std::string_view original, std::size_t pos, core::SlotValues& out) const;

  std::vector<TemplateEntry> entries_;
  std::vector<Compiled> compiled_;  // parse order
  std::vector<std::string> slot_order_;
};

/// Deterministic composition used when no template applies:
/// "<intent phrase>: slot is value, ...; asking about slot, ..." in registry order.
std::string fallback_render(const core::DomainSchema& schema, const core::DialogAct& act);

}  // namespace dialsim::nlg
