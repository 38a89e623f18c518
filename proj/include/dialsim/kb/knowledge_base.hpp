#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dialsim/core/goal.hpp"
#include "dialsim/core/schema.hpp"

namespace dialsim::kb {

struct KBRecord {
  int id = 0;
  core::SlotValues values;
};

struct QueryResult {
  std::vector<int> matches;
  /// For each constrained slot: number of records matching when that slot's constraint is dropped.
  std::map<std::string, int> per_slot_counts;
};

/// Lowercased, whitespace-trimmed form used for every value comparison.
std::string normalize_value(std::string_view v);

/// Immutable movie knowledge base.
///
/// Matching rules: a record matches when every constrained slot is defined on
/// the record with an equal normalized value. The value "anything" matches any
/// record. Constraints on slots that no record defines at all (numberofpeople,
/// the taskcomplete pseudo slot) cannot be searched and are ignored.
class KnowledgeBase {
 public:
  KnowledgeBase(std::shared_ptr<const core::DomainSchema> schema,
                std::vector<core::SlotValues> rows);

  static KnowledgeBase load(std::shared_ptr<const core::DomainSchema> schema,
                            const std::filesystem::path& path);

  std::size_t size() const { return records_.size(); }
  const std::vector<KBRecord>& records() const { return records_; }
  const KBRecord& record(int id) const { return records_.at(static_cast<std::size_t>(id)); }
  const core::DomainSchema& schema() const { return *schema_; }

  /// Throws core::SchemaError for unknown or non-informable constraint slots.
  QueryResult query(const core::SlotValues& constraints) const;

  /// Distinct values of `slot` over query(constraints).matches, first-seen order.
  std::vector<std::string> suggest_values(std::string_view slot,
                                          const core::SlotValues& constraints) const;

  /// Distinct values of `slot` over the given record ids, first-seen order.
  std::vector<std::string> values_over(std::string_view slot, std::span<const int> ids) const;

  /// True when at least one of `ids` defines `slot`.
  bool defines_any(std::string_view slot, std::span<const int> ids) const;

  bool satisfiable(const core::UserGoal& goal) const;

  /// True when some record defines the slot.
  bool is_attribute(std::string_view slot) const;

  /// Distinct values of a slot across the whole KB, first-seen order.
  const std::vector<std::string>& vocabulary(std::string_view slot) const;

 private:
  struct Encoded {
    std::size_t slot;
    int value;  // -1: wildcard, -2: value absent from the KB vocabulary
  };
  std::vector<Encoded> encode(const core::SlotValues& constraints) const;
  std::size_t slot_pos(std::string_view slot) const;

  std::shared_ptr<const core::DomainSchema> schema_;
  std::vector<KBRecord> records_;
  // codes_[record * num_slots + slot] = interned value id or -1 when undefined
  std::vector<int> codes_;
  std::vector<std::unordered_map<std::string, int>> intern_;  // per slot: normalized -> id
  std::vector<std::vector<std::string>> vocab_;                // per slot: id -> display value
};

}  // namespace dialsim::kb
