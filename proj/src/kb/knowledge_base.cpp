#include "dialsim/kb/knowledge_base.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

namespace dialsim::kb {

std::string normalize_value(std::string_view v) {
  std::size_t b = 0;
  std::size_t e = v.size();
  while (b < e && std::isspace(static_cast<unsigned char>(v[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(v[e - 1]))) --e;
  std::string out(v.substr(b, e - b));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

KnowledgeBase::KnowledgeBase(std::shared_ptr<const core::DomainSchema> schema,
                             std::vector<core::SlotValues> rows)
    : schema_(std::move(schema)) {
  const std::size_t ns = schema_->num_slots();
  intern_.resize(ns);
  vocab_.resize(ns);
  codes_.assign(rows.size() * ns, -1);
  records_.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [slot, value] : rows[r]) {
      auto idx = schema_->slot_index(slot);
      // Request-only attributes (description) may be stored; pseudo slots may not.
      if (!idx || core::DomainSchema::is_pseudo(slot) || slot == schema_->default_request_slot() ||
          (!schema_->is_informable(slot) && !schema_->is_requestable(slot)))
        throw core::SchemaError("KB record " + std::to_string(r) + " has invalid slot: " + slot);
      if (normalize_value(value).empty())
        throw core::SchemaError("KB record " + std::to_string(r) + " has empty value for " + slot);
      auto norm = normalize_value(value);
      auto [it, inserted] = intern_[*idx].emplace(norm, static_cast<int>(vocab_[*idx].size()));
      if (inserted) vocab_[*idx].push_back(value);
      codes_[r * ns + *idx] = it->second;
    }
    records_.push_back(KBRecord{static_cast<int>(r), std::move(rows[r])});
  }
}

KnowledgeBase KnowledgeBase::load(std::shared_ptr<const core::DomainSchema> schema,
                                  const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw core::SchemaError("cannot open KB file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw core::SchemaError("KB parse error in " + path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw core::SchemaError("KB file must hold a JSON array");
  std::vector<core::SlotValues> rows;
  rows.reserve(j.size());
  for (const auto& obj : j) {
    core::SlotValues row;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      row[it.key()] = it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
    }
    rows.push_back(std::move(row));
  }
  return KnowledgeBase(std::move(schema), std::move(rows));
}

std::size_t KnowledgeBase::slot_pos(std::string_view slot) const {
  auto idx = schema_->slot_index(slot);
  if (!idx) throw core::SchemaError("unknown slot: " + std::string(slot));
  return *idx;
}

std::vector<KnowledgeBase::Encoded> KnowledgeBase::encode(
    const core::SlotValues& constraints) const {
  std::vector<Encoded> out;
  for (const auto& [slot, value] : constraints) {
    std::size_t idx = slot_pos(slot);
    if (!schema_->is_informable(slot))
      throw core::SchemaError("constraint on non-informable slot: " + slot);
    if (vocab_[idx].empty()) continue;  // not searchable
    auto norm = normalize_value(value);
    if (norm == core::kDontCare) {
      out.push_back({idx, -1});
      continue;
    }
    auto it = intern_[idx].find(norm);
    out.push_back({idx, it == intern_[idx].end() ? -2 : it->second});
  }
  return out;
}

QueryResult KnowledgeBase::query(const core::SlotValues& constraints) const {
  const auto enc = encode(constraints);
  const std::size_t ns = schema_->num_slots();
  QueryResult res;
  std::vector<int> drop_counts(enc.size(), 0);
  for (std::size_t r = 0; r < records_.size(); ++r) {
    const int* row = &codes_[r * ns];
    int failures = 0;
    std::size_t failed_at = 0;
    for (std::size_t c = 0; c < enc.size() && failures < 2; ++c) {
      const int have = row[enc[c].slot];
      const bool ok = have >= 0 && (enc[c].value == -1 || enc[c].value == have);
      if (!ok) {
        ++failures;
        failed_at = c;
      }
    }
    if (failures == 0) {
      res.matches.push_back(static_cast<int>(r));
      for (auto& d : drop_counts) ++d;
    } else if (failures == 1) {
      ++drop_counts[failed_at];
    }
  }
  for (const auto& [slot, value] : constraints) {
    res.per_slot_counts[slot] = static_cast<int>(res.matches.size());
  }
  for (std::size_t c = 0; c < enc.size(); ++c) {
    res.per_slot_counts[schema_->slots()[enc[c].slot].name] = drop_counts[c];
  }
  return res;
}

std::vector<std::string> KnowledgeBase::values_over(std::string_view slot,
                                                    std::span<const int> ids) const {
  const std::size_t idx = slot_pos(slot);
  const std::size_t ns = schema_->num_slots();
  std::vector<std::string> out;
  std::vector<char> seen(vocab_[idx].size(), 0);
  for (int id : ids) {
    const int code = codes_[static_cast<std::size_t>(id) * ns + idx];
    if (code >= 0 && !seen[static_cast<std::size_t>(code)]) {
      seen[static_cast<std::size_t>(code)] = 1;
      out.push_back(vocab_[idx][static_cast<std::size_t>(code)]);
    }
  }
  return out;
}

bool KnowledgeBase::defines_any(std::string_view slot, std::span<const int> ids) const {
  const std::size_t idx = slot_pos(slot);
  const std::size_t ns = schema_->num_slots();
  return std::any_of(ids.begin(), ids.end(), [&](int id) {
    return codes_[static_cast<std::size_t>(id) * ns + idx] >= 0;
  });
}

std::vector<std::string> KnowledgeBase::suggest_values(std::string_view slot,
                                                       const core::SlotValues& constraints) const {
  if (!schema_->is_informable(slot))
    throw core::SchemaError("suggestions requested for non-informable slot: " + std::string(slot));
  auto res = query(constraints);
  return values_over(slot, res.matches);
}

bool KnowledgeBase::satisfiable(const core::UserGoal& goal) const {
  core::SlotValues constraints;
  for (const auto& [slot, value] : goal.inform_slots) {
    if (!core::DomainSchema::is_pseudo(slot)) constraints.emplace(slot, value);
  }
  auto res = query(constraints);
  if (res.matches.empty()) return false;
  for (const auto& slot : goal.request_slots) {
    if (slot == schema_->default_request_slot()) continue;
    if (!defines_any(slot, res.matches)) return false;
  }
  return true;
}

bool KnowledgeBase::is_attribute(std::string_view slot) const {
  auto idx = schema_->slot_index(slot);
  return idx && !vocab_[*idx].empty();
}

const std::vector<std::string>& KnowledgeBase::vocabulary(std::string_view slot) const {
  return vocab_[slot_pos(slot)];
}

}  // namespace dialsim::kb
