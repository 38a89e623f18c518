#include "dialsim/dst/state_tracker.hpp"

#include <algorithm>
#include <stdexcept>

namespace dialsim::dst {
namespace {

bool contains_normalized(const std::vector<std::string>& values, const std::string& v) {
  const auto n = kb::normalize_value(v);
  return std::any_of(values.begin(), values.end(),
                     [&](const std::string& x) { return kb::normalize_value(x) == n; });
}

void set_bits(std::vector<double>& out, std::size_t offset, const core::DomainSchema& schema,
              const auto& keys) {
  for (const auto& k : keys) {
    if constexpr (requires { k.first; }) {
      if (auto i = schema.slot_index(k.first)) out[offset + *i] = 1.0;
    } else {
      if (auto i = schema.slot_index(k)) out[offset + *i] = 1.0;
    }
  }
}

}  // namespace

std::size_t feature_dim(const core::DomainSchema& schema) {
  return 2 * schema.num_intents() + 7 * schema.num_slots() + 3;
}

StateTracker::StateTracker(const core::DomainSchema& schema, const kb::KnowledgeBase& kb)
    : schema_(&schema), kb_(&kb), content_(schema.content_slots()) {
  reset();
}

void StateTracker::reset() {
  state_ = DialogState{};
  state_.kb_result = kb_->query({});
}

core::SlotValues StateTracker::search_constraints() const {
  core::SlotValues c;
  for (const auto& [slot, value] : state_.user_constraints) {
    if (!core::DomainSchema::is_pseudo(slot) && schema_->is_informable(slot)) c[slot] = value;
  }
  return c;
}

std::vector<std::string> StateTracker::suggested_values(const std::string& slot) const {
  if (core::DomainSchema::is_pseudo(slot)) return {};
  if (!kb_->is_attribute(slot)) {
    // Not searchable (e.g. numberofpeople): only the user's own value is admissible.
    auto it = state_.user_constraints.find(slot);
    if (it == state_.user_constraints.end() || kb::normalize_value(it->second) == core::kDontCare)
      return {};
    return {it->second};
  }
  return kb_->values_over(slot, state_.kb_result.matches);
}

std::string StateTracker::corrected_value(const std::string& slot, const std::string& value) const {
  auto sugg = suggested_values(slot);
  if (contains_normalized(sugg, value)) return value;
  return sugg.empty() ? std::string(core::kNoMatch) : sugg.front();
}

int StateTracker::next_agent_turn() const {
  return state_.turn < 0 ? 1 : (state_.turn % 2 == 0 ? state_.turn + 1 : state_.turn + 2);
}

core::DialogAct StateTracker::update(const core::DialogAct& act) {
  const bool user = act.speaker == core::Speaker::User;
  if ((act.turn % 2 == 0) != user)
    throw std::logic_error("turn parity violation at turn " + std::to_string(act.turn));
  if (act.turn != state_.turn + 1)
    throw std::logic_error("acts must alternate: expected turn " + std::to_string(state_.turn + 1) +
                           ", got " + std::to_string(act.turn));

  core::DialogAct out = act;
  if (user) {
    for (const auto& [slot, value] : act.inform_slots) state_.user_constraints[slot] = value;
    for (const auto& slot : act.request_slots) state_.user_requests_seen.insert(slot);
    state_.kb_result = kb_->query(search_constraints());
    state_.last_user_act = act;
  } else {
    for (auto& [slot, value] : out.inform_slots) {
      if (core::DomainSchema::is_pseudo(slot)) {
        value = state_.kb_result.matches.empty() ? std::string(core::kNoTicket)
                                                 : std::string(core::kTaskComplete);
      } else if (act.intent == "multiple_choice") {
        auto sugg = suggested_values(slot);
        std::string kept;
        std::size_t start = 0;
        while (start <= value.size()) {
          auto bar = value.find('|', start);
          auto piece = value.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
          if (contains_normalized(sugg, piece)) kept += (kept.empty() ? "" : "|") + piece;
          if (bar == std::string::npos) break;
          start = bar + 1;
        }
        value = kept.empty() ? corrected_value(slot, "") : kept;
      } else {
        value = corrected_value(slot, value);
      }
      state_.agent_informed[slot] = value;
    }
    state_.last_agent_act = out;
  }
  out.nl.reset();
  if (act.same_content(out)) out.nl = act.nl;
  state_.turn = act.turn;
  state_.history.push_back(out);
  return out;
}

core::DialogAct StateTracker::materialize_agent_action(std::size_t index) const {
  if (index >= action_space_size())
    throw std::out_of_range("action index " + std::to_string(index) + " out of range");
  const int turn = next_agent_turn();
  const std::size_t n = content_.size();
  using core::Speaker;
  if (index < n) return core::make_act(Speaker::Agent, "request", {}, {content_[index]}, turn);
  if (index < 2 * n) {
    const auto& slot = content_[index - n];
    auto sugg = suggested_values(slot);
    return core::make_act(Speaker::Agent, "inform",
                          {{slot, sugg.empty() ? std::string(core::kNoMatch) : sugg.front()}}, {},
                          turn);
  }
  if (index == 2 * n) {
    return core::make_act(Speaker::Agent, "inform",
                          {{std::string(core::kTaskComplete),
                            state_.kb_result.matches.empty() ? std::string(core::kNoTicket)
                                                             : std::string(core::kTaskComplete)}},
                          {}, turn);
  }
  if (index == 2 * n + 1) return core::make_act(Speaker::Agent, "thanks", {}, {}, turn);
  return core::make_act(Speaker::Agent, "closing", {}, {}, turn);
}

std::optional<std::size_t> StateTracker::action_index_of(const core::DialogAct& act) const {
  const std::size_t n = content_.size();
  auto pos = [&](const std::string& slot) -> std::optional<std::size_t> {
    auto it = std::find(content_.begin(), content_.end(), slot);
    if (it == content_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - content_.begin());
  };
  if (act.intent == "thanks" && act.inform_slots.empty() && act.request_slots.empty()) return 2 * n + 1;
  if (act.intent == "closing" && act.inform_slots.empty() && act.request_slots.empty()) return 2 * n + 2;
  if (act.intent == "request" && act.inform_slots.empty() && act.request_slots.size() == 1) {
    if (auto p = pos(*act.request_slots.begin())) return *p;
  }
  if (act.intent == "inform" && act.request_slots.empty() && act.inform_slots.size() == 1) {
    const auto& slot = act.inform_slots.begin()->first;
    if (core::DomainSchema::is_pseudo(slot)) return 2 * n;
    if (auto p = pos(slot)) return n + *p;
  }
  return std::nullopt;
}

std::vector<double> StateTracker::featurize() const {
  const auto& s = *schema_;
  const std::size_t ni = s.num_intents(), ns = s.num_slots();
  std::vector<double> f(feature_dim(s), 0.0);
  std::size_t off = 0;
  auto act_block = [&](const std::optional<core::DialogAct>& act) {
    if (act) {
      if (auto i = s.intent_index(act->intent)) f[off + *i] = 1.0;
      set_bits(f, off + ni, s, act->inform_slots);
      set_bits(f, off + ni + ns, s, act->request_slots);
    }
    off += ni + 2 * ns;
  };
  act_block(state_.last_user_act);
  act_block(state_.last_agent_act);
  set_bits(f, off, s, state_.user_constraints);
  off += ns;
  set_bits(f, off, s, state_.user_requests_seen);
  off += ns;
  for (std::size_t i = 0; i < ns; ++i) {
    const auto& name = s.slots()[i].name;
    const bool available = kb_->is_attribute(name) ? kb_->defines_any(name, state_.kb_result.matches)
                                                   : !suggested_values(name).empty();
    if (available) f[off + i] = 1.0;
  }
  off += ns;
  const double turn = std::max(0, state_.turn);
  f[off++] = std::min(1.0, turn / s.max_turn());
  f[off++] = kb_->size() == 0 ? 0.0
                              : std::min(1.0, static_cast<double>(state_.kb_result.matches.size()) /
                                                  static_cast<double>(kb_->size()));
  f[off++] = state_.kb_result.matches.empty() ? 0.0 : 1.0;
  return f;
}

}  // namespace dialsim::dst
