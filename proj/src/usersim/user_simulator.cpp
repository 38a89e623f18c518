#include "dialsim/usersim/user_simulator.hpp"

#include <algorithm>
#include <stdexcept>

namespace dialsim::usersim {
namespace {

using core::DialogueStatus;

std::vector<std::string> split_choices(const std::string& v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    auto bar = v.find('|', start);
    auto piece = v.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
    auto norm = kb::normalize_value(piece);
    if (!norm.empty()) {
      auto b = piece.find_first_not_of(' ');
      auto e = piece.find_last_not_of(' ');
      out.push_back(piece.substr(b, e - b + 1));
    }
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

}  // namespace

double turn_reward(bool episode_over, DialogueStatus status, int max_turn) {
  double r = -1.0;
  if (episode_over) {
    if (status == DialogueStatus::Success) r += 2.0 * max_turn;
    if (status == DialogueStatus::Failure) r -= max_turn;
  }
  return r;
}

UserSimulator::UserSimulator(const core::DomainSchema& schema, const kb::KnowledgeBase& kb)
    : schema_(&schema), kb_(&kb) {}

core::DialogAct UserSimulator::initialize_episode(const corpus::GoalDatabase& goals,
                                                  core::Rng& rng) {
  if (goals.empty()) throw std::invalid_argument("cannot start an episode: goal database is empty");
  return initialize_episode(goals.goals[core::uniform_index(rng, goals.size())], rng);
}

core::DialogAct UserSimulator::initialize_episode(const core::UserGoal& goal, core::Rng& rng) {
  state_ = UserState{};
  state_.goal = goal;

  // Opening constraints: moviename whenever known, every other one with
  // probability 1/2, never none.
  std::vector<std::string> constraint_slots;
  for (const auto& [slot, value] : goal.inform_slots) constraint_slots.push_back(slot);
  core::SlotValues informs;
  for (const auto& slot : constraint_slots) {
    if (slot == "moviename" || core::bernoulli(rng, 0.5)) informs[slot] = goal.inform_slots.at(slot);
  }
  if (informs.empty() && !constraint_slots.empty()) {
    const auto& pick = constraint_slots[core::uniform_index(rng, constraint_slots.size())];
    informs[pick] = goal.inform_slots.at(pick);
  }

  const std::string& ticket = schema_->default_request_slot();
  std::vector<std::string> other_requests;
  for (const auto& r : goal.request_slots) {
    if (r != ticket) other_requests.push_back(r);
  }
  std::string first_request =
      other_requests.empty() ? ticket : other_requests[core::uniform_index(rng, other_requests.size())];

  std::vector<AgendaItem> pending_informs;
  for (const auto& slot : constraint_slots) {
    if (!informs.count(slot)) pending_informs.push_back({AgendaItem::Kind::Inform, slot});
  }
  std::shuffle(pending_informs.begin(), pending_informs.end(), rng);
  std::vector<AgendaItem> pending_requests;
  for (const auto& r : other_requests) {
    if (r != first_request) pending_requests.push_back({AgendaItem::Kind::Request, r});
  }
  std::shuffle(pending_requests.begin(), pending_requests.end(), rng);
  if (goal.request_slots.count(ticket) && first_request != ticket)
    pending_requests.push_back({AgendaItem::Kind::Request, ticket});

  state_.agenda.assign(pending_informs.begin(), pending_informs.end());
  state_.agenda.insert(state_.agenda.end(), pending_requests.begin(), pending_requests.end());
  state_.turn = 0;
  emit("request", std::move(informs), {first_request});
  return current_act();
}

core::DialogAct UserSimulator::current_act() const {
  return core::make_act(core::Speaker::User, state_.intent, state_.inform_slots,
                        state_.request_slots, state_.turn);
}

void UserSimulator::emit(std::string intent, core::SlotValues informs, core::SlotSet requests) {
  for (const auto& [slot, value] : informs) drop_from_agenda(AgendaItem::Kind::Inform, slot);
  for (const auto& slot : requests) drop_from_agenda(AgendaItem::Kind::Request, slot);
  state_.intent = std::move(intent);
  state_.inform_slots = std::move(informs);
  state_.request_slots = std::move(requests);
}

void UserSimulator::drop_from_agenda(AgendaItem::Kind kind, const std::string& slot) {
  auto& a = state_.agenda;
  a.erase(std::remove(a.begin(), a.end(), AgendaItem{kind, slot}), a.end());
}

std::vector<std::string> UserSimulator::unanswered_requests() const {
  const std::string& ticket = schema_->default_request_slot();
  std::vector<std::string> out;
  for (const auto& r : state_.goal.request_slots) {
    if (r != ticket && !state_.answered.count(r)) out.push_back(r);
  }
  if (state_.goal.request_slots.count(ticket) && !state_.answered.count(ticket))
    out.push_back(ticket);
  return out;
}

bool UserSimulator::value_matches(const std::string& constraint, const std::string& value) const {
  const auto v = kb::normalize_value(value);
  if (v.empty() || v == core::kNoMatch) return false;
  const auto c = kb::normalize_value(constraint);
  return c == core::kDontCare || c == v;
}

StepResult UserSimulator::next(const core::DialogAct& system_action, core::Rng& rng,
                               const noise::ErrorModelConfig* noise) {
  if (state_.episode_over) throw std::logic_error("next() called after the episode ended");
  if (!schema_->has_intent(system_action.intent))
    throw core::SchemaError("unknown agent intent: " + system_action.intent);

  state_.turn += 2;
  if (state_.turn > schema_->max_turn()) {
    finish(DialogueStatus::Failure, "closing");
  } else if (state_.closing_pending) {
    finish(final_status(), "thanks");
  } else {
    for (const auto& [slot, value] : state_.inform_slots) state_.history_slots[slot] = value;
    state_.inform_slots.clear();
    state_.request_slots.clear();

    const auto& intent = system_action.intent;
    if (intent == "inform") {
      respond_inform(system_action);
    } else if (intent == "multiple_choice") {
      respond_multiple_choice(system_action, rng);
    } else if (intent == "request") {
      respond_request(system_action);
    } else if (intent == "thanks") {
      finish(final_status(), "thanks");
    } else if (intent == "closing") {
      state_.closing_pending = true;
      emit("thanks");
    } else {
      // confirm_answer and every intent without a dedicated rule carry no
      // information for the user: proceed with the agenda.
      next_agenda_act();
    }
  }

  StepResult res;
  res.spoken = current_act();
  res.act = (noise && noise->active()) ? noise::corrupt(res.spoken, *noise, *schema_, *kb_, rng)
                                       : res.spoken;
  res.episode_over = state_.episode_over;
  res.status = state_.status;
  return res;
}

void UserSimulator::finish(DialogueStatus status, std::string closing_intent) {
  state_.episode_over = true;
  state_.status = status;
  state_.intent = std::move(closing_intent);
  state_.inform_slots.clear();
  state_.request_slots.clear();
}

void UserSimulator::next_agenda_act() {
  if (!state_.agenda.empty()) {
    AgendaItem item = state_.agenda.front();
    state_.agenda.pop_front();
    if (item.kind == AgendaItem::Kind::Inform) {
      emit("inform", {{item.slot, state_.goal.inform_slots.at(item.slot)}});
    } else {
      emit("request", {}, {item.slot});
    }
    return;
  }
  auto open = unanswered_requests();
  if (!open.empty()) {
    emit("request", {}, {open.front()});
  } else {
    emit("thanks");
  }
}

void UserSimulator::respond_request(const core::DialogAct& act) {
  const auto& goal = state_.goal;
  core::SlotValues informs;
  core::SlotSet requests;
  for (const auto& slot : act.request_slots) {
    if (auto c = goal.inform_slots.find(slot); c != goal.inform_slots.end()) {
      informs[slot] = c->second;
    } else if (goal.request_slots.count(slot) && !state_.answered.count(slot)) {
      requests.insert(slot);
    } else if (auto h = state_.history_slots.find(slot); h != state_.history_slots.end()) {
      informs[slot] = h->second;
    } else {
      informs[slot] = std::string(core::kDontCare);
    }
  }
  if (informs.empty() && requests.empty()) {
    next_agenda_act();
    return;
  }
  std::string intent = informs.empty() ? "request" : "inform";
  emit(std::move(intent), std::move(informs), std::move(requests));
}

void UserSimulator::respond_inform(const core::DialogAct& act) {
  const auto& goal = state_.goal;
  core::SlotValues corrections;
  for (const auto& [slot, value] : act.inform_slots) {
    if (core::DomainSchema::is_pseudo(slot)) continue;
    state_.agent_offered[slot] = value;
    if (auto c = goal.inform_slots.find(slot); c != goal.inform_slots.end()) {
      if (value_matches(c->second, value)) {
        state_.history_slots[slot] = value;
        drop_from_agenda(AgendaItem::Kind::Inform, slot);
      } else {
        corrections[slot] = c->second;
      }
    } else if (goal.request_slots.count(slot)) {
      if (value_matches(std::string(core::kDontCare), value)) {
        state_.answered.insert(slot);
        state_.history_slots[slot] = value;
        drop_from_agenda(AgendaItem::Kind::Request, slot);
      }
    } else {
      state_.history_slots[slot] = value;
    }
  }
  if (!corrections.empty()) {
    emit("inform", std::move(corrections));
    return;
  }
  if (auto tc = act.inform_slots.find(std::string(core::kTaskComplete)); tc != act.inform_slots.end()) {
    respond_taskcomplete(tc->second);
    return;
  }
  next_agenda_act();
}

bool UserSimulator::booking_is_correct() const {
  const auto& goal = state_.goal;
  core::SlotValues booking;
  for (const auto& [slot, constraint] : goal.inform_slots) {
    const std::string* committed = nullptr;
    if (auto o = state_.agent_offered.find(slot); o != state_.agent_offered.end()) {
      committed = &o->second;
    } else if (auto h = state_.history_slots.find(slot); h != state_.history_slots.end()) {
      committed = &h->second;
    }
    if (!committed) return false;  // constraint never conveyed: agenda not exhausted
    if (!value_matches(constraint, *committed)) return false;
    if (kb::normalize_value(*committed) != core::kDontCare) booking[slot] = *committed;
  }
  for (const auto& slot : state_.answered) {
    if (slot == schema_->default_request_slot()) continue;
    if (auto o = state_.agent_offered.find(slot); o != state_.agent_offered.end())
      booking[slot] = o->second;
  }
  return !kb_->query(booking).matches.empty();
}

void UserSimulator::respond_taskcomplete(const std::string& value) {
  const std::string& ticket = schema_->default_request_slot();
  if (kb::normalize_value(value) == core::kNoTicket) {
    // Unbookable goals end here; no ticket booked counts as failure.
    state_.booking_passed = false;
    finish(DialogueStatus::Failure, "closing");
    return;
  }
  const bool ok = booking_is_correct();
  state_.booking_passed = ok;
  if (!ok) {
    emit("deny", {}, {ticket});
    return;
  }
  state_.answered.insert(ticket);
  drop_from_agenda(AgendaItem::Kind::Request, ticket);
  auto open = unanswered_requests();
  if (!open.empty()) {
    emit("request", {}, {open.front()});
  } else {
    emit("thanks");
  }
}

void UserSimulator::respond_multiple_choice(const core::DialogAct& act, core::Rng& rng) {
  const auto& goal = state_.goal;
  core::SlotValues informs;
  for (const auto& [slot, value] : act.inform_slots) {
    auto options = split_choices(value);
    if (options.empty()) continue;
    std::string choice;
    if (auto c = goal.inform_slots.find(slot); c != goal.inform_slots.end()) {
      auto hit = std::find_if(options.begin(), options.end(),
                              [&](const std::string& o) { return value_matches(c->second, o); });
      // No acceptable option: restate the constraint instead of drifting from the goal.
      choice = hit != options.end() ? *hit : c->second;
    } else {
      choice = options[core::uniform_index(rng, options.size())];
      if (goal.request_slots.count(slot)) {
        state_.answered.insert(slot);
        state_.agent_offered[slot] = choice;
        drop_from_agenda(AgendaItem::Kind::Request, slot);
      }
    }
    informs[slot] = choice;
  }
  if (informs.empty()) {
    next_agenda_act();
    return;
  }
  emit("inform", std::move(informs));
}

DialogueStatus UserSimulator::final_status() const {
  if (state_.turn > schema_->max_turn()) return DialogueStatus::Failure;
  if (!state_.booking_passed.value_or(false)) return DialogueStatus::Failure;
  for (const auto& r : state_.goal.request_slots) {
    if (!state_.answered.count(r)) return DialogueStatus::Failure;
  }
  if (!booking_is_correct()) return DialogueStatus::Failure;
  return DialogueStatus::Success;
}

DialogueStatus UserSimulator::evaluate_final_status() const {
  if (!state_.episode_over) throw std::logic_error("evaluate_final_status before termination");
  return state_.status;
}

}  // namespace dialsim::usersim
