#include "dialsim/agents/agent.hpp"

#include <iostream>
#include <stdexcept>

namespace dialsim::agents {

std::string to_string(RuleAgentKind k) {
  switch (k) {
    case RuleAgentKind::InformAll: return "inform_all";
    case RuleAgentKind::RequestAll: return "request_all";
    case RuleAgentKind::RandomRequest: return "random_request";
    case RuleAgentKind::Echo: return "echo";
    case RuleAgentKind::RequestBasics: return "request_basics";
  }
  return "request_basics";
}

RuleAgentKind rule_kind_from_agt(int agt) {
  if (agt < 1 || agt > 5) throw std::invalid_argument("rule agent selector must be 1..5, got " + std::to_string(agt));
  return static_cast<RuleAgentKind>(agt - 1);
}

void RuleAgent::initialize_episode(std::uint64_t seed) {
  initialized_ = true;
  cursor_ = 0;
  phase_ = 0;
  rng_.seed(seed);
}

core::DialogAct RuleAgent::inform_from_tracker(const dst::StateTracker& tracker,
                                               const std::string& slot, int turn) const {
  auto sugg = tracker.suggested_values(slot);
  return core::make_act(core::Speaker::Agent, "inform",
                        {{slot, sugg.empty() ? std::string(core::kNoMatch) : sugg.front()}}, {}, turn);
}

AgentResponse RuleAgent::state_to_action(const dst::StateTracker& tracker) {
  if (!initialized_) throw std::logic_error("state_to_action before initialize_episode");
  const auto& schema = tracker.schema();
  const int turn = tracker.state().turn + 1;
  using core::Speaker;

  switch (kind_) {
    case RuleAgentKind::InformAll: {
      const auto slots = schema.content_slots();
      const auto& slot = slots[cursor_++ % slots.size()];
      return {inform_from_tracker(tracker, slot, turn), std::nullopt};
    }
    case RuleAgentKind::RequestAll: {
      const auto slots = schema.requestable_slots();
      const auto& slot = slots[cursor_++ % slots.size()];
      return {core::make_act(Speaker::Agent, "request", {}, {slot}, turn), std::nullopt};
    }
    case RuleAgentKind::RandomRequest: {
      const auto slots = schema.requestable_slots();
      const auto& slot = slots[core::uniform_index(rng_, slots.size())];
      return {core::make_act(Speaker::Agent, "request", {}, {slot}, turn), std::nullopt};
    }
    case RuleAgentKind::Echo: {
      const auto& last = tracker.state().last_user_act;
      if (!last || last->request_slots.empty())
        return {core::make_act(Speaker::Agent, "thanks", {}, {}, turn), std::nullopt};
      core::SlotValues informs;
      for (const auto& slot : last->request_slots) {
        // A ticket request is answered by booking it.
        if (slot == schema.default_request_slot()) {
          informs[std::string(core::kTaskComplete)] = std::string(core::kTaskComplete);
          continue;
        }
        auto sugg = tracker.suggested_values(slot);
        informs[slot] = sugg.empty() ? std::string(core::kNoMatch) : sugg.front();
      }
      return {core::make_act(Speaker::Agent, "inform", std::move(informs), {}, turn), std::nullopt};
    }
    case RuleAgentKind::RequestBasics: {
      const auto& set = request_basics_set();
      if (cursor_ < set.size()) {
        return {core::make_act(Speaker::Agent, "request", {}, {set[cursor_++]}, turn), std::nullopt};
      }
      if (phase_ == 0) {
        ++phase_;
        return {core::make_act(Speaker::Agent, "inform",
                               {{std::string(core::kTaskComplete), "PLACEHOLDER"}}, {}, turn),
                std::nullopt};
      }
      if (phase_ == 1) {
        ++phase_;
        return {core::make_act(Speaker::Agent, "thanks", {}, {}, turn), std::nullopt};
      }
      throw std::logic_error("request_basics agent called after its final thanks()");
    }
  }
  throw std::logic_error("unknown rule agent kind");
}

std::string suggestion_line(const dst::StateTracker& tracker) {
  const auto& last = tracker.state().last_user_act;
  if (!last || last->request_slots.empty()) return {};
  std::string out = "(Suggested Values: {";
  bool first_slot = true;
  for (const auto& slot : last->request_slots) {
    if (!first_slot) out += ", ";
    first_slot = false;
    out += "'" + slot + "': [";
    auto sugg = tracker.suggested_values(slot);
    for (std::size_t i = 0; i < sugg.size(); ++i) out += (i ? ", '" : "'") + sugg[i] + "'";
    out += "]";
  }
  return out + "})";
}

CommandLineAgent::CommandLineAgent(std::istream& in, std::ostream& out, InputMode mode,
                                   const nlg::TemplateSet* templates)
    : in_(&in), out_(&out), mode_(mode), templates_(templates) {
  if (mode_ == InputMode::NaturalLanguage && !templates_)
    throw std::invalid_argument("natural-language input needs a template set");
}

void CommandLineAgent::initialize_episode(std::uint64_t) { initialized_ = true; }

std::unique_ptr<Agent> CommandLineAgent::clone() const {
  throw std::logic_error("the command line agent drives a single console and cannot be cloned");
}

AgentResponse CommandLineAgent::state_to_action(const dst::StateTracker& tracker) {
  if (!initialized_) throw std::logic_error("state_to_action before initialize_episode");
  const int turn = tracker.state().turn + 1;
  if (auto line = suggestion_line(tracker); !line.empty()) *out_ << line << '\n';
  std::string text;
  while (true) {
    *out_ << "Turn " << turn << " sys: " << std::flush;
    if (!std::getline(*in_, text)) {
      // Input closed: end the dialogue politely.
      return {core::make_act(core::Speaker::Agent, "closing", {}, {}, turn), std::nullopt};
    }
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      core::DialogAct act;
      if (mode_ == InputMode::DialogAct) {
        act = core::parse_act(text, core::Speaker::Agent, turn);
      } else {
        auto parsed = templates_->parse_nl(text, core::Speaker::Agent, turn);
        if (!parsed) {
          *out_ << "Could not understand that; type a dialog act such as request(city) instead.\n";
          act = core::parse_act(text, core::Speaker::Agent, turn);
        } else {
          act = *parsed;
        }
      }
      auto v = core::validate_act(tracker.schema(), act);
      if (!v.ok()) {
        *out_ << "Invalid act: " << core::to_string(v.issues.front().kind) << " "
              << v.issues.front().detail << '\n';
        continue;
      }
      return {act, std::nullopt};
    } catch (const std::exception& e) {
      *out_ << "Invalid input: " << e.what() << '\n';
    }
  }
}

}  // namespace dialsim::agents
