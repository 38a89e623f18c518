#include "dialsim/noise/error_model.hpp"

#include <stdexcept>
#include <vector>

namespace dialsim::noise {
namespace {

std::string resegment(const std::string& value, core::Rng& rng) {
  if (value.size() < 2) return value + value;
  std::size_t pos = 1 + core::uniform_index(rng, value.size() - 1);
  std::string out = value;
  out.insert(pos, " ");
  return out;
}

std::string wrong_value(const std::string& slot, const std::string& value,
                        const kb::KnowledgeBase& kb, core::Rng& rng) {
  const auto norm = kb::normalize_value(value);
  std::vector<const std::string*> alternatives;
  if (kb.schema().has_slot(slot)) {
    for (const auto& v : kb.vocabulary(slot)) {
      if (kb::normalize_value(v) != norm) alternatives.push_back(&v);
    }
  }
  if (alternatives.empty()) return resegment(value, rng);
  return *alternatives[core::uniform_index(rng, alternatives.size())];
}

}  // namespace

std::string to_string(SlotErrorMode m) {
  switch (m) {
    case SlotErrorMode::Value: return "value";
    case SlotErrorMode::Slot: return "slot";
    case SlotErrorMode::Delete: return "delete";
    case SlotErrorMode::Mixed: return "mixed";
  }
  return "mixed";
}

SlotErrorMode slot_error_mode_from_string(std::string_view s) {
  if (s == "value") return SlotErrorMode::Value;
  if (s == "slot") return SlotErrorMode::Slot;
  if (s == "delete") return SlotErrorMode::Delete;
  if (s == "mixed") return SlotErrorMode::Mixed;
  throw std::invalid_argument("unknown slot error mode: " + std::string(s));
}

void ErrorModelConfig::validate() const {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(intent_err_prob) || !in_unit(slot_err_prob))
    throw std::invalid_argument("error model probabilities must lie in [0, 1]");
}

core::DialogAct corrupt(const core::DialogAct& act, const ErrorModelConfig& cfg,
                        const core::DomainSchema& schema, const kb::KnowledgeBase& kb,
                        core::Rng& rng) {
  cfg.validate();
  if (!cfg.enabled) return act;
  if (cfg.slot_err_prob > 0.0 && kb.size() == 0 &&
      (cfg.slot_err_mode == SlotErrorMode::Value || cfg.slot_err_mode == SlotErrorMode::Mixed))
    throw std::invalid_argument("value corruption needs a non-empty KB vocabulary");

  core::DialogAct out = act;
  if (cfg.intent_err_prob > 0.0 && core::bernoulli(rng, cfg.intent_err_prob) &&
      schema.num_intents() > 1) {
    std::vector<const std::string*> others;
    for (const auto& i : schema.intents()) {
      if (i != act.intent) others.push_back(&i);
    }
    out.intent = *others[core::uniform_index(rng, others.size())];
  }

  if (cfg.slot_err_prob <= 0.0) return out;
  out.inform_slots.clear();
  for (const auto& [slot, value] : act.inform_slots) {
    if (!core::bernoulli(rng, cfg.slot_err_prob)) {
      out.inform_slots[slot] = value;
      continue;
    }
    auto mode = cfg.slot_err_mode;
    if (mode == SlotErrorMode::Mixed) mode = static_cast<SlotErrorMode>(core::uniform_index(rng, 3));
    switch (mode) {
      case SlotErrorMode::Value:
        out.inform_slots[slot] = wrong_value(slot, value, kb, rng);
        break;
      case SlotErrorMode::Slot: {
        std::vector<std::string> candidates;
        for (const auto& s : schema.content_slots()) {
          if (s != slot && !act.inform_slots.count(s) && !out.inform_slots.count(s) &&
              !act.request_slots.count(s))
            candidates.push_back(s);
        }
        if (candidates.empty()) break;  // nothing to confuse it with: slot lost
        const auto& other = candidates[core::uniform_index(rng, candidates.size())];
        const auto& vocab = kb.is_attribute(other) ? kb.vocabulary(other) : std::vector<std::string>{};
        out.inform_slots[other] = vocab.empty() ? value : vocab[core::uniform_index(rng, vocab.size())];
        break;
      }
      case SlotErrorMode::Delete:
      case SlotErrorMode::Mixed:
        break;
    }
  }
  return out;
}

}  // namespace dialsim::noise
