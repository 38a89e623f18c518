#pragma once

#include <string>

#include "dialsim/core/dialog_act.hpp"
#include "dialsim/core/random.hpp"
#include "dialsim/kb/knowledge_base.hpp"

namespace dialsim::noise {

/// value: wrong value for the right slot; slot: wrong slot and value;
/// delete: slot not recognized; mixed: one of the three, uniformly, per event.
enum class SlotErrorMode { Value, Slot, Delete, Mixed };

std::string to_string(SlotErrorMode m);
SlotErrorMode slot_error_mode_from_string(std::string_view s);

struct ErrorModelConfig {
  double intent_err_prob = 0.0;
  double slot_err_prob = 0.0;
  SlotErrorMode slot_err_mode = SlotErrorMode::Mixed;
  bool enabled = true;

  /// Throws std::invalid_argument when a probability is outside [0, 1].
  void validate() const;
  bool active() const { return enabled && (intent_err_prob > 0.0 || slot_err_prob > 0.0); }
};

/// Returns a corrupted copy of a user act; the input is never modified.
///
/// The intent channel and each inform slot fire independently. Request slots
/// are left alone. Value corruption draws a different value of the same slot
/// from the KB vocabulary; when the vocabulary offers no alternative the value
/// is re-segmented instead (a space inserted, or a single character doubled).
core::DialogAct corrupt(const core::DialogAct& act, const ErrorModelConfig& cfg,
                        const core::DomainSchema& schema, const kb::KnowledgeBase& kb,
                        core::Rng& rng);

}  // namespace dialsim::noise
