#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "dialsim/noise/error_model.hpp"
#include "dialsim/rl/trainer.hpp"

namespace dialsim::cli {

struct RunConfig {
  int agt = 5;
  int usr = 1;
  std::optional<int> max_turn;
  int episodes = 100;
  int epochs = 0;
  std::filesystem::path schema_path = "data/schema.json";
  std::filesystem::path movie_kb_path = "data/movie_kb.json";
  std::filesystem::path goal_file_path = "data/user_goals.json";
  std::filesystem::path template_path = "data/templates.json";
  double slot_err_prob = 0.0;
  double intent_err_prob = 0.0;
  noise::SlotErrorMode slot_err_mode = noise::SlotErrorMode::Mixed;
  int act_level = 0;
  int run_mode = 2;
  std::optional<int> cmd_input_mode;
  rl::TrainerConfig trainer;
  std::filesystem::path curve_path;
  std::filesystem::path transcript_path;
  std::filesystem::path write_model_path;
  std::filesystem::path trained_model_path;

  /// Throws std::invalid_argument on inconsistent flags.
  void validate() const;
};

/// Runs the configured agent against the rule simulator. Human play reads
/// `in`; everything printed goes to `out`. Returns the process exit status.
int run(const RunConfig& cfg, std::istream& in, std::ostream& out);

}  // namespace dialsim::cli
