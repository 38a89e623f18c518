#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dialsim/core/goal.hpp"
#include "dialsim/kb/knowledge_base.hpp"

namespace dialsim::corpus {

struct AnnotatedTurn {
  core::DialogAct act;  // act.speaker and act.turn are set from position
  std::string utterance;
};

struct AnnotatedDialogue {
  std::vector<AnnotatedTurn> turns;
};

using Corpus = std::vector<AnnotatedDialogue>;

/// JSON list of dialogues, each a list of
/// {"speaker","intent","inform_slots","request_slots","utterance"}.
/// Speakers must alternate starting with the user; acts must validate.
Corpus corpus_from_json(const core::DomainSchema& schema, const nlohmann::json& j);
Corpus load_corpus(const core::DomainSchema& schema, const std::filesystem::path& path);

enum class GoalSource { FirstTurn, Aggregate, Unspecified };

std::string to_string(GoalSource s);
GoalSource goal_source_from_string(std::string_view s);

struct ExtractionReport {
  std::vector<core::UserGoal> goals;
  int repaired = 0;   // default request slot added
  int discarded = 0;  // required slots missing
};

/// One candidate per dialogue from the first non-greeting user turn.
ExtractionReport extract_goals_first_turn(const core::DomainSchema& schema, const Corpus& corpus);

/// One candidate per dialogue from every slot's first appearance across user
/// turns; a conflicting later inform of the same slot is ignored.
ExtractionReport extract_goals_aggregate(const core::DomainSchema& schema, const Corpus& corpus);

struct GoalDatabase {
  std::vector<core::UserGoal> goals;
  std::vector<GoalSource> provenance;

  std::size_t size() const { return goals.size(); }
  bool empty() const { return goals.empty(); }
  bool operator==(const GoalDatabase&) const = default;
};

using SourcedGoals = std::vector<std::pair<core::UserGoal, GoalSource>>;

SourcedGoals tag(const std::vector<core::UserGoal>& goals, GoalSource source);

/// Deduplicates by canonical serialization (first occurrence kept) and
/// optionally drops goals the KB cannot satisfy. Throws when nothing remains.
GoalDatabase finalize_goal_db(const SourcedGoals& goals, const kb::KnowledgeBase& kb,
                              bool filter_satisfiable);

nlohmann::json to_json(const GoalDatabase& db);
GoalDatabase goal_db_from_json(const core::DomainSchema& schema, const nlohmann::json& j);
void save_goal_db(const GoalDatabase& db, const std::filesystem::path& path);
/// Every goal re-validates against the schema on load.
GoalDatabase load_goal_db(const core::DomainSchema& schema, const std::filesystem::path& path);

}  // namespace dialsim::corpus
