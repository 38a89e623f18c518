#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace dialsim;

namespace {

const core::DomainSchema& schema() { return *testing::movie().schema; }

corpus::Corpus small() { return corpus::load_corpus(schema(), testing::fixture_dir() / "corpus_small.json"); }

core::UserGoal goal(core::SlotValues c, core::SlotSet r) { return {std::move(c), std::move(r)}; }

// Hand-traced expectations for corpus_small.json.
const core::UserGoal kD0 = goal({{"moviename", "deadpool"}, {"theater", "carmike summit 16"},
                                 {"starttime", "4 pm"}, {"date", "today"}, {"numberofpeople", "2"}},
                                {"ticket"});
const core::UserGoal kD1 = goal({{"moviename", "zootopia"}, {"date", "tomorrow"}, {"theater", "amc"},
                                 {"starttime", "7 pm"}, {"numberofpeople", "3"}},
                                {"ticket"});
const core::UserGoal kD2 = goal({{"moviename", "deadpool"}, {"starttime", "8 pm"}, {"date", "today"},
                                 {"numberofpeople", "2"}},
                                {"theater", "ticket"});

}  // namespace

TEST_CASE("first-turn extraction skips greetings, repairs and discards") {
  auto rep = corpus::extract_goals_first_turn(schema(), small());
  REQUIRE(rep.goals.size() == 3);
  CHECK(rep.goals[0] == kD0);
  CHECK(rep.goals[1] == kD2);
  CHECK(rep.goals[2] == kD0);
  CHECK(rep.repaired == 1);   // D2 gains ticket
  CHECK(rep.discarded == 2);  // D1 misses theater etc., D4 has nothing
}

TEST_CASE("aggregate extraction keeps the first value of each slot") {
  auto rep = corpus::extract_goals_aggregate(schema(), small());
  REQUIRE(rep.goals.size() == 4);
  CHECK(rep.goals[0] == kD0);
  CHECK(rep.goals[1] == kD1);  // date stays tomorrow
  CHECK(rep.goals[2] == kD2);  // the later theater inform does not override the request
  CHECK(rep.goals[3] == kD0);
  CHECK(rep.repaired == 2);
  CHECK(rep.discarded == 1);
}

TEST_CASE("finalize deduplicates in order and tracks provenance") {
  auto c = small();
  auto all = corpus::tag(corpus::extract_goals_first_turn(schema(), c).goals, corpus::GoalSource::FirstTurn);
  auto agg = corpus::tag(corpus::extract_goals_aggregate(schema(), c).goals, corpus::GoalSource::Aggregate);
  all.insert(all.end(), agg.begin(), agg.end());
  auto db = corpus::finalize_goal_db(all, testing::movie().kb, false);
  REQUIRE(db.size() == 3);
  CHECK(db.goals == std::vector<core::UserGoal>{kD0, kD2, kD1});
  CHECK(db.provenance == std::vector<corpus::GoalSource>{corpus::GoalSource::FirstTurn,
                                                         corpus::GoalSource::FirstTurn,
                                                         corpus::GoalSource::Aggregate});
  // Only the paper's deadpool showing is in the KB.
  auto filtered = corpus::finalize_goal_db(all, testing::movie().kb, true);
  CHECK(filtered.goals == std::vector<core::UserGoal>{kD0});
  corpus::SourcedGoals none;
  CHECK_THROWS_AS(corpus::finalize_goal_db(none, testing::movie().kb, false), core::SchemaError);
}

TEST_CASE("goal database file round trip") {
  auto path = std::filesystem::temp_directory_path() / "dialsim_goal_db_test.json";
  auto db = testing::movie().goals;
  corpus::save_goal_db(db, path);
  auto back = corpus::load_goal_db(schema(), path);
  CHECK(back.goals == db.goals);
  std::ofstream(path) << R"([{"inform_slots": {"moviename": "x"}, "request_slots": {"ticket": "UNK"}}])";
  CHECK_THROWS_AS(corpus::load_goal_db(schema(), path), core::SchemaError);
  std::filesystem::remove(path);
}

TEST_CASE("corpus loader enforces alternation and valid acts") {
  nlohmann::json two_users = nlohmann::json::array({nlohmann::json::array(
      {{{"speaker", "user"}, {"diaact", "inform"}}, {{"speaker", "user"}, {"diaact", "inform"}}})});
  CHECK_THROWS_AS(corpus::corpus_from_json(schema(), two_users), core::SchemaError);
  nlohmann::json bad_intent = nlohmann::json::array({nlohmann::json::array({{{"speaker", "user"}, {"diaact", "sing"}}})});
  CHECK_THROWS_AS(corpus::corpus_from_json(schema(), bad_intent), core::SchemaError);
  CHECK_THROWS_AS(corpus::extract_goals_first_turn(schema(), {}), core::SchemaError);
  corpus::Corpus agent_only(1);
  CHECK_THROWS_AS(corpus::extract_goals_aggregate(schema(), agent_only), core::SchemaError);
}

TEST_CASE("shipped corpus builds a non-empty goal database") {
  auto c = corpus::load_corpus(schema(), testing::data_dir() / "corpus.json");
  CHECK(c.size() == 160);
  auto ft = corpus::extract_goals_first_turn(schema(), c);
  auto ag = corpus::extract_goals_aggregate(schema(), c);
  CHECK(ft.goals.size() + static_cast<std::size_t>(ft.discarded) == c.size());
  CHECK(ag.goals.size() + static_cast<std::size_t>(ag.discarded) == c.size());
  for (const auto& g : ag.goals) CHECK(core::goal_violations(schema(), g).empty());
  auto shipped = corpus::load_goal_db(schema(), testing::data_dir() / "user_goals.json");
  CHECK_FALSE(shipped.empty());
  for (const auto& g : shipped.goals) CHECK(testing::movie().kb.satisfiable(g));
}
