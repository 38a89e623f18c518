#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "dialsim/core/dialog_act.hpp"
#include "dialsim/core/goal.hpp"
#include "dialsim/core/random.hpp"
#include "support.hpp"

using namespace dialsim;
using core::Speaker;

namespace {

nlohmann::json small_schema_json() {
  return {{"intents", {"request", "inform", "thanks"}},
          {"slots",
           {{{"name", "moviename"}, {"informable", true}, {"requestable", true}},
            {{"name", "ticket"}, {"informable", false}, {"requestable", true}},
            {{"name", "taskcomplete"}, {"informable", true}, {"requestable", false}}}},
          {"required_slots", {"moviename"}},
          {"default_request_slot", "ticket"},
          {"max_turn", 10}};
}

}  // namespace

TEST_CASE("schema round-trips through json and keeps registry order") {
  const auto& s = *testing::movie().schema;
  auto again = core::DomainSchema::from_json(s.to_json());
  CHECK(again.to_json() == s.to_json());
  CHECK(s.intents().front() == again.intents().front());
  CHECK(s.max_turn() == 40);
  CHECK(s.required_slots() ==
        std::vector<std::string>{"moviename", "theater", "starttime", "date", "numberofpeople"});
  CHECK(s.default_request_slot() == "ticket");
  for (std::size_t i = 0; i < s.num_slots(); ++i) CHECK(*s.slot_index(s.slots()[i].name) == i);
}

TEST_CASE("content slots drop pseudo and non-informable slots") {
  auto s = core::DomainSchema::from_json(small_schema_json());
  CHECK(s.content_slots() == std::vector<std::string>{"moviename"});
  CHECK(core::DomainSchema::is_pseudo("taskcomplete"));
  CHECK(s.requestable_slots() == std::vector<std::string>{"moviename", "ticket"});
}

TEST_CASE("schema construction rejects broken registries") {
  auto bad = [](auto mutate) {
    auto j = small_schema_json();
    mutate(j);
    CHECK_THROWS_AS(core::DomainSchema::from_json(j), core::SchemaError);
  };
  bad([](auto& j) { j["intents"].push_back("inform"); });
  bad([](auto& j) { j["slots"].push_back(j["slots"][0]); });
  bad([](auto& j) { j["required_slots"].push_back("nope"); });
  bad([](auto& j) { j["required_slots"].push_back("ticket"); });
  bad([](auto& j) { j["default_request_slot"] = "moviename_x"; });
  bad([](auto& j) { j["max_turn"] = 7; });
  bad([](auto& j) { j["max_turn"] = 0; });
  bad([](auto& j) { j["intents"][0] = "Request"; });
  CHECK_THROWS_AS(core::DomainSchema::load("/nonexistent/schema.json"), core::SchemaError);
}

TEST_CASE("act json round trip keeps the familiar shape") {
  auto a = core::make_act(Speaker::User, "request", {{"moviename", "deadpool"}, {"starttime", "4 pm"}},
                          {"theater"}, 0);
  auto j = core::to_json(a);
  CHECK(j["diaact"] == "request");
  CHECK(j["request_slots"]["theater"] == "UNK");
  CHECK(core::act_from_json(j) == a);
  a.nl = "text";
  CHECK(core::act_from_json(core::to_json(a)).nl == a.nl);
  CHECK_THROWS_AS(core::act_from_json(nlohmann::json{{"inform_slots", 3}}), core::SchemaError);
}

TEST_CASE("format_act and parse_act are inverse") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> values{"deadpool", "4 pm", "carmike summit 16", "a, b", "x=y", "(odd)", "2"};
  const std::vector<std::string> slots{"moviename", "starttime", "theater", "city", "date"};
  const std::vector<std::string> intents{"request", "inform", "confirm_question", "thanks"};
  for (int trial = 0; trial < 500; ++trial) {
    core::DialogAct a;
    a.speaker = Speaker::Agent;
    a.turn = 1;
    a.intent = intents[rng() % intents.size()];
    for (const auto& s : slots) {
      auto r = rng() % 3;
      if (r == 0) a.inform_slots[s] = values[rng() % values.size()];
      if (r == 1) a.request_slots.insert(s);
    }
    auto text = core::format_act(a);
    CAPTURE(text);
    CHECK(core::parse_act(text, Speaker::Agent, 1) == a);
  }
}

TEST_CASE("parse_act reads the console forms") {
  auto a = core::parse_act("inform(theater=amc pacific)", Speaker::Agent, 1);
  CHECK(a.intent == "inform");
  CHECK(a.inform_slots.at("theater") == "amc pacific");
  auto r = core::parse_act(" request( city ) ", Speaker::Agent, 3);
  CHECK(r.request_slots == core::SlotSet{"city"});
  CHECK(r.turn == 3);
  CHECK(core::parse_act("thanks", Speaker::Agent).intent == "thanks");
  CHECK(core::parse_act("thanks()", Speaker::Agent).intent == "thanks");
  auto bare = core::parse_act("inform(taskcomplete)", Speaker::Agent);
  CHECK(bare.inform_slots.at("taskcomplete").empty());
  CHECK(core::parse_act("inform(ticket=UNK)", Speaker::Agent).request_slots.count("ticket"));
  for (const char* bad : {"", "inform(", "inform(a b=c)", "in form()", "inform(x=\"open)"})
    CHECK_THROWS_AS(core::parse_act(bad, Speaker::Agent), core::SchemaError);
}

TEST_CASE("validate_act flags every violation kind") {
  const auto& s = *testing::movie().schema;
  auto ok = core::make_act(Speaker::User, "request", {{"moviename", "deadpool"}}, {"ticket"}, 0);
  CHECK(core::validate_act(s, ok).ok());
  auto v = core::make_act(Speaker::User, "dance", {{"bogus", "x"}, {"city", "y"}}, {"city"}, 1);
  auto r = core::validate_act(s, v);
  CHECK(r.has(core::Violation::UnknownIntent));
  CHECK(r.has(core::Violation::UnknownSlot));
  CHECK(r.has(core::Violation::Disjointness));
  CHECK(r.has(core::Violation::TurnParity));
  CHECK(core::validate_act(s, core::make_act(Speaker::Agent, "thanks", {}, {}, 2))
            .has(core::Violation::TurnParity));
}

TEST_CASE("goal invariants") {
  const auto& s = *testing::movie().schema;
  core::UserGoal g;
  g.inform_slots = {{"moviename", "deadpool"}, {"theater", "x"}, {"starttime", "4 pm"},
                    {"date", "today"}, {"numberofpeople", "2"}};
  g.request_slots = {"ticket"};
  CHECK(core::goal_violations(s, g).empty());
  auto missing = g;
  missing.inform_slots.erase("date");
  CHECK(core::goal_violations(s, missing).size() == 1);
  auto moved = missing;
  moved.request_slots.insert("date");  // requested instead of constrained is fine
  CHECK(core::goal_violations(s, moved).empty());
  auto overlap = g;
  overlap.request_slots.insert("theater");
  CHECK_FALSE(core::goal_violations(s, overlap).empty());
  auto no_ticket = g;
  no_ticket.request_slots.clear();
  CHECK_FALSE(core::goal_violations(s, no_ticket).empty());
  auto pseudo = g;
  pseudo.inform_slots["taskcomplete"] = "x";
  CHECK_FALSE(core::goal_violations(s, pseudo).empty());
  CHECK(core::goal_from_json(core::to_json(g)) == g);
  CHECK(core::canonical_key(g) == core::canonical_key(core::goal_from_json(core::to_json(g))));
}

TEST_CASE("derive_seed separates streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 50; ++a)
    for (std::uint64_t b = 0; b < 50; ++b) seen.insert(core::derive_seed(1, a, b));
  CHECK(seen.size() == 2500);
  CHECK(core::derive_seed(1, 2, 3) == core::derive_seed(1, 2, 3));
  CHECK(core::derive_seed(1, 2, 3) != core::derive_seed(2, 2, 3));
  core::Rng rng(3);
  CHECK_THROWS_AS(core::uniform_index(rng, 0), std::invalid_argument);
}
