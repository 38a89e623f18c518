#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dialsim/usersim/user_simulator.hpp"
#include "support.hpp"

using namespace dialsim;
using core::DialogueStatus;
using core::Speaker;

namespace {

core::UserGoal paper_goal() {
  core::UserGoal g;
  g.inform_slots = {{"city", "birmingham"}, {"numberofpeople", "2"}, {"state", "al"},
                    {"starttime", "4 pm"}, {"date", "today"}, {"moviename", "deadpool"}};
  g.request_slots = {"ticket", "theater"};
  return g;
}

core::DialogAct agent(std::string intent, core::SlotValues informs = {}, core::SlotSet requests = {}) {
  return core::make_act(Speaker::Agent, std::move(intent), std::move(informs), std::move(requests));
}

struct Fixture {
  const testing::Domain& d = testing::movie();
  usersim::UserSimulator sim{*d.schema, d.kb};
  core::Rng rng{3};
  core::DialogAct first = sim.initialize_episode(paper_goal(), rng);
  usersim::StepResult step(const core::DialogAct& a) { return sim.next(a, rng); }
};

}  // namespace

TEST_CASE("turn reward") {
  CHECK(usersim::turn_reward(false, DialogueStatus::NoOutcomeYet, 40) == -1.0);
  CHECK(usersim::turn_reward(true, DialogueStatus::Success, 40) == 79.0);
  CHECK(usersim::turn_reward(true, DialogueStatus::Failure, 40) == -41.0);
}

TEST_CASE("opening act") {
  const auto& d = testing::movie();
  usersim::UserSimulator sim(*d.schema, d.kb);
  core::Rng rng(17);
  const int n = 4000;
  int with_city = 0;
  for (int i = 0; i < n; ++i) {
    auto a = sim.initialize_episode(paper_goal(), rng);
    CHECK(a.turn == 0);
    CHECK(a.speaker == Speaker::User);
    CHECK(a.intent == "request");
    CHECK(a.inform_slots.at("moviename") == "deadpool");
    CHECK(a.request_slots == core::SlotSet{"theater"});
    with_city += a.inform_slots.count("city");
    // Agenda: withheld constraints first, then the ticket.
    const auto& ag = sim.state().agenda;
    REQUIRE_FALSE(ag.empty());
    CHECK(ag.back() == usersim::AgendaItem{usersim::AgendaItem::Kind::Request, "ticket"});
    bool seen_request = false;
    for (const auto& item : ag) {
      if (item.kind == usersim::AgendaItem::Kind::Request) seen_request = true;
      else CHECK_FALSE(seen_request);
    }
    CHECK(ag.size() == 6 - a.inform_slots.size() + 1);
  }
  CHECK(std::abs(with_city / double(n) - 0.5) < 0.04);
}

TEST_CASE("a ticket-only goal opens by asking for the ticket") {
  const auto& d = testing::movie();
  usersim::UserSimulator sim(*d.schema, d.kb);
  core::Rng rng(2);
  auto a = sim.initialize_episode(d.goals, rng);
  CHECK(a.request_slots == core::SlotSet{"ticket"});
  CHECK(sim.state().agenda.size() + a.inform_slots.size() == sim.state().goal.inform_slots.size());
}

TEST_CASE("requests are answered from the goal") {
  Fixture f;
  auto r = f.step(agent("request", {}, {"numberofpeople"}));
  CHECK(r.act.turn == 2);
  CHECK(r.act.intent == "inform");
  CHECK(r.act.inform_slots == core::SlotValues{{"numberofpeople", "2"}});
  CHECK_FALSE(r.episode_over);
  // Asking for what the user wants to know is bounced back.
  r = f.step(agent("request", {}, {"theater"}));
  CHECK(r.act.intent == "request");
  CHECK(r.act.request_slots == core::SlotSet{"theater"});
  // Slots outside the goal get "anything".
  r = f.step(agent("request", {}, {"genre"}));
  CHECK(r.act.inform_slots.at("genre") == "anything");
}

TEST_CASE("a wrong value is corrected") {
  Fixture f;
  auto r = f.step(agent("inform", {{"starttime", "7 pm"}}));
  CHECK(r.act.intent == "inform");
  CHECK(r.act.inform_slots == core::SlotValues{{"starttime", "4 pm"}});
}

TEST_CASE("scripted success") {
  Fixture f;
  f.step(agent("inform", {{"theater", "carmike summit 16"}}));
  for (const auto* s : {"numberofpeople", "city", "starttime", "date", "state", "moviename"})
    f.step(agent("request", {}, {s}));
  auto r = f.step(agent("inform", {{"taskcomplete", "PLACEHOLDER"}}));
  CHECK(r.act.intent == "thanks");
  CHECK_FALSE(r.episode_over);
  CHECK(f.sim.state().booking_passed == true);
  r = f.step(agent("thanks"));
  CHECK(r.episode_over);
  CHECK(r.status == DialogueStatus::Success);
  CHECK(f.sim.evaluate_final_status() == DialogueStatus::Success);
  CHECK_THROWS_AS(f.step(agent("thanks")), std::logic_error);
}

TEST_CASE("wrong theater fails the booking check") {
  Fixture f;
  f.step(agent("inform", {{"theater", "regal meridian 16"}}));
  for (const auto* s : {"numberofpeople", "city", "starttime", "date", "state"}) f.step(agent("request", {}, {s}));
  auto r = f.step(agent("inform", {{"taskcomplete", "PLACEHOLDER"}}));
  CHECK(r.act.intent == "deny");
  CHECK(f.sim.state().booking_passed == false);
  r = f.step(agent("thanks"));
  CHECK(r.status == DialogueStatus::Failure);
}

TEST_CASE("no ticket ends the dialogue as a failure") {
  Fixture f;
  auto r = f.step(agent("inform", {{"taskcomplete", "no ticket available"}}));
  CHECK(r.episode_over);
  CHECK(r.status == DialogueStatus::Failure);
  CHECK(r.act.intent == "closing");
}

TEST_CASE("taskcomplete before constraints are conveyed is denied") {
  Fixture f;
  auto r = f.step(agent("inform", {{"taskcomplete", "PLACEHOLDER"}}));
  CHECK(r.act.intent == "deny");
}

TEST_CASE("closing gets a thanks then ends") {
  Fixture f;
  auto r = f.step(agent("closing"));
  CHECK(r.act.intent == "thanks");
  CHECK_FALSE(r.episode_over);
  r = f.step(agent("request", {}, {"city"}));
  CHECK(r.episode_over);
  CHECK(r.status == DialogueStatus::Failure);
}

TEST_CASE("the turn limit ends the dialogue") {
  Fixture f;
  const int max_turn = f.d.schema->max_turn();
  usersim::StepResult r;
  int steps = 0;
  do {
    r = f.step(agent("request", {}, {"genre"}));
    ++steps;
  } while (!r.episode_over);
  CHECK(r.status == DialogueStatus::Failure);
  CHECK(r.act.intent == "closing");
  CHECK(r.act.turn == max_turn + 2);
  CHECK(steps == max_turn / 2 + 1);
}

TEST_CASE("multiple choice picks the acceptable option") {
  Fixture f;
  auto r = f.step(agent("multiple_choice", {{"starttime", "7 pm|4 pm|9 pm"}}));
  CHECK(r.act.inform_slots == core::SlotValues{{"starttime", "4 pm"}});
  r = f.step(agent("multiple_choice", {{"starttime", "7 pm|9 pm"}}));
  CHECK(r.act.inform_slots == core::SlotValues{{"starttime", "4 pm"}});
  r = f.step(agent("multiple_choice", {{"theater", "a|b"}}));
  auto t = r.act.inform_slots.at("theater");
  CHECK((t == "a" || t == "b"));
  CHECK(f.sim.state().answered.count("theater"));
}

TEST_CASE("error model on the step output") {
  Fixture f;
  noise::ErrorModelConfig cfg{0.0, 1.0, noise::SlotErrorMode::Delete, true};
  auto r = f.sim.next(agent("request", {}, {"city"}), f.rng, &cfg);
  CHECK(r.spoken.inform_slots.at("city") == "birmingham");
  CHECK(r.act.inform_slots.empty());
}

TEST_CASE("misuse") {
  const auto& d = testing::movie();
  usersim::UserSimulator sim(*d.schema, d.kb);
  core::Rng rng(1);
  CHECK_THROWS_AS(sim.initialize_episode(corpus::GoalDatabase{}, rng), std::invalid_argument);
  sim.initialize_episode(paper_goal(), rng);
  CHECK_THROWS_AS(sim.evaluate_final_status(), std::logic_error);
  CHECK_THROWS_AS(sim.next(agent("dance"), rng), core::SchemaError);
}
