#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "dialsim/dst/state_tracker.hpp"
#include "support.hpp"

using namespace dialsim;
using core::Speaker;

namespace {

core::DialogAct user(int turn, std::string intent, core::SlotValues informs = {}, core::SlotSet requests = {}) {
  return core::make_act(Speaker::User, std::move(intent), std::move(informs), std::move(requests), turn);
}
core::DialogAct agent(int turn, std::string intent, core::SlotValues informs = {}, core::SlotSet requests = {}) {
  return core::make_act(Speaker::Agent, std::move(intent), std::move(informs), std::move(requests), turn);
}

// Feature vector assembled straight from its layout description.
std::vector<double> oracle_features(const core::DomainSchema& s, const kb::KnowledgeBase& kb,
                                    const std::vector<core::DialogAct>& history) {
  const auto I = s.intents();
  std::vector<std::string> S;
  for (const auto& sl : s.slots()) S.push_back(sl.name);
  auto onehot = [](const std::vector<std::string>& names, const std::string& x) {
    std::vector<double> v(names.size(), 0.0);
    for (std::size_t i = 0; i < names.size(); ++i) v[i] = names[i] == x;
    return v;
  };
  auto bits = [&](auto pred) {
    std::vector<double> v;
    for (const auto& n : S) v.push_back(pred(n) ? 1.0 : 0.0);
    return v;
  };
  const core::DialogAct* lu = nullptr;
  const core::DialogAct* la = nullptr;
  core::SlotValues constraints;
  core::SlotSet requests;
  int turn = 0;
  for (const auto& a : history) {
    (a.speaker == Speaker::User ? lu : la) = &a;
    if (a.speaker == Speaker::User) {
      for (const auto& [k, v] : a.inform_slots) constraints[k] = v;
      requests.insert(a.request_slots.begin(), a.request_slots.end());
    }
    turn = a.turn;
  }
  core::SlotValues search;
  for (const auto& [k, v] : constraints)
    if (s.is_informable(k) && k != "taskcomplete") search[k] = v;
  auto matches = kb.query(search).matches;
  std::vector<double> f;
  auto append = [&](const std::vector<double>& v) { f.insert(f.end(), v.begin(), v.end()); };
  for (auto* a : {lu, la}) {
    append(onehot(I, a ? a->intent : ""));
    append(bits([&](const std::string& n) { return a && a->inform_slots.count(n); }));
    append(bits([&](const std::string& n) { return a && a->request_slots.count(n); }));
  }
  append(bits([&](const std::string& n) { return constraints.count(n) > 0; }));
  append(bits([&](const std::string& n) { return requests.count(n) > 0; }));
  append(bits([&](const std::string& n) {
    if (n == "taskcomplete") return false;
    if (!kb.is_attribute(n)) return constraints.count(n) && constraints.at(n) != "anything";
    for (int id : matches)
      if (kb.record(id).values.count(n)) return true;
    return false;
  }));
  f.push_back(std::min(1.0, turn / double(s.max_turn())));
  f.push_back(std::min(1.0, matches.size() / double(kb.size())));
  f.push_back(matches.empty() ? 0.0 : 1.0);
  return f;
}

}  // namespace

TEST_CASE("feature dimension and action space size") {
  CHECK(dst::feature_dim(*testing::movie().schema) == 228);
  CHECK(dst::feature_dim(*testing::tiny().schema) == 69);
  dst::StateTracker big(*testing::movie().schema, testing::movie().kb);
  dst::StateTracker small(*testing::tiny().schema, testing::tiny().kb);
  CHECK(big.action_space_size() == 55);
  CHECK(small.action_space_size() == 15);
  CHECK(big.featurize().size() == 228);
}

TEST_CASE("featurize matches the layout oracle along random dialogues") {
  for (const auto* d : {&testing::movie(), &testing::tiny()}) {
    dst::StateTracker t(*d->schema, d->kb);
    std::mt19937_64 rng(5);
    const auto slots = d->schema->content_slots();
    for (int episode = 0; episode < 40; ++episode) {
      t.reset();
      std::vector<core::DialogAct> hist;
      const auto& g = d->goals.goals[rng() % d->goals.size()];
      for (int turn = 0; turn < 12; ++turn) {
        core::DialogAct a;
        if (turn % 2 == 0) {
          core::SlotValues inf;
          for (const auto& [k, v] : g.inform_slots)
            if (rng() % 3 == 0) inf[k] = v;
          a = user(turn, rng() % 2 ? "inform" : "request", inf, rng() % 2 ? core::SlotSet{"ticket"} : core::SlotSet{});
        } else {
          a = t.materialize_agent_action(rng() % t.action_space_size());
        }
        hist.push_back(t.update(a));
        CHECK(t.featurize() == oracle_features(*d->schema, d->kb, hist));
      }
    }
  }
}

TEST_CASE("agent informs are corrected onto suggested values") {
  const auto& d = testing::movie();
  dst::StateTracker t(*d.schema, d.kb);
  t.update(user(0, "request", {{"moviename", "deadpool"}, {"starttime", "4 pm"}}, {"theater"}));
  t.update(agent(1, "request", {}, {"city"}));
  t.update(user(2, "inform", {{"city", "birmingham"}, {"state", "al"}, {"date", "today"}}));
  auto out = t.update(agent(3, "inform", {{"theater", "amc pacific"}}));
  CHECK(out.inform_slots.at("theater") == "carmike summit 16");
  CHECK(t.state().agent_informed.at("theater") == "carmike summit 16");
  CHECK(t.suggested_values("theater") == std::vector<std::string>{"carmike summit 16"});
  // Already admissible values are kept, including the surface string.
  t.update(user(4, "thanks"));
  auto keep = agent(5, "inform", {{"theater", "carmike summit 16"}});
  keep.nl = "there you go";
  CHECK(t.update(keep).nl == keep.nl);
}

TEST_CASE("taskcomplete and non-KB slots") {
  const auto& d = testing::movie();
  dst::StateTracker t(*d.schema, d.kb);
  t.update(user(0, "request", {{"moviename", "deadpool"}, {"numberofpeople", "2"}}, {"ticket"}));
  auto tc = t.update(agent(1, "inform", {{"taskcomplete", "whatever"}}));
  CHECK(tc.inform_slots.at("taskcomplete") == "taskcomplete");
  CHECK(t.suggested_values("numberofpeople") == std::vector<std::string>{"2"});
  t.update(user(2, "inform", {{"date", "monday"}}));
  CHECK(t.state().kb_result.matches.empty());
  auto none = t.update(agent(3, "inform", {{"taskcomplete", ""}}));
  CHECK(none.inform_slots.at("taskcomplete") == "no ticket available");
  t.update(user(4, "thanks"));
  CHECK(t.update(agent(5, "inform", {{"theater", "x"}})).inform_slots.at("theater") == "no match available");
}

TEST_CASE("multiple choice keeps only admissible options") {
  const auto& d = testing::movie();
  dst::StateTracker t(*d.schema, d.kb);
  t.update(user(0, "request", {{"moviename", "deadpool"}, {"city", "birmingham"}, {"date", "today"}}, {"starttime"}));
  auto sugg = t.suggested_values("starttime");
  REQUIRE_FALSE(sugg.empty());
  auto out = t.update(agent(1, "multiple_choice", {{"starttime", "25 pm|" + sugg.front() + "|nope"}}));
  CHECK(out.inform_slots.at("starttime") == sugg.front());
}

TEST_CASE("turn discipline") {
  const auto& d = testing::tiny();
  dst::StateTracker t(*d.schema, d.kb);
  CHECK_THROWS_AS(t.update(agent(0, "thanks")), std::logic_error);
  CHECK_THROWS_AS(t.update(user(2, "thanks")), std::logic_error);
  t.update(user(0, "request", {{"moviename", "x"}}, {"ticket"}));
  CHECK_THROWS_AS(t.update(user(2, "thanks")), std::logic_error);
  CHECK(t.materialize_agent_action(0).turn == 1);
  t.update(agent(1, "thanks"));
  CHECK(t.materialize_agent_action(0).turn == 3);
  t.reset();
  CHECK(t.state().turn == -1);
  CHECK(t.state().history.empty());
}

TEST_CASE("materialize and action_index_of are inverse") {
  for (const auto* d : {&testing::movie(), &testing::tiny()}) {
    dst::StateTracker t(*d->schema, d->kb);
    t.update(user(0, "request", {{"moviename", "deadpool"}}, {"ticket"}));
    for (std::size_t i = 0; i < t.action_space_size(); ++i) {
      auto a = t.materialize_agent_action(i);
      CHECK(a.speaker == Speaker::Agent);
      CHECK(t.action_index_of(a) == i);
      CHECK(core::validate_act(*d->schema, a).ok());
    }
    CHECK_THROWS_AS(t.materialize_agent_action(t.action_space_size()), std::out_of_range);
    CHECK_FALSE(t.action_index_of(agent(1, "request", {}, {"city", "date"})).has_value());
  }
}
