#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"

using namespace dialsim;

namespace {

// Straight reading of the matching rule, on raw strings.
bool record_matches(const kb::KnowledgeBase& kb, const core::SlotValues& rec, const core::SlotValues& c) {
  for (const auto& [slot, value] : c) {
    if (!kb.is_attribute(slot)) continue;
    auto it = rec.find(slot);
    if (it == rec.end()) return false;
    if (kb::normalize_value(value) == "anything") continue;
    if (kb::normalize_value(it->second) != kb::normalize_value(value)) return false;
  }
  return true;
}

std::vector<int> oracle_query(const kb::KnowledgeBase& kb, const core::SlotValues& c) {
  std::vector<int> out;
  for (const auto& r : kb.records())
    if (record_matches(kb, r.values, c)) out.push_back(r.id);
  return out;
}

}  // namespace

TEST_CASE("normalize_value") {
  CHECK(kb::normalize_value("  Carmike Summit 16 ") == "carmike summit 16");
  CHECK(kb::normalize_value("") == "");
}

TEST_CASE("paper anchors are present") {
  const auto& kb = testing::movie().kb;
  auto res = kb.query({{"moviename", "deadpool"}, {"starttime", "4 pm"}, {"city", "birmingham"},
                       {"state", "al"}, {"date", "today"}});
  REQUIRE(res.matches.size() == 1);
  CHECK(kb.record(res.matches[0]).values.at("theater") == "carmike summit 16");
  CHECK(kb.query({{"theater", "amc pacific"}}).matches.empty());
}

TEST_CASE("query agrees with a brute-force oracle") {
  const auto& kb = testing::movie().kb;
  const auto& schema = kb.schema();
  std::mt19937_64 rng(11);
  std::vector<std::string> searchable;
  for (const auto& s : schema.content_slots())
    if (kb.is_attribute(s)) searchable.push_back(s);
  for (int trial = 0; trial < 400; ++trial) {
    core::SlotValues c;
    // Seed constraints from a real record so that matches are not always empty.
    const auto& base = kb.record(static_cast<int>(rng() % kb.size())).values;
    for (const auto& s : searchable) {
      const auto roll = rng() % 10;
      if (roll < 2 && base.count(s)) c[s] = base.at(s);
      else if (roll == 2) c[s] = "anything";
      else if (roll == 3) c[s] = kb.vocabulary(s)[rng() % kb.vocabulary(s).size()];
      else if (roll == 4 && trial % 7 == 0) c[s] = "no such value";
    }
    if (trial % 5 == 0) c["numberofpeople"] = "3";  // not a KB attribute: ignored
    auto res = kb.query(c);
    CHECK(res.matches == oracle_query(kb, c));
    for (const auto& [slot, value] : c) {
      if (!kb.is_attribute(slot)) continue;
      auto dropped = c;
      dropped.erase(slot);
      CHECK(res.per_slot_counts.at(slot) == static_cast<int>(oracle_query(kb, dropped).size()));
    }
    for (const auto& s : {"theater", "starttime"}) {
      auto sv = kb.suggest_values(s, c);
      std::vector<std::string> expect;
      for (int id : res.matches) {
        const auto& v = kb.record(id).values;
        if (v.count(s) && std::find(expect.begin(), expect.end(), v.at(s)) == expect.end())
          expect.push_back(v.at(s));
      }
      CHECK(sv == expect);
    }
  }
}

TEST_CASE("case and spacing do not affect matching") {
  const auto& kb = testing::movie().kb;
  CHECK(kb.query({{"moviename", " DeadPool "}}).matches == kb.query({{"moviename", "deadpool"}}).matches);
}

TEST_CASE("bad constraints throw") {
  const auto& kb = testing::movie().kb;
  CHECK_THROWS_AS(kb.query({{"bogus", "x"}}), core::SchemaError);
  CHECK_THROWS_AS(kb.query({{"ticket", "x"}}), core::SchemaError);
}

TEST_CASE("satisfiable requires a match and defined request slots") {
  const auto& kb = testing::movie().kb;
  core::UserGoal g;
  g.inform_slots = {{"moviename", "deadpool"}, {"date", "today"}, {"numberofpeople", "2"}};
  g.request_slots = {"ticket", "theater", "starttime"};
  CHECK(kb.satisfiable(g));
  g.inform_slots["date"] = "monday";
  CHECK_FALSE(kb.satisfiable(g));
}

TEST_CASE("loader rejects unknown and pseudo slots") {
  auto schema = testing::tiny().schema;
  CHECK_THROWS_AS(kb::KnowledgeBase(schema, {{{"bogus", "x"}}}), core::SchemaError);
  CHECK_THROWS_AS(kb::KnowledgeBase(schema, {{{"taskcomplete", "x"}}}), core::SchemaError);
  CHECK_THROWS_AS(kb::KnowledgeBase::load(schema, "/nonexistent.json"), core::SchemaError);
  kb::KnowledgeBase empty(schema, {});
  CHECK(empty.query({{"moviename", "x"}}).matches.empty());
}

TEST_CASE("curated goals are all satisfiable") {
  const auto& d = testing::movie();
  for (const auto& g : d.goals.goals) CHECK(d.kb.satisfiable(g));
}
