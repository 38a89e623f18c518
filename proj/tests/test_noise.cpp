#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dialsim/noise/error_model.hpp"
#include "support.hpp"

using namespace dialsim;
using noise::SlotErrorMode;

namespace {

core::DialogAct sample_act() {
  return core::make_act(core::Speaker::User, "request",
                        {{"moviename", "deadpool"}, {"starttime", "4 pm"}, {"city", "birmingham"}},
                        {"theater"}, 4);
}

// Fraction of inform slots that did not survive intact.
double slot_corruption_rate(double p, SlotErrorMode mode, int trials, std::uint64_t seed) {
  const auto& d = testing::movie();
  noise::ErrorModelConfig cfg{0.0, p, mode, true};
  core::Rng rng(seed);
  const auto act = sample_act();
  long changed = 0, total = 0;
  for (int t = 0; t < trials; ++t) {
    auto out = noise::corrupt(act, cfg, *d.schema, d.kb, rng);
    for (const auto& [slot, value] : act.inform_slots) {
      ++total;
      auto it = out.inform_slots.find(slot);
      if (it == out.inform_slots.end() || it->second != value) ++changed;
    }
  }
  return static_cast<double>(changed) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("slot corruption rate matches the configured probability") {
  for (double p : {0.1, 0.3}) {
    for (auto mode : {SlotErrorMode::Value, SlotErrorMode::Slot, SlotErrorMode::Delete, SlotErrorMode::Mixed}) {
      CAPTURE(p);
      CAPTURE(noise::to_string(mode));
      CHECK(std::abs(slot_corruption_rate(p, mode, 10000, 42) - p) <= 0.02);
    }
  }
}

TEST_CASE("intent corruption rate and target") {
  const auto& d = testing::movie();
  noise::ErrorModelConfig cfg{0.2, 0.0, SlotErrorMode::Mixed, true};
  core::Rng rng(5);
  const auto act = sample_act();
  int changed = 0;
  for (int t = 0; t < 10000; ++t) {
    auto out = noise::corrupt(act, cfg, *d.schema, d.kb, rng);
    CHECK(out.inform_slots == act.inform_slots);
    CHECK(d.schema->has_intent(out.intent));
    if (out.intent != act.intent) ++changed;
  }
  CHECK(std::abs(changed / 10000.0 - 0.2) <= 0.02);
}

TEST_CASE("zero probabilities pass the act through unchanged") {
  const auto& d = testing::movie();
  core::Rng rng(1);
  auto act = sample_act();
  act.nl = "some text";
  for (auto mode : {SlotErrorMode::Value, SlotErrorMode::Slot, SlotErrorMode::Delete, SlotErrorMode::Mixed}) {
    auto out = noise::corrupt(act, {0.0, 0.0, mode, true}, *d.schema, d.kb, rng);
    CHECK(out == act);
    CHECK(out.nl == act.nl);
  }
  noise::ErrorModelConfig off{1.0, 1.0, SlotErrorMode::Delete, false};
  CHECK(noise::corrupt(act, off, *d.schema, d.kb, rng) == act);
}

TEST_CASE("each mode does what it says") {
  const auto& d = testing::movie();
  core::Rng rng(9);
  const auto act = sample_act();
  auto del = noise::corrupt(act, {0.0, 1.0, SlotErrorMode::Delete, true}, *d.schema, d.kb, rng);
  CHECK(del.inform_slots.empty());
  CHECK(del.request_slots == act.request_slots);
  auto val = noise::corrupt(act, {0.0, 1.0, SlotErrorMode::Value, true}, *d.schema, d.kb, rng);
  REQUIRE(val.inform_slots.size() == act.inform_slots.size());
  for (const auto& [slot, value] : act.inform_slots) CHECK(val.inform_slots.at(slot) != value);
  auto sw = noise::corrupt(act, {0.0, 1.0, SlotErrorMode::Slot, true}, *d.schema, d.kb, rng);
  for (const auto& [slot, value] : sw.inform_slots) {
    CHECK_FALSE(act.inform_slots.count(slot));
    CHECK_FALSE(act.request_slots.count(slot));
  }
}

TEST_CASE("configuration errors") {
  const auto& d = testing::movie();
  core::Rng rng(1);
  CHECK_THROWS_AS(noise::corrupt(sample_act(), {1.5, 0.0}, *d.schema, d.kb, rng), std::invalid_argument);
  CHECK_THROWS_AS(noise::corrupt(sample_act(), {0.0, -0.1}, *d.schema, d.kb, rng), std::invalid_argument);
  CHECK_THROWS_AS(noise::slot_error_mode_from_string("loud"), std::invalid_argument);
  kb::KnowledgeBase empty(d.schema, {});
  CHECK_THROWS_AS(noise::corrupt(sample_act(), {0.0, 0.5, SlotErrorMode::Value}, *d.schema, empty, rng),
                  std::invalid_argument);
  for (auto m : {"value", "slot", "delete", "mixed"})
    CHECK(noise::to_string(noise::slot_error_mode_from_string(m)) == m);
}
