#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dialsim/cli/run.hpp"
#include "support.hpp"

using namespace dialsim;
namespace fs = std::filesystem;

namespace {

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / ("dialsim_cli_" + name); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cli::RunConfig tiny_config() {
  cli::RunConfig c;
  const auto dir = testing::data_dir() / "tiny";
  c.schema_path = dir / "schema.json";
  c.movie_kb_path = dir / "movie_kb.json";
  c.goal_file_path = dir / "goals.json";
  c.template_path = dir / "templates.json";
  c.trainer.simulation_epoch_size = 16;
  return c;
}

int run_quiet(const cli::RunConfig& c, std::string* printed = nullptr, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out;
  int rc = cli::run(c, in, out);
  if (printed) *printed = out.str();
  return rc;
}

// Runs the installed binary; returns its exit status and stdout.
int shell(const std::string& args, std::string* out = nullptr) {
  std::string cmd = std::string(DIALSIM_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::string text;
  char buf[4096];
  while (auto n = fread(buf, 1, sizeof buf, p)) text.append(buf, n);
  int rc = pclose(p);
  if (out) *out = text;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string tiny_flags() {
  const auto dir = (testing::data_dir() / "tiny").string();
  return " --schema_path " + dir + "/schema.json --movie_kb_path " + dir + "/movie_kb.json --goal_file_path " +
         dir + "/goals.json --template_path " + dir + "/templates.json";
}

}  // namespace

TEST_CASE("rule agent run writes one curve row per chunk") {
  auto c = tiny_config();
  c.agt = 5;
  c.episodes = 40;
  c.curve_path = tmp("curve.csv");
  std::string out;
  CHECK(run_quiet(c, &out) == 0);
  CHECK(out.find("request_basics episodes=40") != std::string::npos);
  auto csv = slurp(c.curve_path);
  CHECK(csv.rfind(std::string(rl::kCurveHeader) + "\n1,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3);  // chunks of 16, 16, 8
  c.episodes = 0;
  CHECK(run_quiet(c) == 0);
  CHECK(slurp(c.curve_path) == std::string(rl::kCurveHeader) + "\n");
  fs::remove(c.curve_path);
}

TEST_CASE("run modes print transcripts") {
  auto c = tiny_config();
  c.agt = 5;
  c.episodes = 2;
  c.run_mode = 1;
  std::string out;
  run_quiet(c, &out);
  CHECK(out.find("New episode, user goal:") != std::string::npos);
  CHECK(out.find("\"diaact\": \"request\"") != std::string::npos);
  CHECK(out.find("Turn 0 usr: request(") != std::string::npos);
  CHECK(out.find("Turn 1 sys: request(moviename)") != std::string::npos);
  CHECK((out.find("Successful Dialog!") != std::string::npos || out.find("Failed Dialog!") != std::string::npos));
  c.run_mode = 0;
  run_quiet(c, &out);
  CHECK(out.find("Turn 1 sys: request(moviename)") == std::string::npos);
  CHECK(out.find("Turn 1 sys: ") != std::string::npos);
  c.run_mode = 2;
  run_quiet(c, &out);
  CHECK(out.find("Turn 0") == std::string::npos);
}

TEST_CASE("transcript log is JSON lines") {
  auto c = tiny_config();
  c.agt = 4;
  c.episodes = 3;
  c.transcript_path = tmp("transcript.jsonl");
  run_quiet(c);
  std::ifstream in(c.transcript_path);
  std::string line;
  int acts = 0, summaries = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("episode"));
    if (j.contains("status")) ++summaries;
    else {
      ++acts;
      CHECK(j.contains("diaact"));
    }
  }
  CHECK(summaries == 3);
  CHECK(acts > 3);
  fs::remove(c.transcript_path);
}

TEST_CASE("flag validation") {
  auto c = tiny_config();
  c.agt = 5;
  c.cmd_input_mode = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = tiny_config();
  c.agt = 7;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = tiny_config();
  c.usr = 2;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = tiny_config();
  c.max_turn = 7;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = tiny_config();
  c.slot_err_prob = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = tiny_config();
  c.goal_file_path = "/nonexistent.json";
  CHECK_THROWS(run_quiet(c));
}

TEST_CASE("max_turn override shortens dialogues") {
  auto c = tiny_config();
  c.agt = 2;  // request_all never finishes
  c.episodes = 5;
  c.max_turn = 6;
  c.transcript_path = tmp("short.jsonl");
  run_quiet(c);
  std::ifstream in(c.transcript_path);
  std::string line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    if (j.contains("total_turns")) CHECK(j["total_turns"] == 8);
  }
  fs::remove(c.transcript_path);
}

TEST_CASE("human play over a stream") {
  auto c = tiny_config();
  c.agt = 0;
  c.episodes = 1;
  c.cmd_input_mode = 1;
  c.run_mode = 1;
  std::string out;
  CHECK(run_quiet(c, &out, "request(moviename)\nthanks\n") == 0);
  CHECK(out.find("New episode, user goal:") != std::string::npos);
  CHECK(out.find("Turn 0 usr: ") != std::string::npos);
  CHECK(out.find("Turn 1 sys: ") != std::string::npos);
  CHECK(out.find("Failed Dialog!") != std::string::npos);
  CHECK(out.find("human episodes=1") != std::string::npos);
}

TEST_CASE("dqn: train, save, reload, evaluate") {
  auto c = tiny_config();
  c.agt = 9;
  c.epochs = 2;
  c.episodes = 10;
  c.trainer.num_batches = 2;
  c.trainer.eval_episodes = 10;
  c.trainer.buffer_capacity = 200;
  c.curve_path = tmp("dqn_curve.csv");
  c.write_model_path = tmp("model.json");
  std::string out;
  CHECK(run_quiet(c, &out) == 0);
  CHECK(out.find("dqn episodes=10") != std::string::npos);
  auto first_curve = slurp(c.curve_path);
  CHECK(std::count(first_curve.begin(), first_curve.end(), '\n') == 3);
  run_quiet(c);
  CHECK(slurp(c.curve_path) == first_curve);  // reproducible

  auto e = tiny_config();
  e.agt = 9;
  e.epochs = 0;
  e.episodes = 10;
  e.trained_model_path = c.write_model_path;
  std::string reloaded;
  CHECK(run_quiet(e, &reloaded) == 0);
  CHECK(reloaded.find("dqn episodes=10") != std::string::npos);
  fs::remove(c.curve_path);
  fs::remove(c.write_model_path);
}

TEST_CASE("binary: flags, last value wins, errors") {
  std::string out;
  CHECK(shell("--agt 5 --episodes 3 --episodes 7 --run_mode 2" + tiny_flags(), &out) == 0);
  CHECK(out.find("episodes=7") != std::string::npos);
  CHECK(shell("--agt 5 --cmd_input_mode 1" + tiny_flags(), &out) != 0);
  CHECK(out.find("--cmd_input_mode requires --agt 0") != std::string::npos);
  CHECK(shell("--agt 5 --slot_err_mode loud" + tiny_flags()) != 0);
  CHECK(shell("--no_such_flag 1") != 0);
  CHECK(shell("--help", &out) == 0);
  CHECK(out.find("--simulation_epoch_size") != std::string::npos);
}

TEST_CASE("binary: build-goals") {
  const auto target = tmp("goals.json");
  std::string out;
  const auto d = testing::data_dir().string();
  CHECK(shell("build-goals --schema_path " + d + "/schema.json --movie_kb_path " + d +
                  "/movie_kb.json --corpus_path " + d + "/corpus.json --mechanism aggregate --out " +
                  target.string(),
              &out) == 0);
  CHECK(out.find("aggregate:") != std::string::npos);
  auto db = corpus::load_goal_db(*testing::movie().schema, target);
  CHECK_FALSE(db.empty());
  for (auto s : db.provenance) CHECK(s == corpus::GoalSource::Aggregate);
  CHECK(shell("build-goals --mechanism sideways") != 0);
  fs::remove(target);
}
