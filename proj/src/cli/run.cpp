#include "dialsim/cli/run.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <stdexcept>

#include "dialsim/agents/agent.hpp"
#include "dialsim/env/environment.hpp"
#include "dialsim/rl/dqn_agent.hpp"
#include "dialsim/usersim/user_simulator.hpp"

namespace dialsim::cli {
namespace {

constexpr std::uint64_t kRuleStream = 101;

std::shared_ptr<core::DomainSchema> load_schema(const RunConfig& cfg) {
  auto j = core::DomainSchema::load(cfg.schema_path).to_json();
  if (cfg.max_turn) j["max_turn"] = *cfg.max_turn;
  return std::make_shared<core::DomainSchema>(core::DomainSchema::from_json(j));
}

void print_transcript(std::ostream& out, const env::EpisodeOutcome& o, int run_mode,
                      const nlg::TemplateSet& templates) {
  if (run_mode == 2) return;
  out << "New episode, user goal:\n";
  auto g = core::to_json(o.goal);
  g["diaact"] = "request";
  out << g.dump(2) << '\n';
  for (const auto& a : o.transcript) {
    out << "Turn " << a.turn << ' ' << (a.speaker == core::Speaker::User ? "usr" : "sys") << ": ";
    if (run_mode == 1) {
      out << core::format_act(a) << '\n';
    } else {
      out << (a.nl ? *a.nl : templates.render(a)) << '\n';
    }
  }
  out << (o.status == core::DialogueStatus::Success ? "Successful Dialog!" : "Failed Dialog!") << '\n';
}

void log_transcript(std::ostream* log, std::size_t episode, const env::EpisodeOutcome& o) {
  if (!log) return;
  for (const auto& a : o.transcript) {
    auto j = core::to_json(a);
    j["episode"] = episode;
    *log << j.dump() << '\n';
  }
  *log << nlohmann::json{{"episode", episode}, {"status", core::to_string(o.status)},
                         {"total_turns", o.total_turns}, {"reward", o.reward}}
              .dump()
       << '\n';
}

void print_metrics(std::ostream& out, const char* label, const env::Metrics& m) {
  out << label << " episodes=" << m.episodes << std::fixed << std::setprecision(4)
      << " success_rate=" << m.success_rate << " avg_reward=" << m.avg_reward
      << " avg_turns=" << m.avg_turns << '\n';
  out.unsetf(std::ios::floatfield);
}

std::unique_ptr<std::ofstream> open_out(const std::filesystem::path& p) {
  if (p.empty()) return nullptr;
  auto f = std::make_unique<std::ofstream>(p);
  if (!*f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

}  // namespace

void RunConfig::validate() const {
  if (usr != 1) throw std::invalid_argument("only the rule user simulator (--usr 1) is available");
  if (agt != 0 && agt != 9 && (agt < 1 || agt > 5))
    throw std::invalid_argument("--agt must be 0 (human), 1-5 (rule agents) or 9 (DQN)");
  if (cmd_input_mode && agt != 0) throw std::invalid_argument("--cmd_input_mode requires --agt 0");
  if (cmd_input_mode && *cmd_input_mode != 0 && *cmd_input_mode != 1)
    throw std::invalid_argument("--cmd_input_mode must be 0 (natural language) or 1 (dialog act)");
  if (act_level != 0 && act_level != 1) throw std::invalid_argument("--act_level must be 0 or 1");
  if (run_mode < 0 || run_mode > 2) throw std::invalid_argument("--run_mode must be 0, 1 or 2");
  if (episodes < 0 || epochs < 0) throw std::invalid_argument("--episodes and --epochs must be non-negative");
  if (max_turn && (*max_turn <= 0 || *max_turn % 2 != 0))
    throw std::invalid_argument("--max_turn must be a positive even number");
  noise::ErrorModelConfig{intent_err_prob, slot_err_prob, slot_err_mode, true}.validate();
  trainer.validate();
}

int run(const RunConfig& cfg, std::istream& in, std::ostream& out) {
  cfg.validate();
  auto schema = load_schema(cfg);
  const auto kb = kb::KnowledgeBase::load(schema, cfg.movie_kb_path);
  auto goals = corpus::load_goal_db(*schema, cfg.goal_file_path);
  if (goals.empty()) throw std::invalid_argument("goal file holds no goals: " + cfg.goal_file_path.string());
  auto templates = nlg::TemplateSet::load(*schema, cfg.template_path);
  env::EnvConfig ecfg;
  ecfg.noise = {cfg.intent_err_prob, cfg.slot_err_prob, cfg.slot_err_mode, true};
  ecfg.act_level = cfg.act_level;
  env::Environment environment(*schema, kb, goals, &templates, ecfg);
  auto transcript_log = open_out(cfg.transcript_path);

  if (cfg.agt == 0) {
    auto mode = cfg.cmd_input_mode.value_or(1) == 0 ? agents::CommandLineAgent::InputMode::NaturalLanguage
                                                   : agents::CommandLineAgent::InputMode::DialogAct;
    // The human sees every turn as it happens, so the transcript is printed live.
    std::vector<env::EpisodeOutcome> outcomes;
    for (int e = 0; e < cfg.episodes && in; ++e) {
      agents::CommandLineAgent human(in, out, mode, &templates);
      // Show the goal and opening turn before the first prompt.
      const auto seed = core::derive_seed(cfg.trainer.seed, kRuleStream, static_cast<std::uint64_t>(e));
      struct Echo : agents::Agent {
        agents::CommandLineAgent* inner;
        std::ostream* out;
        const nlg::TemplateSet* templates;
        int run_mode;
        std::size_t shown = 0;
        void initialize_episode(std::uint64_t s) override { inner->initialize_episode(s); }
        agents::AgentResponse state_to_action(const dst::StateTracker& t) override {
          const auto& h = t.state().history;
          for (; shown < h.size(); ++shown) {
            const auto& a = h[shown];
            if (a.speaker != core::Speaker::User) continue;
            *out << "Turn " << a.turn << " usr: "
                 << (run_mode == 1 ? core::format_act(a) : (a.nl ? *a.nl : templates->render(a))) << '\n';
          }
          return inner->state_to_action(t);
        }
        std::unique_ptr<agents::Agent> clone() const override { return inner->clone(); }
        std::string name() const override { return inner->name(); }
      } echo;
      echo.inner = &human;
      echo.out = &out;
      echo.templates = &templates;
      echo.run_mode = cfg.run_mode == 2 ? 0 : cfg.run_mode;
      // The goal is drawn inside run_episode; reveal it from a dry initialization with the same seed.
      {
        usersim::UserSimulator probe(*schema, kb);
        core::Rng probe_rng(seed);
        probe.initialize_episode(goals, probe_rng);
        auto g = core::to_json(probe.state().goal);
        g["diaact"] = "request";
        out << "New episode, user goal:\n" << g.dump(2) << '\n';
      }
      auto o = environment.run_episode(echo, seed);
      out << (o.status == core::DialogueStatus::Success ? "Successful Dialog!" : "Failed Dialog!") << '\n';
      log_transcript(transcript_log.get(), static_cast<std::size_t>(e), o);
      outcomes.push_back(std::move(o));
    }
    print_metrics(out, "human", env::summarize(outcomes));
    return 0;
  }

  auto curve = open_out(cfg.curve_path);

  if (cfg.agt >= 1 && cfg.agt <= 5) {
    agents::RuleAgent agent(agents::rule_kind_from_agt(cfg.agt));
    const std::size_t chunk = std::max<std::size_t>(1, cfg.trainer.simulation_epoch_size);
    std::vector<rl::EpochMetrics> rows;
    std::vector<env::EpisodeOutcome> all;
    for (std::size_t start = 0; start < static_cast<std::size_t>(cfg.episodes); start += chunk) {
      const std::size_t n = std::min(chunk, static_cast<std::size_t>(cfg.episodes) - start);
      std::vector<std::uint64_t> seeds(n);
      for (std::size_t i = 0; i < n; ++i) seeds[i] = core::derive_seed(cfg.trainer.seed, kRuleStream, start + i);
      auto outcomes = env::run_episodes(environment, agent, seeds, false);
      auto m = env::summarize(outcomes);
      rows.push_back({static_cast<int>(rows.size() + 1), m.success_rate, m.avg_reward, m.avg_turns, 0, false, 0.0});
      for (std::size_t i = 0; i < n; ++i) {
        print_transcript(out, outcomes[i], cfg.run_mode, templates);
        log_transcript(transcript_log.get(), start + i, outcomes[i]);
        all.push_back(std::move(outcomes[i]));
      }
    }
    if (curve) rl::write_curve_csv(*curve, rows);
    print_metrics(out, agent.name().c_str(), env::summarize(all));
    return 0;
  }

  // DQN
  auto tcfg = cfg.trainer;
  tcfg.epochs = cfg.epochs;
  rl::Trainer trainer(environment, tcfg);
  dst::StateTracker layout(*schema, kb);
  if (!cfg.trained_model_path.empty()) {
    auto ck = rl::load_checkpoint(cfg.trained_model_path, &layout);
    trainer.mutable_network() = ck.net;
  }
  std::vector<rl::EpochMetrics> rows;
  if (cfg.epochs > 0) {
    rows = trainer.train([&](const rl::EpochMetrics& m) {
      if (cfg.run_mode == 2) return;
      out << "epoch " << m.epoch << std::fixed << std::setprecision(4) << " success_rate=" << m.success_rate
          << " avg_reward=" << m.avg_reward << " avg_turns=" << m.avg_turns
          << " buffer=" << m.buffer_size << (m.flushed ? " flushed" : "") << '\n';
      out.unsetf(std::ios::floatfield);
    });
  }
  if (curve) rl::write_curve_csv(*curve, rows);
  if (!cfg.write_model_path.empty()) rl::save_checkpoint(cfg.write_model_path, trainer.network(), tcfg, layout);

  if (cfg.episodes > 0) {
    auto greedy = trainer.agent(true);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg.episodes));
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = core::derive_seed(cfg.trainer.seed, kRuleStream, i);
    auto outcomes = env::run_episodes(environment, greedy, seeds, false);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      print_transcript(out, outcomes[i], cfg.run_mode, templates);
      log_transcript(transcript_log.get(), i, outcomes[i]);
    }
    print_metrics(out, "dqn", env::summarize(outcomes));
  }
  return 0;
}

}  // namespace dialsim::cli
