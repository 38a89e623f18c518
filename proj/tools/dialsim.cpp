#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "dialsim/cli/run.hpp"
#include "dialsim/corpus/corpus.hpp"
#include "dialsim/service/http_server.hpp"

namespace {

using namespace dialsim;

int build_goals(const std::string& schema_path, const std::string& kb_path, const std::string& corpus_path,
                const std::string& mechanism, bool filter, const std::string& out_path) {
  auto schema = std::make_shared<core::DomainSchema>(core::DomainSchema::load(schema_path));
  auto kb = kb::KnowledgeBase::load(schema, kb_path);
  auto corpus = corpus::load_corpus(*schema, corpus_path);
  corpus::SourcedGoals all;
  auto take = [&](const corpus::ExtractionReport& r, corpus::GoalSource src, const char* label) {
    std::cout << label << ": " << r.goals.size() << " goals, " << r.repaired << " repaired, "
              << r.discarded << " discarded\n";
    auto tagged = corpus::tag(r.goals, src);
    all.insert(all.end(), tagged.begin(), tagged.end());
  };
  if (mechanism == "first_turn" || mechanism == "both")
    take(corpus::extract_goals_first_turn(*schema, corpus), corpus::GoalSource::FirstTurn, "first_turn");
  if (mechanism == "aggregate" || mechanism == "both")
    take(corpus::extract_goals_aggregate(*schema, corpus), corpus::GoalSource::Aggregate, "aggregate");
  auto db = corpus::finalize_goal_db(all, kb, filter);
  corpus::save_goal_db(db, out_path);
  std::cout << "wrote " << db.size() << " goals to " << out_path << '\n';
  return 0;
}

int serve(const std::string& schema_path, const std::string& kb_path, const std::string& goal_path,
          const std::string& template_path, const std::string& host, int port) {
  auto schema = std::make_shared<core::DomainSchema>(core::DomainSchema::load(schema_path));
  auto kb = kb::KnowledgeBase::load(schema, kb_path);
  auto goals = corpus::load_goal_db(*schema, goal_path);
  auto templates = nlg::TemplateSet::load(*schema, template_path);
  service::SessionManager manager(*schema, kb, goals, templates);
  std::cout << "listening on " << host << ':' << port << std::endl;
  service::serve(manager, host, port);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Movie-ticket dialogue simulator"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  cli::RunConfig cfg;
  std::string schema_path = cfg.schema_path, kb_path = cfg.movie_kb_path,
              goal_path = cfg.goal_file_path, template_path = cfg.template_path;
  std::string slot_err_mode = "mixed", warm_start = "rule";
  std::string curve, transcript, write_model, trained_model;
  int max_turn = 0, cmd_input_mode = -1;
  auto& t = cfg.trainer;

  app.add_option("--agt", cfg.agt, "0 human, 1 inform_all, 2 request_all, 3 random_request, 4 echo, 5 request_basics, 9 dqn");
  app.add_option("--usr", cfg.usr, "user simulator (1: rule)");
  app.add_option("--max_turn", max_turn, "override the schema's turn limit");
  app.add_option("--episodes", cfg.episodes, "episodes to run (evaluation episodes for the DQN)");
  app.add_option("--epochs", cfg.epochs, "DQN training epochs");
  app.add_option("--schema_path", schema_path);
  app.add_option("--movie_kb_path", kb_path);
  app.add_option("--goal_file_path", goal_path);
  app.add_option("--template_path", template_path);
  app.add_option("--slot_err_prob", cfg.slot_err_prob);
  app.add_option("--intent_err_prob", cfg.intent_err_prob);
  app.add_option("--slot_err_mode", slot_err_mode)->check(CLI::IsMember({"value", "slot", "delete", "mixed"}));
  app.add_option("--act_level", cfg.act_level, "0 dialog acts, 1 natural language round trip");
  app.add_option("--run_mode", cfg.run_mode, "0 natural language, 1 dialog acts, 2 metrics only");
  app.add_option("--cmd_input_mode", cmd_input_mode, "human input: 0 natural language, 1 dialog act");
  app.add_option("--gamma", t.gamma);
  app.add_option("--epsilon", t.epsilon);
  app.add_option("--batch_size", t.batch_size);
  app.add_option("--num_batches", t.num_batches);
  app.add_option("--simulation_epoch_size", t.simulation_epoch_size);
  app.add_option("--success_rate_threshold", t.success_rate_threshold);
  app.add_option("--experience_replay_pool_size", t.buffer_capacity);
  app.add_option("--learning_rate", t.learning_rate);
  app.add_option("--dqn_hidden_size", t.hidden_width);
  app.add_option("--warm_start", warm_start)->check(CLI::IsMember({"rule", "off"}));
  app.add_option("--eval_episodes", t.eval_episodes);
  app.add_option("--seed", t.seed);
  app.add_option("--curve_path", curve, "learning curve CSV");
  app.add_option("--transcript_path", transcript, "JSONL transcript");
  app.add_option("--write_model_path", write_model);
  app.add_option("--trained_model_path", trained_model);

  // Data-path flags may follow a subcommand name.
  app.fallthrough();
  auto* serve_cmd = app.add_subcommand("serve", "HTTP API for the console");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port);

  auto* goals_cmd = app.add_subcommand("build-goals", "extract a user goal database from a corpus");
  std::string corpus_path = "data/corpus.json", mechanism = "both", out_path = "data/user_goals.json";
  bool filter = false;
  goals_cmd->add_option("--corpus_path", corpus_path);
  goals_cmd->add_option("--mechanism", mechanism)->check(CLI::IsMember({"first_turn", "aggregate", "both"}));
  goals_cmd->add_flag("--filter_satisfiable", filter, "drop goals the KB cannot satisfy");
  goals_cmd->add_option("--out", out_path);
  app.require_subcommand(0, 1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*goals_cmd) return build_goals(schema_path, kb_path, corpus_path, mechanism, filter, out_path);
    if (*serve_cmd) return serve(schema_path, kb_path, goal_path, template_path, host, port);

    cfg.schema_path = schema_path;
    cfg.movie_kb_path = kb_path;
    cfg.goal_file_path = goal_path;
    cfg.template_path = template_path;
    cfg.slot_err_mode = noise::slot_error_mode_from_string(slot_err_mode);
    if (max_turn != 0) cfg.max_turn = max_turn;
    if (cmd_input_mode != -1) cfg.cmd_input_mode = cmd_input_mode;
    t.warm_start = warm_start == "off" ? rl::WarmStart::Off : rl::WarmStart::RuleFill;
    cfg.curve_path = curve;
    cfg.transcript_path = transcript;
    cfg.write_model_path = write_model;
    cfg.trained_model_path = trained_model;
    return cli::run(cfg, std::cin, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
