#include "dialsim/rl/trainer.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace dialsim::rl {
namespace {

// Independent seed streams.
constexpr std::uint64_t kInitStream = 11;
constexpr std::uint64_t kWarmStream = 13;
constexpr std::uint64_t kSimStream = 17;
constexpr std::uint64_t kEvalStream = 19;
constexpr std::uint64_t kRefillStream = 23;
constexpr std::uint64_t kBatchStream = 29;

std::string warm_to_string(WarmStart w) { return w == WarmStart::Off ? "off" : "rule-fill"; }

WarmStart warm_from_string(const std::string& s) {
  if (s == "off") return WarmStart::Off;
  if (s == "rule-fill") return WarmStart::RuleFill;
  throw std::invalid_argument("unknown warm start mode: " + s);
}

}  // namespace

void TrainerConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (!(success_rate_threshold >= 0.0 && success_rate_threshold <= 1.0))
    throw std::invalid_argument("success_rate_threshold must lie in [0, 1]");
  if (batch_size == 0 || num_batches == 0 || buffer_capacity == 0 || hidden_width == 0 ||
      eval_episodes == 0)
    throw std::invalid_argument("batch_size, num_batches, buffer_capacity, hidden_width and eval_episodes must be positive");
  if (epochs < 0) throw std::invalid_argument("epochs must be non-negative");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
}

nlohmann::json to_json(const TrainerConfig& c) {
  return {{"gamma", c.gamma},
          {"epsilon", c.epsilon},
          {"batch_size", c.batch_size},
          {"num_batches", c.num_batches},
          {"simulation_epoch_size", c.simulation_epoch_size},
          {"epochs", c.epochs},
          {"success_rate_threshold", c.success_rate_threshold},
          {"buffer_capacity", c.buffer_capacity},
          {"learning_rate", c.learning_rate},
          {"hidden_width", c.hidden_width},
          {"warm_start", warm_to_string(c.warm_start)},
          {"eval_episodes", c.eval_episodes},
          {"grad_clip", c.grad_clip},
          {"seed", c.seed}};
}

TrainerConfig trainer_config_from_json(const nlohmann::json& j) {
  TrainerConfig c;
  c.gamma = j.value("gamma", c.gamma);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.num_batches = j.value("num_batches", c.num_batches);
  c.simulation_epoch_size = j.value("simulation_epoch_size", c.simulation_epoch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.success_rate_threshold = j.value("success_rate_threshold", c.success_rate_threshold);
  c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.hidden_width = j.value("hidden_width", c.hidden_width);
  c.warm_start = warm_from_string(j.value("warm_start", warm_to_string(c.warm_start)));
  c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
  c.grad_clip = j.value("grad_clip", c.grad_clip);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

env::Metrics evaluate(const env::Environment& env, const agents::Agent& agent,
                      std::size_t episodes, std::uint64_t seed) {
  if (episodes == 0) throw std::invalid_argument("evaluate needs at least one episode");
  std::vector<std::uint64_t> seeds(episodes);
  for (std::size_t i = 0; i < episodes; ++i) seeds[i] = core::derive_seed(seed, kEvalStream, i);
  return env::summarize(env::run_episodes(env, agent, seeds, false));
}

double compute_upper_bound(const corpus::GoalDatabase& goals, const kb::KnowledgeBase& kb) {
  if (goals.empty()) throw std::invalid_argument("upper bound of an empty goal database");
  std::size_t ok = 0;
  for (const auto& g : goals.goals) ok += kb.satisfiable(g) ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(goals.size());
}

Trainer::Trainer(const env::Environment& env, TrainerConfig cfg)
    : env_(&env), cfg_(cfg), pool_(cfg.buffer_capacity), flush_(cfg.success_rate_threshold),
      rng_(core::derive_seed(cfg.seed, kBatchStream)) {
  cfg_.validate();
  dst::StateTracker probe(env.schema(), env.kb());
  net_ = std::make_shared<QNetwork>(dst::feature_dim(env.schema()), cfg_.hidden_width,
                                    probe.action_space_size());
  core::Rng init(core::derive_seed(cfg_.seed, kInitStream));
  net_->init_random(init);
  target_ = *net_;
}

DqnAgent Trainer::agent(bool greedy) const {
  return DqnAgent(net_, greedy ? 0.0 : cfg_.epsilon, false);
}

void Trainer::simulate_into_pool(std::size_t episodes, std::uint64_t stream, int epoch) {
  if (episodes == 0) return;
  std::vector<std::uint64_t> seeds(episodes);
  for (std::size_t i = 0; i < episodes; ++i)
    seeds[i] = core::derive_seed(cfg_.seed ^ stream, static_cast<std::uint64_t>(epoch), i);
  auto outcomes = env::run_episodes(*env_, agent(false), seeds, true);
  for (auto& o : outcomes) {
    for (auto& e : o.experiences) pool_.add(std::move(e));
  }
}

void Trainer::warm_start() {
  if (cfg_.warm_start == WarmStart::Off) return;
  DqnAgent rule(net_, cfg_.epsilon, true);
  // Serial on purpose: the fill stops at the exact episode that reaches capacity.
  for (std::uint64_t i = 0; !pool_.full(); ++i) {
    auto o = env_->run_episode(rule, core::derive_seed(cfg_.seed, kWarmStream, i), true);
    for (auto& e : o.experiences) pool_.add(std::move(e));
  }
}

double Trainer::train_on_pool() {
  if (pool_.empty()) throw std::logic_error("training on an empty replay pool");
  const std::size_t per_pass = std::max<std::size_t>(1, pool_.size() / cfg_.batch_size);
  double total = 0.0;
  std::size_t updates = 0;
  for (std::size_t b = 0; b < cfg_.num_batches; ++b) {
    for (std::size_t k = 0; k < per_pass; ++k) {
      auto batch = pool_.sample(cfg_.batch_size, rng_);
      total += q_batch_update(*net_, target_, batch, cfg_.gamma, cfg_.learning_rate, cfg_.grad_clip);
      ++updates;
    }
  }
  return total / static_cast<double>(updates);
}

EpochMetrics Trainer::run_epoch(int epoch) {
  EpochMetrics m;
  m.epoch = epoch;
  simulate_into_pool(cfg_.simulation_epoch_size, kSimStream, epoch);
  m.loss = train_on_pool();
  auto eval = evaluate(*env_, agent(true), cfg_.eval_episodes,
                       core::derive_seed(cfg_.seed, kEvalStream, static_cast<std::uint64_t>(epoch)));
  m.success_rate = eval.success_rate;
  m.avg_reward = eval.avg_reward;
  m.avg_turns = eval.avg_turns;
  if (flush_.observe(eval.success_rate)) {
    pool_.clear();
    simulate_into_pool(cfg_.simulation_epoch_size, kRefillStream, epoch);
    m.flushed = true;
  }
  m.buffer_size = pool_.size();
  target_ = *net_;
  return m;
}

std::vector<EpochMetrics> Trainer::train(const std::function<void(const EpochMetrics&)>& on_epoch) {
  warm_start();
  std::vector<EpochMetrics> rows;
  for (int e = 1; e <= cfg_.epochs; ++e) {
    rows.push_back(run_epoch(e));
    if (on_epoch) on_epoch(rows.back());
  }
  return rows;
}

nlohmann::json layout_descriptor(const dst::StateTracker& tracker) {
  const auto& s = tracker.schema();
  nlohmann::json actions = nlohmann::json::array();
  for (std::size_t i = 0; i < tracker.action_space_size(); ++i) {
    auto act = tracker.materialize_agent_action(i);
    if (act.inform_slots.empty()) {
      actions.push_back(core::format_act(act));
    } else {
      actions.push_back(act.intent + "(" + act.inform_slots.begin()->first + ")");
    }
  }
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& sl : s.slots()) slots.push_back(sl.name);
  return {{"feature_dim", dst::feature_dim(s)},
          {"intents", s.intents()},
          {"slots", slots},
          {"max_turn", s.max_turn()},
          {"actions", actions}};
}

void save_checkpoint(const std::filesystem::path& path, const QNetwork& net,
                     const TrainerConfig& cfg, const dst::StateTracker& layout) {
  nlohmann::json j{{"format", "dialsim-qnet"},
                   {"version", 1},
                   {"layout", layout_descriptor(layout)},
                   {"shapes", {{"in", net.in_dim()}, {"hidden", net.hidden()}, {"out", net.out_dim()}}},
                   {"params", net.params()},
                   {"trainer", to_json(cfg)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const dst::StateTracker* layout) {
  std::ifstream in(path);
  if (!in) throw core::SchemaError("cannot open checkpoint: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format") != "dialsim-qnet" || j.at("version") != 1)
      throw core::SchemaError("unsupported checkpoint format in " + path.string());
    Checkpoint c;
    const auto& sh = j.at("shapes");
    c.net = QNetwork(sh.at("in").get<std::size_t>(), sh.at("hidden").get<std::size_t>(),
                     sh.at("out").get<std::size_t>());
    auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != c.net.num_params())
      throw core::SchemaError("checkpoint parameter count does not match its shapes");
    c.net.params() = std::move(params);
    c.config = trainer_config_from_json(j.at("trainer"));
    c.layout = j.at("layout");
    if (layout && c.layout != layout_descriptor(*layout))
      throw core::SchemaError("checkpoint layout does not match the current schema and action space");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw core::SchemaError("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

void write_curve_csv(std::ostream& out, const std::vector<EpochMetrics>& rows) {
  out << kCurveHeader << '\n';
  const auto old = out.flags();
  out << std::setprecision(6) << std::fixed;
  for (const auto& r : rows) {
    out << r.epoch << ',' << r.success_rate << ',' << r.avg_reward << ',' << r.avg_turns << ','
        << r.buffer_size << ',' << (r.flushed ? 1 : 0) << '\n';
  }
  out.flags(old);
}

}  // namespace dialsim::rl
