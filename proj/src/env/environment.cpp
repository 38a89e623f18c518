#include "dialsim/env/environment.hpp"

#include <stdexcept>

#include "dialsim/dst/state_tracker.hpp"
#include "dialsim/usersim/user_simulator.hpp"

namespace dialsim::env {

Environment::Environment(const core::DomainSchema& schema, const kb::KnowledgeBase& kb,
                         const corpus::GoalDatabase& goals, const nlg::TemplateSet* templates,
                         EnvConfig cfg)
    : schema_(&schema), kb_(&kb), goals_(&goals), templates_(templates), cfg_(cfg) {
  cfg_.noise.validate();
  if (cfg_.act_level != 0 && cfg_.act_level != 1)
    throw std::invalid_argument("act_level must be 0 or 1");
  if (cfg_.act_level == 1 && !templates_)
    throw std::invalid_argument("act_level 1 needs a template set");
}

core::DialogAct Environment::deliver_user_act(const core::DialogAct& spoken, core::Rng& rng) const {
  if (cfg_.act_level == 0) {
    return cfg_.noise.active() ? noise::corrupt(spoken, cfg_.noise, *schema_, *kb_, rng) : spoken;
  }
  const auto text = templates_->render(spoken);
  auto parsed = templates_->parse_nl(text, core::Speaker::User, spoken.turn);
  if (parsed) return *parsed;
  // Unparseable utterance: the agent only learns that the user said something.
  // Schemas without not_sure get an empty inform.
  auto act = core::make_act(core::Speaker::User, schema_->has_intent("not_sure") ? "not_sure" : "inform",
                            {}, {}, spoken.turn);
  act.nl = text;
  return act;
}

EpisodeOutcome Environment::run_episode(agents::Agent& agent, std::uint64_t seed, bool record,
                                        const core::UserGoal* goal) const {
  core::Rng rng(seed);
  usersim::UserSimulator user(*schema_, *kb_);
  dst::StateTracker tracker(*schema_, *kb_);

  EpisodeOutcome out;
  auto first = goal ? user.initialize_episode(*goal, rng) : user.initialize_episode(*goals_, rng);
  out.goal = user.state().goal;
  auto delivered = deliver_user_act(first, rng);
  tracker.update(delivered);
  out.transcript.push_back(delivered);
  agent.initialize_episode(core::derive_seed(seed, 0x5eed));

  const noise::ErrorModelConfig* noise_cfg = cfg_.act_level == 0 ? &cfg_.noise : nullptr;
  while (true) {
    std::vector<double> s;
    if (record) s = tracker.featurize();
    auto response = agent.state_to_action(tracker);
    const auto& raw = response.act_slot_value_response ? *response.act_slot_value_response
                                                       : response.act_slot_response;
    auto agent_act = tracker.update(raw);
    out.transcript.push_back(agent_act);

    auto step = user.next(agent_act, rng, noise_cfg);
    const double r = usersim::turn_reward(step.episode_over, step.status, schema_->max_turn());
    out.reward += r;
    if (!step.episode_over) {
      auto user_act = cfg_.act_level == 0 ? step.act : deliver_user_act(step.spoken, rng);
      tracker.update(user_act);
      out.transcript.push_back(user_act);
    }
    if (record) {
      Experience e;
      e.s = std::move(s);
      auto idx = agent.last_action_index();
      if (!idx) idx = tracker.action_index_of(raw);
      if (!idx) throw std::logic_error("agent act has no abstract action index: " + core::format_act(raw));
      e.a = *idx;
      e.r = r;
      e.s_next = tracker.featurize();
      e.done = step.episode_over;
      out.experiences.push_back(std::move(e));
    }
    if (step.episode_over) {
      out.status = step.status;
      break;
    }
  }
  out.total_turns = static_cast<int>(out.transcript.size());
  return out;
}

std::vector<EpisodeOutcome> run_episodes_serial(const Environment& env,
                                                const agents::Agent& prototype,
                                                const std::vector<std::uint64_t>& seeds,
                                                bool record) {
  std::vector<EpisodeOutcome> out(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    auto agent = prototype.clone();
    out[i] = env.run_episode(*agent, seeds[i], record);
  }
  return out;
}

std::vector<EpisodeOutcome> run_episodes(const Environment& env, const agents::Agent& prototype,
                                         const std::vector<std::uint64_t>& seeds, bool record) {
  std::vector<EpisodeOutcome> out(seeds.size());
  std::vector<std::unique_ptr<agents::Agent>> clones(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) clones[i] = prototype.clone();
  const auto n = static_cast<std::ptrdiff_t>(seeds.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = env.run_episode(*clones[i], seeds[i], record);
    } catch (...) {
#pragma omp critical(dialsim_episode_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

Metrics summarize(const std::vector<EpisodeOutcome>& outcomes) {
  Metrics m;
  m.episodes = outcomes.size();
  if (outcomes.empty()) return m;
  for (const auto& o : outcomes) {
    if (o.status == core::DialogueStatus::Success) m.success_rate += 1.0;
    m.avg_reward += o.reward;
    m.avg_turns += o.total_turns;
  }
  const double n = static_cast<double>(outcomes.size());
  m.success_rate /= n;
  m.avg_reward /= n;
  m.avg_turns /= n;
  return m;
}

}  // namespace dialsim::env
