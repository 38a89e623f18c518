#include "dialsim/service/session_manager.hpp"

#include <iomanip>
#include <random>
#include <sstream>

#include "dialsim/dst/state_tracker.hpp"
#include "dialsim/usersim/user_simulator.hpp"

namespace dialsim::service {

struct SessionManager::Session {
  Session(const core::DomainSchema& schema, const kb::KnowledgeBase& kb,
          const corpus::GoalDatabase& goals, const nlg::TemplateSet& templates, SessionConfig c)
      : config(c),
        env(schema, kb, goals, &templates, env::EnvConfig{c.noise, c.act_level}),
        user(schema, kb),
        tracker(schema, kb),
        rng(c.seed) {}

  std::string id;
  SessionConfig config;
  env::Environment env;
  usersim::UserSimulator user;
  dst::StateTracker tracker;
  core::Rng rng;
  std::vector<core::DialogAct> transcript;
  bool episode_over = false;
  core::DialogueStatus status = core::DialogueStatus::NoOutcomeYet;
  Clock::time_point last_used;
  std::mutex mu;
};

namespace {

nlohmann::json act_json(const core::DialogAct& act, const nlg::TemplateSet& templates) {
  auto j = core::to_json(act);
  j["nl"] = act.nl ? *act.nl : templates.render(act);
  j["act"] = core::format_act(act);
  return j;
}

SessionConfig parse_config(const nlohmann::json& body) {
  SessionConfig c;
  try {
    c.noise.slot_err_prob = body.value("slot_err_prob", 0.0);
    c.noise.intent_err_prob = body.value("intent_err_prob", 0.0);
    c.noise.slot_err_mode = noise::slot_error_mode_from_string(body.value("slot_err_mode", std::string("mixed")));
    c.noise.validate();
    auto mode = body.value("input_mode", std::string("act"));
    if (mode == "act") {
      c.input_mode = InputMode::DialogAct;
    } else if (mode == "nl") {
      c.input_mode = InputMode::NaturalLanguage;
    } else {
      throw std::invalid_argument("input_mode must be \"act\" or \"nl\"");
    }
    c.act_level = body.value("act_level", 0);
    if (c.act_level != 0 && c.act_level != 1) throw std::invalid_argument("act_level must be 0 or 1");
    c.reveal_goal = body.value("reveal_goal", true);
    if (body.contains("seed")) {
      c.seed = body.at("seed").get<std::uint64_t>();
    } else {
      c.seed = std::random_device{}();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ServiceError(400, "invalid_config", std::string("malformed session config: ") + e.what(),
                       "numeric probabilities, string modes, integer seed");
  } catch (const std::invalid_argument& e) {
    throw ServiceError(400, "invalid_config", e.what(), "see GET /api/schema for valid names");
  }
  return c;
}

}  // namespace

nlohmann::json goal_dump(const core::UserGoal& goal) {
  auto j = core::to_json(goal);
  j["diaact"] = "request";
  return j;
}

SessionManager::SessionManager(const core::DomainSchema& schema, const kb::KnowledgeBase& kb,
                               const corpus::GoalDatabase& goals, const nlg::TemplateSet& templates,
                               std::chrono::seconds idle_timeout)
    : schema_(&schema), kb_(&kb), goals_(&goals), templates_(&templates),
      idle_timeout_(idle_timeout), now_([] { return Clock::now(); }),
      id_salt_(std::random_device{}()) {
  if (goals.empty()) throw std::invalid_argument("session manager needs a non-empty goal database");
}

SessionManager::~SessionManager() = default;

std::string SessionManager::new_id() {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << core::derive_seed(id_salt_, ++id_counter_);
  return s.str();
}

nlohmann::json SessionManager::suggestions(const Session& s) const {
  nlohmann::json out = nlohmann::json::object();
  const auto& last = s.tracker.state().last_user_act;
  if (!last || s.episode_over) return out;
  for (const auto& slot : last->request_slots) out[slot] = s.tracker.suggested_values(slot);
  return out;
}

nlohmann::json SessionManager::create_session(const nlohmann::json& body) {
  if (!body.is_object() && !body.is_null())
    throw ServiceError(400, "invalid_config", "session config must be a JSON object");
  const auto cfg = parse_config(body.is_null() ? nlohmann::json::object() : body);
  auto s = std::make_shared<Session>(*schema_, *kb_, *goals_, *templates_, cfg);

  core::DialogAct first;
  if (body.is_object() && body.contains("goal")) {
    core::UserGoal goal;
    try {
      goal = core::goal_from_json(body.at("goal"));
    } catch (const std::exception& e) {
      throw ServiceError(400, "invalid_goal", e.what(), "goal shape: {inform_slots: {...}, request_slots: {...}}");
    }
    auto problems = core::goal_violations(*schema_, goal);
    if (!problems.empty()) throw ServiceError(400, "invalid_goal", problems.front());
    first = s->user.initialize_episode(goal, s->rng);
  } else {
    first = s->user.initialize_episode(*goals_, s->rng);
  }
  auto delivered = s->env.deliver_user_act(first, s->rng);
  if (!delivered.nl) delivered.nl = templates_->render(first);
  s->tracker.update(delivered);
  s->transcript.push_back(delivered);

  {
    std::lock_guard lock(registry_mu_);
    s->id = new_id();
    s->last_used = now_();
    sessions_[s->id] = s;
  }
  expire_idle();

  nlohmann::json out{{"id", s->id},
                     {"user_act", act_json(delivered, *templates_)},
                     {"suggested_values", suggestions(*s)},
                     {"episode_over", false},
                     {"status", core::to_string(s->status)},
                     {"turn", delivered.turn}};
  if (cfg.reveal_goal) out["goal"] = goal_dump(s->user.state().goal);
  return out;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) {
  std::lock_guard lock(registry_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end())
    throw ServiceError(404, "session_not_found", "no session with id " + id,
                       "sessions expire after being idle; create a new one");
  return it->second;
}

nlohmann::json SessionManager::post_action(const std::string& id, const nlohmann::json& body) {
  auto s = find(id);
  std::unique_lock lock(s->mu, std::try_to_lock);
  if (!lock.owns_lock())
    throw ServiceError(409, "session_busy", "another action for this session is in progress",
                       "wait for the pending reply before sending the next act");
  s->last_used = now_();
  if (s->episode_over)
    throw ServiceError(409, "session_terminal", "the dialogue has already ended with status " +
                       core::to_string(s->status), "create a new session");
  if (!body.is_object() || !body.contains("payload"))
    throw ServiceError(400, "invalid_action", "action body needs a payload",
                       "{\"mode\": \"act\", \"payload\": \"request(city)\"}");

  const int turn = s->tracker.state().turn + 1;
  const std::string mode =
      body.value("mode", s->config.input_mode == InputMode::DialogAct ? std::string("act") : std::string("nl"));
  core::DialogAct act;
  const auto& payload = body.at("payload");
  if (mode == "nl") {
    if (!payload.is_string()) throw ServiceError(400, "invalid_action", "nl payload must be a string");
    auto parsed = templates_->parse_nl(payload.get<std::string>(), core::Speaker::Agent, turn);
    if (!parsed)
      throw ServiceError(422, "unparseable_nl", "could not understand: " + payload.get<std::string>(),
                         "rephrase, or switch to act mode and send e.g. request(city)");
    act = *parsed;
  } else if (mode == "act") {
    try {
      if (payload.is_string()) {
        act = core::parse_act(payload.get<std::string>(), core::Speaker::Agent, turn);
      } else {
        act = core::act_from_json(payload);
        act.speaker = core::Speaker::Agent;
        act.turn = turn;
      }
    } catch (const std::exception& e) {
      throw ServiceError(400, "invalid_act", e.what(), "acts look like inform(theater=carmike summit 16)");
    }
  } else {
    throw ServiceError(400, "invalid_action", "mode must be \"act\" or \"nl\"");
  }
  auto v = core::validate_act(*schema_, act);
  if (!v.ok())
    throw ServiceError(400, "invalid_act",
                       core::to_string(v.issues.front().kind) + ": " + v.issues.front().detail,
                       "see GET /api/schema for intents and slots");

  auto corrected = s->tracker.update(act);
  if (!corrected.nl) corrected.nl = templates_->render(corrected);
  s->transcript.push_back(corrected);
  auto step = s->user.next(corrected, s->rng, s->config.act_level == 0 ? &s->config.noise : nullptr);

  nlohmann::json out{{"agent_act", act_json(act, *templates_)},
                     {"corrected_agent_act", act_json(corrected, *templates_)},
                     {"corrected", !act.same_content(corrected)}};
  if (step.episode_over) {
    s->episode_over = true;
    s->status = step.status;
    out["user_act"] = nullptr;
  } else {
    auto user_act = s->config.act_level == 0 ? step.act : s->env.deliver_user_act(step.spoken, s->rng);
    if (!user_act.nl) user_act.nl = templates_->render(step.spoken);
    s->tracker.update(user_act);
    s->transcript.push_back(user_act);
    out["user_act"] = act_json(user_act, *templates_);
  }
  out["suggested_values"] = suggestions(*s);
  out["episode_over"] = s->episode_over;
  out["status"] = core::to_string(s->status);
  out["turn"] = s->tracker.state().turn;
  return out;
}

nlohmann::json SessionManager::get_session(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  s->last_used = now_();
  nlohmann::json transcript = nlohmann::json::array();
  for (const auto& a : s->transcript) transcript.push_back(act_json(a, *templates_));
  nlohmann::json config{{"slot_err_prob", s->config.noise.slot_err_prob},
                        {"intent_err_prob", s->config.noise.intent_err_prob},
                        {"slot_err_mode", noise::to_string(s->config.noise.slot_err_mode)},
                        {"input_mode", s->config.input_mode == InputMode::DialogAct ? "act" : "nl"},
                        {"act_level", s->config.act_level},
                        {"reveal_goal", s->config.reveal_goal},
                        {"seed", s->config.seed}};
  nlohmann::json out{{"id", s->id},
                     {"config", config},
                     {"transcript", transcript},
                     {"suggested_values", suggestions(*s)},
                     {"episode_over", s->episode_over},
                     {"status", core::to_string(s->status)}};
  if (s->config.reveal_goal) out["goal"] = goal_dump(s->user.state().goal);
  return out;
}

nlohmann::json SessionManager::schema_json() const { return schema_->to_json(); }

nlohmann::json SessionManager::templates_json() const { return templates_->to_json(); }

std::size_t SessionManager::expire_idle() {
  const auto now = now_();
  std::lock_guard lock(registry_mu_);
  std::size_t dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock session_lock(it->second->mu, std::try_to_lock);
    if (session_lock.owns_lock() && now - it->second->last_used > idle_timeout_) {
      session_lock.unlock();
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(registry_mu_);
  return sessions_.size();
}

}  // namespace dialsim::service
