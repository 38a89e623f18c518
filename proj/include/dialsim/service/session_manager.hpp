#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "dialsim/corpus/corpus.hpp"
#include "dialsim/env/environment.hpp"
#include "dialsim/nlg/templates.hpp"

namespace dialsim::service {

/// Carries the HTTP status and the {code, message, hint} error body.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, std::string message, std::string hint = {})
      : std::runtime_error(message), status_(status), code_(std::move(code)), hint_(std::move(hint)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }
  const std::string& hint() const { return hint_; }
  nlohmann::json body() const { return {{"code", code_}, {"message", what()}, {"hint", hint_}}; }

 private:
  int status_;
  std::string code_;
  std::string hint_;
};

enum class InputMode { NaturalLanguage = 0, DialogAct = 1 };

struct SessionConfig {
  noise::ErrorModelConfig noise;
  InputMode input_mode = InputMode::DialogAct;
  int act_level = 0;
  bool reveal_goal = true;
  std::uint64_t seed = 0;
};

/// Goal dump in the familiar console shape, including "diaact": "request".
nlohmann::json goal_dump(const core::UserGoal& goal);

/// Turn-based sessions in which a client plays the agent. Thread safe;
/// actions on one session are serialized and a concurrent action is
/// rejected with a conflict instead of queued.
class SessionManager {
 public:
  using Clock = std::chrono::steady_clock;

  SessionManager(const core::DomainSchema& schema, const kb::KnowledgeBase& kb,
                 const corpus::GoalDatabase& goals, const nlg::TemplateSet& templates,
                 std::chrono::seconds idle_timeout = std::chrono::minutes(30));
  ~SessionManager();

  /// Body fields (all optional): slot_err_prob, intent_err_prob,
  /// slot_err_mode, input_mode ("act"|"nl"), act_level, reveal_goal, seed,
  /// goal ({inform_slots, request_slots}).
  nlohmann::json create_session(const nlohmann::json& body);
  /// Body: {"mode": "act"|"nl", "payload": string or act object}.
  nlohmann::json post_action(const std::string& id, const nlohmann::json& body);
  nlohmann::json get_session(const std::string& id);

  nlohmann::json schema_json() const;
  nlohmann::json templates_json() const;

  /// Drops sessions idle longer than the timeout; returns how many.
  std::size_t expire_idle();
  std::size_t size() const;

  /// Test hook for idle-expiry checks.
  void set_clock(std::function<Clock::time_point()> now) { now_ = std::move(now); }

  struct Session;

 private:
  std::shared_ptr<Session> find(const std::string& id);
  nlohmann::json suggestions(const Session& s) const;
  std::string new_id();

  const core::DomainSchema* schema_;
  const kb::KnowledgeBase* kb_;
  const corpus::GoalDatabase* goals_;
  const nlg::TemplateSet* templates_;
  std::chrono::seconds idle_timeout_;
  std::function<Clock::time_point()> now_;
  mutable std::mutex registry_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t id_counter_ = 0;
  std::uint64_t id_salt_;
};

}  // namespace dialsim::service
