#include "dialsim/corpus/corpus.hpp"

#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace dialsim::corpus {
namespace {

nlohmann::json read_json(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw core::SchemaError(std::string("cannot open ") + what + " file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw core::SchemaError(std::string(what) + " parse error in " + path.string() + ": " + e.what());
  }
  return j;
}

// Shared repair/discard rules. Returns false when the candidate is discarded.
bool clean_candidate(const core::DomainSchema& schema, core::UserGoal& g, ExtractionReport& rep) {
  for (auto it = g.inform_slots.begin(); it != g.inform_slots.end();) {
    if (core::DomainSchema::is_pseudo(it->first) || !schema.is_informable(it->first)) {
      it = g.inform_slots.erase(it);
    } else {
      ++it;
    }
  }
  for (auto it = g.request_slots.begin(); it != g.request_slots.end();) {
    if (!schema.is_requestable(*it) || g.inform_slots.count(*it)) {
      it = g.request_slots.erase(it);
    } else {
      ++it;
    }
  }
  for (const auto& req : schema.required_slots()) {
    if (!g.inform_slots.count(req) && !g.request_slots.count(req)) {
      ++rep.discarded;
      return false;
    }
  }
  if (!g.request_slots.count(schema.default_request_slot())) {
    g.request_slots.insert(schema.default_request_slot());
    ++rep.repaired;
  }
  return true;
}

void require_user_turn(const AnnotatedDialogue& d, std::size_t index) {
  for (const auto& t : d.turns) {
    if (t.act.speaker == core::Speaker::User) return;
  }
  throw core::SchemaError("dialogue " + std::to_string(index) + " has no user turn");
}

}  // namespace

Corpus corpus_from_json(const core::DomainSchema& schema, const nlohmann::json& j) {
  if (!j.is_array()) throw core::SchemaError("corpus must be a JSON list of dialogues");
  Corpus corpus;
  for (std::size_t d = 0; d < j.size(); ++d) {
    AnnotatedDialogue dia;
    const auto& turns = j[d];
    for (std::size_t t = 0; t < turns.size(); ++t) {
      AnnotatedTurn turn;
      turn.act = core::act_from_json(turns[t]);
      turn.act.turn = static_cast<int>(t);
      const auto expected = t % 2 == 0 ? core::Speaker::User : core::Speaker::Agent;
      if (turn.act.speaker != expected)
        throw core::SchemaError("dialogue " + std::to_string(d) + " turn " + std::to_string(t) +
                                ": speakers must alternate starting with the user");
      auto v = core::validate_act(schema, turn.act);
      if (!v.ok())
        throw core::SchemaError("dialogue " + std::to_string(d) + " turn " + std::to_string(t) +
                                ": invalid act (" + core::to_string(v.issues.front().kind) + " " +
                                v.issues.front().detail + ")");
      turn.utterance = turns[t].value("utterance", std::string());
      dia.turns.push_back(std::move(turn));
    }
    corpus.push_back(std::move(dia));
  }
  return corpus;
}

Corpus load_corpus(const core::DomainSchema& schema, const std::filesystem::path& path) {
  return corpus_from_json(schema, read_json(path, "corpus"));
}

std::string to_string(GoalSource s) {
  switch (s) {
    case GoalSource::FirstTurn: return "first_turn";
    case GoalSource::Aggregate: return "aggregate";
    case GoalSource::Unspecified: return "unspecified";
  }
  return "unspecified";
}

GoalSource goal_source_from_string(std::string_view s) {
  if (s == "first_turn") return GoalSource::FirstTurn;
  if (s == "aggregate") return GoalSource::Aggregate;
  return GoalSource::Unspecified;
}

ExtractionReport extract_goals_first_turn(const core::DomainSchema& schema, const Corpus& corpus) {
  if (corpus.empty()) throw core::SchemaError("empty corpus");
  ExtractionReport rep;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    require_user_turn(corpus[d], d);
    core::UserGoal g;
    for (const auto& t : corpus[d].turns) {
      if (t.act.speaker != core::Speaker::User || t.act.intent == "greeting") continue;
      g.inform_slots = t.act.inform_slots;
      g.request_slots = t.act.request_slots;
      break;
    }
    if (clean_candidate(schema, g, rep)) rep.goals.push_back(std::move(g));
  }
  return rep;
}

ExtractionReport extract_goals_aggregate(const core::DomainSchema& schema, const Corpus& corpus) {
  if (corpus.empty()) throw core::SchemaError("empty corpus");
  ExtractionReport rep;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    require_user_turn(corpus[d], d);
    core::UserGoal g;
    std::unordered_set<std::string> seen;
    for (const auto& t : corpus[d].turns) {
      if (t.act.speaker != core::Speaker::User) continue;
      for (const auto& [slot, value] : t.act.inform_slots) {
        if (seen.insert(slot).second) g.inform_slots.emplace(slot, value);
      }
      for (const auto& slot : t.act.request_slots) {
        if (seen.insert(slot).second) g.request_slots.insert(slot);
      }
    }
    if (clean_candidate(schema, g, rep)) rep.goals.push_back(std::move(g));
  }
  return rep;
}

SourcedGoals tag(const std::vector<core::UserGoal>& goals, GoalSource source) {
  SourcedGoals out;
  out.reserve(goals.size());
  for (const auto& g : goals) out.emplace_back(g, source);
  return out;
}

GoalDatabase finalize_goal_db(const SourcedGoals& goals, const kb::KnowledgeBase& kb,
                              bool filter_satisfiable) {
  GoalDatabase db;
  std::unordered_set<std::string> seen;
  for (const auto& [goal, source] : goals) {
    if (!seen.insert(core::canonical_key(goal)).second) continue;
    if (filter_satisfiable && !kb.satisfiable(goal)) continue;
    db.goals.push_back(goal);
    db.provenance.push_back(source);
  }
  if (db.empty()) throw core::SchemaError("goal database is empty after finalization");
  return db;
}

nlohmann::json to_json(const GoalDatabase& db) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < db.goals.size(); ++i) {
    auto j = core::to_json(db.goals[i]);
    if (i < db.provenance.size() && db.provenance[i] != GoalSource::Unspecified)
      j["source"] = to_string(db.provenance[i]);
    arr.push_back(std::move(j));
  }
  return arr;
}

GoalDatabase goal_db_from_json(const core::DomainSchema& schema, const nlohmann::json& j) {
  if (!j.is_array()) throw core::SchemaError("goal file must hold a JSON list");
  GoalDatabase db;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto g = core::goal_from_json(j[i]);
    auto problems = core::goal_violations(schema, g);
    if (!problems.empty())
      throw core::SchemaError("goal " + std::to_string(i) + ": " + problems.front());
    db.goals.push_back(std::move(g));
    db.provenance.push_back(goal_source_from_string(j[i].value("source", std::string())));
  }
  return db;
}

void save_goal_db(const GoalDatabase& db, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write goal file: " + path.string());
  out << to_json(db).dump(2) << '\n';
}

GoalDatabase load_goal_db(const core::DomainSchema& schema, const std::filesystem::path& path) {
  return goal_db_from_json(schema, read_json(path, "goal"));
}

}  // namespace dialsim::corpus
