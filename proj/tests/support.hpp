#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "dialsim/corpus/corpus.hpp"
#include "dialsim/kb/knowledge_base.hpp"
#include "dialsim/nlg/templates.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return DIALSIM_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return DIALSIM_FIXTURE_DIR; }

/// Schema, KB, goal DB and templates loaded from one data directory.
struct Domain {
  std::shared_ptr<const dialsim::core::DomainSchema> schema;
  dialsim::kb::KnowledgeBase kb;
  dialsim::corpus::GoalDatabase goals;
  dialsim::nlg::TemplateSet templates;
};

inline Domain load_domain(const std::filesystem::path& dir, const std::string& goal_file) {
  using namespace dialsim;
  auto schema = std::make_shared<const core::DomainSchema>(core::DomainSchema::load(dir / "schema.json"));
  auto kb = kb::KnowledgeBase::load(schema, dir / "movie_kb.json");
  auto goals = corpus::load_goal_db(*schema, dir / goal_file);
  auto templates = nlg::TemplateSet::load(*schema, dir / "templates.json");
  return Domain{schema, std::move(kb), std::move(goals), std::move(templates)};
}

/// Full movie domain with the hand-written goal set.
inline const Domain& movie() {
  static const Domain d = load_domain(data_dir(), "curated_goals.json");
  return d;
}

inline const Domain& tiny() {
  static const Domain d = load_domain(data_dir() / "tiny", "goals.json");
  return d;
}

}  // namespace testing
