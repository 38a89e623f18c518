// Serial vs OpenMP timings for the two parallel kernels.
//   bench_kernels [episodes] [batch]

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>

#include <omp.h>

#include "dialsim/agents/agent.hpp"
#include "dialsim/dst/state_tracker.hpp"
#include "dialsim/env/environment.hpp"
#include "dialsim/rl/q_network.hpp"

using namespace dialsim;

namespace {

template <class F>
double best_ms(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool equal) {
  std::cout << name << ": serial " << serial << " ms, parallel " << parallel << " ms, speedup "
            << serial / parallel << "x, identical " << (equal ? "yes" : "NO") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t episodes = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 2000;
  const std::size_t batch = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 4096;
  const std::filesystem::path data = DIALSIM_DATA_DIR;

  auto schema = std::make_shared<const core::DomainSchema>(core::DomainSchema::load(data / "schema.json"));
  auto kb = kb::KnowledgeBase::load(schema, data / "movie_kb.json");
  auto goals = corpus::load_goal_db(*schema, data / "user_goals.json");
  env::Environment env(*schema, kb, goals, nullptr, {});
  std::cout << "threads " << omp_get_max_threads() << ", episodes " << episodes << ", batch " << batch << '\n';

  std::vector<std::uint64_t> seeds(episodes);
  for (std::size_t i = 0; i < episodes; ++i) seeds[i] = core::derive_seed(11, i);
  agents::RuleAgent agent(agents::RuleAgentKind::RequestBasics);
  std::vector<env::EpisodeOutcome> a, b;
  const double es = best_ms(3, [&] { a = env::run_episodes_serial(env, agent, seeds, true); });
  const double ep = best_ms(3, [&] { b = env::run_episodes(env, agent, seeds, true); });
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i)
    same = a[i].status == b[i].status && a[i].transcript == b[i].transcript && a[i].experiences == b[i].experiences;
  row("episode batch", es, ep, same);

  dst::StateTracker layout(*schema, kb);
  rl::QNetwork net(dst::feature_dim(*schema), 80, layout.action_space_size());
  core::Rng rng(3);
  net.init_random(rng);
  std::vector<std::vector<double>> xs(batch, std::vector<double>(net.in_dim()));
  for (auto& x : xs)
    for (auto& v : x) v = core::bernoulli(rng, 0.2) ? 1.0 : 0.0;
  std::vector<std::vector<double>> qs, qp;
  const double fs = best_ms(5, [&] { qs = net.forward_batch_serial(xs); });
  const double fp = best_ms(5, [&] { qp = net.forward_batch(xs); });
  row("q-net batch forward", fs, fp, qs == qp);
  return same && qs == qp ? 0 : 1;
}
