#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "inquest/environments.hpp"
#include "inquest/parallel.hpp"
#include "inquest/policies.hpp"

namespace inquest {

/// Per-episode RNG stream, keyed by the run seed and the target.
inline std::uint64_t episode_seed(std::uint64_t seed, std::string_view target_id) {
  return derive_seed(seed, fnv1a(target_id));
}

/// Asks the policy for its next question. Image oracles look at the annotated
/// top-N first and widen to the whole gallery when nothing there splits.
inline std::optional<Question> next_question(const Episode& episode, Policy& policy, Rng& rng) {
  const auto& world = episode.world();
  const auto candidates = episode.policy_candidates();
  PolicyView view{world.task, candidates, &world.schema, &episode.history()};
  try {
    return policy.next(view, rng);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::UnparseableQuestion) return Question{FreeText{""}};
    if (e.kind() != ErrorKind::ExhaustedPool) throw;
    if (world.task != TaskKind::Image || candidates.size() == world.candidates.size()) return std::nullopt;
  }
  view.candidates = world.candidates;
  try {
    return policy.next(view, rng);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ExhaustedPool) throw;
    return std::nullopt;
  }
}

/// Plays one episode to termination or budget. An exhausted question pool ends it as a failure.
inline EpisodeRecord run_episode(const SessionConfig& config, std::shared_ptr<const World> world, Policy& policy,
                                 const std::string& target_id, std::uint64_t seed,
                                 std::shared_ptr<const Answerer> answerer = nullptr,
                                 FreeTextParser parser = nullptr) {
  if (!answerer && !config.answerer_endpoint.empty()) {
    answerer = std::make_shared<HttpAnswerer>(config.answerer_endpoint, config.client_timeout_ms);
  }
  Episode episode(config, std::move(world), target_id, std::move(answerer), std::move(parser));
  auto rng = make_rng(episode_seed(seed, target_id));
  while (!episode.done()) {
    const auto question = next_question(episode, policy, rng);
    if (!question) {
      episode.abandon();
      break;
    }
    episode.step(*question);
  }
  return episode.record(policy.name(), seed);
}

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

inline PolicyFactory policy_factory(const std::string& name, OracleConfig oracle = {}) {
  if (name == "oracle") return [oracle] { return std::make_unique<OraclePolicy>(oracle); };
  if (name == "random") return [oracle] { return std::make_unique<RandomPolicy>(oracle); };
  throw Error(ErrorKind::InvalidConfig, "unknown policy '" + name + "' (oracle, random)");
}

struct BenchmarkPlan {
  std::vector<std::string> targets;  // empty: every candidate
  std::vector<std::uint64_t> seeds{0};
  std::size_t workers = 1;
};

/// Episodes over targets x seeds, ordered seed-major then by target regardless of worker count.
inline std::vector<EpisodeRecord> run_benchmark(const SessionConfig& config, const World& world_value,
                                                const PolicyFactory& factory, const BenchmarkPlan& plan) {
  auto world = std::make_shared<const World>(world_value);
  std::vector<std::string> targets = plan.targets;
  if (targets.empty()) {
    for (const auto& c : world->candidates) targets.push_back(c.id);
  }
  for (const auto& t : targets) world->find(t);
  if (plan.seeds.empty()) throw Error(ErrorKind::InvalidConfig, "benchmark needs at least one seed");

  std::vector<EpisodeRecord> records(targets.size() * plan.seeds.size());
  parallel_for(records.size(), plan.workers, [&](std::size_t i) {
    auto policy = factory();
    records[i] = run_episode(config, world, *policy, targets[i % targets.size()], plan.seeds[i / targets.size()]);
  });
  return records;
}

/// One compact JSON object per line.
inline std::string to_jsonl(std::span<const EpisodeRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += json(r).dump();
    out += '\n';
  }
  return out;
}

}  // namespace inquest
