#pragma once

// 1+λ evolution strategy with neutral acceptance and once-per-generation
// semantics-preserving drift on the surviving parent.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eggp/benchmarks.hpp"
#include "eggp/circuit_graph.hpp"
#include "eggp/mutation.hpp"
#include "eggp/rewrites.hpp"

namespace eggp {

struct EvolutionConfig {
  TargetSpec target;
  std::size_t nodes = 100;
  std::size_t lambda = 4;
  MutationParams mutation{};
  RuleSet ruleset = RuleSet::None;
  std::uint64_t max_evaluations = 20'000'000;
  std::uint64_t seed = 0;
  // Re-scores the parent after every rewrite and throws if its fitness
  // changed. The extra evaluation is not counted.
  bool verify_rewrites = false;
};

struct RunRecord {
  std::uint64_t evaluations = 0;
  bool success = false;
  Fitness best_fitness{};
  double mean_active_size = 0.0;
  std::uint64_t snd_applications = 0;
  std::uint64_t generations = 0;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Per-generation observation passed to an optional trace callback.
struct GenerationTrace {
  std::uint64_t generation;
  std::uint64_t evaluations;
  Fitness fitness;
  std::size_t active_size;
  std::optional<RuleId> rewrite;
};

using TraceSink = std::function<void(const GenerationTrace&)>;

struct Scored {
  Individual individual;
  Fitness fitness;
};

/// Best child if it is no worse than the parent (ties favour the child),
/// otherwise the parent. Equally good children are chosen uniformly.
template <class Urbg>
std::size_t select_survivor_index(Fitness parent, std::span<const Fitness> children, Urbg& rng,
                                  bool* parent_kept = nullptr) {
  if (children.empty()) throw std::invalid_argument("select_survivor: no children");
  Fitness best = children[0];
  for (auto f : children) best = std::min(best, f);
  std::size_t ties = 0;
  for (auto f : children) ties += f == best;
  std::size_t chosen = 0;
  if (ties == 1) {
    while (children[chosen] != best) ++chosen;
  } else {
    std::size_t nth = uniform_index(ties, rng);
    for (std::size_t k = 0; k < children.size(); ++k) {
      if (children[k] == best && nth-- == 0) {
        chosen = k;
        break;
      }
    }
  }
  if (parent_kept) *parent_kept = parent < best;
  return chosen;
}

template <class Urbg>
Scored select_survivor(Scored parent, std::vector<Scored> children, Urbg& rng) {
  std::vector<Fitness> f;
  f.reserve(children.size());
  for (const auto& c : children) f.push_back(c.fitness);
  bool kept = false;
  const std::size_t k = select_survivor_index(parent.fitness, f, rng, &kept);
  return kept ? std::move(parent) : std::move(children[k]);
}

inline RunRecord evolve(const EvolutionConfig& cfg, const TraceSink& trace = {}) {
  if (cfg.lambda == 0) throw std::invalid_argument("evolve: lambda must be at least 1");
  if (cfg.nodes == 0) throw std::invalid_argument("evolve: node budget must be positive");
  Rng rng(cfg.seed);
  FitnessFunction fitness(cfg.target);

  RunRecord rec;
  Individual parent = init_circuit(cfg.target.num_inputs(), cfg.target.num_outputs(),
                                   cfg.nodes, cfg.mutation.function_set, rng);
  Fitness parent_fitness = fitness(parent);
  rec.evaluations = 1;

  double active_sum = static_cast<double>(count_active_functions(parent));
  std::uint64_t samples = 1;
  if (trace) trace({0, rec.evaluations, parent_fitness, count_active_functions(parent), std::nullopt});

  std::vector<Individual> children(cfg.lambda);
  std::vector<Fitness> child_fitness(cfg.lambda);

  while (!parent_fitness.perfect() && rec.evaluations < cfg.max_evaluations) {
    std::optional<RuleId> rewrite;
    if (cfg.ruleset != RuleSet::None) {
      rewrite = apply_ruleset(parent, cfg.ruleset, rng);
      if (rewrite) {
        ++rec.snd_applications;
        if (cfg.verify_rewrites && fitness(parent) != parent_fitness) {
          throw std::logic_error("evolve: rewrite " + std::string(to_string(*rewrite)) +
                                 " changed the parent's fitness");
        }
      }
    }
    for (std::size_t k = 0; k < cfg.lambda; ++k) {
      children[k] = parent;
      point_mutate(children[k], cfg.mutation, rng);
      child_fitness[k] = fitness(children[k]);
    }
    rec.evaluations += cfg.lambda;
    ++rec.generations;

    bool kept = false;
    const std::size_t chosen = select_survivor_index(parent_fitness, child_fitness, rng, &kept);
    if (!kept) {
      std::swap(parent, children[chosen]);
      parent_fitness = child_fitness[chosen];
    }
    const std::size_t active = count_active_functions(parent);
    active_sum += static_cast<double>(active);
    ++samples;
    if (trace) trace({rec.generations, rec.evaluations, parent_fitness, active, rewrite});
  }

  rec.success = parent_fitness.perfect();
  rec.best_fitness = parent_fitness;
  rec.mean_active_size = active_sum / static_cast<double>(samples);
  return rec;
}

}  // namespace eggp
