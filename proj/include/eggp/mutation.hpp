#pragma once

// Initialisation and the two acyclicity-preserving variation operators.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "eggp/circuit_graph.hpp"

namespace eggp {

using Rng = std::mt19937_64;

template <class Urbg>
std::size_t uniform_index(std::size_t n, Urbg& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

struct MutationParams {
  double rate = 0.01;
  FunctionSet function_set = and_or_not();
};

enum class MutationResult : std::uint8_t { Noop, Changed };

template <class Urbg>
Individual init_circuit(std::size_t inputs, std::size_t outputs, std::size_t functions,
                        const FunctionSet& fs, Urbg& rng) {
  if (inputs == 0 || outputs == 0 || functions == 0) {
    throw std::invalid_argument("init_circuit: i, o and n must all be positive");
  }
  if (fs.empty()) throw std::invalid_argument("init_circuit: empty function set");
  Individual ind(inputs, outputs, functions);
  // Ids [0, inputs + k) are exactly the inputs plus the k function nodes
  // created so far, so every edge points backwards in creation order.
  for (std::size_t k = 0; k < functions; ++k) {
    Node& node = ind[ind.function_node(k)];
    node.kind = fs[uniform_index(fs.size(), rng)];
    for (int e = 0; e < arity(node.kind); ++e) {
      node.out.push_back(static_cast<NodeId>(uniform_index(inputs + k, rng)));
    }
  }
  for (std::size_t k = 0; k < outputs; ++k) {
    ind[ind.output(k)].out.push_back(
        static_cast<NodeId>(uniform_index(inputs + functions, rng)));
  }
  return ind;
}

/// Nodes `edge` may be redirected to without creating a cycle: every
/// non-output node except the current target and the nodes with a path to
/// the edge's source.
inline std::vector<NodeId> edge_candidates(const Individual& ind, EdgeRef edge) {
  const NodeId current = ind.target(edge);
  const NodeMask blocked = ancestors_of(ind, edge.source);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < ind.size(); ++v) {
    if (!ind[v].is_output() && v != current && !blocked[v]) out.push_back(v);
  }
  return out;
}

template <class Urbg>
MutationResult mutate_edge(Individual& ind, EdgeRef edge, Urbg& rng) {
  if (edge.source >= ind.size() || ind[edge.source].is_input() ||
      edge.position >= ind[edge.source].out.size()) {
    throw std::invalid_argument("mutate_edge: invalid edge handle");
  }
  const auto candidates = edge_candidates(ind, edge);
  if (candidates.empty()) return MutationResult::Noop;
  ind.retarget(edge, candidates[uniform_index(candidates.size(), rng)]);
  return MutationResult::Changed;
}

template <class Urbg>
MutationResult mutate_function(Individual& ind, NodeId id, const FunctionSet& fs, Urbg& rng) {
  if (id >= ind.size() || !ind[id].is_function()) {
    throw std::invalid_argument("mutate_function: node " + std::to_string(id) +
                                " is not a function node");
  }
  Node& node = ind[id];
  std::vector<FunctionKind> choices;
  for (auto k : fs) {
    if (k != node.kind) choices.push_back(k);
  }
  if (choices.empty()) return MutationResult::Noop;
  node.kind = choices[uniform_index(choices.size(), rng)];

  const auto want = static_cast<std::size_t>(arity(node.kind));
  if (node.out.size() < want) {
    // Adding edges out of `id` never changes its ancestor set, so one pass
    // of candidates serves every added edge.
    const NodeMask blocked = ancestors_of(ind, id);
    std::vector<NodeId> candidates;
    for (NodeId v = 0; v < ind.size(); ++v) {
      if (!ind[v].is_output() && !blocked[v]) candidates.push_back(v);
    }
    while (node.out.size() < want) {
      node.out.push_back(candidates[uniform_index(candidates.size(), rng)]);
    }
  }
  while (node.out.size() > want) {
    node.out.erase(node.out.begin() + static_cast<std::ptrdiff_t>(uniform_index(node.out.size(), rng)));
  }
  return MutationResult::Changed;
}

namespace detail {

// Gaps between successes of independent Bernoulli(rate) trials.
class BernoulliGaps {
 public:
  explicit BernoulliGaps(double rate) : rate_(rate), geometric_(rate > 0.0 && rate < 1.0 ? rate : 0.5) {}

  template <class Urbg>
  std::size_t next(Urbg& rng) {
    if (rate_ <= 0.0) return std::numeric_limits<std::size_t>::max();
    if (rate_ >= 1.0) return 0;
    return static_cast<std::size_t>(geometric_(rng));
  }

 private:
  double rate_;
  std::geometric_distribution<std::uint64_t> geometric_;
};

}  // namespace detail

/// Per-gene mutation: each function node, then each edge, mutates
/// independently with probability `params.rate`. Returns the number of
/// attempted mutations.
template <class Urbg>
std::size_t point_mutate(Individual& ind, const MutationParams& params, Urbg& rng) {
  if (params.rate < 0.0 || params.rate > 1.0) {
    throw std::invalid_argument("point_mutate: rate must lie in [0, 1]");
  }
  if (params.function_set.empty()) throw std::invalid_argument("point_mutate: empty function set");
  if (params.rate == 0.0) return 0;

  detail::BernoulliGaps gaps(params.rate);
  std::size_t attempts = 0;

  const std::size_t n = ind.num_function_nodes();
  for (std::size_t k = gaps.next(rng); k < n; k += 1 + gaps.next(rng)) {
    mutate_function(ind, ind.function_node(k), params.function_set, rng);
    ++attempts;
  }

  // Edge genes, in node-id then position order, counted after the function
  // mutations have settled the arities.
  std::size_t next = gaps.next(rng);
  std::size_t index = 0;
  for (NodeId v = 0; v < ind.size() && next != std::numeric_limits<std::size_t>::max(); ++v) {
    const std::size_t degree = ind[v].out.size();
    while (next != std::numeric_limits<std::size_t>::max() && index + degree > next) {
      mutate_edge(ind, EdgeRef{v, static_cast<std::uint32_t>(next - index)}, rng);
      ++attempts;
      const std::size_t gap = gaps.next(rng);
      next = gap > std::numeric_limits<std::size_t>::max() - next - 1
                 ? std::numeric_limits<std::size_t>::max()
                 : next + 1 + gap;
    }
    index += degree;
  }
  return attempts;
}

}  // namespace eggp
