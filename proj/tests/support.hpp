#pragma once

// Fixtures and brute-force oracles shared by the unit and acceptance tests.
// Oracles deliberately avoid the library's traversal and matching code.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <set>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "eggp/eggp.hpp"

namespace eggp::testing {

using enum FunctionKind;

// The reference 2-input, 2-output circuit. Function
// node k carries figure id k + 3; out-edges follow drawing order.
inline Individual fig1() {
  Individual ind(2, 2, 10);
  auto f = [&](int fig_id) { return ind.function_node(static_cast<std::size_t>(fig_id - 3)); };
  auto in = [&](int k) { return ind.input(static_cast<std::size_t>(k)); };
  ind.rewire(f(3), And, {in(0), in(1)});
  ind.rewire(f(4), Or, {in(1), in(0)});
  ind.rewire(f(5), Or, {f(4), in(1)});
  ind.rewire(f(6), Not, {f(3)});
  ind.rewire(f(7), Not, {f(4)});
  ind.rewire(f(8), And, {f(7), f(4)});
  ind.rewire(f(9), And, {f(8), f(5)});
  ind.rewire(f(10), And, {f(7), f(11)});
  ind.rewire(f(11), Or, {f(8), f(7)});
  ind.rewire(f(12), Not, {f(8)});
  ind[ind.output(0)].out.push_back(f(7));
  ind[ind.output(1)].out.push_back(f(12));
  return ind;
}

// OUT -> NOT -> AND -> (in0, in1) plus `spare` unreachable function nodes.
inline Individual not_and_fixture(std::size_t spare) {
  Individual ind(2, 1, 2 + spare);
  const NodeId n = ind.function_node(0), a = ind.function_node(1);
  ind.rewire(n, Not, {a});
  ind.rewire(a, And, {ind.input(0), ind.input(1)});
  for (std::size_t k = 0; k < spare; ++k) {
    ind.rewire(ind.function_node(2 + k), Or, {ind.input(0), ind.input(1)});
  }
  ind[ind.output(0)].out.push_back(n);
  return ind;
}

// Random circuit that has been through mutation and assorted rewrites, so
// reverse-rule patterns (parallel edges, NOT chains, duplicates) show up.
template <class Urbg>
Individual scrambled_individual(std::size_t i, std::size_t o, std::size_t n, Urbg& rng,
                                std::size_t steps = 8) {
  Individual ind = init_circuit(i, o, n, and_or_not(), rng);
  MutationParams params{0.1, and_or_not()};
  constexpr RuleSet kMix[] = {RuleSet::DMID, RuleSet::CC, RuleSet::ID, RuleSet::DM};
  for (std::size_t s = 0; s < steps; ++s) {
    if (uniform_index(3, rng) == 0) {
      point_mutate(ind, params, rng);
    } else {
      apply_ruleset(ind, kMix[uniform_index(4, rng)], rng);
    }
  }
  return ind;
}

// Breadth-first reachability from the outputs.
inline std::vector<bool> bfs_active(const Individual& ind) {
  std::vector<bool> seen(ind.size(), false);
  std::deque<NodeId> queue;
  for (NodeId v = 0; v < ind.size(); ++v) {
    if (ind[v].type == NodeType::Output) {
      seen[v] = true;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (NodeId t : ind[v].out) {
      if (!seen[t]) {
        seen[t] = true;
        queue.push_back(t);
      }
    }
  }
  return seen;
}

inline std::vector<NodeId> bfs_neutral(const Individual& ind) {
  const auto active = bfs_active(ind);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < ind.size(); ++v) {
    if (ind[v].type == NodeType::Function && !active[v]) out.push_back(v);
  }
  return out;
}

// One row at a time, by plain recursion.
inline bool scalar_value(const Individual& ind, NodeId v, std::uint64_t row) {
  const Node& n = ind[v];
  switch (n.type) {
    case NodeType::Input:
      return (row >> n.slot) & 1u;
    case NodeType::Output:
      return scalar_value(ind, n.out[0], row);
    case NodeType::Function:
      break;
  }
  const bool a = scalar_value(ind, n.out[0], row);
  const bool b = n.out.size() > 1 ? scalar_value(ind, n.out[1], row) : a;
  switch (n.kind) {
    case And: return a && b;
    case Or: return a || b;
    case Not: return !a;
    case Nand: return !(a && b);
    case Nor: return !(a || b);
  }
  return false;
}

inline bool scalar_output(const Individual& ind, std::size_t o, std::uint64_t row) {
  return scalar_value(ind, ind.output(o), row);
}

// Every node an edge could point at so that the result still validates.
inline std::set<NodeId> brute_edge_candidates(const Individual& ind, EdgeRef e) {
  std::set<NodeId> out;
  const NodeId current = ind.target(e);
  for (NodeId t = 0; t < ind.size(); ++t) {
    if (t == current) continue;
    Individual trial = ind;
    trial.retarget(e, t);
    if (is_valid(trial)) out.insert(t);
  }
  return out;
}

// Match count by exhaustive scans over node tuples and edge handles.
inline std::size_t brute_match_count(const Individual& ind, RuleId rule) {
  using enum RuleId;
  const auto active = bfs_active(ind);
  const std::size_t w = bfs_neutral(ind).size();
  const std::size_t n = ind.size();
  auto fn = [&](NodeId v, FunctionKind k) {
    return ind[v].type == NodeType::Function && ind[v].kind == k;
  };
  auto edges_are = [&](NodeId v, std::initializer_list<NodeId> ts) {
    return std::equal(ind[v].out.begin(), ind[v].out.end(), ts.begin(), ts.end());
  };
  std::size_t cores = 0;
  std::size_t absorbed = 0;
  switch (rule) {
    case DeMorganF1:
    case DeMorganF2: {
      const auto inner = rule == DeMorganF1 ? And : Or;
      absorbed = 2;
      for (NodeId r = 0; r < n; ++r)
        for (NodeId m = 0; m < n; ++m)
          for (NodeId a = 0; a < n; ++a)
            for (NodeId b = 0; b < n; ++b) {
              if (!active[r] || !fn(r, Not) || !fn(m, inner)) continue;
              if (a == b || !active[a] || !active[b]) continue;
              if (edges_are(r, {m}) && edges_are(m, {a, b})) ++cores;
            }
      break;
    }
    case DeMorganR1:
    case DeMorganR2: {
      const auto outer = rule == DeMorganR1 ? Or : And;
      absorbed = 1;
      for (NodeId r = 0; r < n; ++r)
        for (NodeId n1 = 0; n1 < n; ++n1)
          for (NodeId n2 = 0; n2 < n; ++n2) {
            if (!active[r] || !fn(r, outer) || n1 == n2) continue;
            if (!fn(n1, Not) || !fn(n2, Not) || !edges_are(r, {n1, n2})) continue;
            if (ind[n1].out.size() == 1 && ind[n2].out.size() == 1 &&
                ind[n1].out[0] != ind[n2].out[0]) {
              ++cores;
            }
          }
      break;
    }
    case IdAndF:
    case IdOrF:
    case IdNotF:
      absorbed = rule == IdNotF ? 2 : 1;
      for (NodeId u = 0; u < n; ++u) {
        if (active[u]) cores += ind[u].out.size();
      }
      break;
    case IdAndR:
    case IdOrR: {
      const auto kind = rule == IdAndR ? And : Or;
      for (NodeId u = 0; u < n; ++u)
        for (NodeId x = 0; x < n; ++x)
          for (NodeId v = 0; v < n; ++v) {
            if (!active[u] || !active[x] || !fn(x, kind) || !edges_are(x, {v, v})) continue;
            for (NodeId t : ind[u].out) cores += t == x;
          }
      break;
    }
    case IdNotR:
      for (NodeId u = 0; u < n; ++u)
        for (NodeId n1 = 0; n1 < n; ++n1)
          for (NodeId n2 = 0; n2 < n; ++n2) {
            if (!active[u] || !fn(n1, Not) || !fn(n2, Not) || n1 == n2) continue;
            if (!edges_are(n1, {n2}) || ind[n2].out.size() != 1) continue;
            for (NodeId t : ind[u].out) cores += t == n1;
          }
      break;
    case Copy1:
    case Copy2: {
      const std::size_t k = rule == Copy1 ? 1 : 2;
      absorbed = 1;
      for (NodeId x = 0; x < n; ++x) {
        if (!active[x] || ind[x].type != NodeType::Function) continue;
        if (static_cast<std::size_t>(arity(ind[x].kind)) != k || ind[x].out.size() != k) continue;
        if (k == 2 && ind[x].out[0] == ind[x].out[1]) continue;
        std::vector<NodeId> sources;  // one entry per in-edge
        for (NodeId u = 0; u < n; ++u) {
          if (!active[u]) continue;
          for (NodeId t : ind[u].out) {
            if (t == x) sources.push_back(u);
          }
        }
        for (std::size_t p = 0; p < sources.size(); ++p)
          for (std::size_t q = 0; q < sources.size(); ++q) cores += sources[p] != sources[q];
      }
      break;
    }
    case Collapse1:
    case Collapse2: {
      const std::size_t k = rule == Collapse1 ? 1 : 2;
      auto shape = [&](NodeId v) {
        return active[v] && ind[v].type == NodeType::Function &&
               static_cast<std::size_t>(arity(ind[v].kind)) == k && ind[v].out.size() == k &&
               (k == 1 || ind[v].out[0] != ind[v].out[1]);
      };
      for (NodeId x = 0; x < n; ++x)
        for (NodeId y = 0; y < n; ++y) {
          if (x == y || !shape(x) || !shape(y) || ind[x].kind != ind[y].kind) continue;
          std::multiset<NodeId> tx(ind[x].out.begin(), ind[x].out.end());
          std::multiset<NodeId> ty(ind[y].out.begin(), ind[y].out.end());
          if (tx != ty) continue;
          for (NodeId u = 0; u < n; ++u) {
            if (!active[u]) continue;
            for (NodeId t : ind[u].out) cores += t == y;
          }
        }
      break;
    }
  }
  const std::size_t arrangements = absorbed == 0 ? 1 : absorbed == 1 ? w : (w < 2 ? 0 : w * (w - 1));
  return cores * arrangements;
}

// Pearson statistic of `counts` against `probs`, with the critical value at
// level `alpha`.
struct ChiSquare {
  double statistic = 0.0;
  double critical = 0.0;
  bool uniform_ok() const { return statistic < critical; }
};

inline ChiSquare chi_square(const std::vector<std::size_t>& counts, const std::vector<double>& probs,
                            double alpha = 0.01) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  ChiSquare out;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double e = total * probs[k];
    const double d = static_cast<double>(counts[k]) - e;
    out.statistic += d * d / e;
  }
  const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  out.critical = boost::math::quantile(dist, 1.0 - alpha);
  return out;
}

inline ChiSquare chi_square_uniform(const std::vector<std::size_t>& counts, double alpha = 0.01) {
  return chi_square(counts, std::vector<double>(counts.size(), 1.0 / static_cast<double>(counts.size())),
                    alpha);
}

// Two-tailed exact Mann-Whitney p by listing every split of the pooled
// sample into groups of the original sizes.
inline double enumerated_mwu_p(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> pooled(xs);
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  const std::size_t n = pooled.size(), m = xs.size();
  auto u_of = [&](const std::vector<bool>& in_x) {
    double u = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      if (!in_x[a]) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (in_x[b]) continue;
        u += pooled[a] > pooled[b] ? 1.0 : pooled[a] == pooled[b] ? 0.5 : 0.0;
      }
    }
    return u;
  };
  std::vector<bool> observed(n, false);
  for (std::size_t k = 0; k < m; ++k) observed[k] = true;
  const double centre = static_cast<double>(m * (n - m)) / 2.0;
  const double dev = std::fabs(u_of(observed) - centre);
  std::size_t extreme = 0, total = 0;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(m), true);
  do {
    ++total;
    if (std::fabs(u_of(pick) - centre) >= dev - 1e-9) ++extreme;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

inline double pair_count_a(const std::vector<double>& xs, const std::vector<double>& ys) {
  double wins = 0.0;
  for (double x : xs)
    for (double y : ys) wins += x > y ? 1.0 : x == y ? 0.5 : 0.0;
  return wins / static_cast<double>(xs.size() * ys.size());
}

}  // namespace eggp::testing
