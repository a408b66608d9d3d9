#pragma once

// Graph genotype for digital circuits.
//
// Node ids are dense: inputs occupy [0, i), function nodes [i, i + n) and
// outputs [i + n, i + n + o). Out-edges point from a consumer to the node that
// supplies its value, so an Output has one out-edge to whatever drives it and
// Inputs have none.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container/static_vector.hpp>

namespace eggp {

using NodeId = std::uint32_t;

enum class FunctionKind : std::uint8_t { And, Or, Not, Nand, Nor };

constexpr int arity(FunctionKind kind) noexcept {
  return kind == FunctionKind::Not ? 1 : 2;
}

constexpr std::string_view to_string(FunctionKind kind) noexcept {
  switch (kind) {
    case FunctionKind::And: return "AND";
    case FunctionKind::Or: return "OR";
    case FunctionKind::Not: return "NOT";
    case FunctionKind::Nand: return "NAND";
    case FunctionKind::Nor: return "NOR";
  }
  return "?";
}

inline std::optional<FunctionKind> parse_function_kind(std::string_view s) {
  for (auto k : {FunctionKind::And, FunctionKind::Or, FunctionKind::Not,
                 FunctionKind::Nand, FunctionKind::Nor}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

using FunctionSet = std::vector<FunctionKind>;

inline FunctionSet and_or_not() {
  return {FunctionKind::And, FunctionKind::Or, FunctionKind::Not};
}
inline FunctionSet and_or_nand_nor() {
  return {FunctionKind::And, FunctionKind::Or, FunctionKind::Nand,
          FunctionKind::Nor};
}

enum class NodeType : std::uint8_t { Input, Output, Function };

// Room for one spare edge beyond the largest arity so that malformed graphs
// (e.g. a NOT with two edges) can still be represented and diagnosed.
inline constexpr std::size_t kMaxOutEdges = 4;
using EdgeList = boost::container::static_vector<NodeId, kMaxOutEdges>;

struct Node {
  NodeType type = NodeType::Function;
  std::uint32_t slot = 0;  // input/output index; unused for function nodes
  FunctionKind kind = FunctionKind::And;
  EdgeList out;

  bool is_input() const noexcept { return type == NodeType::Input; }
  bool is_output() const noexcept { return type == NodeType::Output; }
  bool is_function() const noexcept { return type == NodeType::Function; }

  friend bool operator==(const Node&, const Node&) = default;
};

// A positional handle: the `position`-th out-edge of `source`.
struct EdgeRef {
  NodeId source = 0;
  std::uint32_t position = 0;

  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

class Individual {
 public:
  Individual() = default;

  // Inputs and outputs are created unconnected; function nodes start as
  // edge-less ANDs. Callers wire the graph before use.
  Individual(std::size_t inputs, std::size_t outputs, std::size_t functions)
      : inputs_(inputs), outputs_(outputs), functions_(functions) {
    nodes_.resize(inputs + functions + outputs);
    for (std::size_t k = 0; k < inputs; ++k) {
      nodes_[k].type = NodeType::Input;
      nodes_[k].slot = static_cast<std::uint32_t>(k);
    }
    for (std::size_t k = 0; k < outputs; ++k) {
      auto& node = nodes_[inputs + functions + k];
      node.type = NodeType::Output;
      node.slot = static_cast<std::uint32_t>(k);
    }
  }

  std::size_t num_inputs() const noexcept { return inputs_; }
  std::size_t num_outputs() const noexcept { return outputs_; }
  std::size_t num_function_nodes() const noexcept { return functions_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  NodeId input(std::size_t k) const noexcept { return static_cast<NodeId>(k); }
  NodeId function_node(std::size_t k) const noexcept {
    return static_cast<NodeId>(inputs_ + k);
  }
  NodeId output(std::size_t k) const noexcept {
    return static_cast<NodeId>(inputs_ + functions_ + k);
  }

  const Node& node(NodeId id) const { return nodes_.at(id); }
  Node& node(NodeId id) { return nodes_.at(id); }
  const Node& operator[](NodeId id) const noexcept { return nodes_[id]; }
  Node& operator[](NodeId id) noexcept { return nodes_[id]; }

  std::span<const Node> nodes() const noexcept { return nodes_; }

  NodeId target(EdgeRef e) const { return node(e.source).out.at(e.position); }
  void retarget(EdgeRef e, NodeId to) { node(e.source).out.at(e.position) = to; }

  // Relabels a function node and replaces its out-edges.
  void rewire(NodeId id, FunctionKind kind, std::initializer_list<NodeId> targets) {
    auto& n = node(id);
    n.kind = kind;
    n.out.assign(targets.begin(), targets.end());
  }

  std::size_t num_edges() const noexcept {
    std::size_t total = 0;
    for (const auto& n : nodes_) total += n.out.size();
    return total;
  }

  friend bool operator==(const Individual&, const Individual&) = default;

 private:
  std::size_t inputs_ = 0;
  std::size_t outputs_ = 0;
  std::size_t functions_ = 0;
  std::vector<Node> nodes_;
};

/// Membership mask indexed by NodeId.
using NodeMask = std::vector<bool>;

/// Nodes reachable from any Output node (outputs included).
inline NodeMask active_set(const Individual& ind) {
  NodeMask active(ind.size(), false);
  std::vector<NodeId> stack;
  stack.reserve(ind.size());
  for (std::size_t k = 0; k < ind.num_outputs(); ++k) {
    NodeId o = ind.output(k);
    active[o] = true;
    stack.push_back(o);
  }
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (NodeId t : ind[v].out) {
      if (t < active.size() && !active[t]) {
        active[t] = true;
        stack.push_back(t);
      }
    }
  }
  return active;
}

inline std::size_t count_active_functions(const Individual& ind, const NodeMask& active) {
  std::size_t count = 0;
  for (std::size_t k = 0; k < ind.num_function_nodes(); ++k) {
    if (active[ind.function_node(k)]) ++count;
  }
  return count;
}

inline std::size_t count_active_functions(const Individual& ind) {
  return count_active_functions(ind, active_set(ind));
}

/// Function nodes that no output depends on, in ascending id order.
inline std::vector<NodeId> neutral_pool(const Individual& ind, const NodeMask& active) {
  std::vector<NodeId> pool;
  for (std::size_t k = 0; k < ind.num_function_nodes(); ++k) {
    NodeId id = ind.function_node(k);
    if (!active[id]) pool.push_back(id);
  }
  return pool;
}

inline std::vector<NodeId> neutral_pool(const Individual& ind) {
  return neutral_pool(ind, active_set(ind));
}

/// Nodes with a directed path to `node`, plus `node` itself.
inline NodeMask ancestors_of(const Individual& ind, NodeId node) {
  // Reverse adjacency in CSR form; scratch buffers are reused per thread.
  thread_local std::vector<std::uint32_t> offsets, fill;
  thread_local std::vector<NodeId> parents, stack;
  offsets.assign(ind.size() + 1, 0);
  for (const auto& n : ind.nodes()) {
    for (NodeId t : n.out) ++offsets[t + 1];
  }
  for (std::size_t k = 0; k < ind.size(); ++k) offsets[k + 1] += offsets[k];
  parents.resize(offsets.back());
  fill.assign(offsets.begin(), offsets.end());
  for (NodeId v = 0; v < ind.size(); ++v) {
    for (NodeId t : ind[v].out) parents[fill[t]++] = v;
  }
  NodeMask marked(ind.size(), false);
  stack.assign(1, node);
  marked[node] = true;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (auto k = offsets[v]; k < offsets[v + 1]; ++k) {
      NodeId p = parents[k];
      if (!marked[p]) {
        marked[p] = true;
        stack.push_back(p);
      }
    }
  }
  return marked;
}

enum class ViolationKind : std::uint8_t {
  NodeCounts,
  DanglingEdge,
  InputEdges,
  OutputEdges,
  Arity,
  TargetsOutput,
  Acyclicity,
};

constexpr std::string_view to_string(ViolationKind v) noexcept {
  switch (v) {
    case ViolationKind::NodeCounts: return "node-counts";
    case ViolationKind::DanglingEdge: return "dangling-edge";
    case ViolationKind::InputEdges: return "input-edges";
    case ViolationKind::OutputEdges: return "output-edges";
    case ViolationKind::Arity: return "arity";
    case ViolationKind::TargetsOutput: return "targets-output";
    case ViolationKind::Acyclicity: return "acyclicity";
  }
  return "?";
}

struct Violation {
  NodeId node;
  ViolationKind kind;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Empty result means the individual satisfies every structural invariant.
inline std::vector<Violation> validate(const Individual& ind) {
  std::vector<Violation> out;
  const auto nodes = ind.nodes();
  const std::size_t total = nodes.size();
  if (total != ind.num_inputs() + ind.num_outputs() + ind.num_function_nodes()) {
    out.push_back({0, ViolationKind::NodeCounts});
    return out;
  }
  bool edges_ok = true;
  for (NodeId v = 0; v < total; ++v) {
    const Node& n = nodes[v];
    for (NodeId t : n.out) {
      if (t >= total) {
        out.push_back({v, ViolationKind::DanglingEdge});
        edges_ok = false;
      } else if (nodes[t].is_output()) {
        out.push_back({v, ViolationKind::TargetsOutput});
      }
    }
    switch (n.type) {
      case NodeType::Input:
        if (!n.out.empty()) out.push_back({v, ViolationKind::InputEdges});
        break;
      case NodeType::Output:
        if (n.out.size() != 1) out.push_back({v, ViolationKind::OutputEdges});
        break;
      case NodeType::Function:
        if (n.out.size() != static_cast<std::size_t>(arity(n.kind))) {
          out.push_back({v, ViolationKind::Arity});
        }
        break;
    }
  }
  if (!edges_ok) return out;

  // Iterative three-colour DFS; every node closing a back edge is reported.
  enum : std::uint8_t { White, Grey, Black };
  std::vector<std::uint8_t> colour(total, White);
  std::vector<std::pair<NodeId, std::uint32_t>> stack;
  for (NodeId root = 0; root < total; ++root) {
    if (colour[root] != White) continue;
    stack.emplace_back(root, 0);
    colour[root] = Grey;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < nodes[v].out.size()) {
        NodeId t = nodes[v].out[next++];
        if (colour[t] == Grey) {
          out.push_back({v, ViolationKind::Acyclicity});
        } else if (colour[t] == White) {
          colour[t] = Grey;
          stack.emplace_back(t, 0);
        }
      } else {
        colour[v] = Black;
        stack.pop_back();
      }
    }
  }
  return out;
}

inline bool is_valid(const Individual& ind) { return validate(ind).empty(); }

inline std::string describe(const std::vector<Violation>& violations) {
  std::string s;
  for (const auto& v : violations) {
    if (!s.empty()) s += "; ";
    s += "node " + std::to_string(v.node) + ": " + std::string(to_string(v.kind));
  }
  return s;
}

}  // namespace eggp
