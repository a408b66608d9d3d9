#pragma once

// Semantics-preserving rewrites for {AND, OR, NOT} circuits.
//
// Every rule binds active nodes in value roles and absorbs neutral (inactive)
// function nodes when it needs fresh structure. Shared active nodes are never
// relabelled except for the pattern root, whose value is preserved, so other
// consumers keep their semantics. Rule-set application follows the
// probabilistic rule-set call: pick a rule uniformly among those with at least
// one match, then a match uniformly among that rule's matches.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "eggp/circuit_graph.hpp"
#include "eggp/mutation.hpp"

namespace eggp {

enum class RuleId : std::uint8_t {
  DeMorganF1,  // ¬(a ∧ b) → ¬a ∨ ¬b
  DeMorganF2,  // ¬(a ∨ b) → ¬a ∧ ¬b
  DeMorganR1,  // ¬a ∨ ¬b → ¬(a ∧ b)
  DeMorganR2,  // ¬a ∧ ¬b → ¬(a ∨ b)
  IdAndF,      // a → a ∧ a
  IdAndR,      // a ∧ a → a
  IdOrF,       // a → a ∨ a
  IdOrR,       // a ∨ a → a
  IdNotF,      // a → ¬¬a
  IdNotR,      // ¬¬a → a
  Copy1,
  Copy2,
  Collapse1,
  Collapse2,
};

inline constexpr std::array<RuleId, 14> kAllRules = {
    RuleId::DeMorganF1, RuleId::DeMorganF2, RuleId::DeMorganR1, RuleId::DeMorganR2,
    RuleId::IdAndF,     RuleId::IdAndR,     RuleId::IdOrF,      RuleId::IdOrR,
    RuleId::IdNotF,     RuleId::IdNotR,     RuleId::Copy1,      RuleId::Copy2,
    RuleId::Collapse1,  RuleId::Collapse2};

constexpr std::string_view to_string(RuleId r) noexcept {
  switch (r) {
    case RuleId::DeMorganF1: return "DeMorganF1";
    case RuleId::DeMorganF2: return "DeMorganF2";
    case RuleId::DeMorganR1: return "DeMorganR1";
    case RuleId::DeMorganR2: return "DeMorganR2";
    case RuleId::IdAndF: return "IdAndF";
    case RuleId::IdAndR: return "IdAndR";
    case RuleId::IdOrF: return "IdOrF";
    case RuleId::IdOrR: return "IdOrR";
    case RuleId::IdNotF: return "IdNotF";
    case RuleId::IdNotR: return "IdNotR";
    case RuleId::Copy1: return "Copy1";
    case RuleId::Copy2: return "Copy2";
    case RuleId::Collapse1: return "Collapse1";
    case RuleId::Collapse2: return "Collapse2";
  }
  return "?";
}

/// The rule realising the converse law.
constexpr RuleId inverse(RuleId r) noexcept {
  switch (r) {
    case RuleId::DeMorganF1: return RuleId::DeMorganR1;
    case RuleId::DeMorganF2: return RuleId::DeMorganR2;
    case RuleId::DeMorganR1: return RuleId::DeMorganF1;
    case RuleId::DeMorganR2: return RuleId::DeMorganF2;
    case RuleId::IdAndF: return RuleId::IdAndR;
    case RuleId::IdAndR: return RuleId::IdAndF;
    case RuleId::IdOrF: return RuleId::IdOrR;
    case RuleId::IdOrR: return RuleId::IdOrF;
    case RuleId::IdNotF: return RuleId::IdNotR;
    case RuleId::IdNotR: return RuleId::IdNotF;
    case RuleId::Copy1: return RuleId::Collapse1;
    case RuleId::Copy2: return RuleId::Collapse2;
    case RuleId::Collapse1: return RuleId::Copy1;
    case RuleId::Collapse2: return RuleId::Copy2;
  }
  return r;
}

/// Number of neutral nodes a match of `r` absorbs.
constexpr std::size_t absorbed_count(RuleId r) noexcept {
  switch (r) {
    case RuleId::DeMorganF1:
    case RuleId::DeMorganF2:
    case RuleId::IdNotF: return 2;
    case RuleId::DeMorganR1:
    case RuleId::DeMorganR2:
    case RuleId::IdAndF:
    case RuleId::IdOrF:
    case RuleId::Copy1:
    case RuleId::Copy2: return 1;
    default: return 0;
  }
}

enum class RuleSet : std::uint8_t { None, DM, DMN, ID, CC, DMID };

inline constexpr std::array<RuleSet, 6> kAllRuleSets = {
    RuleSet::None, RuleSet::DM, RuleSet::DMN, RuleSet::ID, RuleSet::CC, RuleSet::DMID};

inline std::span<const RuleId> rules_of(RuleSet rs) noexcept {
  using enum RuleId;
  static constexpr std::array<RuleId, 4> dm = {DeMorganF1, DeMorganF2, DeMorganR1, DeMorganR2};
  static constexpr std::array<RuleId, 6> dmn = {DeMorganF1, DeMorganF2, DeMorganR1,
                                                DeMorganR2, IdNotF,     IdNotR};
  static constexpr std::array<RuleId, 6> id = {IdAndF, IdAndR, IdOrF, IdOrR, IdNotF, IdNotR};
  static constexpr std::array<RuleId, 4> cc = {Collapse1, Collapse2, Copy1, Copy2};
  static constexpr std::array<RuleId, 10> dmid = {DeMorganF1, DeMorganF2, DeMorganR1, DeMorganR2,
                                                  IdAndF,     IdAndR,     IdOrF,      IdOrR,
                                                  IdNotF,     IdNotR};
  switch (rs) {
    case RuleSet::None: return {};
    case RuleSet::DM: return dm;
    case RuleSet::DMN: return dmn;
    case RuleSet::ID: return id;
    case RuleSet::CC: return cc;
    case RuleSet::DMID: return dmid;
  }
  return {};
}

constexpr std::string_view to_string(RuleSet rs) noexcept {
  switch (rs) {
    case RuleSet::None: return "none";
    case RuleSet::DM: return "dm";
    case RuleSet::DMN: return "dmn";
    case RuleSet::ID: return "id";
    case RuleSet::CC: return "cc";
    case RuleSet::DMID: return "dmid";
  }
  return "?";
}

inline std::optional<RuleSet> parse_ruleset(std::string_view s) {
  for (auto rs : kAllRuleSets) {
    if (to_string(rs) == s) return rs;
  }
  return std::nullopt;
}

inline constexpr NodeId kUnbound = ~NodeId{0};

// Role layout of `roles`, by rule family:
//   DeMorganF*  {r, m, a, b}        r = NOT root, m = its AND/OR child
//   DeMorganR*  {r, n1, n2, a, b}   r = OR/AND root over NOT nodes n1, n2
//   Id*F        {u, v}              edge = (u -> v)
//   IdAndR/OrR  {u, x, v}           edge = (u -> x), x = AND/OR(v, v)
//   IdNotR      {u, n1, n2, v}      edge = (u -> n1), n1 = NOT(n2), n2 = NOT(v)
//   Copy*       {x, u1, u2}         kept_edge = (u1 -> x), edge = (u2 -> x)
//   Collapse*   {x, y, u}           edge = (u -> y), y duplicates x
// DeMorgan matches use edge = (r, 0).
struct Match {
  RuleId rule = RuleId::DeMorganF1;
  EdgeRef edge{};
  EdgeRef kept_edge{};
  std::array<NodeId, 5> roles{kUnbound, kUnbound, kUnbound, kUnbound, kUnbound};
  std::array<NodeId, 2> absorbed{kUnbound, kUnbound};

  friend bool operator==(const Match&, const Match&) = default;
};

/// Activity information shared by all pattern searches on one graph state.
class RewriteContext {
 public:
  explicit RewriteContext(const Individual& ind)
      : ind_(&ind), active_(active_set(ind)), neutral_(neutral_pool(ind, active_)) {
    offsets_.assign(ind.size() + 1, 0);
    for (NodeId v = 0; v < ind.size(); ++v) {
      if (!active_[v]) continue;
      for (NodeId t : ind[v].out) ++offsets_[t + 1];
    }
    for (std::size_t k = 0; k < ind.size(); ++k) offsets_[k + 1] += offsets_[k];
    in_edges_.resize(offsets_.back());
    auto fill = offsets_;
    for (NodeId v = 0; v < ind.size(); ++v) {
      if (!active_[v]) continue;
      const auto& out = ind[v].out;
      for (std::uint32_t p = 0; p < out.size(); ++p) {
        in_edges_[fill[out[p]]++] = EdgeRef{v, p};
      }
    }
  }

  const Individual& individual() const noexcept { return *ind_; }
  const NodeMask& active() const noexcept { return active_; }
  bool is_active(NodeId v) const noexcept { return v < active_.size() && active_[v]; }
  std::span<const NodeId> neutral() const noexcept { return neutral_; }

  /// Edges into `v` whose source is active.
  std::span<const EdgeRef> active_in_edges(NodeId v) const noexcept {
    return {in_edges_.data() + offsets_[v], in_edges_.data() + offsets_[v + 1]};
  }

  /// Matches of `r` before neutral nodes are assigned.
  std::vector<Match> cores(RuleId r) const {
    std::vector<Match> out;
    collect_cores(r, out);
    return out;
  }

  /// Total match count of `r`: cores times ordered choices of distinct
  /// neutral nodes.
  std::size_t match_count(RuleId r) const {
    return cores(r).size() * neutral_arrangements(r);
  }

  std::size_t neutral_arrangements(RuleId r) const noexcept {
    const std::size_t w = neutral_.size();
    switch (absorbed_count(r)) {
      case 0: return 1;
      case 1: return w;
      default: return w < 2 ? 0 : w * (w - 1);
    }
  }

  void collect_cores(RuleId r, std::vector<Match>& out) const {
    using enum RuleId;
    const Individual& ind = *ind_;
    auto is_fn = [&](NodeId v, FunctionKind k) {
      return ind[v].is_function() && ind[v].kind == k;
    };
    switch (r) {
      case DeMorganF1:
      case DeMorganF2: {
        const auto inner = r == DeMorganF1 ? FunctionKind::And : FunctionKind::Or;
        for_each_active_function(FunctionKind::Not, [&](NodeId root) {
          const auto& ro = ind[root].out;
          if (ro.size() != 1) return;
          const NodeId m = ro[0];
          if (!is_fn(m, inner) || ind[m].out.size() != 2) return;
          const NodeId a = ind[m].out[0], b = ind[m].out[1];
          if (a == b) return;
          Match mt{.rule = r, .edge = {root, 0}};
          mt.roles = {root, m, a, b, kUnbound};
          out.push_back(mt);
        });
        break;
      }
      case DeMorganR1:
      case DeMorganR2: {
        const auto outer = r == DeMorganR1 ? FunctionKind::Or : FunctionKind::And;
        for_each_active_function(outer, [&](NodeId root) {
          const auto& ro = ind[root].out;
          if (ro.size() != 2 || ro[0] == ro[1]) return;
          const NodeId n1 = ro[0], n2 = ro[1];
          if (!is_fn(n1, FunctionKind::Not) || !is_fn(n2, FunctionKind::Not)) return;
          if (ind[n1].out.size() != 1 || ind[n2].out.size() != 1) return;
          const NodeId a = ind[n1].out[0], b = ind[n2].out[0];
          if (a == b) return;
          Match mt{.rule = r, .edge = {root, 0}};
          mt.roles = {root, n1, n2, a, b};
          out.push_back(mt);
        });
        break;
      }
      case IdAndF:
      case IdOrF:
      case IdNotF:
        for_each_active_edge([&](EdgeRef e, NodeId v) {
          Match mt{.rule = r, .edge = e};
          mt.roles[0] = e.source;
          mt.roles[1] = v;
          out.push_back(mt);
        });
        break;
      case IdAndR:
      case IdOrR: {
        const auto kind = r == IdAndR ? FunctionKind::And : FunctionKind::Or;
        for_each_active_edge([&](EdgeRef e, NodeId x) {
          if (!is_fn(x, kind) || ind[x].out.size() != 2 || ind[x].out[0] != ind[x].out[1]) return;
          Match mt{.rule = r, .edge = e};
          mt.roles[0] = e.source;
          mt.roles[1] = x;
          mt.roles[2] = ind[x].out[0];
          out.push_back(mt);
        });
        break;
      }
      case IdNotR:
        for_each_active_edge([&](EdgeRef e, NodeId n1) {
          if (!is_fn(n1, FunctionKind::Not) || ind[n1].out.size() != 1) return;
          const NodeId n2 = ind[n1].out[0];
          if (!is_fn(n2, FunctionKind::Not) || ind[n2].out.size() != 1) return;
          Match mt{.rule = r, .edge = e};
          mt.roles = {e.source, n1, n2, ind[n2].out[0], kUnbound};
          out.push_back(mt);
        });
        break;
      case Copy1:
      case Copy2: {
        const std::size_t k = r == Copy1 ? 1 : 2;
        for (NodeId x = 0; x < ind.size(); ++x) {
          if (!active_[x] || !ind[x].is_function()) continue;
          const auto& xo = ind[x].out;
          if (static_cast<std::size_t>(arity(ind[x].kind)) != k || xo.size() != k) continue;
          if (k == 2 && xo[0] == xo[1]) continue;
          const auto in = active_in_edges(x);
          for (const EdgeRef& kept : in) {
            for (const EdgeRef& moved : in) {
              if (kept.source == moved.source) continue;
              Match mt{.rule = r, .edge = moved, .kept_edge = kept};
              mt.roles = {x, kept.source, moved.source, kUnbound, kUnbound};
              out.push_back(mt);
            }
          }
        }
        break;
      }
      case Collapse1:
      case Collapse2: {
        const std::size_t k = r == Collapse1 ? 1 : 2;
        struct Sig {
          FunctionKind kind;
          NodeId lo, hi;
          NodeId id;
          auto key() const { return std::tuple(kind, lo, hi); }
        };
        std::vector<Sig> sigs;
        for (NodeId v = 0; v < ind.size(); ++v) {
          if (!active_[v] || !ind[v].is_function()) continue;
          const auto& vo = ind[v].out;
          if (static_cast<std::size_t>(arity(ind[v].kind)) != k || vo.size() != k) continue;
          if (k == 2 && vo[0] == vo[1]) continue;
          const NodeId lo = k == 1 ? vo[0] : std::min(vo[0], vo[1]);
          const NodeId hi = k == 1 ? vo[0] : std::max(vo[0], vo[1]);
          sigs.push_back({ind[v].kind, lo, hi, v});
        }
        std::stable_sort(sigs.begin(), sigs.end(),
                         [](const Sig& a, const Sig& b) { return a.key() < b.key(); });
        // Emit in (y, x, in-edge) order for a canonical enumeration.
        std::vector<std::pair<NodeId, NodeId>> pairs;
        for (std::size_t s = 0; s < sigs.size();) {
          std::size_t e = s;
          while (e < sigs.size() && sigs[e].key() == sigs[s].key()) ++e;
          for (std::size_t p = s; p < e; ++p) {
            for (std::size_t q = s; q < e; ++q) {
              if (p != q) pairs.emplace_back(sigs[q].id, sigs[p].id);  // (y, x)
            }
          }
          s = e;
        }
        std::sort(pairs.begin(), pairs.end());
        for (auto [y, x] : pairs) {
          for (const EdgeRef& e : active_in_edges(y)) {
            Match mt{.rule = r, .edge = e};
            mt.roles = {x, y, e.source, kUnbound, kUnbound};
            out.push_back(mt);
          }
        }
        break;
      }
    }
  }

  /// Whether `m`, including its absorbed nodes, is a match on the current
  /// graph state.
  bool holds(const Match& m) const {
    const Individual& ind = *ind_;
    const auto n = ind.size();
    const std::size_t k = absorbed_count(m.rule);
    for (std::size_t j = 0; j < m.absorbed.size(); ++j) {
      const NodeId w = m.absorbed[j];
      if (j >= k) {
        if (w != kUnbound) return false;
        continue;
      }
      if (w >= n || !ind[w].is_function() || active_[w]) return false;
    }
    if (k == 2 && m.absorbed[0] == m.absorbed[1]) return false;

    auto edge_ok = [&](EdgeRef e) {
      return e.source < n && e.position < ind[e.source].out.size();
    };
    for (NodeId v : m.roles) {
      if (v != kUnbound && v >= n) return false;
    }
    std::vector<Match> candidates;
    // Cores are determined by the root node or edge, so regenerating the
    // rule's cores and looking for `m` is exact.
    if (!edge_ok(m.edge)) return false;
    collect_cores(m.rule, candidates);
    Match core = m;
    core.absorbed = {kUnbound, kUnbound};
    return std::find(candidates.begin(), candidates.end(), core) != candidates.end();
  }

 private:
  template <class F>
  void for_each_active_function(FunctionKind kind, F&& f) const {
    const Individual& ind = *ind_;
    for (NodeId v = 0; v < ind.size(); ++v) {
      if (active_[v] && ind[v].is_function() && ind[v].kind == kind) f(v);
    }
  }

  template <class F>
  void for_each_active_edge(F&& f) const {
    const Individual& ind = *ind_;
    for (NodeId u = 0; u < ind.size(); ++u) {
      if (!active_[u]) continue;
      const auto& out = ind[u].out;
      for (std::uint32_t p = 0; p < out.size(); ++p) f(EdgeRef{u, p}, out[p]);
    }
  }

  const Individual* ind_;
  NodeMask active_;
  std::vector<NodeId> neutral_;
  std::vector<std::uint32_t> offsets_;
  std::vector<EdgeRef> in_edges_;
};

/// Every match of `rule`: each core combined with each ordered choice of
/// distinct neutral nodes.
inline std::vector<Match> enumerate_matches(const Individual& ind, RuleId rule) {
  const RewriteContext ctx(ind);
  const auto cores = ctx.cores(rule);
  const auto neutral = ctx.neutral();
  std::vector<Match> out;
  for (const Match& core : cores) {
    switch (absorbed_count(rule)) {
      case 0:
        out.push_back(core);
        break;
      case 1:
        for (NodeId w : neutral) {
          Match m = core;
          m.absorbed[0] = w;
          out.push_back(m);
        }
        break;
      default:
        for (NodeId w1 : neutral) {
          for (NodeId w2 : neutral) {
            if (w1 == w2) continue;
            Match m = core;
            m.absorbed = {w1, w2};
            out.push_back(m);
          }
        }
    }
  }
  return out;
}

namespace detail {

inline void rewrite(Individual& ind, const Match& m) {
  using enum RuleId;
  const auto& r = m.roles;
  const auto& w = m.absorbed;
  switch (m.rule) {
    case DeMorganF1:
    case DeMorganF2:
      ind.rewire(w[0], FunctionKind::Not, {r[2]});
      ind.rewire(w[1], FunctionKind::Not, {r[3]});
      ind.rewire(r[0], m.rule == DeMorganF1 ? FunctionKind::Or : FunctionKind::And, {w[0], w[1]});
      break;
    case DeMorganR1:
    case DeMorganR2:
      ind.rewire(w[0], m.rule == DeMorganR1 ? FunctionKind::And : FunctionKind::Or, {r[3], r[4]});
      ind.rewire(r[0], FunctionKind::Not, {w[0]});
      break;
    case IdAndF:
    case IdOrF:
      ind.rewire(w[0], m.rule == IdAndF ? FunctionKind::And : FunctionKind::Or, {r[1], r[1]});
      ind.retarget(m.edge, w[0]);
      break;
    case IdNotF:
      ind.rewire(w[1], FunctionKind::Not, {r[1]});
      ind.rewire(w[0], FunctionKind::Not, {w[1]});
      ind.retarget(m.edge, w[0]);
      break;
    case IdAndR:
    case IdOrR:
      ind.retarget(m.edge, r[2]);
      break;
    case IdNotR:
      ind.retarget(m.edge, r[3]);
      break;
    case Copy1:
    case Copy2: {
      const Node& x = ind[r[0]];
      Node& copy = ind[w[0]];
      copy.kind = x.kind;
      copy.out = x.out;
      ind.retarget(m.edge, w[0]);
      break;
    }
    case Collapse1:
    case Collapse2:
      ind.retarget(m.edge, r[0]);
      break;
  }
}

}  // namespace detail

/// Applies `m` in place. Throws std::logic_error when `m` is not a match on
/// the individual's current state.
inline void apply_match(Individual& ind, const Match& m) {
  if (!RewriteContext(ind).holds(m)) {
    throw std::logic_error("apply_match: stale or invalid " + std::string(to_string(m.rule)) +
                           " match");
  }
  detail::rewrite(ind, m);
}

/// Draws a match with the two-stage uniform scheme without applying it.
template <class Urbg>
std::optional<Match> select_rewrite(const Individual& ind, RuleSet rs, Urbg& rng) {
  const auto rules = rules_of(rs);
  if (rules.empty()) return std::nullopt;
  const RewriteContext ctx(ind);
  std::vector<std::vector<Match>> cores;
  std::vector<std::size_t> applicable;
  cores.reserve(rules.size());
  for (std::size_t k = 0; k < rules.size(); ++k) {
    cores.push_back(ctx.cores(rules[k]));
    if (!cores.back().empty() && ctx.neutral_arrangements(rules[k]) > 0) applicable.push_back(k);
  }
  if (applicable.empty()) return std::nullopt;

  const std::size_t pick = applicable[uniform_index(applicable.size(), rng)];
  Match m = cores[pick][uniform_index(cores[pick].size(), rng)];
  const auto neutral = ctx.neutral();
  const std::size_t need = absorbed_count(rules[pick]);
  if (need >= 1) {
    const std::size_t first = uniform_index(neutral.size(), rng);
    m.absorbed[0] = neutral[first];
    if (need == 2) {
      std::size_t second = uniform_index(neutral.size() - 1, rng);
      if (second >= first) ++second;
      m.absorbed[1] = neutral[second];
    }
  }
  return m;
}

/// One probabilistic rule-set step. Returns the rule applied, or nullopt
/// (leaving `ind` untouched) when no rule in `rs` has a match.
template <class Urbg>
std::optional<RuleId> apply_ruleset(Individual& ind, RuleSet rs, Urbg& rng) {
  auto m = select_rewrite(ind, rs, rng);
  if (!m) return std::nullopt;
  detail::rewrite(ind, *m);
  return m->rule;
}

}  // namespace eggp
