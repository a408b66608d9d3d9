#pragma once

// Bit-parallel truth-table evaluation and the bit-error fitness.
//
// Row r of a table is the input assignment whose slot k equals bit k of r, so
// input slot 0 is the least significant bit. Rows are packed 64 to a word;
// tables narrower than a word keep their unused high bits at zero.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eggp/circuit_graph.hpp"

namespace eggp {

inline constexpr std::size_t kMaxInputs = 16;

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

class TruthTable {
 public:
  TruthTable() = default;
  TruthTable(std::size_t inputs, std::size_t outputs)
      : inputs_(inputs), outputs_(outputs) {
    if (inputs > kMaxInputs) {
      throw std::invalid_argument("truth table supports at most " +
                                  std::to_string(kMaxInputs) + " inputs");
    }
    words_ = words_for(inputs);
    bits_.assign(outputs * words_, 0);
  }

  static constexpr std::size_t words_for(std::size_t inputs) noexcept {
    const std::size_t rows = std::size_t{1} << inputs;
    return rows < kWordBits ? 1 : rows / kWordBits;
  }

  // Mask of valid row bits within each word.
  static constexpr Word row_mask(std::size_t inputs) noexcept {
    const std::size_t rows = std::size_t{1} << inputs;
    return rows >= kWordBits ? ~Word{0} : (Word{1} << rows) - 1;
  }

  std::size_t num_inputs() const noexcept { return inputs_; }
  std::size_t num_outputs() const noexcept { return outputs_; }
  std::size_t num_rows() const noexcept { return std::size_t{1} << inputs_; }
  std::size_t words_per_column() const noexcept { return words_; }

  bool get(std::size_t output, std::size_t row) const {
    return (column(output)[row / kWordBits] >> (row % kWordBits)) & 1u;
  }
  void set(std::size_t output, std::size_t row, bool value) {
    Word& w = column(output)[row / kWordBits];
    const Word bit = Word{1} << (row % kWordBits);
    w = value ? (w | bit) : (w & ~bit);
  }

  std::span<const Word> column(std::size_t output) const {
    return {bits_.data() + output * words_, words_};
  }
  std::span<Word> column(std::size_t output) {
    return {bits_.data() + output * words_, words_};
  }

  friend bool operator==(const TruthTable&, const TruthTable&) = default;

 private:
  std::size_t inputs_ = 0;
  std::size_t outputs_ = 0;
  std::size_t words_ = 1;
  std::vector<Word> bits_;
};

/// Word `w` of the column holding input slot `k` over all rows.
inline Word input_pattern(std::size_t k, std::size_t w) noexcept {
  static constexpr Word kLow[6] = {
      0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
      0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  if (k < 6) return kLow[k];
  return ((w >> (k - 6)) & 1u) ? ~Word{0} : Word{0};
}

inline Word apply_function(FunctionKind kind, Word a, Word b) noexcept {
  switch (kind) {
    case FunctionKind::And: return a & b;
    case FunctionKind::Or: return a | b;
    case FunctionKind::Not: return ~a;
    case FunctionKind::Nand: return ~(a & b);
    case FunctionKind::Nor: return ~(a | b);
  }
  return 0;
}

/// Reusable evaluation workspace. `run` assumes a structurally valid
/// individual; use `evaluate` for checked evaluation.
class Evaluator {
 public:
  const TruthTable& run(const Individual& ind) {
    const std::size_t words = TruthTable::words_for(ind.num_inputs());
    const Word mask = TruthTable::row_mask(ind.num_inputs());
    if (table_.num_inputs() != ind.num_inputs() ||
        table_.num_outputs() != ind.num_outputs()) {
      table_ = TruthTable(ind.num_inputs(), ind.num_outputs());
    }
    values_.resize(ind.size() * words);
    state_.assign(ind.size(), 0);
    order_.clear();

    // Post-order DFS from the outputs gives a topological order of the
    // active nodes only.
    for (std::size_t o = 0; o < ind.num_outputs(); ++o) {
      NodeId root = ind.output(o);
      if (state_[root]) continue;
      stack_.push_back({root, 0});
      state_[root] = 1;
      while (!stack_.empty()) {
        auto& [v, next] = stack_.back();
        const auto& out = ind[v].out;
        if (next < out.size()) {
          NodeId t = out[next++];
          if (!state_[t]) {
            state_[t] = 1;
            stack_.push_back({t, 0});
          }
        } else {
          order_.push_back(v);
          stack_.pop_back();
        }
      }
    }

    for (NodeId v : order_) {
      const Node& n = ind[v];
      Word* dst = values_.data() + std::size_t{v} * words;
      switch (n.type) {
        case NodeType::Input:
          for (std::size_t w = 0; w < words; ++w) dst[w] = input_pattern(n.slot, w) & mask;
          break;
        case NodeType::Output: {
          const Word* src = values_.data() + std::size_t{n.out[0]} * words;
          std::copy(src, src + words, dst);
          auto col = table_.column(n.slot);
          std::copy(src, src + words, col.begin());
          break;
        }
        case NodeType::Function: {
          const Word* a = values_.data() + std::size_t{n.out[0]} * words;
          const Word* b = n.out.size() > 1 ? values_.data() + std::size_t{n.out[1]} * words : a;
          for (std::size_t w = 0; w < words; ++w) {
            dst[w] = apply_function(n.kind, a[w], b[w]) & mask;
          }
          break;
        }
      }
    }
    return table_;
  }

 private:
  struct Frame {
    NodeId node;
    std::uint32_t next;
  };
  TruthTable table_;
  std::vector<Word> values_;
  std::vector<std::uint8_t> state_;
  std::vector<NodeId> order_;
  std::vector<Frame> stack_;
};

inline TruthTable evaluate(const Individual& ind) {
  if (ind.num_inputs() > kMaxInputs) {
    throw std::invalid_argument("evaluate: too many inputs (" +
                                std::to_string(ind.num_inputs()) + ")");
  }
  if (auto v = validate(ind); !v.empty()) {
    throw std::invalid_argument("evaluate: invalid individual: " + describe(v));
  }
  Evaluator ev;
  return ev.run(ind);
}

struct Fitness {
  std::uint64_t errors = 0;

  bool perfect() const noexcept { return errors == 0; }
  friend auto operator<=>(const Fitness&, const Fitness&) = default;
};

/// Total Hamming distance over all output columns.
inline Fitness hamming_distance(const TruthTable& a, const TruthTable& b) {
  if (a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs()) {
    throw std::invalid_argument("fitness: truth table dimensions differ");
  }
  std::uint64_t errors = 0;
  for (std::size_t o = 0; o < a.num_outputs(); ++o) {
    auto ca = a.column(o);
    auto cb = b.column(o);
    for (std::size_t w = 0; w < ca.size(); ++w) errors += std::popcount(ca[w] ^ cb[w]);
  }
  return {errors};
}

}  // namespace eggp
