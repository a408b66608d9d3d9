#pragma once

// Benchmark target functions and the plain-text truth-table format.
//
// Text format:
//   inputs <i> outputs <o>
//   <i input bits, slot 0 first> <o output bits>     (one line per row)
// Blank lines are ignored and '#' starts a comment. Rows may appear in any
// order, but each of the 2^i assignments must appear exactly once.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eggp/semantics.hpp"

namespace eggp {

struct TargetSpec {
  std::string name;
  TruthTable table;

  std::size_t num_inputs() const noexcept { return table.num_inputs(); }
  std::size_t num_outputs() const noexcept { return table.num_outputs(); }

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

/// Bit errors of `ind` against `target`.
inline Fitness fitness(const Individual& ind, const TargetSpec& target) {
  if (ind.num_inputs() != target.num_inputs() ||
      ind.num_outputs() != target.num_outputs()) {
    throw std::invalid_argument("fitness: individual is " +
                                std::to_string(ind.num_inputs()) + "x" +
                                std::to_string(ind.num_outputs()) + " but target " +
                                target.name + " is " +
                                std::to_string(target.num_inputs()) + "x" +
                                std::to_string(target.num_outputs()));
  }
  return hamming_distance(evaluate(ind), target.table);
}

/// Fitness with a reusable workspace; skips structural validation.
class FitnessFunction {
 public:
  explicit FitnessFunction(const TargetSpec& target) : target_(&target) {}

  Fitness operator()(const Individual& ind) {
    return hamming_distance(evaluator_.run(ind), target_->table);
  }
  const TargetSpec& target() const noexcept { return *target_; }

 private:
  const TargetSpec* target_;
  Evaluator evaluator_;
};

namespace detail {

// Builds a table row by row from an integer function of the row index.
inline TruthTable tabulate(std::size_t inputs, std::size_t outputs,
                           const std::function<std::uint64_t(std::uint64_t)>& f) {
  TruthTable t(inputs, outputs);
  for (std::uint64_t row = 0; row < (std::uint64_t{1} << inputs); ++row) {
    const std::uint64_t out = f(row);
    for (std::size_t o = 0; o < outputs; ++o) t.set(o, row, (out >> o) & 1u);
  }
  return t;
}

inline std::uint64_t bits(std::uint64_t word, unsigned lo, unsigned count) {
  return (word >> lo) & ((std::uint64_t{1} << count) - 1);
}

}  // namespace detail

// n-bit ripple-carry adder: inputs a0..a(n-1), b0..b(n-1), cin; outputs
// s0..s(n-1), cout.
inline TruthTable adder_table(unsigned n) {
  return detail::tabulate(2 * n + 1, n + 1, [n](std::uint64_t row) {
    const auto a = detail::bits(row, 0, n);
    const auto b = detail::bits(row, n, n);
    const auto cin = detail::bits(row, 2 * n, 1);
    return a + b + cin;
  });
}

// Unsigned n x n multiplier, product bits LSB first.
inline TruthTable multiplier_table(unsigned n) {
  return detail::tabulate(2 * n, 2 * n, [n](std::uint64_t row) {
    return detail::bits(row, 0, n) * detail::bits(row, n, n);
  });
}

// 3:8 one-hot decoder.
inline TruthTable demux_table() {
  return detail::tabulate(3, 8, [](std::uint64_t row) { return std::uint64_t{1} << row; });
}

// Four 1-bit operands; for each pair (p, q), p < q, in lexicographic order the
// outputs are (x_p < x_q, x_p == x_q, x_p > x_q).
inline TruthTable comparator_table() {
  return detail::tabulate(4, 18, [](std::uint64_t row) {
    std::uint64_t out = 0;
    unsigned slot = 0;
    for (unsigned p = 0; p < 4; ++p) {
      for (unsigned q = p + 1; q < 4; ++q) {
        const auto xp = detail::bits(row, p, 1);
        const auto xq = detail::bits(row, q, 1);
        out |= std::uint64_t{xp < xq} << slot;
        out |= std::uint64_t{xp == xq} << (slot + 1);
        out |= std::uint64_t{xp > xq} << (slot + 2);
        slot += 3;
      }
    }
    return out;
  });
}

// Output 1 iff an even number of inputs are 1.
inline TruthTable even_parity_table(unsigned n) {
  return detail::tabulate(n, 1, [](std::uint64_t row) {
    return std::uint64_t{std::popcount(row) % 2 == 0};
  });
}

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {
      "1-Add", "2-Add", "3-Add", "2-Mul", "3-Mul", "DeMux",
      "Comp",  "3-EP",  "4-EP",  "5-EP",  "6-EP",  "7-EP"};
  return names;
}

inline TargetSpec target_for(std::string_view name) {
  auto make = [&](TruthTable t) { return TargetSpec{std::string(name), std::move(t)}; };
  if (name == "1-Add") return make(adder_table(1));
  if (name == "2-Add") return make(adder_table(2));
  if (name == "3-Add") return make(adder_table(3));
  if (name == "2-Mul") return make(multiplier_table(2));
  if (name == "3-Mul") return make(multiplier_table(3));
  if (name == "DeMux") return make(demux_table());
  if (name == "Comp") return make(comparator_table());
  if (name.size() == 4 && name.substr(1) == "-EP" && name[0] >= '3' && name[0] <= '7') {
    return make(even_parity_table(static_cast<unsigned>(name[0] - '0')));
  }
  throw std::invalid_argument("unknown problem: " + std::string(name));
}

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline std::string format_truth_table(const TargetSpec& spec) {
  const auto& t = spec.table;
  std::string s;
  if (!spec.name.empty()) s += "# " + spec.name + "\n";
  s += "inputs " + std::to_string(t.num_inputs()) + " outputs " +
       std::to_string(t.num_outputs()) + "\n";
  for (std::size_t row = 0; row < t.num_rows(); ++row) {
    for (std::size_t k = 0; k < t.num_inputs(); ++k) {
      s += ((row >> k) & 1u) ? '1' : '0';
      s += ' ';
    }
    for (std::size_t o = 0; o < t.num_outputs(); ++o) {
      s += t.get(o, row) ? '1' : '0';
      s += o + 1 < t.num_outputs() ? " " : "";
    }
    s += '\n';
  }
  return s;
}

/// Parses the text format. The returned spec's name is taken from a leading
/// "# <name>" comment when present.
inline TargetSpec parse_truth_table(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::string name;
  bool have_header = false;
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  TruthTable table;
  std::vector<bool> seen;
  std::size_t rows_seen = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      if (!have_header && name.empty()) {
        std::istringstream c(line.substr(hash + 1));
        c >> name;
      }
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (!have_header) {
      if (tok.size() != 4 || tok[0] != "inputs" || tok[2] != "outputs") {
        throw ParseError(lineno, "expected header 'inputs <i> outputs <o>'");
      }
      try {
        std::size_t used = 0;
        inputs = std::stoul(tok[1], &used);
        if (used != tok[1].size()) throw std::invalid_argument("");
        outputs = std::stoul(tok[3], &used);
        if (used != tok[3].size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ParseError(lineno, "header counts must be non-negative integers");
      }
      if (inputs > kMaxInputs) throw ParseError(lineno, "too many inputs");
      if (outputs == 0) throw ParseError(lineno, "at least one output is required");
      table = TruthTable(inputs, outputs);
      seen.assign(std::size_t{1} << inputs, false);
      have_header = true;
      continue;
    }

    if (tok.size() != inputs + outputs) {
      throw ParseError(lineno, "expected " + std::to_string(inputs + outputs) +
                                   " bits, found " + std::to_string(tok.size()));
    }
    std::size_t row = 0;
    std::vector<bool> out_bits(outputs);
    for (std::size_t k = 0; k < tok.size(); ++k) {
      if (tok[k] != "0" && tok[k] != "1") {
        throw ParseError(lineno, "non-binary symbol '" + tok[k] + "'");
      }
      const bool bit = tok[k] == "1";
      if (k < inputs) {
        row |= std::size_t{bit} << k;
      } else {
        out_bits[k - inputs] = bit;
      }
    }
    if (seen[row]) throw ParseError(lineno, "duplicate row " + std::to_string(row));
    seen[row] = true;
    ++rows_seen;
    for (std::size_t o = 0; o < outputs; ++o) table.set(o, row, out_bits[o]);
  }

  if (!have_header) throw ParseError(lineno, "missing header");
  if (rows_seen != seen.size()) {
    std::size_t missing = 0;
    while (seen[missing]) ++missing;
    throw ParseError(lineno, "missing row " + std::to_string(missing) + " (" +
                                 std::to_string(seen.size() - rows_seen) +
                                 " rows absent)");
  }
  return TargetSpec{name, std::move(table)};
}

}  // namespace eggp
