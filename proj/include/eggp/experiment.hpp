#pragma once

// Batch experiments: plan expansion, parallel execution, CSV I/O and the
// per-cell summary table.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <iosfwd>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "eggp/benchmarks.hpp"
#include "eggp/evolution.hpp"
#include "eggp/rewrites.hpp"
#include "eggp/stats.hpp"

namespace eggp {

enum class FunctionSetChoice : std::uint8_t { Aon, Aonn };

constexpr std::string_view to_string(FunctionSetChoice fs) noexcept {
  return fs == FunctionSetChoice::Aon ? "aon" : "aonn";
}

inline std::optional<FunctionSetChoice> parse_function_set(std::string_view s) {
  if (s == "aon") return FunctionSetChoice::Aon;
  if (s == "aonn") return FunctionSetChoice::Aonn;
  return std::nullopt;
}

inline FunctionSet functions_of(FunctionSetChoice fs) {
  return fs == FunctionSetChoice::Aon ? and_or_not() : and_or_nand_nor();
}

struct ExperimentPlan {
  std::vector<std::string> problems;
  std::vector<RuleSet> rulesets{RuleSet::None};
  FunctionSetChoice function_set = FunctionSetChoice::Aon;
  std::vector<std::size_t> nodes{100};
  std::size_t lambda = 4;
  double rate = 0.01;
  std::size_t runs = 1;
  std::uint64_t base_seed = 0;
  std::uint64_t max_evaluations = 20'000'000;
  unsigned threads = 0;  // 0 = hardware concurrency
  bool trace = false;
};

struct RunRow {
  std::string problem;
  RuleSet ruleset = RuleSet::None;
  FunctionSetChoice function_set = FunctionSetChoice::Aon;
  std::size_t nodes = 100;
  std::size_t lambda = 4;
  double rate = 0.01;
  std::uint64_t seed = 0;
  RunRecord record;

  auto sort_key() const { return std::tie(problem, ruleset, function_set, nodes, seed); }
};

struct ExperimentResult {
  std::vector<RunRow> rows;
  // One CSV fragment per row (same order) when tracing was requested.
  std::vector<std::string> traces;
};

inline constexpr std::string_view kCsvHeader =
    "problem,ruleset,function_set,nodes,lambda,rate,seed,evaluations,success,"
    "final_fitness,mean_active_size,snd_applications";

inline constexpr std::string_view kTraceHeader =
    "problem,ruleset,function_set,nodes,seed,generation,evaluations,fitness,"
    "active_size,rewrite";

inline std::string format_rate(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", rate);
  return buf;
}

inline std::string to_csv_line(const RunRow& r) {
  char mas[32];
  std::snprintf(mas, sizeof mas, "%.4f", r.record.mean_active_size);
  std::ostringstream s;
  s << r.problem << ',' << to_string(r.ruleset) << ',' << to_string(r.function_set) << ','
    << r.nodes << ',' << r.lambda << ',' << format_rate(r.rate) << ',' << r.seed << ','
    << r.record.evaluations << ',' << (r.record.success ? 1 : 0) << ','
    << r.record.best_fitness.errors << ',' << mas << ',' << r.record.snd_applications;
  return s.str();
}

inline void write_csv(std::ostream& out, const std::vector<RunRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) out << to_csv_line(r) << '\n';
}

inline std::vector<RunRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("csv: missing or unexpected header");
  }
  std::vector<RunRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 12) {
      throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 12 fields");
    }
    try {
      RunRow r;
      r.problem = f[0];
      auto rs = parse_ruleset(f[1]);
      auto fs = parse_function_set(f[2]);
      if (!rs || !fs) throw std::invalid_argument("bad ruleset or function set");
      r.ruleset = *rs;
      r.function_set = *fs;
      r.nodes = std::stoul(f[3]);
      r.lambda = std::stoul(f[4]);
      r.rate = std::stod(f[5]);
      r.seed = std::stoull(f[6]);
      r.record.evaluations = std::stoull(f[7]);
      r.record.success = f[8] == "1";
      r.record.best_fitness.errors = std::stoull(f[9]);
      r.record.mean_active_size = std::stod(f[10]);
      r.record.snd_applications = std::stoull(f[11]);
      rows.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("csv line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

using ProgressSink = std::function<void(std::size_t done, std::size_t total)>;

inline ExperimentResult run_experiment(const ExperimentPlan& plan, const ProgressSink& progress = {}) {
  if (plan.runs == 0) throw std::invalid_argument("plan: runs must be at least 1");
  if (plan.problems.empty() || plan.rulesets.empty() || plan.nodes.empty()) {
    throw std::invalid_argument("plan: empty problem, ruleset or node list");
  }
  std::map<std::string, TargetSpec> targets;
  for (const auto& p : plan.problems) targets.emplace(p, target_for(p));

  std::vector<RunRow> jobs;
  for (const auto& p : plan.problems) {
    for (auto rs : plan.rulesets) {
      for (auto n : plan.nodes) {
        for (std::size_t k = 0; k < plan.runs; ++k) {
          RunRow r;
          r.problem = p;
          r.ruleset = rs;
          r.function_set = plan.function_set;
          r.nodes = n;
          r.lambda = plan.lambda;
          r.rate = plan.rate;
          r.seed = plan.base_seed + k;
          jobs.push_back(std::move(r));
        }
      }
    }
  }

  ExperimentResult result;
  if (plan.trace) result.traces.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      RunRow& row = jobs[j];
      try {
        EvolutionConfig cfg;
        cfg.target = targets.at(row.problem);
        cfg.nodes = row.nodes;
        cfg.lambda = row.lambda;
        cfg.mutation = MutationParams{row.rate, functions_of(row.function_set)};
        cfg.ruleset = row.ruleset;
        cfg.max_evaluations = plan.max_evaluations;
        cfg.seed = row.seed;
        TraceSink sink;
        std::string* trace = plan.trace ? &result.traces[j] : nullptr;
        if (trace) {
          const std::string prefix = row.problem + ',' + std::string(to_string(row.ruleset)) + ',' +
                                     std::string(to_string(row.function_set)) + ',' +
                                     std::to_string(row.nodes) + ',' + std::to_string(row.seed) + ',';
          sink = [trace, prefix](const GenerationTrace& g) {
            *trace += prefix + std::to_string(g.generation) + ',' + std::to_string(g.evaluations) +
                      ',' + std::to_string(g.fitness.errors) + ',' + std::to_string(g.active_size) +
                      ',' + (g.rewrite ? std::string(to_string(*g.rewrite)) : std::string()) + '\n';
          };
        }
        row.record = evolve(cfg, sink);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
      const std::size_t d = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(d, jobs.size());
      }
    }
  };

  unsigned threads = plan.threads ? plan.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return jobs[a].sort_key() < jobs[b].sort_key(); });
  result.rows.reserve(jobs.size());
  std::vector<std::string> traces;
  for (auto k : order) {
    result.rows.push_back(std::move(jobs[k]));
    if (plan.trace) traces.push_back(std::move(result.traces[k]));
  }
  result.traces = std::move(traces);
  return result;
}

struct Comparison {
  double p = 1.0;
  std::optional<double> a;  // present only when p < 0.05
};

/// Significance of `treatment` against `baseline`; A is the probability that
/// a baseline value exceeds a treatment value.
inline Comparison compare(std::span<const double> baseline, std::span<const double> treatment,
                          double alpha = 0.05) {
  Comparison c;
  c.p = stats::mann_whitney_u(baseline, treatment).p;
  if (c.p < alpha) c.a = stats::vargha_delaney_a(baseline, treatment);
  return c;
}

struct CellSummary {
  std::string problem;
  RuleSet ruleset = RuleSet::None;
  FunctionSetChoice function_set = FunctionSetChoice::Aon;
  std::size_t nodes = 0;
  std::size_t runs = 0;
  stats::SampleSummary evaluations;
  double success_rate = 0.0;
  stats::SampleSummary active_size;  // over per-run mean active sizes
  std::optional<Comparison> vs_baseline;
  std::optional<Comparison> active_vs_baseline;
};

inline std::vector<CellSummary> summarize(const std::vector<RunRow>& rows) {
  using Key = std::tuple<std::string, RuleSet, FunctionSetChoice, std::size_t>;
  std::map<Key, std::vector<const RunRow*>> cells;
  for (const auto& r : rows) cells[{r.problem, r.ruleset, r.function_set, r.nodes}].push_back(&r);

  auto column = [](const std::vector<const RunRow*>& rs, auto field) {
    std::vector<double> v;
    v.reserve(rs.size());
    for (const auto* r : rs) v.push_back(field(*r));
    return v;
  };
  auto evals = [](const RunRow& r) { return static_cast<double>(r.record.evaluations); };
  auto sizes = [](const RunRow& r) { return r.record.mean_active_size; };

  std::vector<CellSummary> out;
  for (const auto& [key, rs] : cells) {
    const auto& [problem, ruleset, fs, nodes] = key;
    CellSummary c;
    c.problem = problem;
    c.ruleset = ruleset;
    c.function_set = fs;
    c.nodes = nodes;
    c.runs = rs.size();
    const auto ev = column(rs, evals);
    const auto mas = column(rs, sizes);
    c.evaluations = stats::median_iqr(ev);
    c.active_size = stats::median_iqr(mas);
    std::size_t ok = 0;
    for (const auto* r : rs) ok += r->record.success;
    c.success_rate = static_cast<double>(ok) / static_cast<double>(rs.size());
    if (ruleset != RuleSet::None) {
      auto base = cells.find({problem, RuleSet::None, fs, nodes});
      if (base != cells.end()) {
        c.vs_baseline = compare(column(base->second, evals), ev);
        c.active_vs_baseline = compare(column(base->second, sizes), mas);
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline std::string format_summary(const std::vector<CellSummary>& cells) {
  std::string s;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-7s %-5s %-5s %6s %5s %8s %12s %12s %8s %8s %9s %6s\n", "problem",
                "rules", "fset", "nodes", "runs", "success", "ME", "IQR", "MAS", "MAS-IQR", "p", "A");
  s += buf;
  for (const auto& c : cells) {
    std::string p = "--", a = "--";
    if (c.vs_baseline) {
      std::snprintf(buf, sizeof buf, "%.2g", c.vs_baseline->p);
      p = buf;
      if (c.vs_baseline->a) {
        std::snprintf(buf, sizeof buf, "%.2f", *c.vs_baseline->a);
        a = buf;
      }
    }
    std::snprintf(buf, sizeof buf, "%-7s %-5s %-5s %6zu %5zu %7.0f%% %12.0f %12.0f %8.1f %8.1f %9s %6s\n",
                  c.problem.c_str(), std::string(to_string(c.ruleset)).c_str(),
                  std::string(to_string(c.function_set)).c_str(), c.nodes, c.runs,
                  100.0 * c.success_rate, c.evaluations.median, c.evaluations.iqr,
                  c.active_size.median, c.active_size.iqr, p.c_str(), a.c_str());
    s += buf;
  }
  return s;
}

}  // namespace eggp
