#pragma once

// Median/IQR, the two-tailed Mann-Whitney U test and the Vargha-Delaney A
// effect size.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace eggp::stats {

struct SampleSummary {
  double median = 0.0;
  double iqr = 0.0;
  std::size_t n = 0;
};

/// Quantile by linear interpolation between order statistics (R's type 7).
inline double quantile_sorted(std::span<const double> sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline SampleSummary median_iqr(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("median_iqr: empty sample");
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  const double median = n % 2 ? s[n / 2] : (s[n / 2 - 1] + s[n / 2]) / 2.0;
  return {median, quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25), n};
}

namespace detail {

// Twice the midrank of every pooled observation, xs first then ys; doubling
// keeps tied ranks integral.
struct PooledRanks {
  std::vector<std::int64_t> twice_rank;
  double tie_term = 0.0;  // sum over tie groups of t^3 - t
};

inline PooledRanks pooled_ranks(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size() + ys.size();
  std::vector<double> v;
  v.reserve(n);
  v.insert(v.end(), xs.begin(), xs.end());
  v.insert(v.end(), ys.begin(), ys.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  PooledRanks out;
  out.twice_rank.resize(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    // Positions i..j-1 share the mean of ranks i+1..j.
    const auto twice = static_cast<std::int64_t>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) out.twice_rank[order[k]] = twice;
    const auto t = static_cast<double>(j - i);
    out.tie_term += t * t * t - t;
    i = j;
  }
  return out;
}

}  // namespace detail

struct MannWhitneyResult {
  double u = 0.0;   // U statistic of the first sample
  double p = 1.0;   // two-tailed
  bool exact = false;
};

/// Samples whose smaller side has at most this many observations get an
/// exact permutation p-value.
inline constexpr std::size_t kExactThreshold = 8;

inline MannWhitneyResult mann_whitney_u(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
  const auto n1 = static_cast<std::int64_t>(xs.size());
  const auto n2 = static_cast<std::int64_t>(ys.size());
  const auto ranks = detail::pooled_ranks(xs, ys);

  std::int64_t twice_r1 = 0;
  for (std::int64_t k = 0; k < n1; ++k) twice_r1 += ranks.twice_rank[static_cast<std::size_t>(k)];
  const std::int64_t twice_u1 = twice_r1 - n1 * (n1 + 1);
  MannWhitneyResult res;
  res.u = static_cast<double>(twice_u1) / 2.0;

  if (static_cast<std::size_t>(std::min(n1, n2)) <= kExactThreshold) {
    // Distribution of the smaller side's doubled rank sum over all subsets of
    // that size; the two-tailed p counts subsets at least as far from the
    // mean U as observed.
    const bool x_small = n1 <= n2;
    const std::int64_t m = x_small ? n1 : n2;
    const std::int64_t other = x_small ? n2 : n1;
    const std::size_t total = ranks.twice_rank.size();
    std::int64_t max_sum = 0;
    {
      auto r = ranks.twice_rank;
      std::sort(r.rbegin(), r.rend());
      for (std::int64_t k = 0; k < m; ++k) max_sum += r[static_cast<std::size_t>(k)];
    }
    const auto width = static_cast<std::size_t>(max_sum + 1);
    std::vector<double> ways(static_cast<std::size_t>(m + 1) * width, 0.0);
    auto at = [&](std::int64_t j, std::int64_t s) -> double& {
      return ways[static_cast<std::size_t>(j) * width + static_cast<std::size_t>(s)];
    };
    at(0, 0) = 1.0;
    for (std::size_t item = 0; item < total; ++item) {
      const std::int64_t r = ranks.twice_rank[item];
      for (std::int64_t j = std::min<std::int64_t>(m, static_cast<std::int64_t>(item) + 1); j >= 1; --j) {
        for (std::int64_t s = max_sum; s >= r; --s) at(j, s) += at(j - 1, s - r);
      }
    }
    const std::int64_t twice_u_small = x_small ? twice_u1 : 2 * n1 * n2 - twice_u1;
    const std::int64_t observed = std::llabs(twice_u_small - m * other);
    double extreme = 0.0;
    double all = 0.0;
    for (std::int64_t s = 0; s <= max_sum; ++s) {
      const double c = at(m, s);
      if (c == 0.0) continue;
      all += c;
      const std::int64_t twice_u = s - m * (m + 1);
      if (std::llabs(twice_u - m * other) >= observed) extreme += c;
    }
    res.p = std::min(1.0, extreme / all);
    res.exact = true;
    return res;
  }

  const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2);
  const double n = dn1 + dn2;
  const double variance = dn1 * dn2 / 12.0 * ((n + 1.0) - ranks.tie_term / (n * (n - 1.0)));
  if (variance <= 0.0) {
    res.p = 1.0;
    return res;
  }
  const double deviation = std::max(0.0, std::fabs(res.u - dn1 * dn2 / 2.0) - 0.5);
  const double z = deviation / std::sqrt(variance);
  res.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

/// Probability that a draw from `xs` exceeds one from `ys`, ties counting
/// one half.
inline double vargha_delaney_a(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("vargha_delaney_a: empty sample");
  const auto ranks = detail::pooled_ranks(xs, ys);
  const auto n1 = static_cast<std::int64_t>(xs.size());
  std::int64_t twice_r1 = 0;
  for (std::int64_t k = 0; k < n1; ++k) twice_r1 += ranks.twice_rank[static_cast<std::size_t>(k)];
  const double u1 = static_cast<double>(twice_r1 - n1 * (n1 + 1)) / 2.0;
  return u1 / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

}  // namespace eggp::stats
