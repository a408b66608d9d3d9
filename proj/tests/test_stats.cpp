#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace eggp {
namespace {

using stats::mann_whitney_u;
using stats::median_iqr;
using stats::vargha_delaney_a;
using V = std::vector<double>;

TEST(Stats, MedianIqrOfSingleton) {
  const auto s = median_iqr(V{5});
  EXPECT_EQ(s.median, 5.0);
  EXPECT_EQ(s.iqr, 0.0);
  EXPECT_EQ(s.n, 1u);
}

TEST(Stats, MedianIqrUsesInterpolatedQuartiles) {
  const auto s = median_iqr(V{5, 1, 4, 2, 3});
  EXPECT_EQ(s.median, 3.0);
  EXPECT_EQ(s.iqr, 2.0);
  const auto e = median_iqr(V{1, 2, 3, 4});
  EXPECT_EQ(e.median, 2.5);
  EXPECT_EQ(e.iqr, 1.5);  // 3.25 - 1.75
  EXPECT_EQ(median_iqr(V{1, 1, 1, 1}).iqr, 0.0);
  EXPECT_THROW(median_iqr(V{}), std::invalid_argument);
}

TEST(Stats, SeparatedTriplesGiveExactPointOne) {
  const auto r = mann_whitney_u(V{1, 2, 3}, V{4, 5, 6});
  EXPECT_EQ(r.u, 0.0);
  EXPECT_TRUE(r.exact);
  EXPECT_DOUBLE_EQ(r.p, 0.1);
  EXPECT_EQ(mann_whitney_u(V{4, 5, 6}, V{1, 2, 3}).u, 9.0);
}

TEST(Stats, IdenticalSamplesGivePOne) {
  const V xs = {3, 1, 4, 1, 5, 9, 2, 6, 5, 3};
  EXPECT_EQ(mann_whitney_u(xs, xs).p, 1.0);
  const V big(30, 7.0);
  EXPECT_EQ(mann_whitney_u(big, big).p, 1.0);
}

TEST(Stats, ExactModeMatchesEnumeration) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> value(0, 6);  // plenty of ties
  for (std::size_t n1 = 1; n1 <= 6; ++n1) {
    for (std::size_t n2 = 1; n2 <= 6; ++n2) {
      for (int rep = 0; rep < 4; ++rep) {
        V xs(n1), ys(n2);
        for (auto& x : xs) x = value(rng);
        for (auto& y : ys) y = value(rng);
        const auto r = mann_whitney_u(xs, ys);
        ASSERT_TRUE(r.exact);
        ASSERT_EQ(r.p, testing::enumerated_mwu_p(xs, ys)) << n1 << "x" << n2;
      }
    }
  }
}

TEST(Stats, NormalApproximationForLargeSamples) {
  V xs, ys;
  for (int k = 0; k < 20; ++k) {
    xs.push_back(k);
    ys.push_back(k + 10);
  }
  const auto r = mann_whitney_u(xs, ys);
  EXPECT_FALSE(r.exact);
  // 45 wins plus 10 ties at half weight.
  EXPECT_EQ(r.u, 50.0);
  // Ten tie groups of size 2 in the pooled sample.
  const double var = 400.0 / 12.0 * (41.0 - 10.0 * 6.0 / (40.0 * 39.0));
  const double z = (200.0 - 50.0 - 0.5) / std::sqrt(var);
  EXPECT_NEAR(r.p, std::erfc(z / std::sqrt(2.0)), 1e-15);
}

TEST(Stats, NullDrawsRarelyRejected) {
  std::mt19937_64 rng(9);
  std::geometric_distribution<int> draw(1.0 / 15000.0);
  int rejected = 0;
  for (int rep = 0; rep < 100; ++rep) {
    V xs(100), ys(100);
    for (auto& x : xs) x = draw(rng);
    for (auto& y : ys) y = draw(rng);
    rejected += mann_whitney_u(xs, ys).p < 0.05;
  }
  EXPECT_LE(rejected, 10);
}

TEST(Stats, VarghaDelaneyExamples) {
  EXPECT_EQ(vargha_delaney_a(V{4, 5, 6}, V{1, 2, 3}), 1.0);
  EXPECT_EQ(vargha_delaney_a(V{1, 2, 3}, V{1, 2, 3}), 0.5);
  EXPECT_EQ(vargha_delaney_a(V{1, 3}, V{2, 4}), 0.25);
}

TEST(Stats, VarghaDelaneyMatchesPairCount) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> size(1, 40), value(0, 25);
  for (int rep = 0; rep < 1000; ++rep) {
    V xs(static_cast<std::size_t>(size(rng))), ys(static_cast<std::size_t>(size(rng)));
    for (auto& x : xs) x = value(rng);
    for (auto& y : ys) y = value(rng);
    ASSERT_EQ(vargha_delaney_a(xs, ys), testing::pair_count_a(xs, ys));
  }
}

TEST(Stats, EmptySamplesAreRejected) {
  EXPECT_THROW(mann_whitney_u(V{}, V{1}), std::invalid_argument);
  EXPECT_THROW(vargha_delaney_a(V{1}, V{}), std::invalid_argument);
}

}  // namespace
}  // namespace eggp
