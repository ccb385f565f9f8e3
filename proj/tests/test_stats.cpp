#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "svcmarket/stats.hpp"
#include "test_util.hpp"

using namespace svcmarket;

TEST(Gini, EqualValuesAreZero) {
  const std::vector<double> v{5, 5, 5, 5};
  EXPECT_DOUBLE_EQ(stats::gini(v), 0.0);
}

TEST(Gini, OneTwoThree) {
  const std::vector<double> v{1, 2, 3};
  EXPECT_NEAR(stats::gini(v), 8.0 / 36.0, 1e-12);
  EXPECT_NEAR(stats::gini(v), testing_util::brute_gini(v), 1e-12);
}

TEST(Gini, MaximalConcentrationForFour) {
  const std::vector<double> v{0, 0, 0, 9};
  EXPECT_NEAR(stats::gini(v), 0.75, 1e-12);
}

TEST(Gini, AllZeroIsZero) {
  const std::vector<double> v{0, 0, 0};
  EXPECT_EQ(stats::gini(v), 0.0);
}

TEST(Gini, NegativeInputThrows) {
  const std::vector<double> v{1, -1};
  EXPECT_THROW(stats::gini(v), NegativeInput);
}

TEST(Gini, MatchesPairwiseOracleAndIsScaleInvariant) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::uniform_int_distribution<int> len(1, 40);
  std::uniform_real_distribution<double> scale(0.01, 1000.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(len(rng)));
    for (auto& x : v) x = u(rng);
    const double g = stats::gini(v);
    EXPECT_NEAR(g, testing_util::brute_gini(v), 1e-12);
    const double c = scale(rng);
    std::vector<double> w;
    for (double x : v) w.push_back(c * x);
    EXPECT_NEAR(stats::gini(w), g, 1e-12);
    const double n = static_cast<double>(v.size());
    EXPECT_LE(g, (n - 1.0) / n + 1e-12);
  }
}

TEST(MinMax, BoundsAndMidpoint) {
  EXPECT_DOUBLE_EQ(stats::minmax_normalize(1.0, 1.0, 5.0), 0.0);
  EXPECT_DOUBLE_EQ(stats::minmax_normalize(5.0, 1.0, 5.0), 1.0);
  EXPECT_DOUBLE_EQ(stats::minmax_normalize(3.0, 1.0, 5.0), 0.5);
  EXPECT_DOUBLE_EQ(stats::minmax_normalize(9.0, 1.0, 5.0), 1.0);
  EXPECT_DOUBLE_EQ(stats::minmax_normalize(2.0, 2.0, 2.0), 1.0);
}

TEST(Rank, StrictOrdering) {
  const auto r = stats::rank_desc({{"A", 3}, {"B", 1}, {"C", 2}});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].id, "A");
  EXPECT_EQ(r[0].rank, 1);
  EXPECT_EQ(r[1].id, "C");
  EXPECT_EQ(r[1].rank, 2);
  EXPECT_EQ(r[2].id, "B");
  EXPECT_EQ(r[2].rank, 3);
}

TEST(Rank, TiesShareSmallerRank) {
  const auto r = stats::rank_desc({{"B", 2}, {"A", 2}});
  EXPECT_EQ(r[0].id, "A");
  EXPECT_EQ(r[0].rank, 1);
  EXPECT_EQ(r[1].rank, 1);
}

TEST(Rank, TableThreeSystemUtilities) {
  const auto r = stats::rank_desc({{"GovA", 20528.649},
                                   {"GovB", 75083.970},
                                   {"GovC", 24050.404},
                                   {"GovD", 31937.032},
                                   {"GovE", 36224.064},
                                   {"GovF", 42398.371},
                                   {"GovG", 42111.221},
                                   {"GovH", 29611.573}});
  const std::vector<std::string> expect{"GovB", "GovF", "GovG", "GovE", "GovD", "GovH", "GovC", "GovA"};
  for (std::size_t i = 0; i < expect.size(); ++i) {
    EXPECT_EQ(r[i].id, expect[i]);
    EXPECT_EQ(r[i].rank, static_cast<int>(i) + 1);
  }
}

TEST(Summary, PopulationStd) {
  const std::vector<double> v{0.8, 0.9, 1.0};
  const auto s = stats::summarize(v);
  EXPECT_NEAR(s.mean, 0.9, 1e-12);
  EXPECT_NEAR(s.std, std::sqrt(0.02 / 3.0), 1e-12);
  EXPECT_EQ(s.count, 3u);
  EXPECT_LE(s.min, s.mean);
  EXPECT_LE(s.mean, s.max);
}

TEST(Autocorrelation, AlternatingSeriesIsNegative) {
  const std::vector<double> v{1, -1, 1, -1, 1, -1, 1, -1};
  EXPECT_LT(stats::lag1_autocorrelation(v), -0.8);
}

TEST(Autocorrelation, MatchesDirectFormula) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(50);
  for (auto& x : v) x = n(rng);
  double m = 0.0;
  for (double x : v) m += x;
  m /= 50.0;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    den += (v[i] - m) * (v[i] - m);
    if (i + 1 < v.size()) num += (v[i] - m) * (v[i + 1] - m);
  }
  EXPECT_NEAR(stats::lag1_autocorrelation(v), num / den, 1e-12);
}
