#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "stattree/dataset.hpp"
#include "stattree/descriptive.hpp"

namespace st = stattree;

namespace {

const std::vector<double>& difference() {
  return st::builtin_table2().column(st::table2::kDifference).numbers();
}

double round1(double x) { return std::round(x * 10.0) / 10.0; }

// Independent (n+1)p percentile: position h = (n+1)p on 1-based ranks.
double percentile_oracle(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) + 1.0) * p;
  if (h <= 1.0) return v.front();
  if (h >= static_cast<double>(v.size())) return v.back();
  const auto lo = static_cast<std::size_t>(std::floor(h));
  return v[lo - 1] + (h - static_cast<double>(lo)) * (v[lo] - v[lo - 1]);
}

TEST(Mean, Table2Difference) { EXPECT_DOUBLE_EQ(round1(st::mean(difference())), 33.6); }
TEST(Mean, Singleton) { EXPECT_DOUBLE_EQ(st::mean(std::vector<double>{5}), 5.0); }
TEST(Mean, Symmetric) { EXPECT_DOUBLE_EQ(st::mean(std::vector<double>{-1, 1}), 0.0); }
TEST(Mean, EmptyRejected) { EXPECT_THROW(st::mean(std::vector<double>{}), st::DataError); }

TEST(Median, Table2Difference) { EXPECT_DOUBLE_EQ(round1(st::median(difference())), -26.4); }
TEST(Median, OddN) { EXPECT_DOUBLE_EQ(st::median(std::vector<double>{3, 1, 2}), 2.0); }
TEST(Median, EvenN) { EXPECT_DOUBLE_EQ(st::median(std::vector<double>{1, 2, 3, 4}), 2.5); }

TEST(Modes, Table2DifferenceHasNone) { EXPECT_TRUE(st::modes(difference()).empty()); }
TEST(Modes, Single) { EXPECT_EQ(st::modes(std::vector<double>{1, 1, 2}), std::vector<double>{1}); }
TEST(Modes, Bimodal) {
  EXPECT_EQ(st::modes(std::vector<double>{2, 1, 1, 2}), (std::vector<double>{1, 2}));
}

TEST(Percentile, Table2Quartiles) {
  EXPECT_DOUBLE_EQ(round1(st::percentile(difference(), 0.25)), -166.9);
  EXPECT_DOUBLE_EQ(round1(st::percentile(difference(), 0.75)), 237.8);
}

TEST(Percentile, MatchesOracleOnRandomSamples) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(2 + trial % 23);
    for (auto& x : v) x = nd(rng);
    for (double p : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
      EXPECT_NEAR(st::percentile(v, p), percentile_oracle(v, p), 1e-12);
    }
    EXPECT_DOUBLE_EQ(st::percentile(v, 0.5), st::median(v));
  }
}

TEST(Percentile, OutOfRangeRejected) {
  EXPECT_THROW(st::percentile(std::vector<double>{1, 2}, 1.5), st::DataError);
}

TEST(Variance, Table2Difference) {
  // Two-pass recomputation from the raw column.
  const auto& v = difference();
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  const double var = ss / static_cast<double>(v.size() - 1);
  EXPECT_NEAR(st::sample_variance(v), var, 1e-9);
  EXPECT_NEAR(st::sample_variance(v), 40244.0, 40244.0 * 1e-3);
  EXPECT_DOUBLE_EQ(round1(st::sample_stddev(v)), 200.6);
}

TEST(Variance, Constant) { EXPECT_DOUBLE_EQ(st::sample_variance(std::vector<double>{4, 4, 4}), 0.0); }

TEST(Describe, Table2Difference) {
  const auto d = st::describe(difference());
  EXPECT_EQ(d.n, 16u);
  EXPECT_DOUBLE_EQ(round1(d.mean), 33.6);
  EXPECT_DOUBLE_EQ(round1(d.median), -26.4);
  EXPECT_TRUE(d.modes.empty());
  EXPECT_DOUBLE_EQ(round1(d.range), 531.7);
  EXPECT_DOUBLE_EQ(round1(d.min), -221.3);
  EXPECT_DOUBLE_EQ(round1(d.max), 310.5);
  EXPECT_DOUBLE_EQ(round1(d.q1), -166.9);
  EXPECT_DOUBLE_EQ(round1(d.q3), 237.8);
  EXPECT_DOUBLE_EQ(round1(d.stddev), 200.6);
}

TEST(Describe, Small) {
  const auto d = st::describe(std::vector<double>{1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(d.min, 1);
  EXPECT_DOUBLE_EQ(d.max, 4);
  EXPECT_DOUBLE_EQ(d.range, 3);
  EXPECT_DOUBLE_EQ(d.median, 2.5);
}

TEST(Describe, OrderingInvariant) {
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> ed(0.3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(2 + trial % 17);
    for (auto& x : v) x = ed(rng);
    const auto d = st::describe(v);
    EXPECT_LE(d.min, d.q1);
    EXPECT_LE(d.q1, d.median);
    EXPECT_LE(d.median, d.q3);
    EXPECT_LE(d.q3, d.max);
  }
}

TEST(Outliers, FiveValueSampleHandComputed) {
  // (n+1)p quartiles: Q1 at h = 1.5 -> 1.5, Q3 at h = 4.5 -> 4 + 0.5 * 996 = 502.
  // L = 500.5 puts 1000 inside the inner fence, so nothing is flagged.
  const auto r = st::classify_outliers(std::vector<double>{1, 2, 3, 4, 1000});
  const double q1 = 1.5, q3 = 502.0, l = q3 - q1;
  EXPECT_DOUBLE_EQ(r.l, l);
  EXPECT_DOUBLE_EQ(r.inner_fences.high, q3 + 1.5 * l);
  EXPECT_TRUE(r.mild.empty());
  EXPECT_TRUE(r.extreme.empty());
}

TEST(Outliers, ExtremeDetected) {
  // n = 8: Q1 at h = 2.25 -> 2.25, Q3 at h = 6.75 -> 6.75, L = 4.5.
  // Outer high fence 6.75 + 13.5 = 20.25, inner 13.5.
  const auto r = st::classify_outliers(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 1000});
  EXPECT_DOUBLE_EQ(r.l, st::percentile(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 1000}, 0.75) -
                            st::percentile(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 1000}, 0.25));
  EXPECT_EQ(r.extreme, std::vector<double>{1000});
  EXPECT_TRUE(r.mild.empty());
}

TEST(Outliers, MildDetected) {
  // Quartiles 2.25 and 6.75 do not involve the top point; 18 lies between
  // the inner (13.5) and outer (20.25) high fences.
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 18};
  const double q1 = percentile_oracle(v, 0.25), q3 = percentile_oracle(v, 0.75);
  const double l = q3 - q1;
  const auto r = st::classify_outliers(v);
  ASSERT_GT(18.0, q3 + 1.5 * l);
  ASSERT_LE(18.0, q3 + 3.0 * l);
  EXPECT_EQ(r.mild, std::vector<double>{18});
  EXPECT_TRUE(r.extreme.empty());
}

TEST(Outliers, ConstantSample) {
  const auto r = st::classify_outliers(std::vector<double>{7, 7, 7, 7, 7});
  EXPECT_DOUBLE_EQ(r.l, 0.0);
  EXPECT_TRUE(r.mild.empty());
  EXPECT_TRUE(r.extreme.empty());
}

TEST(Outliers, OnFenceIsInside) {
  // n = 7: Q1 = x2 = 2, Q3 = x6 = 6, L = 4, inner high fence 12.
  const auto r = st::classify_outliers(std::vector<double>{1, 2, 3, 4, 5, 6, 12});
  EXPECT_DOUBLE_EQ(r.inner_fences.high, 12.0);
  EXPECT_TRUE(r.mild.empty());
}

TEST(Boxplot, AfterGroupMedianPositive) {
  const auto g = st::select_response_factor(st::builtin_table2(), st::table2::kDifference,
                                            st::table2::kMoment);
  EXPECT_GT(st::boxplot_stats(g.group("After").values).median, 0.0);
}

TEST(Boxplot, OneToHundred) {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i + 1;
  const auto b = st::boxplot_stats(v);
  EXPECT_DOUBLE_EQ(b.whisker_low, 1);
  EXPECT_DOUBLE_EQ(b.whisker_high, 100);
  EXPECT_TRUE(b.flagged_points.empty());
}

TEST(Boxplot, Constant) {
  const auto b = st::boxplot_stats(std::vector<double>{3, 3, 3, 3});
  EXPECT_DOUBLE_EQ(b.q1, 3);
  EXPECT_DOUBLE_EQ(b.median, 3);
  EXPECT_DOUBLE_EQ(b.q3, 3);
  EXPECT_DOUBLE_EQ(b.whisker_low, 3);
  EXPECT_DOUBLE_EQ(b.whisker_high, 3);
}

TEST(Boxplot, FlagsMatchOutlierReport) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 30, 1000};
  const auto b = st::boxplot_stats(v);
  const auto o = st::classify_outliers(v);
  std::vector<double> expect = o.mild;
  expect.insert(expect.end(), o.extreme.begin(), o.extreme.end());
  std::sort(expect.begin(), expect.end());
  EXPECT_EQ(b.flagged_points, expect);
}

}  // namespace
