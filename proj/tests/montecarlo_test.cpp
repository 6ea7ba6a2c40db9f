#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "stattree/montecarlo.hpp"

namespace st = stattree;

namespace {

st::Scenario two_normals(double shift, std::uint64_t seed, std::size_t n = 20) {
  st::Scenario s;
  s.group_specs = {{st::NormalDist{0, 1}, n}, {st::NormalDist{shift, 1}, n}};
  s.truth = shift == 0 ? st::Truth::null_hypothesis : st::Truth::alternative;
  s.seed = seed;
  return s;
}

TEST(SplitMix64, ReferenceSequence) {
  // First outputs for seed 1234567 from the reference C implementation.
  st::SplitMix64 g(1234567);
  EXPECT_EQ(g(), 6457827717110365317ULL);
  EXPECT_EQ(g(), 3203168211198807973ULL);
  EXPECT_EQ(g(), 9817491932198370423ULL);
}

TEST(SplitMix64, UniformOpenInterval) {
  st::SplitMix64 g(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(SplitMix64, ReplicationStreamsDiffer) {
  std::set<std::uint64_t> first;
  for (std::uint64_t r = 0; r < 1000; ++r) first.insert(st::SplitMix64::for_replication(42, r)());
  EXPECT_EQ(first.size(), 1000u);
}

TEST(Draw, MomentsMatchDistribution) {
  st::SplitMix64 g(5);
  const int n = 200000;
  double s_n = 0, s_u = 0, s_e = 0, ss_n = 0;
  for (int i = 0; i < n; ++i) {
    const double x = st::draw(st::NormalDist{2, 3}, g);
    s_n += x;
    ss_n += (x - 2) * (x - 2);
    s_u += st::draw(st::UniformDist{-1, 3}, g);
    s_e += st::draw(st::ExponentialDist{0.5}, g);
  }
  EXPECT_NEAR(s_n / n, 2.0, 0.03);
  EXPECT_NEAR(ss_n / n, 9.0, 0.1);
  EXPECT_NEAR(s_u / n, 1.0, 0.01);
  EXPECT_NEAR(s_e / n, 2.0, 0.02);
}

TEST(ErrorRates, Deterministic) {
  const auto a = st::simulate_error_rates(two_normals(0, 77), st::SimulatedTest::t_test, 500, 0.05, 1);
  const auto b = st::simulate_error_rates(two_normals(0, 77), st::SimulatedTest::t_test, 500, 0.05, 4);
  EXPECT_EQ(a, b);
}

TEST(ErrorRates, NullCalibrationPerTest) {
  constexpr std::size_t kR = 10000;
  for (auto t : {st::SimulatedTest::t_test, st::SimulatedTest::welch_t, st::SimulatedTest::anova,
                 st::SimulatedTest::mann_whitney, st::SimulatedTest::kruskal_wallis,
                 st::SimulatedTest::shapiro_wilk}) {
    const auto r = st::simulate_error_rates(two_normals(0, 1), t, kR, 0.05);
    EXPECT_NEAR(r.ci_halfwidth, 3 * std::sqrt(0.05 * 0.95 / kR), 1e-15);
    EXPECT_LE(std::abs(r.rate - 0.05), r.ci_halfwidth) << st::to_string(t) << " rate " << r.rate;
  }
}

// Median-centred Levene is conservative for small normal samples (about
// 0.04 at n = 20, matching scipy.stats.levene); it must never be liberal.
TEST(ErrorRates, LeveneMedianConservative) {
  const auto r = st::simulate_error_rates(two_normals(0, 1), st::SimulatedTest::levene, 10000, 0.05);
  EXPECT_LE(r.rate, 0.05 + r.ci_halfwidth);
  EXPECT_GT(r.rate, 0.03);
}

TEST(ErrorRates, PipelineNullWithinWidenedBand) {
  const auto r = st::simulate_error_rates(two_normals(0, 1), st::SimulatedTest::pipeline, 10000, 0.05);
  EXPECT_GE(r.rate, 0.05 - r.ci_halfwidth);
  EXPECT_LE(r.rate, 0.05 + r.ci_halfwidth + 0.01);
}

TEST(ErrorRates, PowerAtThreeSd) {
  const auto r = st::simulate_error_rates(two_normals(3, 1), st::SimulatedTest::t_test, 2000, 0.05);
  EXPECT_EQ(r.truth, st::Truth::alternative);
  EXPECT_GT(r.rate, 0.99);
}

TEST(ErrorRates, Errors) {
  EXPECT_THROW(st::simulate_error_rates(two_normals(0, 1), st::SimulatedTest::t_test, 0, 0.05),
               st::DataError);
  st::Scenario three = two_normals(0, 1);
  three.group_specs.push_back({st::NormalDist{0, 1}, 5});
  EXPECT_THROW(st::simulate_error_rates(three, st::SimulatedTest::mann_whitney, 10, 0.05),
               st::DataError);
  EXPECT_THROW(st::simulate_error_rates(two_normals(0, 1, 2), st::SimulatedTest::anova, 10, 0.05),
               st::DataError);
  EXPECT_THROW(st::parse_simulated_test("nope"), st::DataError);
}

}  // namespace
