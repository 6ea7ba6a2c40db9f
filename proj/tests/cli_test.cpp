#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stattree/cli.hpp"
#include "stattree/json_io.hpp"

namespace st = stattree;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = st::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kDiff{st::table2::kDifference};

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

TEST(Cli, DescribeTable3Values) {
  const auto r = cli({"describe", "builtin:table2", "--column", kDiff});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* v : {"33.570", "-26.428", "number of modes 0", "531.719", "-221.262",
                        "310.457", "-166.923", "237.806", "200.609"}) {
    EXPECT_TRUE(contains(r.out, v)) << v << "\n" << r.out;
  }
}

TEST(Cli, DescribeMissingFile) {
  const auto r = cli({"describe", "missing.csv", "--column", "x"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "missing.csv")) << r.err;
}

TEST(Cli, DescribeNonNumericColumn) {
  const auto r = cli({"describe", "builtin:table2", "--column", "Moment"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "is not numeric")) << r.err;
}

TEST(Cli, DescribeCsvFile) {
  const std::string path = ::testing::TempDir() + "cli_test_input.csv";
  std::ofstream(path) << "x,g\n1,a\n2,a\n4,b\n";
  const auto r = cli({"describe", path, "--column", "x", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = st::json::parse(r.out);
  EXPECT_DOUBLE_EQ(j.at("summary").at("median").get<double>(), 2.0);
  std::remove(path.c_str());
}

TEST(Cli, AnalyzeDifferenceByMoment) {
  const auto r = cli({"analyze", "builtin:table2", "--response", kDiff, "--factor", "Moment"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "Conclusion: reject_h0")) << r.out;
}

TEST(Cli, AnalyzeExpectedByCasesSize) {
  const auto r = cli({"analyze", "builtin:table2", "--response", "Expected Hours", "--factor",
                      "Cases Size", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = st::json::parse(r.out);
  EXPECT_EQ(j.at("branch"), "kruskal_wallis");
  EXPECT_EQ(j.at("posthoc").at("comparisons").size(), 3u);
}

TEST(Cli, AnalyzeBadAlpha) {
  const auto r = cli({"analyze", "builtin:table2", "--response", kDiff, "--factor", "Moment",
                      "--alpha", "1.5"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "alpha must be in (0,1)")) << r.err;
}

TEST(Cli, AnalyzeOptionsReachEngine) {
  const auto r = cli({"analyze", "builtin:table2", "--response", kDiff, "--factor", "Cases Size",
                      "--levene-center", "mean", "--posthoc-correction", "bonferroni",
                      "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = st::json::parse(r.out);
  EXPECT_EQ(j.at("homoscedasticity").at("method"), "levene_mean");
  EXPECT_EQ(j.at("config").at("posthoc_correction"), "bonferroni");
}

TEST(Cli, TextAndJsonAgree) {
  const std::vector<std::string> base{"analyze", "builtin:table2", "--response", kDiff,
                                      "--factor", "Cases Size"};
  auto text_args = base;
  auto json_args = base;
  json_args.insert(json_args.end(), {"--format", "json"});
  const auto t = cli(text_args);
  const auto j = st::json::parse(cli(json_args).out);
  ASSERT_EQ(t.code, 0);
  const double p = j.at("primary").at("p_value").get<double>();
  EXPECT_TRUE(contains(t.out, "anova p = " + st::detail::format_p(p))) << t.out;
  EXPECT_TRUE(contains(t.out, "Conclusion: " + j.at("conclusion").get<std::string>()));
  for (const auto& c : j.at("posthoc").at("comparisons")) {
    EXPECT_TRUE(contains(t.out, "p = " + st::detail::format_p(c.at("p_value").get<double>())));
  }
}

TEST(Cli, BoxplotRecords) {
  const auto r = cli({"boxplot", "builtin:table2", "--response", kDiff, "--factor", "Moment"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = st::json::parse(r.out);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0].at("label"), "Before");
}

TEST(Cli, BoxplotConstantGroup) {
  const std::string path = ::testing::TempDir() + "cli_box.csv";
  std::ofstream(path) << "y,g\n5,a\n5,a\n5,a\n5,a\n1,b\n2,b\n3,b\n4,b\n";
  const auto r = cli({"boxplot", path, "--response", "y", "--factor", "g"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = st::json::parse(r.out);
  EXPECT_EQ(j[0].at("q1"), j[0].at("q3"));
  EXPECT_EQ(j[0].at("median"), j[0].at("q1"));
  std::remove(path.c_str());
}

TEST(Cli, BoxplotUnknownFactor) {
  EXPECT_EQ(cli({"boxplot", "builtin:table2", "--response", kDiff, "--factor", "Nope"}).code, 2);
}

TEST(Cli, OutliersTable2) {
  const auto r = cli({"outliers", "builtin:table2", "--response", kDiff, "--factor", "Moment",
                      "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = st::json::parse(r.out);
  ASSERT_EQ(j.at("groups").size(), 2u);
}

TEST(Cli, ValidatePrintsRateWithBand) {
  const auto r = cli({"validate", "--test", "t_test", "--replications", "2000", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "rate ")) << r.out;
  EXPECT_TRUE(contains(r.out, "+/-")) << r.out;
}

TEST(Cli, ValidateZeroReplications) {
  EXPECT_EQ(cli({"validate", "--replications", "0"}).code, 2);
}

TEST(Cli, ValidateBadGroupSpec) {
  EXPECT_EQ(cli({"validate", "--group", "normal:0:1", "--group", "normal:0:1:20"}).code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"analyze", "builtin:table2", "--response", kDiff}).code, 2);
  EXPECT_EQ(cli({"analyze", "builtin:table2", "--response", kDiff, "--factor", "Moment",
                 "--levene-center", "mode"}).code,
            2);
}

TEST(Cli, Help) { EXPECT_EQ(cli({"--help"}).code, 0); }

TEST(Cli, FormatFromEnvironment) {
  ::setenv("STATTREE_FORMAT", "json", 1);
  const auto r = cli({"describe", "builtin:table2", "--column", kDiff});
  ::unsetenv("STATTREE_FORMAT");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(st::json::accept(r.out));
}

}  // namespace
