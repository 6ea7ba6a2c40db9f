#pragma once

// JSON encoding of results and reports (nlohmann/json). Field names follow
// the domain types. Doubles are written in shortest round-trip form, so
// decoding reproduces every number bit for bit.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "stattree/decision_engine.hpp"
#include "stattree/descriptive.hpp"
#include "stattree/errors.hpp"
#include "stattree/location_tests.hpp"
#include "stattree/montecarlo.hpp"
#include "stattree/normality.hpp"
#include "stattree/test_result.hpp"

namespace stattree {

using json = nlohmann::json;

namespace detail {

template <typename Enum, std::size_t N>
Enum enum_from_string(std::string_view s, const Enum (&all)[N], const char* what) {
  for (Enum e : all) {
    if (to_string(e) == s) return e;
  }
  throw DataError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

// Non-finite values have no JSON literal; they travel as strings.
inline json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline double number_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

template <typename T>
void optional_to(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <typename T>
void optional_from(const json& j, const char* key, std::optional<T>& v) {
  if (!j.contains(key) || j.at(key).is_null()) {
    v.reset();
  } else {
    v = j.at(key).get<T>();
  }
}

}  // namespace detail

// ---- enums -------------------------------------------------------------------

inline constexpr TestMethod kAllTestMethods[] = {
    TestMethod::shapiro_wilk,     TestMethod::ks_normal,           TestMethod::ks_lilliefors,
    TestMethod::levene_median,    TestMethod::levene_mean,         TestMethod::t_pooled,
    TestMethod::t_welch,          TestMethod::anova,               TestMethod::tukey_hsd,
    TestMethod::mann_whitney_exact, TestMethod::mann_whitney_normal, TestMethod::kruskal_wallis,
    TestMethod::pairwise_mann_whitney};
inline constexpr Branch kAllBranches[] = {Branch::t_test, Branch::anova, Branch::mann_whitney,
                                          Branch::kruskal_wallis};
inline constexpr TraceNode kAllTraceNodes[] = {TraceNode::normality, TraceNode::homoscedasticity,
                                               TraceNode::branch_selection,
                                               TraceNode::primary_test, TraceNode::posthoc};
inline constexpr Conclusion kAllConclusions[] = {Conclusion::reject_h0,
                                                 Conclusion::fail_to_reject_h0};
inline constexpr LeveneCenter kAllLeveneCenters[] = {LeveneCenter::median, LeveneCenter::mean};
inline constexpr PosthocCorrection kAllCorrections[] = {PosthocCorrection::none,
                                                        PosthocCorrection::bonferroni};
inline constexpr Truth kAllTruths[] = {Truth::null_hypothesis, Truth::alternative};

inline constexpr TVariant kAllTVariants[] = {TVariant::pooled, TVariant::welch};
inline constexpr KsPValue kAllKsPValues[] = {KsPValue::asymptotic, KsPValue::lilliefors};

// ---- value types ---------------------------------------------------------

inline void to_json(json& j, const TestResult& r) {
  j = json{{"method", to_string(r.method)},
           {"statistic_name", r.statistic_name},
           {"statistic", detail::number(r.statistic)},
           {"df", r.df},
           {"p_value", r.p_value},
           {"n_per_group", r.n_per_group}};
}
inline void from_json(const json& j, TestResult& r) {
  r.method = detail::enum_from_string(j.at("method").get<std::string>(), kAllTestMethods, "method");
  r.statistic_name = j.at("statistic_name").get<std::string>();
  r.statistic = detail::number_from(j.at("statistic"));
  r.df = j.at("df").get<std::vector<double>>();
  r.p_value = j.at("p_value").get<double>();
  r.n_per_group = j.at("n_per_group").get<std::vector<std::size_t>>();
}

inline void to_json(json& j, const DescriptiveSummary& d) {
  j = json{{"n", d.n},         {"mean", d.mean},   {"median", d.median},
           {"modes", d.modes}, {"min", d.min},     {"max", d.max},
           {"range", d.range}, {"q1", d.q1},       {"q3", d.q3},
           {"variance", d.variance}, {"stddev", d.stddev}};
}
inline void from_json(const json& j, DescriptiveSummary& d) {
  d.n = j.at("n").get<std::size_t>();
  d.mean = j.at("mean").get<double>();
  d.median = j.at("median").get<double>();
  d.modes = j.at("modes").get<std::vector<double>>();
  d.min = j.at("min").get<double>();
  d.max = j.at("max").get<double>();
  d.range = j.at("range").get<double>();
  d.q1 = j.at("q1").get<double>();
  d.q3 = j.at("q3").get<double>();
  d.variance = j.at("variance").get<double>();
  d.stddev = j.at("stddev").get<double>();
}

inline void to_json(json& j, const Fences& f) { j = json::array({f.low, f.high}); }
inline void from_json(const json& j, Fences& f) {
  f.low = j.at(0).get<double>();
  f.high = j.at(1).get<double>();
}

inline void to_json(json& j, const OutlierReport& o) {
  j = json{{"l", o.l},
           {"inner_fences", o.inner_fences},
           {"outer_fences", o.outer_fences},
           {"mild", o.mild},
           {"extreme", o.extreme}};
}
inline void from_json(const json& j, OutlierReport& o) {
  o.l = j.at("l").get<double>();
  o.inner_fences = j.at("inner_fences").get<Fences>();
  o.outer_fences = j.at("outer_fences").get<Fences>();
  o.mild = j.at("mild").get<std::vector<double>>();
  o.extreme = j.at("extreme").get<std::vector<double>>();
}

inline void to_json(json& j, const BoxplotStats& b) {
  j = json{{"q1", b.q1},
           {"median", b.median},
           {"q3", b.q3},
           {"whisker_low", b.whisker_low},
           {"whisker_high", b.whisker_high},
           {"flagged_points", b.flagged_points}};
}
inline void from_json(const json& j, BoxplotStats& b) {
  b.q1 = j.at("q1").get<double>();
  b.median = j.at("median").get<double>();
  b.q3 = j.at("q3").get<double>();
  b.whisker_low = j.at("whisker_low").get<double>();
  b.whisker_high = j.at("whisker_high").get<double>();
  b.flagged_points = j.at("flagged_points").get<std::vector<double>>();
}

inline void to_json(json& j, const GroupMean& m) { j = json{{"label", m.label}, {"mean", m.mean}}; }
inline void from_json(const json& j, GroupMean& m) {
  m.label = j.at("label").get<std::string>();
  m.mean = j.at("mean").get<double>();
}

inline void to_json(json& j, const AnovaResult& a) {
  j = json{{"ss_between", a.ss_between}, {"ss_within", a.ss_within},
           {"ss_total", a.ss_total},     {"df_between", a.df_between},
           {"df_within", a.df_within},   {"ms_between", a.ms_between},
           {"ms_within", a.ms_within},   {"f", a.f},
           {"p_value", a.p_value},       {"group_means", a.group_means},
           {"n_per_group", a.n_per_group}};
}
inline void from_json(const json& j, AnovaResult& a) {
  a.ss_between = j.at("ss_between").get<double>();
  a.ss_within = j.at("ss_within").get<double>();
  a.ss_total = j.at("ss_total").get<double>();
  a.df_between = j.at("df_between").get<double>();
  a.df_within = j.at("df_within").get<double>();
  a.ms_between = j.at("ms_between").get<double>();
  a.ms_within = j.at("ms_within").get<double>();
  a.f = j.at("f").get<double>();
  a.p_value = j.at("p_value").get<double>();
  a.group_means = j.at("group_means").get<std::vector<GroupMean>>();
  a.n_per_group = j.at("n_per_group").get<std::vector<std::size_t>>();
}

inline void to_json(json& j, const PairComparison& c) {
  j = json{{"label_a", c.label_a},
           {"label_b", c.label_b},
           {"estimate", c.estimate},
           {"statistic", c.statistic},
           {"p_value", c.p_value},
           {"significant_at_alpha", c.significant_at_alpha}};
}
inline void from_json(const json& j, PairComparison& c) {
  c.label_a = j.at("label_a").get<std::string>();
  c.label_b = j.at("label_b").get<std::string>();
  c.estimate = j.at("estimate").get<double>();
  c.statistic = j.at("statistic").get<double>();
  c.p_value = j.at("p_value").get<double>();
  c.significant_at_alpha = j.at("significant_at_alpha").get<bool>();
}

inline void to_json(json& j, const PairwiseResults& p) {
  j = json{{"comparisons", p.comparisons},
           {"family_method", to_string(p.family_method)},
           {"correction", to_string(p.correction)},
           {"alpha", p.alpha}};
}
inline void from_json(const json& j, PairwiseResults& p) {
  p.comparisons = j.at("comparisons").get<std::vector<PairComparison>>();
  p.family_method = detail::enum_from_string(j.at("family_method").get<std::string>(),
                                             kAllTestMethods, "method");
  p.correction = detail::enum_from_string(j.at("correction").get<std::string>(),
                                          kAllCorrections, "correction");
  p.alpha = j.at("alpha").get<double>();
}

inline void to_json(json& j, const GroupNormality& g) {
  j = json{{"label", g.label}, {"result", g.result}};
}
inline void from_json(const json& j, GroupNormality& g) {
  g.label = j.at("label").get<std::string>();
  g.result = j.at("result").get<TestResult>();
}

inline void to_json(json& j, const NormalityDecision& n) {
  j = json{{"per_group", n.per_group},
           {"chosen_method", n.chosen_method},
           {"all_normal", n.all_normal}};
}
inline void from_json(const json& j, NormalityDecision& n) {
  n.per_group = j.at("per_group").get<std::vector<GroupNormality>>();
  n.chosen_method = j.at("chosen_method").get<std::string>();
  n.all_normal = j.at("all_normal").get<bool>();
}

inline void to_json(json& j, const EngineConfig& c) {
  j = json{{"alpha", c.alpha},
           {"size_threshold", c.size_threshold},
           {"levene_center", to_string(c.levene_center)},
           {"t_variant", to_string(c.t_variant)},
           {"posthoc_correction", to_string(c.posthoc_correction)},
           {"ks_p_value", to_string(c.ks_p_value)}};
}
inline void from_json(const json& j, EngineConfig& c) {
  c.alpha = j.at("alpha").get<double>();
  c.size_threshold = j.at("size_threshold").get<std::size_t>();
  c.levene_center = detail::enum_from_string(j.at("levene_center").get<std::string>(),
                                             kAllLeveneCenters, "levene center");
  c.t_variant =
      detail::enum_from_string(j.at("t_variant").get<std::string>(), kAllTVariants, "t variant");
  c.posthoc_correction = detail::enum_from_string(j.at("posthoc_correction").get<std::string>(),
                                                  kAllCorrections, "correction");
  c.ks_p_value = detail::enum_from_string(j.at("ks_p_value").get<std::string>(), kAllKsPValues,
                                          "ks p-value method");
}

inline void to_json(json& j, const BranchDecision& b) {
  j = json{{"normal", b.normal},
           {"homoscedastic", b.homoscedastic},
           {"k", b.k},
           {"branch", to_string(b.branch)}};
}
inline void from_json(const json& j, BranchDecision& b) {
  b.normal = j.at("normal").get<bool>();
  b.homoscedastic = j.at("homoscedastic").get<bool>();
  b.k = j.at("k").get<std::size_t>();
  b.branch = detail::enum_from_string(j.at("branch").get<std::string>(), kAllBranches, "branch");
}

inline void to_json(json& j, const TraceStep& s) {
  j = json{{"node", to_string(s.node)}, {"group", s.group}, {"outcome", s.outcome},
           {"informational", s.informational}};
  detail::optional_to(j, "evidence", s.evidence);
  detail::optional_to(j, "decision", s.decision);
}
inline void from_json(const json& j, TraceStep& s) {
  s.node = detail::enum_from_string(j.at("node").get<std::string>(), kAllTraceNodes, "node");
  s.group = j.at("group").get<std::string>();
  s.outcome = j.at("outcome").get<std::string>();
  s.informational = j.at("informational").get<bool>();
  detail::optional_from(j, "evidence", s.evidence);
  detail::optional_from(j, "decision", s.decision);
}

inline void to_json(json& j, const DecisionTrace& t) { j = json{{"steps", t.steps}}; }
inline void from_json(const json& j, DecisionTrace& t) {
  t.steps = j.at("steps").get<std::vector<TraceStep>>();
}

inline void to_json(json& j, const GroupDescriptives& g) {
  j = json{{"label", g.label}, {"summary", g.summary}};
  detail::optional_to(j, "outliers", g.outliers);
}
inline void from_json(const json& j, GroupDescriptives& g) {
  g.label = j.at("label").get<std::string>();
  g.summary = j.at("summary").get<DescriptiveSummary>();
  detail::optional_from(j, "outliers", g.outliers);
}

inline void to_json(json& j, const Hypotheses& h) { j = json{{"h0", h.h0}, {"h1", h.h1}}; }
inline void from_json(const json& j, Hypotheses& h) {
  h.h0 = j.at("h0").get<std::string>();
  h.h1 = j.at("h1").get<std::string>();
}

inline void to_json(json& j, const AnalysisReport& r) {
  j = json{{"schema_version", r.schema_version},
           {"response", r.response},
           {"factor", r.factor},
           {"config", r.config},
           {"groups", r.groups},
           {"normality", r.normality},
           {"homoscedasticity", r.homoscedasticity},
           {"branch", to_string(r.branch)},
           {"trace", r.trace},
           {"primary", r.primary},
           {"conclusion", to_string(r.conclusion)},
           {"alpha", r.config.alpha},
           {"hypotheses", r.hypotheses}};
  detail::optional_to(j, "anova", r.anova);
  detail::optional_to(j, "posthoc", r.posthoc);
}
inline void from_json(const json& j, AnalysisReport& r) {
  r.schema_version = j.at("schema_version").get<std::string>();
  if (r.schema_version != kReportSchemaVersion) {
    throw DataError("unsupported report schema '" + r.schema_version + "'");
  }
  r.response = j.at("response").get<std::string>();
  r.factor = j.at("factor").get<std::string>();
  r.config = j.at("config").get<EngineConfig>();
  r.groups = j.at("groups").get<std::vector<GroupDescriptives>>();
  r.normality = j.at("normality").get<NormalityDecision>();
  r.homoscedasticity = j.at("homoscedasticity").get<TestResult>();
  r.branch = detail::enum_from_string(j.at("branch").get<std::string>(), kAllBranches, "branch");
  r.trace = j.at("trace").get<DecisionTrace>();
  r.primary = j.at("primary").get<TestResult>();
  r.conclusion = detail::enum_from_string(j.at("conclusion").get<std::string>(),
                                          kAllConclusions, "conclusion");
  r.hypotheses = j.at("hypotheses").get<Hypotheses>();
  detail::optional_from(j, "anova", r.anova);
  detail::optional_from(j, "posthoc", r.posthoc);
}

inline void to_json(json& j, const ErrorRateReport& r) {
  j = json{{"test", to_string(r.test)},
           {"truth", to_string(r.truth)},
           {"seed", r.seed},
           {"replications", r.replications},
           {"rejections", r.rejections},
           {"rate", r.rate},
           {"target_alpha", r.target_alpha},
           {"ci_halfwidth", r.ci_halfwidth}};
}
inline void from_json(const json& j, ErrorRateReport& r) {
  r.test = parse_simulated_test(j.at("test").get<std::string>());
  r.truth = detail::enum_from_string(j.at("truth").get<std::string>(), kAllTruths, "truth");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.replications = j.at("replications").get<std::size_t>();
  r.rejections = j.at("rejections").get<std::size_t>();
  r.rate = j.at("rate").get<double>();
  r.target_alpha = j.at("target_alpha").get<double>();
  r.ci_halfwidth = j.at("ci_halfwidth").get<double>();
}

}  // namespace stattree
