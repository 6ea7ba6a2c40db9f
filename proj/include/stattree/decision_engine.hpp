#pragma once

// Test-selection decision tree:
//
//   per-group normality (Shapiro-Wilk below the size threshold, KS above)
//     -> homoscedasticity (Levene)
//     -> both gates pass: t test (k = 2) or ANOVA (k > 2, Tukey if rejected)
//        either gate fails: Mann-Whitney (k = 2) or Kruskal-Wallis
//        (k > 2, pairwise Mann-Whitney if rejected)
//     -> conclusion: reject H0 iff the primary p-value < alpha.
//
// Every gate is recorded in the trace with the p-value that decided it.
// Levene always runs; when normality has already failed its step is marked
// informational.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stattree/dataset.hpp"
#include "stattree/descriptive.hpp"
#include "stattree/errors.hpp"
#include "stattree/homogeneity.hpp"
#include "stattree/location_tests.hpp"
#include "stattree/normality.hpp"
#include "stattree/test_result.hpp"

namespace stattree {

inline constexpr std::string_view kReportSchemaVersion = "stattree.analysis/1";

struct EngineConfig {
  double alpha = 0.05;
  std::size_t size_threshold = kDefaultSizeThreshold;
  LeveneCenter levene_center = LeveneCenter::median;
  TVariant t_variant = TVariant::pooled;
  PosthocCorrection posthoc_correction = PosthocCorrection::none;
  KsPValue ks_p_value = KsPValue::asymptotic;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("alpha must be in (0,1)");
    if (size_threshold < 1) throw DataError("size threshold must be >= 1");
  }

  bool operator==(const EngineConfig&) const = default;
};

enum class Branch { t_test, anova, mann_whitney, kruskal_wallis };

inline std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::t_test: return "t_test";
    case Branch::anova: return "anova";
    case Branch::mann_whitney: return "mann_whitney";
    case Branch::kruskal_wallis: return "kruskal_wallis";
  }
  return "unknown";
}

inline bool is_parametric(Branch b) { return b == Branch::t_test || b == Branch::anova; }

inline Branch route(bool normal, bool homoscedastic, std::size_t k) {
  if (k < 2) throw DataError("at least 2 treatments required");
  if (normal && homoscedastic) return k == 2 ? Branch::t_test : Branch::anova;
  return k == 2 ? Branch::mann_whitney : Branch::kruskal_wallis;
}

enum class TraceNode { normality, homoscedasticity, branch_selection, primary_test, posthoc };

inline std::string_view to_string(TraceNode n) {
  switch (n) {
    case TraceNode::normality: return "normality";
    case TraceNode::homoscedasticity: return "homoscedasticity";
    case TraceNode::branch_selection: return "branch_selection";
    case TraceNode::primary_test: return "primary_test";
    case TraceNode::posthoc: return "posthoc";
  }
  return "unknown";
}

struct BranchDecision {
  bool normal = false;
  bool homoscedastic = false;
  std::size_t k = 0;
  Branch branch = Branch::t_test;
  bool operator==(const BranchDecision&) const = default;
};

struct TraceStep {
  TraceNode node = TraceNode::normality;
  std::string group;  // set for per-group normality steps
  std::optional<TestResult> evidence;
  std::optional<BranchDecision> decision;
  std::string outcome;
  bool informational = false;

  bool operator==(const TraceStep&) const = default;
};

struct DecisionTrace {
  std::vector<TraceStep> steps;
  bool operator==(const DecisionTrace&) const = default;
};

enum class Conclusion { reject_h0, fail_to_reject_h0 };

inline std::string_view to_string(Conclusion c) {
  return c == Conclusion::reject_h0 ? "reject_h0" : "fail_to_reject_h0";
}

struct GroupDescriptives {
  std::string label;
  DescriptiveSummary summary;
  // Absent for groups too small for quartile fences (n < 4).
  std::optional<OutlierReport> outliers;
  bool operator==(const GroupDescriptives&) const = default;
};

struct Hypotheses {
  std::string h0;
  std::string h1;
  bool operator==(const Hypotheses&) const = default;
};

struct AnalysisReport {
  std::string schema_version{kReportSchemaVersion};
  std::string response;
  std::string factor;
  EngineConfig config;
  std::vector<GroupDescriptives> groups;
  NormalityDecision normality;
  TestResult homoscedasticity;
  Branch branch = Branch::t_test;
  DecisionTrace trace;
  TestResult primary;
  std::optional<AnovaResult> anova;
  std::optional<PairwiseResults> posthoc;
  Conclusion conclusion = Conclusion::fail_to_reject_h0;
  Hypotheses hypotheses;

  bool operator==(const AnalysisReport&) const = default;
};

inline constexpr std::size_t kMinGroupSizeForAnalysis = 3;

namespace detail {

inline std::string format_p(double p) {
  if (p < 0.001) return "<0.001";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", p);
  return buf;
}

inline std::string format_alpha(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

inline std::string group_list(const GroupedSample& g) {
  std::string s;
  for (std::size_t i = 0; i < g.k(); ++i) {
    if (i) s += (i + 1 == g.k()) ? " and " : ", ";
    s += g.groups()[i].label;
  }
  return s;
}

}  // namespace detail

// Runs the whole decision tree on one response/factor split. Pure: the same
// input and config always give an identical report.
inline AnalysisReport analyze(const GroupedSample& g, const EngineConfig& config = {}) {
  config.validate();
  for (const auto& grp : g.groups()) {
    if (grp.size() < kMinGroupSizeForAnalysis) {
      throw DataError("analysis requires n >= " + std::to_string(kMinGroupSizeForAnalysis) +
                      " in every group; group '" + grp.label + "' has n = " +
                      std::to_string(grp.size()));
    }
  }
  const double alpha = config.alpha;
  const std::string alpha_text = detail::format_alpha(alpha);

  AnalysisReport rep;
  rep.response = g.response_name();
  rep.factor = g.factor_name();
  rep.config = config;
  rep.hypotheses = {
      "the mean " + g.response_name() + " is the same for " + detail::group_list(g),
      "the mean " + g.response_name() + " differs between at least two of " +
          detail::group_list(g)};

  for (const auto& grp : g.groups()) {
    GroupDescriptives d{grp.label, describe(grp.values), std::nullopt};
    if (grp.size() >= 4) d.outliers = classify_outliers(grp.values);
    rep.groups.push_back(std::move(d));
  }

  // Normality gate, one step per group.
  rep.normality = normality_check(g, alpha, config.size_threshold, config.ks_p_value);
  std::string first_failure;
  for (const auto& gn : rep.normality.per_group) {
    const bool normal = !gn.result.rejects(alpha);
    std::string outcome = std::string(normal ? "normal" : "not normal") + ": " +
                          std::string(to_string(gn.result.method)) +
                          " p = " + detail::format_p(gn.result.p_value) +
                          (normal ? " >= " : " < ") + alpha_text;
    if (!normal && first_failure.empty()) {
      first_failure = "normality rejected in group '" + gn.label + "' (" + outcome + ")";
    }
    rep.trace.steps.push_back(
        {TraceNode::normality, gn.label, gn.result, std::nullopt, std::move(outcome), false});
  }

  // Homoscedasticity gate.
  rep.homoscedasticity = levene(g, config.levene_center);
  const bool homoscedastic = !rep.homoscedasticity.rejects(alpha);
  {
    std::string outcome = std::string(homoscedastic ? "homoscedastic" : "not homoscedastic") +
                          ": levene (" + std::string(to_string(config.levene_center)) +
                          ") p = " + detail::format_p(rep.homoscedasticity.p_value) +
                          (homoscedastic ? " >= " : " < ") + alpha_text;
    if (!rep.normality.all_normal) outcome += " (informational: normality already failed)";
    if (!homoscedastic && first_failure.empty()) {
      first_failure = "variances not homogeneous (" + outcome + ")";
    }
    rep.trace.steps.push_back({TraceNode::homoscedasticity, "", rep.homoscedasticity,
                               std::nullopt, std::move(outcome), !rep.normality.all_normal});
  }

  // Branch selection.
  rep.branch = route(rep.normality.all_normal, homoscedastic, g.k());
  {
    std::string outcome = std::string(is_parametric(rep.branch) ? "parametric" : "nonparametric") +
                          " branch, " + std::to_string(g.k()) + " treatments -> " +
                          std::string(to_string(rep.branch));
    outcome += is_parametric(rep.branch) ? " (all groups normal and variances homogeneous)"
                                         : " (" + first_failure + ")";
    rep.trace.steps.push_back(
        {TraceNode::branch_selection, "", std::nullopt,
         BranchDecision{rep.normality.all_normal, homoscedastic, g.k(), rep.branch},
         std::move(outcome), false});
  }

  // Primary test.
  switch (rep.branch) {
    case Branch::t_test:
      rep.primary = two_sample_t(g.groups()[0].values, g.groups()[1].values, config.t_variant);
      break;
    case Branch::anova:
      rep.anova = one_way_anova(g);
      rep.primary = to_test_result(*rep.anova);
      break;
    case Branch::mann_whitney:
      rep.primary = mann_whitney(g.groups()[0].values, g.groups()[1].values);
      break;
    case Branch::kruskal_wallis:
      rep.primary = kruskal_wallis(g);
      break;
  }
  const bool reject = rep.primary.rejects(alpha);
  rep.conclusion = reject ? Conclusion::reject_h0 : Conclusion::fail_to_reject_h0;
  rep.trace.steps.push_back(
      {TraceNode::primary_test, "", rep.primary, std::nullopt,
       std::string(reject ? "reject H0" : "fail to reject H0") + ": " +
           std::string(to_string(rep.primary.method)) + " p = " +
           detail::format_p(rep.primary.p_value) + (reject ? " < " : " >= ") + alpha_text,
       false});

  // Post-hoc comparisons only follow a rejected omnibus test.
  if (reject && g.k() > 2) {
    if (rep.branch == Branch::anova) {
      rep.posthoc = tukey_hsd(g, alpha);
    } else {
      rep.posthoc = pairwise_mann_whitney(g, alpha, config.posthoc_correction);
    }
    std::size_t significant = 0;
    std::string pairs;
    for (const auto& c : rep.posthoc->comparisons) {
      if (!c.significant_at_alpha) continue;
      ++significant;
      pairs += (pairs.empty() ? "" : ", ") + c.label_a + "-" + c.label_b;
    }
    rep.trace.steps.push_back(
        {TraceNode::posthoc, "", std::nullopt, std::nullopt,
         std::string(to_string(rep.posthoc->family_method)) + ": " +
             std::to_string(significant) + " of " +
             std::to_string(rep.posthoc->comparisons.size()) + " pairs significant" +
             (pairs.empty() ? "" : " (" + pairs + ")"),
         false});
  }
  return rep;
}

}  // namespace stattree
