#pragma once

// Levene's test for equal variances across k groups. With the median as
// centre this is the Brown-Forsythe variant.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "stattree/dataset.hpp"
#include "stattree/descriptive.hpp"
#include "stattree/errors.hpp"
#include "stattree/location_tests.hpp"
#include "stattree/special_functions.hpp"
#include "stattree/test_result.hpp"

namespace stattree {

enum class LeveneCenter { median, mean };

inline std::string_view to_string(LeveneCenter c) {
  return c == LeveneCenter::median ? "median" : "mean";
}

// One-way ANOVA F on |x - centre(group)|, df (k - 1, N - k).
inline TestResult levene(const GroupedSample& g, LeveneCenter center = LeveneCenter::median) {
  if (g.total_size() < g.k() + 1) {
    throw DataError("Levene requires N >= k + 1 observations");
  }
  std::vector<std::vector<double>> deviations;
  std::vector<std::string> labels;
  bool any_nonzero = false;
  for (const auto& grp : g.groups()) {
    if (grp.size() < 2) {
      throw DataError("Levene requires n >= 2 in group '" + grp.label + "'");
    }
    const double c = center == LeveneCenter::median ? median(grp.values) : mean(grp.values);
    std::vector<double> dev;
    dev.reserve(grp.size());
    for (double x : grp.values) {
      dev.push_back(std::abs(x - c));
      any_nonzero = any_nonzero || dev.back() != 0.0;
    }
    deviations.push_back(std::move(dev));
    labels.push_back(grp.label);
  }
  if (!any_nonzero) {
    throw DataError("Levene: every group is constant, variances are undefined");
  }

  AnovaResult a = detail::anova_decompose(deviations, labels);
  TestResult r;
  r.method = center == LeveneCenter::median ? TestMethod::levene_median : TestMethod::levene_mean;
  r.statistic_name = "W";
  r.df = {a.df_between, a.df_within};
  r.n_per_group = a.n_per_group;
  if (a.ss_within > 0.0) {
    r.statistic = a.ms_between / a.ms_within;
    r.p_value = f_sf(r.statistic, a.df_between, a.df_within);
  } else {
    // Deviations constant within every group but different between groups:
    // F is unbounded, reported as the largest finite double.
    r.statistic = std::numeric_limits<double>::max();
    r.p_value = 0.0;
  }
  return r;
}

}  // namespace stattree
