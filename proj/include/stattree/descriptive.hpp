#pragma once

// Central tendency, dispersion, quartiles and quartile-fence outliers.
//
// Quartiles and percentiles use the (n+1)p position with linear
// interpolation between order statistics, clamped to [min, max].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stattree/errors.hpp"

namespace stattree {

namespace detail {

inline void require_size(std::span<const double> s, std::size_t min_n,
                         const char* what) {
  if (s.size() < min_n) {
    throw DataError(std::string(what) + " requires n >= " +
                    std::to_string(min_n) + ", got " + std::to_string(s.size()));
  }
}

inline std::vector<double> sorted_copy(std::span<const double> s) {
  std::vector<double> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

// (n+1)p interpolation on already sorted data.
inline double percentile_sorted(std::span<const double> sorted, double p) {
  const double n = static_cast<double>(sorted.size());
  const double pos = (n + 1.0) * p;
  if (pos <= 1.0) return sorted.front();
  if (pos >= n) return sorted.back();
  const double lower = std::floor(pos);
  const double frac = pos - lower;
  const auto i = static_cast<std::size_t>(lower) - 1;
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

}  // namespace detail

inline double mean(std::span<const double> s) {
  detail::require_size(s, 1, "mean");
  // Compensated summation; Table 2 mixes magnitudes of 1e0..1e2.
  double sum = 0.0, c = 0.0;
  for (double x : s) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(s.size());
}

inline double percentile(std::span<const double> s, double p) {
  detail::require_size(s, 1, "percentile");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DataError("percentile p must be in [0, 1]");
  }
  return detail::percentile_sorted(detail::sorted_copy(s), p);
}

inline double median(std::span<const double> s) {
  detail::require_size(s, 1, "median");
  return detail::percentile_sorted(detail::sorted_copy(s), 0.5);
}

// Every value of maximal multiplicity, ascending; empty when all values are
// distinct.
inline std::vector<double> modes(std::span<const double> s) {
  detail::require_size(s, 1, "modes");
  const auto v = detail::sorted_copy(s);
  std::vector<std::pair<double, std::size_t>> runs;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    runs.emplace_back(v[i], j - i);
    i = j;
  }
  std::size_t best = 0;
  for (const auto& r : runs) best = std::max(best, r.second);
  std::vector<double> out;
  if (best < 2) return out;
  for (const auto& r : runs) {
    if (r.second == best) out.push_back(r.first);
  }
  return out;
}

inline double sample_variance(std::span<const double> s) {
  detail::require_size(s, 2, "sample variance");
  const double m = mean(s);
  double ss = 0.0, corr = 0.0;
  for (double x : s) {
    ss += (x - m) * (x - m);
    corr += x - m;
  }
  const double n = static_cast<double>(s.size());
  return std::max(0.0, (ss - corr * corr / n) / (n - 1.0));
}

inline double sample_stddev(std::span<const double> s) {
  return std::sqrt(sample_variance(s));
}

struct DescriptiveSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  std::vector<double> modes;
  double min = 0.0;
  double max = 0.0;
  double range = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double variance = 0.0;
  double stddev = 0.0;

  bool operator==(const DescriptiveSummary&) const = default;
};

inline DescriptiveSummary describe(std::span<const double> s) {
  detail::require_size(s, 2, "describe");
  const auto v = detail::sorted_copy(s);
  DescriptiveSummary d;
  d.n = v.size();
  d.mean = mean(s);
  d.median = detail::percentile_sorted(v, 0.5);
  d.modes = modes(s);
  d.min = v.front();
  d.max = v.back();
  d.range = d.max - d.min;
  d.q1 = detail::percentile_sorted(v, 0.25);
  d.q3 = detail::percentile_sorted(v, 0.75);
  d.variance = sample_variance(s);
  d.stddev = std::sqrt(d.variance);
  return d;
}

struct Fences {
  double low = 0.0;
  double high = 0.0;
  bool operator==(const Fences&) const = default;
};

// Values between the 1.5L and 3L fences are mild, beyond 3L extreme, where
// L = Q3 - Q1. A value exactly on a fence is inside it.
struct OutlierReport {
  double l = 0.0;
  Fences inner_fences;
  Fences outer_fences;
  std::vector<double> mild;
  std::vector<double> extreme;

  bool operator==(const OutlierReport&) const = default;
};

inline OutlierReport classify_outliers(std::span<const double> s) {
  detail::require_size(s, 4, "outlier classification");
  const auto v = detail::sorted_copy(s);
  const double q1 = detail::percentile_sorted(v, 0.25);
  const double q3 = detail::percentile_sorted(v, 0.75);
  OutlierReport r;
  r.l = q3 - q1;
  r.inner_fences = {q1 - 1.5 * r.l, q3 + 1.5 * r.l};
  r.outer_fences = {q1 - 3.0 * r.l, q3 + 3.0 * r.l};
  for (double x : v) {
    if (x < r.outer_fences.low || x > r.outer_fences.high) {
      r.extreme.push_back(x);
    } else if (x < r.inner_fences.low || x > r.inner_fences.high) {
      r.mild.push_back(x);
    }
  }
  return r;
}

struct BoxplotStats {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> flagged_points;

  bool operator==(const BoxplotStats&) const = default;
};

// Whiskers reach the most extreme observations inside the inner fences;
// everything beyond is flagged.
inline BoxplotStats boxplot_stats(std::span<const double> s) {
  detail::require_size(s, 4, "boxplot");
  const auto v = detail::sorted_copy(s);
  BoxplotStats b;
  b.q1 = detail::percentile_sorted(v, 0.25);
  b.median = detail::percentile_sorted(v, 0.5);
  b.q3 = detail::percentile_sorted(v, 0.75);
  const double l = b.q3 - b.q1;
  const double lo = b.q1 - 1.5 * l;
  const double hi = b.q3 + 1.5 * l;

  // Quartiles lie within the data, so both whiskers always find a point.
  b.whisker_low = *std::find_if(v.begin(), v.end(), [&](double x) { return x >= lo; });
  b.whisker_high = *std::find_if(v.rbegin(), v.rend(), [&](double x) { return x <= hi; });
  for (double x : v) {
    if (x < b.whisker_low || x > b.whisker_high) b.flagged_points.push_back(x);
  }
  return b;
}

}  // namespace stattree
