#pragma once

// Shapiro-Wilk (Royston's AS R94 approximation) and one-sample
// Kolmogorov-Smirnov against a fitted normal, plus the per-group dispatch
// between them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stattree/dataset.hpp"
#include "stattree/descriptive.hpp"
#include "stattree/errors.hpp"
#include "stattree/special_functions.hpp"
#include "stattree/test_result.hpp"

namespace stattree {

namespace detail {

template <std::size_t N>
double poly(const std::array<double, N>& c, double x) {
  double r = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) r = r * x + c[i];
  return r;
}

}  // namespace detail

// W statistic and p-value for 3 <= n <= 5000. Throws on constant data.
inline TestResult shapiro_wilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3 || n > 5000) {
    throw DataError("Shapiro-Wilk requires 3 <= n <= 5000, got n = " +
                    std::to_string(n));
  }
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  if (x.back() - x.front() <= 1e-19 * std::max(1.0, std::abs(x.back()))) {
    throw DataError("Shapiro-Wilk: sample has zero variance");
  }

  static constexpr std::array<double, 6> c1 = {0.0, 0.221157, -0.147981,
                                               -2.071190, 4.434685, -2.706056};
  static constexpr std::array<double, 6> c2 = {0.0, 0.042981, -0.293762,
                                               -1.752461, 5.682633, -3.582633};
  static constexpr std::array<double, 4> c3 = {0.5440, -0.39978, 0.025054, -6.714e-4};
  static constexpr std::array<double, 4> c4 = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr std::array<double, 4> c5 = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr std::array<double, 3> c6 = {-0.4803, -0.082676, 0.0030302};
  static constexpr std::array<double, 2> g = {-2.273, 0.459};

  const double an = static_cast<double>(n);
  const std::size_t half = n / 2;

  // Antisymmetric coefficients for the upper half of the order statistics.
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::numbers::sqrt2 / 2.0;
  } else {
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      m[i] = std_normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = detail::poly(c1, rsn) - m[0] / ssumm2;

    std::size_t first_scaled;
    double fac;
    if (n > 5) {
      const double a2 = -m[1] / ssumm2 + detail::poly(c2, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[0] = a1;
      a[1] = a2;
      first_scaled = 2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
      a[0] = a1;
      first_scaled = 1;
    }
    for (std::size_t i = first_scaled; i < half; ++i) a[i] = -m[i] / fac;
  }

  // Centre and scale by the range before squaring, as AS R94 does.
  const double range = x.back() - x.front();
  const double xm = mean(x);
  double ssq = 0.0;
  double lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (x[i] - xm) / range;
    ssq += z * z;
  }
  for (std::size_t i = 0; i < half; ++i) {
    lin += a[i] * (x[n - 1 - i] - x[i]) / range;
  }
  double w = lin * lin / ssq;
  w = std::min(w, 1.0);

  double pw;
  if (n == 3) {
    // Exact distribution for n = 3.
    constexpr double pi6 = 6.0 / std::numbers::pi;
    constexpr double stqr = std::numbers::pi / 3.0;
    pw = std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
    pw = std::min(pw, 1.0);
  } else if (w >= 1.0) {
    pw = 1.0;
  } else {
    double y = std::log1p(-w);
    double mu;
    double sigma;
    if (n <= 11) {
      const double gamma = detail::poly(g, an);
      if (y >= gamma) {
        pw = 1e-19;
        return TestResult{TestMethod::shapiro_wilk, "W", w, {}, pw, {n}};
      }
      y = -std::log(gamma - y);
      mu = detail::poly(c3, an);
      sigma = std::exp(detail::poly(c4, an));
    } else {
      const double xx = std::log(an);
      mu = detail::poly(c5, xx);
      sigma = std::exp(detail::poly(c6, xx));
    }
    pw = 0.5 * std::erfc(((y - mu) / sigma) / std::numbers::sqrt2);
  }
  return TestResult{TestMethod::shapiro_wilk, "W", w, {}, pw, {n}};
}

enum class KsPValue {
  asymptotic,   // Kolmogorov limit law at sqrt(n) D
  lilliefors,   // Dallal-Wilkinson approximation for estimated parameters
};

inline std::string_view to_string(KsPValue v) {
  return v == KsPValue::asymptotic ? "asymptotic" : "lilliefors";
}

namespace detail {

// Dallal & Wilkinson (1986) analytic approximation to the Lilliefors
// p-value. Accurate below 0.1; larger values are indicative only.
inline double lilliefors_p_value(double d, std::size_t n) {
  double nn = static_cast<double>(n);
  if (n > 100) {
    d *= std::pow(nn / 100.0, 0.49);
    nn = 100.0;
  }
  const double p = std::exp(-7.01256 * d * d * (nn + 2.78019) +
                            2.99587 * d * std::sqrt(nn + 2.78019) - 0.122119 +
                            0.974598 / std::sqrt(nn) + 1.67997 / nn);
  return std::min(1.0, std::max(0.0, p));
}

}  // namespace detail

// D = sup |ECDF - Phi((x - mean) / sd)| with mean and sd estimated from the
// sample, evaluated on both sides of each order statistic.
inline TestResult ks_normal(std::span<const double> sample,
                            KsPValue p_method = KsPValue::asymptotic) {
  const std::size_t n = sample.size();
  if (n < 4) {
    throw DataError("Kolmogorov-Smirnov requires n >= 4, got n = " + std::to_string(n));
  }
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double m = mean(x);
  const double sd = sample_stddev(x);
  if (!(sd > 0.0)) throw DataError("Kolmogorov-Smirnov: sample has zero variance");

  const double nn = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = std_normal_cdf((x[i] - m) / sd);
    d = std::max(d, static_cast<double>(i + 1) / nn - f);
    d = std::max(d, f - static_cast<double>(i) / nn);
  }
  d = std::min(d, 1.0);

  TestResult r;
  r.statistic_name = "D";
  r.statistic = d;
  r.n_per_group = {n};
  if (p_method == KsPValue::lilliefors) {
    r.method = TestMethod::ks_lilliefors;
    r.p_value = detail::lilliefors_p_value(d, n);
  } else {
    r.method = TestMethod::ks_normal;
    r.p_value = kolmogorov_sf(std::sqrt(nn) * d);
  }
  return r;
}

struct GroupNormality {
  std::string label;
  TestResult result;
  bool operator==(const GroupNormality&) const = default;
};

struct NormalityDecision {
  std::vector<GroupNormality> per_group;
  // Method chosen for the groups; "mixed" when sizes straddle the threshold.
  std::string chosen_method;
  bool all_normal = false;

  bool operator==(const NormalityDecision&) const = default;
};

inline constexpr std::size_t kDefaultSizeThreshold = 30;

// Tests each group on its own: Shapiro-Wilk below size_threshold,
// Kolmogorov-Smirnov at or above it.
inline NormalityDecision normality_check(const GroupedSample& g, double alpha,
                                         std::size_t size_threshold = kDefaultSizeThreshold,
                                         KsPValue ks_p = KsPValue::asymptotic) {
  NormalityDecision out;
  out.all_normal = true;
  for (const auto& grp : g.groups()) {
    if (grp.size() < 3) {
      throw DataError("normality check requires n >= 3 in group '" + grp.label + "'");
    }
    TestResult r = grp.size() < size_threshold ? shapiro_wilk(grp.values)
                                               : ks_normal(grp.values, ks_p);
    out.all_normal = out.all_normal && !(r.p_value < alpha);
    const std::string name(to_string(r.method));
    if (out.chosen_method.empty()) {
      out.chosen_method = name;
    } else if (out.chosen_method != name) {
      out.chosen_method = "mixed";
    }
    out.per_group.push_back({grp.label, std::move(r)});
  }
  return out;
}

}  // namespace stattree
