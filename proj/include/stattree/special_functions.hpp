#pragma once

// Distribution functions used by the tests: normal, Student-t, F,
// chi-square, studentized range and the asymptotic Kolmogorov law.
//
// Kernels:
//  - regularized incomplete beta by Lentz's continued fraction, evaluated
//    on the side x < (a+1)/(a+b+2) and mirrored with I_x(a,b) = 1 - I_{1-x}(b,a)
//    otherwise;
//  - regularized incomplete gamma by power series for x < s+1 and by
//    continued fraction for the upper tail otherwise;
//  - studentized range by nested adaptive Gauss-Legendre quadrature.
//
// Every function is pure and reentrant.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stattree/errors.hpp"

namespace stattree {

struct Tolerance {
  double abs_eps = 1e-10;
  int max_iter = 100000;
};

inline constexpr Tolerance kStudentizedRangeTolerance{1e-8, 40};

namespace detail {

inline constexpr double kRelEps = 1e-15;
inline constexpr double kTiny = 1e-300;

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DataError(std::string(what) + ": argument must be finite");
  }
}

inline void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DataError(std::string(what) + ": parameter must be positive and finite");
  }
}

// Lanczos approximation (g = 7, 9 terms). std::lgamma is avoided because
// glibc's version writes the global signgam.
inline double log_gamma(double x) {
  static constexpr std::array<double, 9> c = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    return std::log(std::numbers::pi / std::abs(std::sin(std::numbers::pi * x))) -
           log_gamma(1.0 - x);
  }
  x -= 1.0;
  double a = c[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) a += c[i] / (x + i);
  return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t +
         std::log(a);
}

inline double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

// Continued fraction for I_x(a,b) (modified Lentz). Valid for
// x < (a+1)/(a+b+2).
inline double beta_continued_fraction(double a, double b, double x,
                                      const Tolerance& tol) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= tol.max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kRelEps) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge");
}

// I_x(a,b) with y = 1 - x supplied separately so callers can avoid
// cancellation when x is close to 1.
inline double incomplete_beta(double a, double b, double x, double y,
                              const Tolerance& tol) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front =
      a * std::log(x) + b * std::log(y) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x, tol) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y, tol) / b;
}

// Lower (P) and upper (Q) regularized incomplete gamma together.
struct GammaPair {
  double p;
  double q;
};

inline GammaPair incomplete_gamma(double s, double x, const Tolerance& tol) {
  if (x <= 0.0) return {0.0, 1.0};
  const double log_front = -x + s * std::log(x) - log_gamma(s);
  if (x < s + 1.0) {
    double ap = s;
    double del = 1.0 / s;
    double sum = del;
    for (int n = 1; n <= tol.max_iter; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * kRelEps) {
        const double p = sum * std::exp(log_front);
        return {p, 1.0 - p};
      }
    }
    throw ConvergenceError("incomplete gamma series did not converge");
  }
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= tol.max_iter; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kRelEps) {
      const double q = std::exp(log_front) * h;
      return {1.0 - q, q};
    }
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge");
}

// 10-point Gauss-Legendre nodes on [-1, 1].
inline constexpr std::array<double, 5> kGlNodes = {
    0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
    0.8650633666889845, 0.9739065285171717};
inline constexpr std::array<double, 5> kGlWeights = {
    0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
    0.1494513491505806, 0.0666713443086881};

template <typename F>
double gauss_legendre_10(F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
    const double dx = half * kGlNodes[i];
    sum += kGlWeights[i] * (f(mid - dx) + f(mid + dx));
  }
  return sum * half;
}

template <typename F>
double adaptive_gl_step(F& f, double a, double b, double whole, double eps,
                        int depth, int max_depth) {
  const double mid = 0.5 * (a + b);
  const double left = gauss_legendre_10(f, a, mid);
  const double right = gauss_legendre_10(f, mid, b);
  const double err = std::abs(left + right - whole);
  if (err <= eps) return left + right;
  if (depth >= max_depth) {
    throw ConvergenceError("adaptive quadrature did not reach tolerance");
  }
  return adaptive_gl_step(f, a, mid, left, 0.5 * eps, depth + 1, max_depth) +
         adaptive_gl_step(f, mid, b, right, 0.5 * eps, depth + 1, max_depth);
}

// Adaptive Gauss-Legendre over [a, b], starting from `panels` equal
// subintervals. Bisects a panel until the two-halves estimate agrees with
// the whole-panel estimate to its share of eps.
template <typename F>
double integrate(F&& f, double a, double b, double eps, int max_depth,
                 int panels = 8) {
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == panels) ? b : lo + width;
    const double whole = gauss_legendre_10(f, lo, hi);
    total += adaptive_gl_step(f, lo, hi, whole, eps / panels, 0, max_depth);
  }
  return total;
}

}  // namespace detail

inline double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double std_normal_cdf(double z) {
  detail::require_finite(z, "std_normal_cdf");
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Quantile by safeguarded Newton iteration inside a shrinking bisection
// bracket, started from a rational approximation.
inline double std_normal_quantile(double p, const Tolerance& tol = {1e-14, 200}) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DataError("std_normal_quantile: p must be in (0, 1)");
  }
  if (p > 0.5) return -std_normal_quantile(1.0 - p, tol);
  if (p == 0.5) return 0.0;

  // Acklam's lower-region rational approximation as the starting point.
  double x;
  {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    if (p < 0.02425) {
      const double q = std::sqrt(-2.0 * std::log(p));
      x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
          ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
      const double q = p - 0.5;
      const double r = q * q;
      x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
          (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
  }

  double lo = -38.5;
  double hi = 0.0;
  for (int i = 0; i < tol.max_iter; ++i) {
    const double f = std_normal_cdf(x) - p;
    if (f < 0.0) lo = x; else hi = x;
    if (f == 0.0) return x;
    const double dens = std_normal_pdf(x);
    double next = dens > 0.0 ? x - f / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= tol.abs_eps * (1.0 + std::abs(x))) return next;
    x = next;
  }
  throw ConvergenceError("std_normal_quantile did not converge");
}

inline double regularized_incomplete_beta(double a, double b, double x,
                                          const Tolerance& tol = {}) {
  detail::require_positive(a, "regularized_incomplete_beta");
  detail::require_positive(b, "regularized_incomplete_beta");
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DataError("regularized_incomplete_beta: x must be in [0, 1]");
  }
  return detail::incomplete_beta(a, b, x, 1.0 - x, tol);
}

inline double regularized_lower_gamma(double s, double x, const Tolerance& tol = {}) {
  detail::require_positive(s, "regularized_lower_gamma");
  if (!(x >= 0.0)) throw DataError("regularized_lower_gamma: x must be >= 0");
  if (std::isinf(x)) return 1.0;
  return detail::incomplete_gamma(s, x, tol).p;
}

inline double regularized_upper_gamma(double s, double x, const Tolerance& tol = {}) {
  detail::require_positive(s, "regularized_upper_gamma");
  if (!(x >= 0.0)) throw DataError("regularized_upper_gamma: x must be >= 0");
  if (std::isinf(x)) return 0.0;
  return detail::incomplete_gamma(s, x, tol).q;
}

// ---- Student t -------------------------------------------------------------

inline double student_t_pdf(double t, double df) {
  detail::require_positive(df, "student_t_pdf");
  const double log_norm = detail::log_gamma(0.5 * (df + 1.0)) -
                          detail::log_gamma(0.5 * df) -
                          0.5 * std::log(df * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(t * t / df));
}

// P(|T| >= |t|), computed directly to avoid 1 - cdf cancellation.
inline double student_t_two_sided_p(double t, double df, const Tolerance& tol = {}) {
  detail::require_finite(t, "student_t_two_sided_p");
  detail::require_positive(df, "student_t_two_sided_p");
  const double t2 = t * t;
  return detail::incomplete_beta(0.5 * df, 0.5, df / (df + t2), t2 / (df + t2), tol);
}

inline double student_t_cdf(double t, double df, const Tolerance& tol = {}) {
  const double tail = 0.5 * student_t_two_sided_p(t, df, tol);
  return t > 0.0 ? 1.0 - tail : tail;
}

// ---- F -------------------------------------------------------------------

inline double f_pdf(double x, double d1, double d2) {
  detail::require_positive(d1, "f_pdf");
  detail::require_positive(d2, "f_pdf");
  if (x <= 0.0) return 0.0;
  const double log_dens = 0.5 * d1 * std::log(d1 * x) + 0.5 * d2 * std::log(d2) -
                          0.5 * (d1 + d2) * std::log(d1 * x + d2) - std::log(x) -
                          detail::log_beta(0.5 * d1, 0.5 * d2);
  return std::exp(log_dens);
}

inline double f_cdf(double x, double d1, double d2, const Tolerance& tol = {}) {
  detail::require_positive(d1, "f_cdf");
  detail::require_positive(d2, "f_cdf");
  if (std::isnan(x) || x < 0.0) throw DataError("f_cdf: x must be >= 0");
  if (std::isinf(x)) return 1.0;
  const double denom = d1 * x + d2;
  return detail::incomplete_beta(0.5 * d1, 0.5 * d2, d1 * x / denom, d2 / denom, tol);
}

// Upper tail P(F > x).
inline double f_sf(double x, double d1, double d2, const Tolerance& tol = {}) {
  detail::require_positive(d1, "f_sf");
  detail::require_positive(d2, "f_sf");
  if (std::isnan(x) || x < 0.0) throw DataError("f_sf: x must be >= 0");
  if (std::isinf(x)) return 0.0;
  const double denom = d1 * x + d2;
  return detail::incomplete_beta(0.5 * d2, 0.5 * d1, d2 / denom, d1 * x / denom, tol);
}

// ---- chi-square ----------------------------------------------------------

inline double chi_square_pdf(double x, double df) {
  detail::require_positive(df, "chi_square_pdf");
  if (x <= 0.0) return 0.0;
  const double k = 0.5 * df;
  return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::numbers::ln2 -
                  detail::log_gamma(k));
}

inline double chi_square_cdf(double x, double df, const Tolerance& tol = {}) {
  detail::require_positive(df, "chi_square_cdf");
  if (std::isnan(x) || x < 0.0) throw DataError("chi_square_cdf: x must be >= 0");
  return regularized_lower_gamma(0.5 * df, 0.5 * x, tol);
}

inline double chi_square_sf(double x, double df, const Tolerance& tol = {}) {
  detail::require_positive(df, "chi_square_sf");
  if (std::isnan(x) || x < 0.0) throw DataError("chi_square_sf: x must be >= 0");
  return regularized_upper_gamma(0.5 * df, 0.5 * x, tol);
}

// ---- studentized range ---------------------------------------------------

namespace detail {

// P(range of k iid standard normals <= w)
//   = k * integral phi(z) [Phi(z) - Phi(z - w)]^(k-1) dz.
inline double normal_range_cdf(double w, int k, double eps) {
  if (w <= 0.0) return 0.0;
  auto integrand = [w, k](double z) {
    const double inner = 0.5 * (std::erfc(-z / std::numbers::sqrt2) -
                                std::erfc(-(z - w) / std::numbers::sqrt2));
    if (inner <= 0.0) return 0.0;
    return std_normal_pdf(z) * std::pow(inner, k - 1);
  };
  // phi(z) < 1e-18 outside [-9, 9 + w]; the range term vanishes for z < -9.
  const double value = k * integrate(integrand, -9.0, 9.0 + w, eps / k, 40, 16);
  return std::min(1.0, std::max(0.0, value));
}

}  // namespace detail

// P(Q <= q) for the studentized range of k means with df error degrees of
// freedom: the normal range distribution at q*s averaged over the density of
// s = sqrt(chi2_df / df).
inline double studentized_range_cdf(double q, int k, double df,
                                    const Tolerance& tol = kStudentizedRangeTolerance) {
  if (std::isnan(q) || q < 0.0) {
    throw DataError("studentized_range_cdf: q must be >= 0");
  }
  if (k < 2) throw DataError("studentized_range_cdf: k must be >= 2");
  detail::require_positive(df, "studentized_range_cdf");
  if (q == 0.0) return 0.0;
  if (std::isinf(q)) return 1.0;

  const double inner_eps = 0.1 * tol.abs_eps;
  const double log_norm = 0.5 * df * std::log(df) - detail::log_gamma(0.5 * df) -
                          (0.5 * df - 1.0) * std::numbers::ln2;
  auto s_density = [&](double s) {
    if (s <= 0.0) return 0.0;  // quadrature nodes are interior
    return std::exp(log_norm + (df - 1.0) * std::log(s) - 0.5 * df * s * s);
  };
  auto integrand = [&](double s) {
    const double dens = s_density(s);
    if (dens < 1e-300) return 0.0;
    return dens * detail::normal_range_cdf(q * s, k, inner_eps);
  };

  // s concentrates around 1 with spread ~ 1/sqrt(2 df); outside +-10 spreads
  // (and beyond s = 10 for small df) the density is below e^-45.
  const double spread = 1.0 / std::sqrt(2.0 * df);
  const double lo = std::max(0.0, 1.0 - 10.0 * spread);
  const double hi = std::max(1.0 + 10.0 * spread, df < 3.0 ? 10.0 : 0.0);
  const double value =
      detail::integrate(integrand, lo, hi, 0.9 * tol.abs_eps, tol.max_iter, 8);
  return std::min(1.0, std::max(0.0, value));
}

// ---- Kolmogorov ----------------------------------------------------------

// Upper tail P(K > lambda) of the limiting Kolmogorov distribution of
// sqrt(n) * D_n.
inline double kolmogorov_sf(double lambda) {
  if (std::isnan(lambda)) throw DataError("kolmogorov_sf: argument is NaN");
  if (lambda <= 0.0) return 1.0;
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  if (lambda < 1.18) {
    // Theta-function form converges fast for small lambda.
    double cdf = 0.0;
    for (int j = 1; j <= 20; ++j) {
      const double m = 2.0 * j - 1.0;
      cdf += std::exp(-m * m * pi2 / (8.0 * lambda * lambda));
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::min(1.0, std::max(0.0, 1.0 - cdf));
  }
  double sf = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sf += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-17) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sf));
}

}  // namespace stattree
