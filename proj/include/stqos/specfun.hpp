#pragma once

// Self-contained special-function kernel: Pochhammer symbol, lower incomplete
// gamma, digamma, Gaussian Q and its inverse, the confluent hypergeometric
// 1F1(m,1,z) for integer m, and Gauss 2F1 with a Pfaff continuation for
// negative arguments. Everything is pure, double precision, and takes its
// truncation policy as an explicit argument where a series is involved.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "stqos/errors.hpp"
#include "stqos/series.hpp"

namespace stqos {

inline constexpr double kEulerGamma = 0.577215664901532860606512090082;

// (q)_l = q (q+1) ... (q+l-1), with (q)_0 = 1.
inline double pochhammer(double q, std::size_t l) {
  double p = 1.0;
  for (std::size_t i = 0; i < l; ++i) p *= q + static_cast<double>(i);
  return p;
}

// gamma(a, x) = int_0^x t^(a-1) e^(-t) dt for a > 0, x >= 0.
//
// Kummer series gamma(a,x) = x^a e^(-x) sum_j x^j / (a (a+1)...(a+j)),
// evaluated in log space for the prefactor. When the upper tail
// Gamma(a,x) is provably below rel_tol * Gamma(a) the saturated value
// Gamma(a) is returned directly, which keeps the term count bounded for
// large x.
inline double lower_incomplete_gamma(double a, double x, const SeriesControl& ctl = {}) {
  ctl.validate();
  if (!(a > 0.0)) throw DomainError("lower_incomplete_gamma: require a > 0");
  if (x < 0.0) throw DomainError("lower_incomplete_gamma: require x >= 0");
  if (x == 0.0) return 0.0;

  const double lgam_a = std::lgamma(a);
  if (x > 2.0 * a + 20.0) {
    // For x well past the mode, Gamma(a,x) <= 2 x^(a-1) e^(-x); saturate when
    // that envelope is negligible relative to Gamma(a).
    const double log_tail = std::log(2.0) + (a - 1.0) * std::log(x) - x;
    if (log_tail < lgam_a + std::log(ctl.rel_tol) - 2.0) return std::tgamma(a);
  }

  // sum_j x^j / prod_{i<=j} (a+i); term ratio x/(a+j+1) < 1 once j > x-a-1.
  double term = 1.0 / a;
  double sum = term;
  for (std::size_t j = 1; j <= ctl.max_terms; ++j) {
    term *= x / (a + static_cast<double>(j));
    sum += term;
    if (std::abs(term) < ctl.rel_tol * std::abs(sum) && x < a + static_cast<double>(j)) {
      const double log_pref = a * std::log(x) - x;
      return std::exp(log_pref) * sum;
    }
  }
  const double partial = std::exp(a * std::log(x) - x) * sum;
  const double ratio = x / (a + static_cast<double>(ctl.max_terms) + 1.0);
  const double tail = (ratio < 1.0)
                          ? std::exp(a * std::log(x) - x) * std::abs(term) * ratio / (1.0 - ratio)
                          : std::numeric_limits<double>::infinity();
  throw TruncationError("lower_incomplete_gamma: series did not converge", partial, tail);
}

// Regularized P(a,x) = gamma(a,x) / Gamma(a).
inline double regularized_lower_gamma(double a, double x, const SeriesControl& ctl = {}) {
  return lower_incomplete_gamma(a, x, ctl) / std::tgamma(a);
}

// psi(x) for x > 0. Recurrence up to x >= 8, then the asymptotic series in
// even Bernoulli numbers through x^-12; good to ~1e-13 relative.
inline double digamma(double x) {
  if (!(x > 0.0)) throw DomainError("digamma: require x > 0");
  double result = 0.0;
  while (x < 8.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // log(x) - 1/(2x) - sum B_2k / (2k x^2k), k = 1..6
  const double series = inv2 * (1.0 / 12.0 -
                        inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                        inv2 * (1.0 / 240.0 -
                        inv2 * (1.0 / 132.0 -
                        inv2 * (691.0 / 32760.0))))));
  return result + std::log(x) - 0.5 * inv - series;
}

// Q(x) = P(N(0,1) > x) = erfc(x / sqrt(2)) / 2.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Inverse of Q on (0,1). Acklam's rational approximation for the normal
// quantile refined by two Halley steps against erfc; |Q(Q^-1(p)) - p|
// stays below 1e-15 relative across the open interval.
inline double q_function_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("q_function_inv: require p in (0,1)");
  // Quantile of the standard normal at 1-p.
  const double q = 1.0 - p;
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double z;
  if (q < plow) {
    const double r = std::sqrt(-2.0 * std::log(q));
    z = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  } else if (q <= 1.0 - plow) {
    const double r = q - 0.5;
    const double t = r * r;
    z = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * r /
        (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
  } else {
    const double r = std::sqrt(-2.0 * std::log(1.0 - q));
    z = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  }
  // Halley refinement on f(z) = Q(z) - p.
  for (int it = 0; it < 2; ++it) {
    const double e = q_function(z) - p;
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    if (pdf <= 0.0) break;
    const double u = e / pdf;  // note dQ/dz = -pdf
    z += u / (1.0 - 0.5 * z * u);
  }
  return z;
}

// 1F1(m, 1, z) for nonnegative integer m via the finite alternating-sign sum
//   e^z sum_{l=0}^{m-1} (-1)^l (1-m)_l z^l / (l!)^2,
// exact (no truncation). m = 0 returns 1, consistent with the power series.
inline double hyp1f1_integer_m(std::size_t m, double z) {
  if (m == 0) return 1.0;
  double sum = 0.0;
  double coef = 1.0;  // (-1)^l (1-m)_l / (l!)^2 * z^l
  for (std::size_t l = 0; l < m; ++l) {
    sum += coef;
    const double lm = static_cast<double>(m) - 1.0 - static_cast<double>(l);
    const double lp1 = static_cast<double>(l) + 1.0;
    coef *= z * lm / (lp1 * lp1);  // (-1)(1-m+l) = (m-1-l)
  }
  return std::exp(z) * sum;
}

// Gauss 2F1(g, b; s; z). Direct series for z in (-1, 1); for z <= -1 the Pfaff
// transformation 2F1(g,b;s;z) = (1-z)^(-g) 2F1(g, s-b; s; z/(z-1)) maps the
// argument into [0,1). Arguments z >= 1 are not supported.
inline double hyp2f1(double g, double b, double s, double z, const SeriesControl& ctl = {}) {
  ctl.validate();
  if (s <= 0.0 && s == std::floor(s))
    throw DomainError("hyp2f1: third parameter is a non-positive integer");
  if (z == 0.0) return 1.0;
  if (z >= 1.0) throw UnsupportedArgumentError("hyp2f1: argument must satisfy z < 1");

  double prefactor = 1.0;
  if (z < 0.0) {
    prefactor = std::pow(1.0 - z, -g);
    b = s - b;
    z = z / (z - 1.0);  // in (0,1)
  }

  double term = 1.0;
  double sum = 1.0;
  for (std::size_t l = 0; l < ctl.max_terms; ++l) {
    const double dl = static_cast<double>(l);
    term *= (g + dl) * (b + dl) / ((s + dl) * (dl + 1.0)) * z;
    sum += term;
    if (std::abs(term) < ctl.rel_tol * std::abs(sum)) {
      // require one confirmation term since ratios can dip transiently
      const double check = term * (g + dl + 1.0) * (b + dl + 1.0) /
                           ((s + dl + 1.0) * (dl + 2.0)) * z;
      if (std::abs(check) < ctl.rel_tol * std::abs(sum)) return prefactor * sum;
    }
  }
  const double ratio = std::abs(z);
  const double tail = (ratio < 1.0) ? std::abs(term) * ratio / (1.0 - ratio)
                                    : std::numeric_limits<double>::infinity();
  throw TruncationError("hyp2f1: series did not converge", prefactor * sum, prefactor * tail);
}

}  // namespace stqos
