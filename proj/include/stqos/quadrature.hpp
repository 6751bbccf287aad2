#pragma once

// Adaptive Gauss-Kronrod (G7/K15) quadrature over finite intervals, plus a
// rational map for semi-infinite integrals. Interval-splitting worklist keyed
// on the local K15-G7 discrepancy.

#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <vector>

#include "stqos/errors.hpp"

namespace stqos {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 4000;
};

namespace detail {

// K15 nodes on [0,1] (positive half) and weights; G7 shares the odd nodes.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Segment {
  double a, b, integral, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
inline Segment gauss_kronrod(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kKronrodNodes[i]);
    fv[14 - i] = f(c + h * kKronrodNodes[i]);
  }
  fv[7] = f(c);
  double k15 = kKronrodWeights[7] * fv[7];
  for (int i = 0; i < 7; ++i) k15 += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
  double g7 = kGaussWeights[3] * fv[7];
  for (int i = 0; i < 3; ++i) g7 += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  k15 *= h;
  g7 *= h;
  const double diff = std::abs(k15 - g7);
  // standard QUADPACK-style error sharpening
  const double err = (diff > 0.0) ? diff * std::min(1.0, std::pow(200.0 * diff / std::abs(k15 + 1e-300), 1.5))
                                  : 0.0;
  return {a, b, k15, std::max(err, diff * 1e-6)};
}

}  // namespace detail

// Integrate f over [a, b].
template <typename F>
inline double integrate(const F& f, double a, double b, const QuadratureOptions& opt = {}) {
  if (a == b) return 0.0;
  std::priority_queue<detail::Segment> work;
  work.push(detail::gauss_kronrod(f, a, b));
  double total = work.top().integral;
  double total_err = work.top().error;
  std::size_t n = 1;
  while (total_err > opt.abs_tol && total_err > opt.rel_tol * std::abs(total)) {
    if (n >= opt.max_intervals)
      throw ConvergenceError("integrate: interval budget exhausted");
    detail::Segment s = work.top();
    work.pop();
    const double mid = 0.5 * (s.a + s.b);
    if (mid <= s.a || mid >= s.b) break;  // interval at double resolution
    const detail::Segment left = detail::gauss_kronrod(f, s.a, mid);
    const detail::Segment right = detail::gauss_kronrod(f, mid, s.b);
    total += left.integral + right.integral - s.integral;
    total_err += left.error + right.error - s.error;
    work.push(left);
    work.push(right);
    ++n;
  }
  return total;
}

// Integrate f over [a, +inf) through x = a + t/(1-t), dx = dt/(1-t)^2.
template <typename F>
inline double integrate_to_infinity(const F& f, double a, const QuadratureOptions& opt = {}) {
  auto mapped = [&](double t) {
    const double om = 1.0 - t;
    if (om <= 0.0) return 0.0;
    const double x = a + t / om;
    const double v = f(x);
    return v / (om * om);
  };
  return integrate(mapped, 0.0, 1.0, opt);
}

}  // namespace stqos
