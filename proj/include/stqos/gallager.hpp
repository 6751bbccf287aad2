#pragma once

// Error-rate QoS exponent: the Gaussian-input E0 functional averaged over
// the fading SINR, its moment-matched Jensen closed form, and the supremum
// of E0(rho) - rho R over rho in [0,1].

#include <cmath>
#include <cstddef>
#include <functional>

#include "stqos/channel.hpp"
#include "stqos/errors.hpp"
#include "stqos/quadrature.hpp"
#include "stqos/specfun.hpp"

namespace stqos {

struct ExponentResult {
  double theta_error = 0.0;  // max(0, E0(rho*) - rho* R)
  double rho_star = 0.0;
  double e0_at_rho = 0.0;
};

// E0(rho) = -(1/n) log E_gamma[(1 + gamma/(1+rho))^(-n rho)], by quadrature
// against the SINR density. Exactly zero at rho = 0.
inline double e0_exact(const SinrModel& model, double rho, std::size_t blocklength) {
  model.validate();
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("e0_exact: rho must lie in [0,1]");
  if (blocklength < 1) throw DomainError("e0_exact: blocklength must be >= 1");
  if (rho == 0.0) return 0.0;
  const double n = static_cast<double>(blocklength);
  QuadratureOptions opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-10;
  opt.max_intervals = 20000;
  const double expectation = integrate_to_infinity(
      [&](double x) {
        return std::exp(-n * rho * std::log1p(x / (1.0 + rho))) * sinr_pdf(model, x);
      },
      0.0, opt);
  return -std::log(expectation) / n;
}

// Jensen closed form:
//   rho log{ phiP E[|h|^2] + (1+rho) sqrt(pi/2) varsigma F + 1 + rho }
//   - rho psi(k) - rho log(eta) - rho log(1+rho),
// with E[|h|^2] = alpha 2F1(m, 2; 1; delta/beta) / beta^2 and F the mean
// total interferer response. The sqrt(pi/2) varsigma factor is the
// Rayleigh amplitude mean; set use_amplitude_mean = false to replace it with
// the power mean 2 varsigma^2.
inline double e0_jensen(const SinrModel& model, double rho, bool use_amplitude_mean = true) {
  model.validate();
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("e0_jensen: rho must lie in [0,1]");
  if (rho == 0.0) return 0.0;
  if (!model.interferer_summary)
    throw DomainError("e0_jensen: model carries no interferer summary");
  const auto d = model.fade.derived();
  const double second_moment =
      d.alpha * hyp2f1(static_cast<double>(d.m_eff), 2.0, 1.0, d.delta / d.beta) /
      (d.beta * d.beta);
  const double vs = model.interferer_summary->varsigma;
  const double fade_mean =
      use_amplitude_mean ? std::sqrt(M_PI / 2.0) * vs : 2.0 * vs * vs;
  const double interferer_term =
      (1.0 + rho) * fade_mean * model.interferer_summary->mean_field_response;
  const double log_arg =
      model.received_scale() * second_moment + interferer_term + 1.0 + rho;
  return rho * std::log(log_arg) - rho * digamma(model.interference.k) -
         rho * std::log(model.interference.eta) - rho * std::log1p(rho);
}

// sup over rho in [0,1] of E0(rho) - rho R: a 33-point bracketing grid,
// followed by ternary search for the exact form (concave) and grid argmax
// only for the Jensen form. Floors at zero when the rate is past the E0
// slope at the origin.
inline ExponentResult theta_error(const SinrModel& model, double rate_nats,
                                  std::size_t blocklength, bool use_jensen = false) {
  if (!(rate_nats > 0.0)) throw DomainError("theta_error: rate must be > 0");
  std::function<double(double)> e0;
  if (use_jensen) {
    e0 = [&](double rho) { return e0_jensen(model, rho); };
  } else {
    e0 = [&](double rho) { return e0_exact(model, rho, blocklength); };
  }
  auto objective = [&](double rho) { return e0(rho) - rho * rate_nats; };

  // 33 uniform points plus log-spaced small-rho probes: at large blocklength
  // the maximizer shrinks like 1/n and slips below the uniform spacing.
  constexpr std::size_t kGrid = 33;
  std::vector<double> grid = {1e-5, 3e-5, 1e-4, 3e-4, 1e-3, 3e-3, 6e-3, 1e-2, 2e-2};
  for (std::size_t i = 1; i < kGrid; ++i)
    grid.push_back(static_cast<double>(i) / static_cast<double>(kGrid - 1));
  double best_rho = 0.0;
  double best = 0.0;  // objective at rho = 0 is exactly 0
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = objective(grid[i]);
    if (v > best) {
      best = v;
      best_rho = grid[i];
      best_idx = i;
    }
  }
  if (!use_jensen && best > 0.0) {
    double lo = (best_idx == 0) ? 0.0 : grid[best_idx - 1];
    double hi = (best_idx + 1 < grid.size()) ? grid[best_idx + 1] : 1.0;
    for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (objective(m1) < objective(m2)) lo = m1; else hi = m2;
    }
    const double rho = 0.5 * (lo + hi);
    const double v = objective(rho);
    if (v > best) {
      best = v;
      best_rho = rho;
    }
  }

  ExponentResult out;
  if (best <= 0.0) {
    out.theta_error = 0.0;
    out.rho_star = 0.0;
    out.e0_at_rho = 0.0;
    return out;
  }
  out.rho_star = best_rho;
  out.e0_at_rho = e0(best_rho);
  out.theta_error = std::max(0.0, out.e0_at_rho - best_rho * rate_nats);
  return out;
}

}  // namespace stqos
