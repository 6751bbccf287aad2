#pragma once

// Mellin-transform network calculus in the SNR domain: (sigma, rho)
// envelopes, peak-age violation bounds for G|G, GI|GI, Poisson-arrival and
// HARQ-driven service processes, the high-SNR variant, and the slotted
// delay-violation kernel bound.
//
// Every bound comes in two algebraic forms:
//   full    - keeps the geometric-series denominator
//             1 - M_I(1-theta) M_S(1+theta); a valid bound under the
//             stability condition.
//   literal - drops that denominator (the simplified Poisson-arrival
//             display); needs only theta < lambda.
// Both are computed whenever possible; `value` carries the requested form and
// `alt_value` the other one.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stqos/errors.hpp"
#include "stqos/fbc.hpp"
#include "stqos/harq.hpp"

namespace stqos {

// Affine log-MGF envelope in the SNR domain; sigma and rho are evaluated at
// the queried exponent (negative arguments select the arrival's 1-theta
// pieces).
struct SigmaRhoEnvelope {
  std::function<double(double)> sigma;
  std::function<double(double)> rho;
};

struct AoiQosQuery {
  double theta_aoi = 0.0;
  double a_th = 0.0;          // threshold in channel uses
  std::size_t blocklength = 1;  // divisor n in the exponent theta * a_th / n

  void validate() const {
    if (!(theta_aoi > 0.0)) throw DomainError("AoiQosQuery: theta_aoi must be > 0");
    if (!(a_th > 0.0)) throw DomainError("AoiQosQuery: a_th must be > 0");
    if (blocklength < 1) throw DomainError("AoiQosQuery: blocklength must be >= 1");
  }

  bool operator==(const AoiQosQuery&) const = default;
};

struct DelayQosQuery {
  double theta_delay = 0.0;
  double d_th = 0.0;   // delay bound in slots
  double delta_s = 1.0;  // non-empty-queue probability; 1 is the safe default

  void validate() const {
    if (!(theta_delay > 0.0)) throw DomainError("DelayQosQuery: theta_delay must be > 0");
    if (d_th < 0.0) throw DomainError("DelayQosQuery: d_th must be >= 0");
    if (!(delta_s > 0.0 && delta_s <= 1.0))
      throw DomainError("DelayQosQuery: delta_s must lie in (0,1]");
  }

  bool operator==(const DelayQosQuery&) const = default;
};

struct BoundResult {
  double value = 0.0;             // clamped to [0,1]
  double theta_used = 0.0;
  double stability_margin = 0.0;  // positive whenever the bound evaluates
  double raw_value = 0.0;         // pre-clamp value of the requested form
  std::optional<double> alt_value;  // the other algebraic form, clamped
  std::string notes;
};

enum class BoundForm { full, literal };

namespace detail {
inline double clamp_prob(double v) { return std::min(std::max(v, 0.0), 1.0); }
}

// Mellin transform of an exponential inter-arrival time at order 1 + theta:
// lambda / (lambda - theta). Has a pole at theta = lambda; negative theta is
// admitted (it evaluates the 1 - theta' orders).
inline double mellin_exp_interarrival(double lambda_s, double theta) {
  if (!(lambda_s > 0.0)) throw DomainError("mellin_exp_interarrival: lambda must be > 0");
  // a relative guard: values within 1e-9 of the pole are numerically garbage
  if (theta >= lambda_s * (1.0 - 1e-9))
    throw StabilityError("mellin_exp_interarrival: theta at or past the pole lambda",
                         lambda_s - theta);
  return lambda_s / (lambda_s - theta);
}

// GI processes are (0, rho)-constrained with rho(t) = log M(1+t) / t.
inline SigmaRhoEnvelope envelope_from_mellin(std::function<double(double)> mellin_at_order) {
  SigmaRhoEnvelope env;
  env.sigma = [](double) { return 0.0; };
  env.rho = [mellin_at_order](double t) {
    if (t == 0.0) throw DomainError("SigmaRhoEnvelope: rho undefined at t = 0");
    return std::log(mellin_at_order(1.0 + t)) / t;
  };
  return env;
}

// G|G peak-age bound: xi * exp(-theta A_th / n) with
//   xi = exp(theta [rho_I(th)+sigma_I(th)]) exp(theta [sigma_I(-th)+rho_S(th)+sigma_S(th)])
//        / (1 - exp(-theta [rho_I(-th) - rho_S(th)]))
// under the stability condition rho_S(theta) < rho_I(-theta).
inline BoundResult peak_aoi_bound_gg(const SigmaRhoEnvelope& arrival,
                                     const SigmaRhoEnvelope& service, const AoiQosQuery& q) {
  q.validate();
  const double th = q.theta_aoi;
  const double rho_i_neg = arrival.rho(-th);
  const double rho_s = service.rho(th);
  const double margin = rho_i_neg - rho_s;
  if (!(margin > 0.0))
    throw StabilityError("peak_aoi_bound_gg: service envelope rate exceeds arrival rate",
                         margin);
  const double numer = std::exp(th * (arrival.rho(th) + arrival.sigma(th))) *
                       std::exp(th * (arrival.sigma(-th) + rho_s + service.sigma(th)));
  const double denom = 1.0 - std::exp(-th * margin);
  BoundResult out;
  out.theta_used = th;
  out.stability_margin = margin;
  out.raw_value = numer / denom *
                  std::exp(-th * q.a_th / static_cast<double>(q.blocklength));
  out.value = detail::clamp_prob(out.raw_value);
  if (out.value != out.raw_value) out.notes = "clamped";
  return out;
}

// GI|GI special case, written directly in Mellin values:
//   exp(-theta A/n) M_I(1+th) M_S(1+th) / (1 - M_I(1-th) M_S(1+th)).
inline BoundResult peak_aoi_bound_gigi(double m_interarrival, double m_interarrival_neg,
                                       double m_service, const AoiQosQuery& q) {
  q.validate();
  const double margin = 1.0 - m_interarrival_neg * m_service;
  if (!(margin > 0.0))
    throw StabilityError("peak_aoi_bound_gigi: M_I(1-theta) M_S(1+theta) >= 1", margin);
  BoundResult out;
  out.theta_used = q.theta_aoi;
  out.stability_margin = margin;
  out.raw_value = std::exp(-q.theta_aoi * q.a_th / static_cast<double>(q.blocklength)) *
                  m_interarrival * m_service / margin;
  out.value = detail::clamp_prob(out.raw_value);
  if (out.value != out.raw_value) out.notes = "clamped";
  return out;
}

// Poisson-arrival specialization. The literal display drops the
// geometric-series denominator; the full form keeps it with
// M_I(1-theta) = lambda / (lambda + theta).
inline BoundResult peak_aoi_poisson(double lambda_s, double m_service, const AoiQosQuery& q,
                                    BoundForm form = BoundForm::full) {
  q.validate();
  const double th = q.theta_aoi;
  const double m_plus = mellin_exp_interarrival(lambda_s, th);
  const double m_minus = lambda_s / (lambda_s + th);
  const double decay = std::exp(-th * q.a_th / static_cast<double>(q.blocklength));
  const double literal_raw = decay * m_plus * m_service;
  const double margin = 1.0 - m_minus * m_service;

  BoundResult out;
  out.theta_used = th;
  if (form == BoundForm::literal) {
    out.stability_margin = lambda_s - th;
    out.raw_value = literal_raw;
    out.value = detail::clamp_prob(out.raw_value);
    out.notes = "form=literal";
    if (margin > 0.0) out.alt_value = detail::clamp_prob(literal_raw / margin);
    return out;
  }
  if (!(margin > 0.0))
    throw StabilityError("peak_aoi_poisson: M_I(1-theta) M_S(1+theta) >= 1", margin);
  out.stability_margin = margin;
  out.raw_value = literal_raw / margin;
  out.value = detail::clamp_prob(out.raw_value);
  out.notes = "form=full";
  out.alt_value = detail::clamp_prob(literal_raw);
  return out;
}

// Service-time Mellin exponent for a HARQ-served update: theta n_hat T
// (1 + sum eps_l), i.e. M_S(1+theta) = exp of that with the expected-round
// bound standing in for the round count.
inline double harq_service_mellin(const HarqConfig& hcfg, const std::vector<double>& errs,
                                  double theta) {
  return std::exp(theta * hcfg.round_duration() * expected_rounds_bound(errs));
}

// Peak-age violation bound with closed-form per-round failure probabilities.
inline BoundResult peak_aoi_harq(const SinrModel& model, const HarqConfig& hcfg,
                                 double lambda_s, const AoiQosQuery& q,
                                 const SeriesControl& ctl = {},
                                 BoundForm form = BoundForm::full) {
  const std::vector<double> errs = round_error_probs(model, hcfg, ctl);
  const double m_service = harq_service_mellin(hcfg, errs, q.theta_aoi);
  BoundResult out = peak_aoi_poisson(lambda_s, m_service, q, form);
  out.notes += ";service=harq_closed_form";
  return out;
}

// Same bound with the high-SNR failure probabilities inside the exponent.
inline BoundResult peak_aoi_asymptotic(const SinrModel& model, const HarqConfig& hcfg,
                                       double lambda_s, const AoiQosQuery& q,
                                       BoundForm form = BoundForm::full) {
  const std::vector<double> errs = round_error_probs_asymptotic(model, hcfg);
  const double m_service = harq_service_mellin(hcfg, errs, q.theta_aoi);
  BoundResult out = peak_aoi_poisson(lambda_s, m_service, q, form);
  out.notes += ";service=harq_high_snr";
  return out;
}

// Bit-domain service Mellin of the two-point law {log2 M* w.p. 1-eps, 0 w.p.
// eps} at the given order: eps + (1-eps) exp((order-1) log2 M*). Callers pass
// 1-theta or 1+theta explicitly.
inline double service_mellin_fbc(double eps, double codebook_bits, double order) {
  if (!(eps >= 0.0 && eps <= 1.0))
    throw DomainError("service_mellin_fbc: eps must lie in [0,1]");
  return eps + (1.0 - eps) * std::exp((order - 1.0) * codebook_bits);
}

// Mellin of the exponentiated per-slot Poisson arrival increment at the given
// order: exp(lambda (e^((order-1) increment) - 1)). The unit increment is the
// literal display; pass the packet size in bits to match a bit-domain service.
inline double poisson_arrival_mellin(double lambda_s, double order, double increment = 1.0) {
  if (!(lambda_s > 0.0)) throw DomainError("poisson_arrival_mellin: lambda must be > 0");
  return std::exp(lambda_s * std::expm1((order - 1.0) * increment));
}

// Slotted delay bound: inf over the admissible grid of
//   delta_s [M_S(1-th)]^{D_th} / (1 - M_A(1+th) M_S(1-th)).
// Mellin callbacks take the full order so the 1+th / 1-th bookkeeping stays
// on this side.
inline BoundResult delay_violation_bound(const std::function<double(double)>& arrival_mellin,
                                         const std::function<double(double)>& service_mellin,
                                         const DelayQosQuery& q,
                                         const std::vector<double>& theta_grid) {
  q.validate();
  if (theta_grid.empty()) throw DomainError("delay_violation_bound: empty theta grid");
  BoundResult out;
  double best = std::numeric_limits<double>::infinity();
  double worst_margin = -std::numeric_limits<double>::infinity();
  for (double th : theta_grid) {
    if (!(th > 0.0)) throw DomainError("delay_violation_bound: theta grid must be positive");
    const double ms = service_mellin(1.0 - th);
    const double ma = arrival_mellin(1.0 + th);
    const double margin = 1.0 - ma * ms;
    worst_margin = std::max(worst_margin, margin);
    if (!(margin > 0.0)) continue;
    const double kernel = q.delta_s * std::pow(ms, q.d_th) / margin;
    if (kernel < best) {
      best = kernel;
      out.theta_used = th;
      out.stability_margin = margin;
    }
  }
  if (!std::isfinite(best))
    throw StabilityError("delay_violation_bound: no admissible theta on the grid",
                         worst_margin);
  out.raw_value = best;
  out.value = detail::clamp_prob(best);
  if (out.value != out.raw_value) out.notes = "clamped";
  return out;
}

// Log-spaced grid refined by golden-section minimization of a bound over
// theta in (lo, hi); points where fn throws are treated as inadmissible.
// Bounds are reported at fixed theta elsewhere; this is a convenience layer.
struct ThetaOptimum {
  double theta;
  double value;
};

inline ThetaOptimum minimize_over_theta(const std::function<double(double)>& fn, double lo,
                                        double hi, std::size_t grid_points = 64) {
  if (!(lo > 0.0 && hi > lo)) throw DomainError("minimize_over_theta: need 0 < lo < hi");
  auto safe = [&](double th) {
    try {
      return fn(th);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  double best_theta = 0.0;
  double best = std::numeric_limits<double>::infinity();
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / static_cast<double>(grid_points - 1);
  std::vector<double> grid(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    grid[i] = std::exp(log_lo + step * static_cast<double>(i));
    const double v = safe(grid[i]);
    if (v < best) {
      best = v;
      best_theta = grid[i];
    }
  }
  if (!std::isfinite(best))
    throw StabilityError("minimize_over_theta: no admissible theta in range", -1.0);
  // golden-section sweep on the bracketing interval
  std::size_t idx = 0;
  for (std::size_t i = 0; i < grid_points; ++i)
    if (grid[i] == best_theta) idx = i;
  double a = grid[idx > 0 ? idx - 1 : idx];
  double b = grid[idx + 1 < grid_points ? idx + 1 : idx];
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60 && b - a > 1e-12 * b; ++it) {
    const double x1 = b - gr * (b - a);
    const double x2 = a + gr * (b - a);
    if (safe(x1) < safe(x2)) b = x2; else a = x1;
  }
  const double theta = 0.5 * (a + b);
  const double v = safe(theta);
  if (v < best) return {theta, v};
  return {best_theta, best};
}

}  // namespace stqos
