#pragma once

// Finite-blocklength decoding error probability over the fading SINR:
// capacity/dispersion, the Q-function normal approximation by quadrature,
// the piecewise-linear Q surrogate with its closed-form expectation, and the
// high-SNR linearization.
//
// Rates are natural-log units ("nats per channel use") everywhere inside the
// library; base-2 rates are converted at the API boundary. The linear
// surrogate is centered at the rate threshold gamma0 = e^R - 1 with slope
// parameter vartheta = 1 / (2 pi sqrt(e^{2R} - 1)).

#include <cmath>
#include <cstddef>
#include <string>

#include "stqos/channel.hpp"
#include "stqos/errors.hpp"
#include "stqos/quadrature.hpp"
#include "stqos/series.hpp"
#include "stqos/specfun.hpp"

namespace stqos {

inline double nats_from_bits(double bits) { return bits * M_LN2; }
inline double bits_from_nats(double nats) { return nats / M_LN2; }

struct FbcConfig {
  std::size_t blocklength = 200;
  double rate_nats = 0.5;

  void validate() const {
    if (blocklength < 1) throw DomainError("FbcConfig: blocklength must be >= 1");
    if (!(rate_nats > 0.0)) throw DomainError("FbcConfig: rate must be > 0");
  }
};

struct CapacityDispersion {
  double capacity_nats;
  double dispersion;
};

// C = ln(1 + gamma), V = 1 - (1 + gamma)^-2.
inline CapacityDispersion capacity_dispersion(double gamma) {
  if (gamma < 0.0) throw DomainError("capacity_dispersion: gamma must be >= 0");
  const double one = 1.0 + gamma;
  return {std::log1p(gamma), 1.0 - 1.0 / (one * one)};
}

inline double capacity_bits(double gamma) { return bits_from_nats(std::log1p(gamma)); }

// Q(sqrt(n) (C - R) / sqrt(V)) at one SINR value; the V -> 0 limit is the
// hard threshold.
inline double conditional_error_prob(double gamma, double rate_nats, std::size_t blocklength) {
  const auto cd = capacity_dispersion(gamma);
  if (cd.dispersion <= 0.0) return (cd.capacity_nats > rate_nats) ? 0.0 : 1.0;
  const double arg = std::sqrt(static_cast<double>(blocklength)) *
                     (cd.capacity_nats - rate_nats) / std::sqrt(cd.dispersion);
  return q_function(arg);
}

// Normal-approximation error probability averaged over the SINR law by
// adaptive quadrature.
inline double error_prob_normal(const SinrModel& model, const FbcConfig& cfg) {
  cfg.validate();
  model.validate();
  QuadratureOptions opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-9;
  opt.max_intervals = 20000;
  const double eps = integrate_to_infinity(
      [&](double x) {
        return conditional_error_prob(x, cfg.rate_nats, cfg.blocklength) * sinr_pdf(model, x);
      },
      0.0, opt);
  return std::min(std::max(eps, 0.0), 1.0);
}

struct PsiThresholds {
  double vartheta;
  double zeta_low;
  double zeta_up;
  double center;  // e^R - 1
};

inline PsiThresholds psi_thresholds(double rate_nats, std::size_t blocklength) {
  if (!(rate_nats > 0.0)) throw DomainError("psi_thresholds: rate must be > 0");
  if (blocklength < 1) throw DomainError("psi_thresholds: blocklength must be >= 1");
  const double gamma0 = std::expm1(rate_nats);
  const double vartheta = 1.0 / (2.0 * M_PI * std::sqrt(std::expm1(2.0 * rate_nats)));
  const double half = 1.0 / (2.0 * vartheta * std::sqrt(static_cast<double>(blocklength)));
  return {vartheta, gamma0 - half, gamma0 + half, gamma0};
}

// The linear surrogate itself: 1 below zeta_low, 0 above zeta_up, affine in
// between with value 1/2 at the center.
inline double psi_surrogate(double gamma, const PsiThresholds& t, std::size_t blocklength) {
  if (gamma <= t.zeta_low) return 1.0;
  if (gamma >= t.zeta_up) return 0.0;
  return 0.5 - t.vartheta * std::sqrt(static_cast<double>(blocklength)) * (gamma - t.center);
}

struct ErrorProbResult {
  double value = 0.0;            // clamped to [0, 1]
  double raw = 0.0;              // pre-clamp value
  double truncation_error = 0.0; // series and special-function tail estimate
  bool clamped = false;
  bool linearization_suspect = false;  // raw fell outside [-0.05, 1.05]
};

namespace detail {

// int_0^zeta x f_gamma(x) dx in closed form: each LOS term reduces to a
// Gauss 2F1 through int_0^z x^(l+1) (1 + c x)^-(l+k+1) dx
//   = z^(l+2)/(l+2) 2F1(l+k+1, l+2; l+3; -c z).
inline double mean_below(const ShadowedRicianParams::Derived& d, double k, double eta,
                         double phi_p, double zeta, const SeriesControl& ctl) {
  if (zeta <= 0.0) return 0.0;
  const double c = eta * (d.beta - d.delta) / phi_p;
  const double log_c0 = std::log(d.alpha) - std::lgamma(k) - k * std::log(eta);
  double sum = 0.0;
  double sign_coef = 1.0;
  for (unsigned l = 0; l < d.m_eff; ++l) {
    const double dl = static_cast<double>(l);
    const double f21 = hyp2f1(dl + k + 1.0, dl + 2.0, dl + 3.0, -c * zeta, ctl);
    double log_mag = log_c0 - std::log(phi_p) + std::log(sign_coef) +
                     std::lgamma(dl + k + 1.0) + (dl + k + 1.0) * std::log(eta) +
                     (dl + 2.0) * std::log(zeta) - std::log(dl + 2.0);
    if (l > 0) log_mag += dl * std::log(d.delta / phi_p);
    sum += std::exp(log_mag) * f21;
    const double lm = static_cast<double>(d.m_eff) - 1.0 - dl;
    sign_coef *= lm / ((dl + 1.0) * (dl + 1.0));
  }
  return sum;
}

}  // namespace detail

// Closed-form expectation of the linear surrogate:
//   F(zl) + [1/2 + vartheta sqrt(n) gamma0] (F(zu) - F(zl))
//   - vartheta sqrt(n) int_{zl}^{zu} x f(x) dx,
// with the SINR CDF double series and the 2F1 form of the partial mean.
// Negative zeta_low is clamped to 0 (the SINR carries no mass below zero).
inline ErrorProbResult error_prob_closed_form(const SinrModel& model, double rate_nats,
                                              std::size_t blocklength,
                                              const SeriesControl& ctl = {}) {
  model.validate();
  ctl.validate();
  const auto d = model.fade.derived();
  const double k = model.interference.k;
  const double eta = model.interference.eta;
  const double phi_p = model.received_scale();
  const auto thr = psi_thresholds(rate_nats, blocklength);
  const double sqrt_n = std::sqrt(static_cast<double>(blocklength));
  const double zl = std::max(thr.zeta_low, 0.0);
  const double zu = thr.zeta_up;

  const auto low = detail::sinr_cdf_series(d, k, eta, phi_p, zl, ctl);
  const auto up = detail::sinr_cdf_series(d, k, eta, phi_p, zu, ctl);
  const double partial_mean = detail::mean_below(d, k, eta, phi_p, zu, ctl) -
                              detail::mean_below(d, k, eta, phi_p, zl, ctl);
  const double prefactor = 0.5 + thr.vartheta * sqrt_n * thr.center;

  ErrorProbResult out;
  out.raw = low.value + prefactor * (up.value - low.value) -
            thr.vartheta * sqrt_n * partial_mean;
  out.truncation_error = low.tail_estimate * (1.0 + prefactor) + up.tail_estimate * prefactor;
  out.value = std::min(std::max(out.raw, 0.0), 1.0);
  out.clamped = out.value != out.raw;
  out.linearization_suspect = out.raw < -0.05 || out.raw > 1.05;
  return out;
}

// High-SNR limit: the SINR CDF flattens to A x with A = alpha k eta / (phi P),
// and the surrogate expectation collapses to
//   A [zl + (1/2 + vartheta sqrt(n) gamma0)(zu - zl) - vartheta sqrt(n)(zu^2 - zl^2)/2].
// For an interior zeta_low this is exactly A (e^R - 1). The validity flag
// trips when the pre-clamp value leaves [0, 1].
inline ErrorProbResult error_prob_asymptotic(const SinrModel& model, double rate_nats,
                                             std::size_t blocklength) {
  model.validate();
  const auto d = model.fade.derived();
  const double A = d.alpha * model.interference.k * model.interference.eta /
                   model.received_scale();
  const auto thr = psi_thresholds(rate_nats, blocklength);
  const double sqrt_n = std::sqrt(static_cast<double>(blocklength));
  const double zl = std::max(thr.zeta_low, 0.0);
  const double zu = thr.zeta_up;
  const double prefactor = 0.5 + thr.vartheta * sqrt_n * thr.center;

  ErrorProbResult out;
  out.raw = A * (zl + prefactor * (zu - zl) -
                 0.5 * thr.vartheta * sqrt_n * (zu * zu - zl * zl));
  out.value = std::min(std::max(out.raw, 0.0), 1.0);
  out.clamped = out.value != out.raw;
  out.linearization_suspect = out.raw < 0.0 || out.raw > 1.0;
  return out;
}

}  // namespace stqos
