#pragma once

// Terrestrial interferer field: Matern type-II hard-core process on an
// annulus, aggregate-interference moments by Campbell integrals, and the
// moment-matched Gamma law used by every SINR closed form.
//
// A field point contributes  link(r) * P_t * g * r^(-alpha~)  to the
// aggregate, where link(r) is the free-space response at distance r and g is
// the fading power gain. The sampler draws g as Rayleigh-amplitude power
// (exponential, mean 2*varsigma^2); the moment formulas take a general Gamma
// power gain (pg_shape, pg_scale), whose defaults match the sampler.

#include <cmath>
#include <cstdint>
#include <vector>

#include "stqos/errors.hpp"
#include "stqos/rng.hpp"

namespace stqos {

inline constexpr double kSpeedOfLight = 299792458.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }

struct FieldPoint {
  double x = 0.0;
  double y = 0.0;
  double radius() const { return std::hypot(x, y); }
};

// Gamma(k, eta): mean k*eta, variance k*eta^2.
struct GammaFit {
  double k = 0.0;
  double eta = 0.0;
  double mean() const { return k * eta; }
  double variance() const { return k * eta * eta; }
};

struct InterferenceConfig {
  double lambda_m = 1e-7;        // parent intensity, points per m^2
  double d_min = 0.0;            // hard-core distance, m
  double r_in = 2000.0;          // annulus inner radius, m
  double r_out = 10000.0;        // annulus outer radius, m
  double path_loss_exp = 3.0;    // alpha~ > 2
  double tx_snr_t = 1.0;         // interferer transmit SNR, linear
  double rayleigh_scale = 0.7071067811865476;  // varsigma; power mean 2*varsigma^2
  double pg_shape = 1.0;         // k_pg
  double pg_scale = 1.0;         // eta_pg; default matches 2*varsigma^2 above
  double carrier_hz = 2e9;
  double combined_gain_dbi = 0.0;  // interferer + destination antenna gains

  void validate() const {
    if (!(r_in > 0.0 && r_out > r_in))
      throw DomainError("InterferenceConfig: require 0 < r_in < r_out");
    if (d_min < 0.0) throw DomainError("InterferenceConfig: d_min must be >= 0");
    if (!(path_loss_exp > 2.0))
      throw DomainError("InterferenceConfig: path_loss_exp must exceed 2 for finite moments");
    if (!(lambda_m > 0.0)) throw DomainError("InterferenceConfig: lambda_m must be > 0");
    if (!(tx_snr_t > 0.0)) throw DomainError("InterferenceConfig: tx_snr_t must be > 0");
    if (!(rayleigh_scale > 0.0))
      throw DomainError("InterferenceConfig: rayleigh_scale must be > 0");
    if (!(pg_shape > 0.0 && pg_scale > 0.0))
      throw DomainError("InterferenceConfig: Gamma power-gain parameters must be > 0");
    if (!(carrier_hz > 0.0)) throw DomainError("InterferenceConfig: carrier_hz must be > 0");
  }

  // Matern type-II retained intensity for parent intensity lambda_m.
  double retained_intensity() const {
    if (d_min == 0.0) return lambda_m;
    const double a = lambda_m * M_PI * d_min * d_min;
    return (1.0 - std::exp(-a)) / (M_PI * d_min * d_min);
  }

  // Distance-independent part of the free-space response (c / (4 pi f))^2 * G.
  double link_constant() const {
    const double w = kSpeedOfLight / (4.0 * M_PI * carrier_hz);
    return w * w * db_to_linear(combined_gain_dbi);
  }

  // Response * path loss of a single interferer at distance r.
  double contribution_scale(double r) const {
    return link_constant() / (r * r) * tx_snr_t * std::pow(r, -path_loss_exp);
  }
};

// Matern type-II thinning of a parent Poisson field on the annulus: every
// parent gets an i.i.d. mark, and a point survives iff no point with a
// smaller mark lies within d_min. All pairwise distances of the output are
// >= d_min by construction.
inline std::vector<FieldPoint> sample_mhcpp(const InterferenceConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  RandomStream rng = RandomStream::derive(seed, 0x6d686370ULL);
  const double area = M_PI * (cfg.r_out * cfg.r_out - cfg.r_in * cfg.r_in);
  const std::uint64_t n = rng.poisson(cfg.lambda_m * area);

  struct Parent {
    double x, y, mark;
  };
  std::vector<Parent> parents;
  parents.reserve(n);
  const double rin2 = cfg.r_in * cfg.r_in;
  const double rout2 = cfg.r_out * cfg.r_out;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double r = std::sqrt(rin2 + rng.uniform() * (rout2 - rin2));
    const double phi = 2.0 * M_PI * rng.uniform();
    parents.push_back({r * std::cos(phi), r * std::sin(phi), rng.uniform()});
  }

  std::vector<FieldPoint> kept;
  kept.reserve(parents.size());
  const double d2 = cfg.d_min * cfg.d_min;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    bool survives = true;
    if (cfg.d_min > 0.0) {
      for (std::size_t j = 0; j < parents.size(); ++j) {
        if (j == i) continue;
        const double dx = parents[i].x - parents[j].x;
        const double dy = parents[i].y - parents[j].y;
        if (dx * dx + dy * dy < d2 && parents[j].mark < parents[i].mark) {
          survives = false;
          break;
        }
      }
    }
    if (survives) kept.push_back({parents[i].x, parents[i].y});
  }
  return kept;
}

struct AggregateMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Campbell integrals over the annulus with retained intensity. Each point
// carries response link(r) / r^alpha~ and an independent Gamma(k_pg, eta_pg)
// power gain:
//   E[I]   = 2 pi lam P_t k_pg eta_pg  K  (r_in^-a - r_out^-a) / a
//   Var[I] = 2 pi lam P_t^2 k_pg (1 + k_pg) eta_pg^2 K^2
//            (r_in^-(2+2a) ... ) / (2 + 2a),  a = alpha~, K = link constant.
inline AggregateMoments aggregate_moments(const InterferenceConfig& cfg) {
  cfg.validate();
  const double a = cfg.path_loss_exp;
  const double lam = cfg.retained_intensity();
  const double K = cfg.link_constant();
  const double mean_gain = cfg.pg_shape * cfg.pg_scale;
  const double second_gain = cfg.pg_shape * (1.0 + cfg.pg_shape) * cfg.pg_scale * cfg.pg_scale;

  const double radial_mean =
      (std::pow(cfg.r_in, -a) - std::pow(cfg.r_out, -a)) / a;
  const double radial_var =
      (std::pow(cfg.r_in, -(2.0 + 2.0 * a)) - std::pow(cfg.r_out, -(2.0 + 2.0 * a))) /
      (2.0 + 2.0 * a);

  AggregateMoments out;
  out.mean = 2.0 * M_PI * lam * cfg.tx_snr_t * mean_gain * K * radial_mean;
  out.variance =
      2.0 * M_PI * lam * cfg.tx_snr_t * cfg.tx_snr_t * second_gain * K * K * radial_var;
  return out;
}

inline GammaFit gamma_fit(double mean, double variance) {
  if (!(mean > 0.0) || !(variance > 0.0))
    throw DomainError("gamma_fit: mean and variance must be > 0");
  return {mean * mean / variance, variance / mean};
}

inline GammaFit gamma_fit(const AggregateMoments& m) { return gamma_fit(m.mean, m.variance); }

inline double interference_pdf(const GammaFit& fit, double x) {
  if (!(fit.k > 0.0 && fit.eta > 0.0))
    throw DomainError("interference_pdf: invalid Gamma fit");
  if (x <= 0.0) return 0.0;
  const double logp = (fit.k - 1.0) * std::log(x) - x / fit.eta -
                      std::lgamma(fit.k) - fit.k * std::log(fit.eta);
  return std::exp(logp);
}

// One aggregate-interference draw: positions from the hard-core field, an
// independent Rayleigh-amplitude power gain per interferer.
inline double sample_aggregate_interference(const InterferenceConfig& cfg, RandomStream& rng,
                                            const std::vector<FieldPoint>& points) {
  const double mean_power = 2.0 * cfg.rayleigh_scale * cfg.rayleigh_scale;
  double total = 0.0;
  for (const FieldPoint& p : points) {
    const double g = rng.exponential(1.0 / mean_power);
    total += cfg.contribution_scale(p.radius()) * g;
  }
  return total;
}

inline double sample_aggregate_interference(const InterferenceConfig& cfg, std::uint64_t seed) {
  RandomStream rng = RandomStream::derive(seed, 0x11a0ULL);
  return sample_aggregate_interference(cfg, rng, sample_mhcpp(cfg, seed));
}

// Parent intensity whose retained field has the requested expected point
// count on the annulus; used to sweep "number of interferers".
inline double parent_intensity_for_expected_count(double count, double d_min, double r_in,
                                                  double r_out) {
  if (!(count > 0.0)) throw DomainError("parent_intensity_for_expected_count: count must be > 0");
  const double area = M_PI * (r_out * r_out - r_in * r_in);
  const double lam_ret = count / area;
  if (d_min == 0.0) return lam_ret;
  const double cell = M_PI * d_min * d_min;
  const double occupancy = lam_ret * cell;
  if (occupancy >= 1.0)
    throw DomainError("parent_intensity_for_expected_count: count exceeds hard-core packing");
  return -std::log(1.0 - occupancy) / cell;
}

}  // namespace stqos
