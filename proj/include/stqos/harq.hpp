#pragma once

// Incremental-redundancy retransmission model: per-round rates, the
// round-count distribution under independent per-round decode failures, and
// the expected-round bound 1 + sum eps_l that feeds the service-time
// exponent of the AoI bound.
//
// Round-l failure probability follows the combining convention: decoding
// after round l sees the accumulated blocklength l * n_hat at rate R_in / l.

#include <cstddef>
#include <vector>

#include "stqos/errors.hpp"
#include "stqos/fbc.hpp"

namespace stqos {

struct HarqConfig {
  std::size_t sub_block_len = 200;  // n_hat, channel uses per round
  std::size_t max_rounds = 4;       // L
  double initial_rate = 1.0;        // nats per channel use
  double symbol_time = 1.0;         // time units per channel use

  void validate() const {
    if (sub_block_len < 1) throw DomainError("HarqConfig: sub_block_len must be >= 1");
    if (max_rounds < 1) throw DomainError("HarqConfig: max_rounds must be >= 1");
    if (!(initial_rate > 0.0)) throw DomainError("HarqConfig: initial_rate must be > 0");
    if (!(symbol_time > 0.0)) throw DomainError("HarqConfig: symbol_time must be > 0");
  }

  double round_duration() const {
    return static_cast<double>(sub_block_len) * symbol_time;
  }

  bool operator==(const HarqConfig&) const = default;
};

// R_in / l after combining round l.
inline double rate_after_round(const HarqConfig& cfg, std::size_t l) {
  cfg.validate();
  if (l < 1 || l > cfg.max_rounds)
    throw DomainError("rate_after_round: round index out of 1..L");
  return cfg.initial_rate / static_cast<double>(l);
}

// Pr{L_s = l} from the failure probabilities eps_1..eps_{L-1} read as
// independent rounds: consecutive products of eps, with the final round
// absorbing all residual mass. Sums to one by telescoping.
inline std::vector<double> round_count_pmf(const std::vector<double>& errs) {
  for (double e : errs) {
    if (!(e >= 0.0 && e <= 1.0))
      throw DomainError("round_count_pmf: failure probabilities must lie in [0,1]");
  }
  const std::size_t rounds = errs.size() + 1;
  std::vector<double> pmf(rounds, 0.0);
  double prod = 1.0;  // prod_{i<l} eps_i
  for (std::size_t l = 1; l < rounds; ++l) {
    const double next = prod * errs[l - 1];
    pmf[l - 1] = prod - next;
    prod = next;
  }
  pmf[rounds - 1] = prod;
  return pmf;
}

// E[L_s] <= 1 + sum eps_l; exact under equality of the joint failure events
// with their marginals, an upper bound otherwise.
inline double expected_rounds_bound(const std::vector<double>& errs) {
  double sum = 1.0;
  for (double e : errs) {
    if (!(e >= 0.0 && e <= 1.0))
      throw DomainError("expected_rounds_bound: failure probabilities must lie in [0,1]");
    sum += e;
  }
  return sum;
}

// Closed-form per-round failure probabilities eps_l, l = 1..L-1, at
// (l * n_hat, R_in / l).
inline std::vector<double> round_error_probs(const SinrModel& model, const HarqConfig& cfg,
                                             const SeriesControl& ctl = {}) {
  cfg.validate();
  std::vector<double> errs;
  errs.reserve(cfg.max_rounds - 1);
  for (std::size_t l = 1; l < cfg.max_rounds; ++l) {
    const double rate = rate_after_round(cfg, l);
    errs.push_back(
        error_prob_closed_form(model, rate, cfg.sub_block_len * l, ctl).value);
  }
  return errs;
}

// Same rounds with the high-SNR linearized failure probabilities.
inline std::vector<double> round_error_probs_asymptotic(const SinrModel& model,
                                                        const HarqConfig& cfg) {
  cfg.validate();
  std::vector<double> errs;
  errs.reserve(cfg.max_rounds - 1);
  for (std::size_t l = 1; l < cfg.max_rounds; ++l) {
    const double rate = rate_after_round(cfg, l);
    errs.push_back(error_prob_asymptotic(model, rate, cfg.sub_block_len * l).value);
  }
  return errs;
}

}  // namespace stqos
