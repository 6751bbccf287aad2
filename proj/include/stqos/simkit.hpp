#pragma once

// Monte Carlo ground truth: shadowed-Rician gain sampling, empirical decoding
// error probability, and a FIFO status-update queue with HARQ service that
// yields empirical peak-age and sojourn violation curves.
//
// Determinism contract: every draw comes from a stream derived from
// (seed, purpose, packet index), so a trace is reproducible regardless of
// how callers schedule replications. The queue itself is sequential.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stqos/channel.hpp"
#include "stqos/errors.hpp"
#include "stqos/fbc.hpp"
#include "stqos/harq.hpp"
#include "stqos/interference.hpp"
#include "stqos/rng.hpp"

namespace stqos {

struct SimConfig {
  std::uint64_t seed = 1;
  std::size_t n_samples = 100000;
  std::size_t n_packets = 10000;
  std::size_t warmup = 1000;  // leading packets excluded from estimators

  void validate() const {
    if (n_samples < 1) throw DomainError("SimConfig: n_samples must be >= 1");
    if (n_packets < 1) throw DomainError("SimConfig: n_packets must be >= 1");
    if (warmup >= n_packets) throw DomainError("SimConfig: warmup must be < n_packets");
  }

  bool operator==(const SimConfig&) const = default;
};

// Per-packet queue trace in the simulator's time units (one channel use
// lasts symbol_time units). departure >= arrival, sojourn = departure -
// arrival, peak_aoi = inter-arrival + sojourn.
struct AoiTrace {
  std::vector<double> arrival;
  std::vector<std::size_t> rounds;
  std::vector<double> service;
  std::vector<double> departure;
  std::vector<double> sojourn;
  std::vector<double> peak_aoi;
  std::size_t warmup = 0;

  std::size_t size() const { return arrival.size(); }
};

// Draws of |h|^2: Nakagami-m LOS amplitude (Gamma power, mean omega) plus
// complex Gaussian scatter with per-axis variance b. m = 0 is pure scatter.
inline std::vector<double> sample_channel_gain(const ShadowedRicianParams& p,
                                               std::uint64_t seed, std::size_t n) {
  p.validate();
  RandomStream rng = RandomStream::derive(seed, 0xfadeULL);
  std::vector<double> out;
  out.reserve(n);
  const double sigma = std::sqrt(p.b);
  for (std::size_t i = 0; i < n; ++i) {
    double a = 0.0;
    if (p.m > 0 && p.omega > 0.0) {
      a = std::sqrt(rng.gamma(static_cast<double>(p.m), p.omega / static_cast<double>(p.m)));
    }
    const double x = a + sigma * rng.normal();
    const double y = sigma * rng.normal();
    out.push_back(x * x + y * y);
  }
  return out;
}

namespace detail {

inline double draw_channel_gain(const ShadowedRicianParams& p, double sigma_scatter,
                                RandomStream& rng) {
  double a = 0.0;
  if (p.m > 0 && p.omega > 0.0) {
    a = std::sqrt(rng.gamma(static_cast<double>(p.m), p.omega / static_cast<double>(p.m)));
  }
  const double x = a + sigma_scatter * rng.normal();
  const double y = sigma_scatter * rng.normal();
  return x * x + y * y;
}

}  // namespace detail

struct EmpiricalEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

// Monte Carlo normal-approximation error probability. SINR draws keep the
// +1 noise term; interference is drawn from the Gamma fit carried by the
// model, matching the analytic path it is compared against.
inline EmpiricalEstimate empirical_error_prob(const SinrModel& model, double rate_nats,
                                              std::size_t blocklength, std::uint64_t seed,
                                              std::size_t n_samples) {
  model.validate();
  if (n_samples < 1) throw DomainError("empirical_error_prob: n_samples must be >= 1");
  RandomStream rng = RandomStream::derive(seed, 0xe99ULL);
  const double phi_p = model.received_scale();
  const double sigma = std::sqrt(model.fade.b);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double g = detail::draw_channel_gain(model.fade, sigma, rng);
    const double ia = rng.gamma(model.interference.k, model.interference.eta);
    const double gamma_i = phi_p * g / (ia + 1.0);
    const double e = conditional_error_prob(gamma_i, rate_nats, blocklength);
    sum += e;
    sum_sq += e * e;
  }
  const double n = static_cast<double>(n_samples);
  EmpiricalEstimate out;
  out.estimate = sum / n;
  const double var = std::max(0.0, sum_sq / n - out.estimate * out.estimate);
  out.stderr_ = std::sqrt(var / n);
  return out;
}

// FIFO status-update queue. Poisson arrivals; per-packet service is the
// number of HARQ rounds times the round duration, with each round's decode
// failure a Bernoulli draw at the combined-blocklength error probability of
// a fresh SINR sample. When a field configuration is supplied the interferer
// positions are redrawn per packet and the fades per round; otherwise the
// aggregate interference comes from the model's Gamma fit each round. The
// noise +1 is always kept. Packets that exhaust all rounds depart anyway
// with the full service time counted.
inline AoiTrace simulate_aoi_queue(double lambda_s, const SinrModel& model,
                                   const HarqConfig& hcfg, const SimConfig& sim,
                                   const std::optional<InterferenceConfig>& field = {}) {
  model.validate();
  hcfg.validate();
  sim.validate();
  if (!(lambda_s > 0.0)) throw DomainError("simulate_aoi_queue: lambda must be > 0");

  AoiTrace trace;
  trace.warmup = sim.warmup;
  trace.arrival.reserve(sim.n_packets);
  trace.rounds.reserve(sim.n_packets);
  trace.service.reserve(sim.n_packets);
  trace.departure.reserve(sim.n_packets);
  trace.sojourn.reserve(sim.n_packets);
  trace.peak_aoi.reserve(sim.n_packets);

  RandomStream arrivals = RandomStream::derive(sim.seed, 0xa221ULL);
  const double phi_p = model.received_scale();
  const double sigma = std::sqrt(model.fade.b);
  const double round_time = hcfg.round_duration();

  double prev_arrival = 0.0;
  double prev_departure = 0.0;
  for (std::size_t u = 0; u < sim.n_packets; ++u) {
    const double inter = arrivals.exponential(lambda_s);
    const double arr = prev_arrival + inter;

    RandomStream service_rng = RandomStream::derive(sim.seed, 0x5e41ULL, u);
    std::vector<FieldPoint> points;
    if (field) points = sample_mhcpp(*field, service_rng.next_u64());

    std::size_t rounds = hcfg.max_rounds;
    for (std::size_t l = 1; l <= hcfg.max_rounds; ++l) {
      const double g = detail::draw_channel_gain(model.fade, sigma, service_rng);
      const double ia = field ? sample_aggregate_interference(*field, service_rng, points)
                              : service_rng.gamma(model.interference.k, model.interference.eta);
      const double gamma_l = phi_p * g / (ia + 1.0);
      const double p_fail = conditional_error_prob(
          gamma_l, hcfg.initial_rate / static_cast<double>(l), hcfg.sub_block_len * l);
      if (service_rng.uniform() >= p_fail) {
        rounds = l;
        break;
      }
    }
    const double service = static_cast<double>(rounds) * round_time;
    const double dep = std::max(arr, prev_departure) + service;

    trace.arrival.push_back(arr);
    trace.rounds.push_back(rounds);
    trace.service.push_back(service);
    trace.departure.push_back(dep);
    trace.sojourn.push_back(dep - arr);
    trace.peak_aoi.push_back(inter + dep - arr);
    prev_arrival = arr;
    prev_departure = dep;
  }
  return trace;
}

// Fraction of post-warmup packets with peak age exceeding a_th / n.
inline std::vector<double> empirical_peak_aoi_violation(const AoiTrace& trace,
                                                        const std::vector<double>& a_th_grid,
                                                        std::size_t blocklength) {
  if (trace.size() <= trace.warmup)
    throw DomainError("empirical_peak_aoi_violation: trace empty after warmup");
  if (blocklength < 1) throw DomainError("empirical_peak_aoi_violation: blocklength >= 1");
  std::vector<double> out;
  out.reserve(a_th_grid.size());
  const double count = static_cast<double>(trace.size() - trace.warmup);
  for (double a : a_th_grid) {
    const double threshold = a / static_cast<double>(blocklength);
    std::size_t hits = 0;
    for (std::size_t u = trace.warmup; u < trace.size(); ++u)
      if (trace.peak_aoi[u] > threshold) ++hits;
    out.push_back(static_cast<double>(hits) / count);
  }
  return out;
}

// Fraction of post-warmup packets with sojourn of at least d_th slots.
inline std::vector<double> empirical_delay_violation(const AoiTrace& trace,
                                                     const std::vector<double>& d_th_grid,
                                                     double slot_duration) {
  if (trace.size() <= trace.warmup)
    throw DomainError("empirical_delay_violation: trace empty after warmup");
  if (!(slot_duration > 0.0))
    throw DomainError("empirical_delay_violation: slot_duration must be > 0");
  std::vector<double> out;
  out.reserve(d_th_grid.size());
  const double count = static_cast<double>(trace.size() - trace.warmup);
  for (double d : d_th_grid) {
    std::size_t hits = 0;
    for (std::size_t u = trace.warmup; u < trace.size(); ++u)
      if (trace.sojourn[u] >= d * slot_duration) ++hits;
    out.push_back(static_cast<double>(hits) / count);
  }
  return out;
}

inline double mean_peak_aoi(const AoiTrace& trace) {
  if (trace.size() <= trace.warmup)
    throw DomainError("mean_peak_aoi: trace empty after warmup");
  double sum = 0.0;
  for (std::size_t u = trace.warmup; u < trace.size(); ++u) sum += trace.peak_aoi[u];
  return sum / static_cast<double>(trace.size() - trace.warmup);
}

// packet_id, arrival, rounds, service, departure, sojourn, peak_aoi
inline void write_trace_csv(const AoiTrace& trace, std::ostream& os) {
  os << "packet_id,arrival,rounds,service,departure,sojourn,peak_aoi\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    auto* end = std::to_chars(buf, buf + sizeof(buf), v).ptr;
    os.write(buf, end - buf);
    os.put(sep);
  };
  for (std::size_t u = 0; u < trace.size(); ++u) {
    os << u << ',';
    put(trace.arrival[u], ',');
    os << trace.rounds[u] << ',';
    put(trace.service[u], ',');
    put(trace.departure[u], ',');
    put(trace.sojourn[u], ',');
    put(trace.peak_aoi[u], '\n');
  }
}

}  // namespace stqos
