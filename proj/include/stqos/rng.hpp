#pragma once

// Deterministic, seed-derived random streams. A stream is a splitmix64
// counter generator keyed by (master seed, stream id, substream id), so
// parallel workers draw reproducible values regardless of scheduling.
// All samplers are hand-rolled on top of uniform(); nothing here depends on
// implementation-defined std:: distributions.

#include <cmath>
#include <cstdint>
#include <cstddef>

#include "stqos/errors.hpp"

namespace stqos {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {
    // burn-in decorrelates trivially related seeds
    detail::splitmix64(state_);
    detail::splitmix64(state_);
  }

  static RandomStream derive(std::uint64_t master, std::uint64_t stream_id,
                             std::uint64_t substream_id = 0) {
    std::uint64_t s = master;
    std::uint64_t a = detail::splitmix64(s) ^ (stream_id * 0xd1342543de82ef95ULL);
    std::uint64_t b = detail::splitmix64(a) ^ (substream_id * 0xaf251af3b0f025b5ULL);
    return RandomStream(detail::splitmix64(b));
  }

  std::uint64_t next_u64() { return detail::splitmix64(state_); }

  // uniform on (0, 1); never returns 0 or 1
  double uniform() {
    const std::uint64_t u = next_u64() >> 11;  // 53 bits
    return (static_cast<double>(u) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate) {
    if (!(rate > 0.0)) throw DomainError("exponential: rate must be > 0");
    return -std::log(uniform()) / rate;
  }

  // Marsaglia polar method; caches the second variate.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * m;
    have_cached_ = true;
    return u * m;
  }

  // Marsaglia-Tsang for shape >= 1; boosted by U^(1/shape) below 1.
  double gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
      throw DomainError("gamma: shape and scale must be > 0");
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

  // Exact Poisson sampling; large means are split into chunks of mean <= 30
  // (Poisson additivity) so the multiplication method stays in range.
  std::uint64_t poisson(double mean) {
    if (mean < 0.0) throw DomainError("poisson: mean must be >= 0");
    std::uint64_t total = 0;
    while (mean > 30.0) {
      total += poisson_small(30.0);
      mean -= 30.0;
    }
    return total + poisson_small(mean);
  }

private:
  std::uint64_t poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    double prod = uniform();
    std::uint64_t k = 0;
    while (prod > limit) {
      prod *= uniform();
      ++k;
    }
    return k;
  }

  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace stqos
