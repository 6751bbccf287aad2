#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "stqos/rng.hpp"
#include "stqos/snc.hpp"
#include "support/models.hpp"

using namespace stqos;
using fixtures::model_with_scale;

TEST_SUITE("snc") {

TEST_CASE("exponential inter-arrival Mellin") {
  CHECK(mellin_exp_interarrival(2.0, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(mellin_exp_interarrival(3.0, 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(mellin_exp_interarrival(2.0, 2.0 - 1e-9) * 0.0, StabilityError);
  // negative order arguments evaluate the 1 - theta pieces
  CHECK(mellin_exp_interarrival(2.0, -1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("stability errors carry the margin and never return values") {
  const AoiQosQuery q{0.5, 100.0, 10};
  // M_I(1-th) M_S(1+th) = 1.2 -> unstable
  CHECK_THROWS_AS(peak_aoi_bound_gigi(2.0, 0.8, 1.5, q), StabilityError);
  try {
    peak_aoi_bound_gigi(2.0, 0.8, 1.5, q);
  } catch (const StabilityError& e) {
    CHECK(e.stability_margin < 0.0);
  }
}

TEST_CASE("specialization chain: G|G with zero bursts = GI|GI = Poisson") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int admissible = 0;
  while (admissible < 10) {
    const double lambda = 0.2 + 1.8 * unif(gen);
    const double theta = 0.05 + 0.6 * unif(gen) * lambda;
    if (theta >= lambda) continue;
    const double service_scale = 0.05 + 0.5 * unif(gen);
    const double m_service = std::exp(theta * service_scale);  // deterministic service
    const double m_minus = lambda / (lambda + theta);
    if (m_minus * m_service >= 0.995) continue;  // stay safely admissible
    const AoiQosQuery q{theta, 50.0 + 400.0 * unif(gen), 25};

    const BoundResult gigi = peak_aoi_bound_gigi(lambda / (lambda - theta), m_minus,
                                                 m_service, q);
    const BoundResult poisson =
        peak_aoi_poisson(lambda, m_service, q, BoundForm::full);

    SigmaRhoEnvelope arrival =
        envelope_from_mellin([lambda](double order) {
          return mellin_exp_interarrival(lambda, order - 1.0);
        });
    SigmaRhoEnvelope service =
        envelope_from_mellin([service_scale](double order) {
          return std::exp((order - 1.0) * service_scale);
        });
    const BoundResult gg = peak_aoi_bound_gg(arrival, service, q);

    CAPTURE(lambda);
    CAPTURE(theta);
    CHECK(gg.raw_value == doctest::Approx(gigi.raw_value).epsilon(1e-10));
    CHECK(poisson.raw_value == doctest::Approx(gigi.raw_value).epsilon(1e-10));
    // the literal display is the numerator of the consistent form
    REQUIRE(poisson.alt_value.has_value());
    CHECK(*poisson.alt_value ==
          doctest::Approx(gigi.raw_value * gigi.stability_margin).epsilon(1e-10));
    ++admissible;
  }
}

TEST_CASE("poisson bound: direct arithmetic of the literal display") {
  // lambda = 0.5, theta = 0.1, a_th/n = 20, M_S = e^{0.3}: the literal
  // display evaluates even though the underlying queue is unstable
  const AoiQosQuery q{0.1, 20.0, 1};
  const double m_service = std::exp(0.3);
  const BoundResult lit = peak_aoi_poisson(0.5, m_service, q, BoundForm::literal);
  const double direct = 0.5 / (0.5 - 0.1) * std::exp(-0.1 * 20.0) * std::exp(0.3);
  CHECK(lit.raw_value == doctest::Approx(direct).epsilon(1e-14));
  CHECK_FALSE(lit.alt_value.has_value());  // full form inadmissible here
  CHECK_THROWS_AS(peak_aoi_poisson(0.5, m_service, q, BoundForm::full),
                  StabilityError);
}

TEST_CASE("log bound is affine in the threshold with slope -theta/n") {
  const double lambda = 1.0;
  for (double theta : {0.125, 0.25, 0.5}) {
    const double m_service = std::exp(theta * 0.4);
    for (std::size_t n : {1, 40, 200}) {
      const AoiQosQuery q1{theta, 100.0, n};
      const AoiQosQuery q2{theta, 300.0, n};
      const double b1 = peak_aoi_poisson(lambda, m_service, q1).raw_value;
      const double b2 = peak_aoi_poisson(lambda, m_service, q2).raw_value;
      const double slope = (std::log(b2) - std::log(b1)) / (300.0 - 100.0);
      // doubling theta doubles the decay slope; n rescales it
      CHECK(slope == doctest::Approx(-theta / static_cast<double>(n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("bounds fall with the threshold and rise toward the arrival pole") {
  const double lambda = 0.8;
  const double m_service = std::exp(0.1);
  double prev = 1e18;  // raw values are compared; small thresholds exceed 1
  for (double a : {50.0, 100.0, 200.0, 400.0}) {
    const AoiQosQuery q{0.2, a, 10};
    const double v = peak_aoi_poisson(lambda, m_service, q).raw_value;
    CHECK(v < prev);
    prev = v;
  }
  // increasing as theta approaches lambda from below (pole of M_I(1+theta))
  const AoiQosQuery qa{0.70, 10.0, 10};
  const AoiQosQuery qb{0.79, 10.0, 10};
  CHECK(peak_aoi_poisson(lambda, 1.0, qb, BoundForm::literal).raw_value >
        peak_aoi_poisson(lambda, 1.0, qa, BoundForm::literal).raw_value);
}

TEST_CASE("harq peak-age bound: reductions and blocklength trend") {
  const SinrModel m = model_with_scale(45.0, 4.0, 9.0);
  HarqConfig cfg{200, 1, 0.8, 1.0};  // single round: no retransmissions
  // the queue must stay stable across the whole blocklength grid
  const double lambda = 6e-4;
  const AoiQosQuery q{1.2e-4, 6e6, 200};

  const BoundResult one = peak_aoi_harq(m, cfg, lambda, q);
  const double m_service = std::exp(q.theta_aoi * cfg.round_duration());
  const BoundResult plain = peak_aoi_poisson(lambda, m_service, q);
  CHECK(one.raw_value == doctest::Approx(plain.raw_value).epsilon(1e-12));

  // all-zero failure probabilities reduce to the same single-round bound
  HarqConfig multi = cfg;
  multi.max_rounds = 4;
  const BoundResult reduced =
      peak_aoi_poisson(lambda, harq_service_mellin(multi, {0.0, 0.0, 0.0}, q.theta_aoi), q);
  CHECK(reduced.raw_value == doctest::Approx(plain.raw_value).epsilon(1e-12));

  // nondecreasing in the per-round blocklength at fixed theta, a_th, rate
  multi.max_rounds = 3;
  double prev = 0.0;
  for (std::size_t n : {100, 150, 200, 300, 400}) {
    HarqConfig c = multi;
    c.sub_block_len = n;
    AoiQosQuery qn = q;
    qn.blocklength = n;
    const double v = peak_aoi_harq(m, c, lambda, qn).raw_value;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("high-SNR peak-age bound converges and grows with blocklength") {
  HarqConfig cfg{200, 3, 0.8, 1.0};
  const double lambda = 6e-4;
  const AoiQosQuery q{1.2e-4, 6e6, 200};
  double prev_gap = 1e9;
  for (double db : {20.0, 30.0, 40.0, 50.0, 60.0}) {
    const SinrModel m = model_with_scale(db_to_linear(db), 4.0, 9.0);
    const double full = peak_aoi_harq(m, cfg, lambda, q).raw_value;
    const double asym = peak_aoi_asymptotic(m, cfg, lambda, q).raw_value;
    const double gap = std::abs(asym - full) / full;
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.05);

  const SinrModel m = model_with_scale(200.0, 4.0, 9.0);
  double prev = 0.0;
  for (std::size_t n : {100, 200, 400, 800}) {
    HarqConfig c = cfg;
    c.sub_block_len = n;
    AoiQosQuery qn = q;
    qn.blocklength = n;
    const double v = peak_aoi_asymptotic(m, c, lambda, qn).raw_value;
    CHECK(v > prev);
    prev = v;
  }

  // as the power grows without bound every failure probability vanishes and
  // the service exponent collapses to theta * n_hat * T exactly
  const SinrModel huge = model_with_scale(1e12, 4.0, 9.0);
  const double collapsed =
      peak_aoi_poisson(lambda, std::exp(q.theta_aoi * cfg.round_duration()), q).raw_value;
  CHECK(peak_aoi_asymptotic(huge, cfg, lambda, q).raw_value ==
        doctest::Approx(collapsed).epsilon(1e-6));
}

TEST_CASE("service mellin of the two-point law") {
  CHECK(service_mellin_fbc(0.3, 100.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(service_mellin_fbc(1.0, 100.0, 0.7) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(service_mellin_fbc(0.0, 50.0, 1.0 - 0.01) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(service_mellin_fbc(1.4, 10.0, 1.0), DomainError);
}

TEST_CASE("poisson arrival mellin") {
  CHECK(poisson_arrival_mellin(0.7, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(poisson_arrival_mellin(0.7, 1.3) ==
        doctest::Approx(std::exp(0.7 * std::expm1(0.3))).epsilon(1e-14));
  // packet-size scaling enters the exponent
  CHECK(poisson_arrival_mellin(0.7, 1.1, 10.0) ==
        doctest::Approx(std::exp(0.7 * std::expm1(1.0))).epsilon(1e-13));
}

TEST_CASE("delay bound: threshold decay, zero-threshold kernel, stability") {
  const double eps = 0.2;
  const double bits = 60.0;
  const double lambda_slot = 0.004;
  auto arr = [&](double order) { return poisson_arrival_mellin(lambda_slot, order, bits); };
  auto srv = [&](double order) { return service_mellin_fbc(eps, bits, order); };
  std::vector<double> grid;
  for (int i = 0; i < 64; ++i)
    grid.push_back(std::exp(std::log(1e-4) + (std::log(0.03) - std::log(1e-4)) * i / 63.0));

  double prev = 2.0;
  for (double d : {0.0, 2.0, 5.0, 10.0, 25.0, 60.0}) {
    const DelayQosQuery q{1e-3, d, 1.0};
    const BoundResult b = delay_violation_bound(arr, srv, q, grid);
    CHECK(b.value <= prev + 1e-15);
    CHECK(b.stability_margin > 0.0);
    prev = b.value;
  }
  // D_th -> large drives the bound to zero
  const DelayQosQuery far{1e-3, 500.0, 1.0};
  CHECK(delay_violation_bound(arr, srv, far, grid).value < 1e-6);
  // D_th = 0 clamps at one
  const DelayQosQuery zero{1e-3, 0.0, 1.0};
  CHECK(delay_violation_bound(arr, srv, zero, grid).value <= 1.0);

  // overloaded arrivals (1.2 packets/slot vs 0.8 successes/slot) leave no
  // admissible theta
  auto arr_hot = [&](double order) { return poisson_arrival_mellin(1.2, order, bits); };
  CHECK_THROWS_AS(delay_violation_bound(arr_hot, srv, far, grid), StabilityError);
  // delta_s scales the kernel
  const DelayQosQuery scaled{1e-3, 10.0, 0.5};
  const DelayQosQuery unscaled{1e-3, 10.0, 1.0};
  CHECK(delay_violation_bound(arr, srv, scaled, grid).raw_value ==
        doctest::Approx(0.5 * delay_violation_bound(arr, srv, unscaled, grid).raw_value)
            .epsilon(1e-12));
}

TEST_CASE("theta optimizer improves on fixed choices") {
  const double lambda = 1.0;
  const AoiQosQuery base{0.1, 400.0, 10};
  auto bound_at = [&](double th) {
    AoiQosQuery q = base;
    q.theta_aoi = th;
    return peak_aoi_poisson(lambda, std::exp(th * 0.4), q).raw_value;
  };
  const ThetaOptimum opt = minimize_over_theta(bound_at, 1e-4, lambda * 0.999);
  CHECK(opt.value <= bound_at(0.1) + 1e-15);
  CHECK(opt.value <= bound_at(0.5) + 1e-15);
  CHECK(opt.value <= bound_at(0.9) + 1e-15);
}

}  // TEST_SUITE
