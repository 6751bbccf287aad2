// Acceptance suite: one line per criterion, PASS/FAIL with the measured
// margin, nonzero exit on any failure. The CLI binary path may be given as
// argv[1] (used by the determinism criterion; that criterion runs against
// the library emitter too).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "stqos/gallager.hpp"
#include "stqos/scenario.hpp"
#include "stqos/simkit.hpp"
#include "stqos/snc.hpp"
#include "stqos/sweep.hpp"
#include "support/models.hpp"
#include "support/oracles.hpp"

using namespace stqos;

namespace {

int g_failures = 0;
std::chrono::steady_clock::time_point g_t0;

void begin() { g_t0 = std::chrono::steady_clock::now(); }

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - g_t0).count();
  std::printf("[%s] criterion %2d: %s (%s, %.1f s)\n", pass ? "PASS" : "FAIL", id,
              what.c_str(), detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

// Largest theta with a positive stability margin for the Poisson/HARQ bound.
double stable_theta_limit(double lambda, double service_exponent_scale) {
  auto margin = [&](double th) {
    return 1.0 - lambda / (lambda + th) * std::exp(th * service_exponent_scale);
  };
  double hi = lambda * (1.0 - 1e-6);
  if (margin(hi) > 0.0) return hi;
  double lo = lambda * 1e-6;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (margin(mid) > 0.0) lo = mid; else hi = mid;
  }
  return lo;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------- criterion 1
void criterion_closed_form_vs_quadrature() {
  begin();
  const Scenario base;
  const SinrModel model = base.sinr_model();
  const SeriesControl ctl{1e-12, 8000};
  double worst = 0.0;
  int points = 0;
  for (double scale : {0.75, 1.5, 3.0}) {
    SinrModel m = model;
    m.tx_snr *= scale;
    for (std::size_t n : {150, 200, 300}) {
      for (double rate : {0.5, 0.8, 1.1}) {
        const double closed = error_prob_closed_form(m, rate, n, ctl).value;
        const double quad = oracles::error_prob_surrogate_quadrature(m, rate, n);
        worst = std::max(worst, std::abs(closed - quad));
        ++points;
      }
    }
  }
  report(1, worst <= 1e-5 && points == 27,
         "closed-form error probability equals the quadrature oracle",
         fmt("max |diff| = %.3g over 27 grid points, tol 1e-5", worst));
}

// ------------------------------------------------------------- criteria 2 + 3
void criteria_bound_validity() {
  begin();
  const Scenario base;
  const InterferenceConfig field = base.interference_config();
  const SinrModel model = base.sinr_model();
  const HarqConfig harq = base.harq;
  const SeriesControl ctl = base.series;

  const std::vector<double> errs = round_error_probs(model, harq, ctl);
  const double mean_rounds = expected_rounds_bound(errs);
  const double round_time = harq.round_duration();
  const double eps1 = errs.front();
  const double bits = base.codebook_bits();

  bool aoi_ok = true;
  bool delay_ok = true;
  double worst_aoi_ratio = 0.0;   // empirical / bound, want <= 1
  double worst_delay_ratio = 0.0;
  std::string note_aoi, note_delay;

  int level = 0;
  for (double util : {0.2, 0.45, 0.7}) {
    ++level;
    const double lambda = util / (round_time * mean_rounds);
    const double theta = 0.4 * stable_theta_limit(lambda, round_time * mean_rounds);

    SimConfig sim;
    sim.seed = 1000 + level;
    sim.n_packets = 100000;
    sim.warmup = 10000;
    const AoiTrace trace = simulate_aoi_queue(lambda, model, harq, sim, field);

    // peak-age grid: 20 thresholds spanning bound values ~0.9 max .. 1e-3
    AoiQosQuery probe{theta, 1.0, harq.sub_block_len};
    const BoundResult at_zero = peak_aoi_poisson(
        lambda, harq_service_mellin(harq, errs, theta), probe);
    const double pref = at_zero.raw_value;  // decay factor is ~1 at a_th = 1
    const double t_hi = std::min(0.9, 0.9 * pref);
    const double t_lo = 1e-3;
    std::vector<double> a_grid;
    for (int i = 0; i < 20; ++i) {
      const double target =
          std::exp(std::log(t_hi) + (std::log(t_lo) - std::log(t_hi)) * i / 19.0);
      a_grid.push_back(static_cast<double>(harq.sub_block_len) / theta *
                       std::log(pref / target));
    }
    const auto empirical = empirical_peak_aoi_violation(trace, a_grid, harq.sub_block_len);
    for (std::size_t i = 0; i < a_grid.size(); ++i) {
      const AoiQosQuery q{theta, a_grid[i], harq.sub_block_len};
      const BoundResult b = peak_aoi_harq(model, harq, lambda, q, ctl);
      if (empirical[i] > b.value) aoi_ok = false;
      if (b.value > 0.0) worst_aoi_ratio = std::max(worst_aoi_ratio, empirical[i] / b.value);
    }

    // delay grid: 20 slot thresholds from where the bound leaves 1
    const double lambda_slot = lambda * round_time;
    auto arr = [&](double order) { return poisson_arrival_mellin(lambda_slot, order, bits); };
    auto srv = [&](double order) { return service_mellin_fbc(eps1, bits, order); };
    std::vector<double> tgrid;
    for (int i = 0; i < 64; ++i)
      tgrid.push_back(std::exp(std::log(1e-5) +
                               (std::log(2.0 / bits) - std::log(1e-5)) * i / 63.0));
    double d0 = 1.0;
    while (d0 < 400.0) {
      const DelayQosQuery q{1e-3, d0, 1.0};
      if (delay_violation_bound(arr, srv, q, tgrid).value < 0.9) break;
      d0 += 1.0;
    }
    std::vector<double> d_grid;
    for (int i = 0; i < 20; ++i) d_grid.push_back(d0 + 2.0 * i);
    const auto demp = empirical_delay_violation(trace, d_grid, round_time);
    for (std::size_t i = 0; i < d_grid.size(); ++i) {
      const DelayQosQuery q{1e-3, d_grid[i], 1.0};
      const BoundResult b = delay_violation_bound(arr, srv, q, tgrid);
      if (demp[i] > b.value) delay_ok = false;
      if (b.value > 0.0)
        worst_delay_ratio = std::max(worst_delay_ratio, demp[i] / b.value);
    }
  }
  report(2, aoi_ok, "empirical peak-age violation sits below the HARQ bound",
         fmt("3 loads x 20 thresholds, 1e5 packets each; max empirical/bound = %.3g",
             worst_aoi_ratio));
  begin();
  report(3, delay_ok, "empirical sojourn violation sits below the delay bound",
         fmt("same traces, 20 thresholds per load; max empirical/bound = %.3g",
             worst_delay_ratio));
}

// ---------------------------------------------------------------- criterion 4
void criterion_specialization_chain() {
  begin();
  RandomStream rng(20240601);
  int admissible = 0;
  double worst = 0.0;
  while (admissible < 10) {
    const double lambda = 0.2 + 1.8 * rng.uniform();
    const double theta = (0.05 + 0.6 * rng.uniform()) * lambda;
    if (theta >= lambda) continue;
    const double service_scale = 0.05 + 0.5 * rng.uniform();
    const double m_service = std::exp(theta * service_scale);
    if (lambda / (lambda + theta) * m_service >= 0.995) continue;
    const AoiQosQuery q{theta, 50.0 + 400.0 * rng.uniform(), 25};

    const double gigi = peak_aoi_bound_gigi(lambda / (lambda - theta),
                                            lambda / (lambda + theta), m_service, q)
                            .raw_value;
    const double poisson =
        peak_aoi_poisson(lambda, m_service, q, BoundForm::full).raw_value;
    SigmaRhoEnvelope arrival = envelope_from_mellin(
        [lambda](double order) { return mellin_exp_interarrival(lambda, order - 1.0); });
    SigmaRhoEnvelope service = envelope_from_mellin(
        [service_scale](double order) { return std::exp((order - 1.0) * service_scale); });
    const double gg = peak_aoi_bound_gg(arrival, service, q).raw_value;

    worst = std::max(worst, std::abs(gg - gigi) / gigi);
    worst = std::max(worst, std::abs(poisson - gigi) / gigi);
    ++admissible;
  }
  report(4, worst <= 1e-10, "G|G, GI|GI and Poisson bounds coincide under specialization",
         fmt("10 admissible random draws, max relative gap = %.3g, tol 1e-10", worst));
}

// ---------------------------------------------------------------- criterion 5
void criterion_distributional_oracles() {
  begin();
  const SeriesControl ctl{1e-12, 4000};
  bool ok = true;
  std::string detail;
  for (unsigned m : {1u, 5u, 10u}) {
    const ShadowedRicianParams p{0.126, m, 0.835};
    const auto draws = sample_channel_gain(p, 4242 + m, 200000);
    const double d =
        oracles::ks_statistic(draws, [&](double x) { return shadowed_rician_cdf(p, x, ctl); });
    const double crit = oracles::ks_critical(draws.size(), 0.01);
    if (d >= crit) ok = false;
    detail += fmt("m=%.0f: D=%.4f<%.4f  ", static_cast<double>(m), d, crit);
  }
  InterferenceConfig field;
  field.lambda_m = 2e-7;  // ~60 interferers: the two-moment fit is adequate
  field.d_min = 150.0;
  field.tx_snr_t = 1e22;
  field.combined_gain_dbi = 40.0;
  const GammaFit fit = gamma_fit(aggregate_moments(field));
  std::vector<double> ia;
  ia.reserve(100000);
  for (int s = 0; s < 100000; ++s)
    ia.push_back(sample_aggregate_interference(field, 910000 + s));
  const double dg = oracles::ks_statistic(
      ia, [&](double x) { return regularized_lower_gamma(fit.k, x / fit.eta, ctl); });
  if (dg >= 0.05) ok = false;
  detail += fmt("gamma fit: D=%.4f<0.05", dg);
  report(5, ok, "sampled fades and interference match their analytic laws", detail);

  // informational: the closed forms drop the +1 noise term, the simulator
  // keeps it; quantify the resulting gap in the stock (interference-
  // dominant) configuration
  const Scenario base;
  const SinrModel model = base.sinr_model();
  const double analytic = error_prob_normal(model, {200, 0.8});
  const auto sim = empirical_error_prob(model, 0.8, 200, 424242, 400000);
  std::printf("       info: noise-term gap at E[I]=%.1f: analytic eps=%.5f, simulated "
              "(with +1) eps=%.5f +- %.5f, relative gap=%.3f%%\n",
              model.interference.mean(), analytic, sim.estimate, sim.stderr_,
              100.0 * std::abs(sim.estimate - analytic) / analytic);
}

// ---------------------------------------------------------------- criterion 6
void criterion_exponent_soundness() {
  begin();
  bool ok = true;
  double worst_slack_frac = 0.0;  // used slack / allowed slack
  int idx = 0;
  const double rate = 0.25;
  const std::size_t n = 200;
  for (double phi_p : {120.0, 240.0, 480.0, 960.0, 1920.0}) {
    ++idx;
    const SinrModel m = fixtures::model_with_scale(phi_p, 4.0, 9.0);
    const ExponentResult r = theta_error(m, rate, n, false);
    const auto sim = empirical_error_prob(m, rate, n, 7100 + idx, 1000000);
    const double eps = std::max(sim.estimate, 1e-12);
    const double slack_used = std::log(eps) + static_cast<double>(n) * r.theta_error;
    // the allowance is the dispersion-term magnitude sqrt(n) |Q^-1(eps)|
    // (V <= 1 for this channel)
    const double slack_cap = std::sqrt(static_cast<double>(n)) * std::abs(q_function_inv(eps));
    if (slack_used > slack_cap) ok = false;
    if (slack_cap > 0.0)
      worst_slack_frac = std::max(worst_slack_frac, slack_used / slack_cap);
  }
  report(6, ok, "simulated error probability obeys the exponent bound",
         fmt("5 sub-capacity configs; max slack fraction of sqrt(n)Qinv cap = %.3g",
             worst_slack_frac));
}

// ---------------------------------------------------------------- criterion 7
void criterion_high_snr_convergence() {
  begin();
  const HarqConfig harq{200, 3, 0.8, 1.0};
  const double lambda = 6e-4;
  const AoiQosQuery q{1.2e-4, 6e6, 200};
  const double rate = 0.8;
  const std::size_t n = 300;
  bool ok = true;
  double prev_eps_gap = 1e300;
  double prev_aoi_gap = 1e300;
  double last_eps_gap = 0.0;
  double last_aoi_gap = 0.0;
  for (double db : {20.0, 30.0, 40.0, 50.0, 60.0}) {
    const SinrModel m = fixtures::model_with_scale(db_to_linear(db), 4.0, 9.0);
    const double closed = error_prob_closed_form(m, rate, n).value;
    const double asym = error_prob_asymptotic(m, rate, n).value;
    const double eps_gap = std::abs(asym - closed) / closed;
    const double full = peak_aoi_harq(m, harq, lambda, q).raw_value;
    const double high = peak_aoi_asymptotic(m, harq, lambda, q).raw_value;
    const double aoi_gap = std::abs(high - full) / full;
    if (!(eps_gap < prev_eps_gap) || !(aoi_gap < prev_aoi_gap)) ok = false;
    prev_eps_gap = eps_gap;
    prev_aoi_gap = aoi_gap;
    last_eps_gap = eps_gap;
    last_aoi_gap = aoi_gap;
  }
  if (!(last_eps_gap < 0.05 && last_aoi_gap < 0.05)) ok = false;
  report(7, ok, "high-SNR forms converge monotonically to the exact ones",
         fmt("gaps at 60 dB: error %.3g, peak-age bound %.3g (tol 0.05)", last_eps_gap,
             last_aoi_gap));
}

// ---------------------------------------------------------------- criterion 8
bool column_strictly_monotone(const Table& t, const std::string& column, bool increasing) {
  std::size_t idx = t.columns.size();
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    if (t.columns[c] == column) idx = c;
  if (idx == t.columns.size()) return false;
  double prev = increasing ? -1e300 : 1e300;
  for (const auto& row : t.rows) {
    if (!std::holds_alternative<double>(row[idx])) return false;
    const double v = std::get<double>(row[idx]);
    if (increasing ? !(v > prev) : !(v < prev)) return false;
    prev = v;
  }
  return true;
}

void criterion_figure_trends() {
  begin();
  Scenario s;
  s.sim.n_packets = 20000;
  s.sim.warmup = 2000;
  bool ok = true;
  std::string detail;

  {
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(3e-4 + 1e-4 * i);
    s.sweep = SweepSpec{SweepAxis::theta_aoi, grid};
    const bool pass = column_strictly_monotone(run_sweep(s), "aoi_bound[full]", false);
    ok = ok && pass;
    detail += std::string("theta_aoi:") + (pass ? "dec " : "FAIL ");
  }
  {
    s.sweep = SweepSpec{SweepAxis::blocklength, {80, 120, 160, 200, 240, 280}};
    const bool pass = column_strictly_monotone(run_sweep(s), "aoi_bound[full]", true);
    ok = ok && pass;
    detail += std::string("blocklength:") + (pass ? "inc " : "FAIL ");
  }
  {
    s.sweep = SweepSpec{SweepAxis::gbs_count, {10, 20, 30, 40, 50}};
    const Table t = run_sweep(s);
    const bool pass = column_strictly_monotone(t, "aoi_bound[full]", true);
    const bool sim_pass = column_strictly_monotone(t, "peak_aoi_mean[sim]", true);
    ok = ok && pass;
    detail += std::string("gbs_count:") + (pass ? "inc" : "FAIL") +
              (sim_pass ? "(sim inc) " : "(sim noisy) ");
  }
  {
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(6.0 + 2.0 * i);
    s.sweep = SweepSpec{SweepAxis::d_th, grid};
    const bool pass =
        column_strictly_monotone(run_sweep(s), "delay_bound[inf_theta]", false);
    ok = ok && pass;
    detail += std::string("d_th:") + (pass ? "dec " : "FAIL ");
  }
  {
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(0.002 + 0.002 * i);
    s.sweep = SweepSpec{SweepAxis::theta_error, grid};
    const bool pass = column_strictly_monotone(run_sweep(s), "eps_exponent_bound", false);
    ok = ok && pass;
    detail += std::string("theta_error:") + (pass ? "dec" : "FAIL");
  }
  report(8, ok, "sweep outputs reproduce the reference trends", detail);
}

// ---------------------------------------------------------------- criterion 9
void criterion_determinism(const std::string& cli) {
  begin();
  Scenario s;
  s.seed = 7;
  s.sim.seed = 7;
  s.sim.n_packets = 5000;
  s.sim.warmup = 500;
  s.sweep = SweepSpec{SweepAxis::gbs_count, {10, 25, 40}};  // includes simulation cells

  bool ok = true;
  std::string detail;
  const Table t1 = run_sweep(s);
  const Table t2 = run_sweep(s);
  emit(t1, "csv", "acc_det_lib1.csv");
  emit(t2, "csv", "acc_det_lib2.csv");
  const bool lib_same = slurp("acc_det_lib1.csv") == slurp("acc_det_lib2.csv");
  ok = ok && lib_same;
  detail += std::string("library:") + (lib_same ? "identical " : "DIFFER ");

  if (!cli.empty()) {
    save_scenario(s, "acc_det_scenario.json");
    const std::string base_cmd = "\"" + cli +
                                 "\" sweep --scenario acc_det_scenario.json --seed 7 "
                                 "--format csv --out ";
    const int rc1 = std::system((base_cmd + "acc_det_cli1.csv").c_str());
    const int rc2 = std::system((base_cmd + "acc_det_cli2.csv").c_str());
    const std::string f1 = slurp("acc_det_cli1.csv");
    const bool cli_same = rc1 == 0 && rc2 == 0 && !f1.empty() &&
                          f1 == slurp("acc_det_cli2.csv");
    ok = ok && cli_same;
    detail += std::string("cli:") + (cli_same ? "identical" : "DIFFER");
  } else {
    detail += "cli:not-provided";
  }
  report(9, ok, "sweep output files are byte-identical across runs", detail);
}

// --------------------------------------------------------------- criterion 10
void criterion_specfun_properties() {
  begin();
  int cases = 0;
  bool ok = true;

  // incomplete gamma: nondecreasing in x, bounded by Gamma(a)
  for (double a : {0.4, 1.0, 2.5, 6.0, 11.0}) {
    double prev = -1.0;
    for (double x = 0.0; x <= 12.0; x += 0.5) {
      const double g = lower_incomplete_gamma(a, x);
      if (g < prev || g > std::tgamma(a) * (1.0 + 1e-12)) ok = false;
      prev = g;
      ++cases;
    }
  }
  // 1F1 finite sum vs direct power series
  for (unsigned m = 1; m <= 10; ++m) {
    for (double z = -5.0; z <= 5.0; z += 0.5) {
      const double finite = hyp1f1_integer_m(m, z);
      const double series = oracles::hyp1f1_power_series(m, z);
      if (std::abs(finite - series) >
          1e-10 * std::max(1.0, std::max(std::abs(finite), std::abs(series))))
        ok = false;
      ++cases;
    }
  }
  // Q symmetry
  for (double x = -6.0; x <= 6.0; x += 0.1) {
    if (std::abs(q_function(x) + q_function(-x) - 1.0) >= 1e-14) ok = false;
    ++cases;
  }
  // 2F1 continuation vs the Euler integral
  const SeriesControl wide{1e-13, 8000};
  const double params[][3] = {{2.3, 3.0, 4.0}, {1.5, 2.0, 3.7}, {4.2, 1.1, 5.5},
                              {0.7, 2.5, 3.1}};
  for (const auto& p : params) {
    for (double z : {-50.0, -20.0, -8.0, -3.0, -1.0, -0.4, 0.0, 0.3, 0.6, 0.9}) {
      const double mine = hyp2f1(p[0], p[1], p[2], z, wide);
      const double euler = oracles::hyp2f1_euler_integral(p[0], p[1], p[2], z);
      if (std::abs(mine - euler) > 1e-8 * std::max(1.0, std::abs(euler))) ok = false;
      ++cases;
    }
  }
  report(10, ok && cases >= 200, "special-function identity properties hold",
         fmt("%g property cases", static_cast<double>(cases)));
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  std::printf("acceptance suite\n");
  criterion_closed_form_vs_quadrature();
  criteria_bound_validity();
  criterion_specialization_chain();
  criterion_distributional_oracles();
  criterion_exponent_soundness();
  criterion_high_snr_convergence();
  criterion_figure_trends();
  criterion_determinism(cli);
  criterion_specfun_properties();
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
