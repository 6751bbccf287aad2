// Command-line front end: scenario-driven computation of the decoding error
// probability, peak-age and delay violation bounds, the error-rate QoS
// exponent, the queue simulator, and parameter sweeps with CSV/JSON output.
//
// Exit codes: 0 success, 2 configuration/schema, 3 stability/domain,
// 4 numeric (series/quadrature), 5 I/O.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stqos/gallager.hpp"
#include "stqos/scenario.hpp"
#include "stqos/simkit.hpp"
#include "stqos/snc.hpp"
#include "stqos/sweep.hpp"

namespace {

struct CommonOpts {
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  std::string out;
};

stqos::Scenario load(const CommonOpts& o) {
  stqos::Scenario s = o.scenario_path.empty() ? stqos::Scenario{}
                                              : stqos::load_scenario(o.scenario_path);
  if (o.seed) {
    s.seed = *o.seed;
    s.sim.seed = *o.seed;
  }
  s.validate();
  return s;
}

void write_table(const stqos::Table& t, const CommonOpts& o) {
  if (!o.out.empty()) {
    stqos::emit(t, o.format, o.out);
    return;
  }
  if (o.format == "json") {
    std::cout << stqos::table_to_json(t).dump(2) << "\n";
  } else {
    std::cout << stqos::table_to_csv(t);
  }
}

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--scenario", o.scenario_path, "Scenario JSON file (defaults used if absent)");
  cmd->add_option("--seed", o.seed, "Override the scenario seed");
  cmd->add_option("--format", o.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out, "Output path (stdout if absent)");
}

int run_error_prob(const CommonOpts& o) {
  const stqos::Scenario s = load(o);
  const stqos::SinrModel model = s.sinr_model();
  stqos::Table t;
  t.columns = {"round", "rate_nats", "blocklength", "eps[closed_form]", "eps[normal_approx]",
               "eps[high_snr]", "truncation_error", "status"};
  for (std::size_t l = 1; l <= s.harq.max_rounds; ++l) {
    const double rate = stqos::rate_after_round(s.harq, l);
    const std::size_t n = s.harq.sub_block_len * l;
    const auto closed = stqos::error_prob_closed_form(model, rate, n, s.series);
    const double normal = stqos::error_prob_normal(model, {n, rate});
    const auto asym = stqos::error_prob_asymptotic(model, rate, n);
    t.rows.push_back({stqos::Cell{static_cast<double>(l)}, stqos::Cell{rate},
                      stqos::Cell{static_cast<double>(n)}, stqos::Cell{closed.value},
                      stqos::Cell{normal}, stqos::Cell{asym.value},
                      stqos::Cell{closed.truncation_error}, stqos::Cell{std::monostate{}}});
  }
  write_table(t, o);
  return 0;
}

int run_aoi_bound(const CommonOpts& o) {
  const stqos::Scenario s = load(o);
  const stqos::SinrModel model = s.sinr_model();
  const auto full = stqos::peak_aoi_harq(model, s.harq, s.arrival_rate, s.aoi, s.series,
                                            stqos::BoundForm::full);
  const auto asym = stqos::peak_aoi_asymptotic(model, s.harq, s.arrival_rate, s.aoi,
                                               stqos::BoundForm::full);
  stqos::Table t;
  t.columns = {"theta_aoi", "a_th", "blocklength", "aoi_bound[full]", "aoi_bound[literal]",
               "aoi_bound[high_snr]", "stability_margin", "status"};
  t.rows.push_back({stqos::Cell{s.aoi.theta_aoi}, stqos::Cell{s.aoi.a_th},
                    stqos::Cell{static_cast<double>(s.aoi.blocklength)},
                    stqos::Cell{full.value},
                    full.alt_value ? stqos::Cell{*full.alt_value}
                                      : stqos::Cell{std::monostate{}},
                    stqos::Cell{asym.value}, stqos::Cell{full.stability_margin},
                    stqos::Cell{std::monostate{}}});
  write_table(t, o);
  return 0;
}

int run_delay_bound(const CommonOpts& o) {
  const stqos::Scenario s = load(o);
  const stqos::SinrModel model = s.sinr_model();
  const double eps =
      stqos::error_prob_closed_form(model, s.harq.initial_rate, s.harq.sub_block_len, s.series)
          .value;
  const double bits = s.codebook_bits();
  const double lambda_slot = s.arrival_rate * s.harq.round_duration();
  auto arr = [&](double order) { return stqos::poisson_arrival_mellin(lambda_slot, order, bits); };
  auto srv = [&](double order) { return stqos::service_mellin_fbc(eps, bits, order); };
  std::vector<double> grid;
  for (int i = 0; i < 64; ++i)
    grid.push_back(std::exp(std::log(1e-5) + (std::log(2.0 / bits) - std::log(1e-5)) * i / 63.0));
  const auto b = stqos::delay_violation_bound(arr, srv, s.delay, grid);
  stqos::Table t;
  t.columns = {"d_th", "delta_s", "eps[closed_form]", "delay_bound[inf_theta]", "theta_star",
               "stability_margin", "status"};
  t.rows.push_back({stqos::Cell{s.delay.d_th}, stqos::Cell{s.delay.delta_s}, stqos::Cell{eps},
                    stqos::Cell{b.value}, stqos::Cell{b.theta_used},
                    stqos::Cell{b.stability_margin}, stqos::Cell{std::monostate{}}});
  write_table(t, o);
  return 0;
}

int run_exponent(const CommonOpts& o) {
  const stqos::Scenario s = load(o);
  const stqos::SinrModel model = s.sinr_model();
  const auto exact = stqos::theta_error(model, s.error_rate_nats, s.error_blocklength, false);
  const auto jensen = stqos::theta_error(model, s.error_rate_nats, s.error_blocklength, true);
  const double n = static_cast<double>(s.error_blocklength);
  stqos::Table t;
  t.columns = {"rate_nats", "blocklength", "theta_error[exact]", "rho_star[exact]",
               "e0[exact]", "eps_exponent_bound[exact]", "theta_error[jensen]",
               "rho_star[jensen]", "e0[jensen]", "status"};
  t.rows.push_back({stqos::Cell{s.error_rate_nats}, stqos::Cell{n},
                    stqos::Cell{exact.theta_error}, stqos::Cell{exact.rho_star},
                    stqos::Cell{exact.e0_at_rho}, stqos::Cell{std::exp(-n * exact.theta_error)},
                    stqos::Cell{jensen.theta_error}, stqos::Cell{jensen.rho_star},
                    stqos::Cell{jensen.e0_at_rho}, stqos::Cell{std::monostate{}}});
  write_table(t, o);
  return 0;
}

int run_simulate(const CommonOpts& o) {
  const stqos::Scenario s = load(o);
  const stqos::SinrModel model = s.sinr_model();
  const stqos::AoiTrace trace =
      stqos::simulate_aoi_queue(s.arrival_rate, model, s.harq, s.sim, s.interference_config());
  if (o.out.empty()) {
    stqos::write_trace_csv(trace, std::cout);
  } else {
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw stqos::Error("simulate: cannot open '" + o.out + "'");
    stqos::write_trace_csv(trace, out);
    const auto viol = stqos::empirical_peak_aoi_violation(trace, {s.aoi.a_th}, s.aoi.blocklength);
    std::cout << "packets=" << trace.size() << " warmup=" << trace.warmup
              << " mean_peak_aoi=" << stqos::mean_peak_aoi(trace)
              << " peak_aoi_violation(a_th=" << s.aoi.a_th << ")=" << viol.front() << "\n";
  }
  return 0;
}

int run_sweep_cmd(const CommonOpts& o) {
  const stqos::Scenario s = load(o);
  if (!s.sweep) throw stqos::SchemaError("sweep: scenario has no sweep section");
  const stqos::Table t = stqos::run_sweep(s);
  write_table(t, o);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical QoS bounds and Monte Carlo validation for a satellite-terrestrial "
               "status-update downlink"};
  app.require_subcommand(1);

  CommonOpts opts[6];
  auto* c0 = app.add_subcommand("error-prob", "Per-round decoding error probability");
  auto* c1 = app.add_subcommand("aoi-bound", "Peak-age violation bound");
  auto* c2 = app.add_subcommand("delay-bound", "Delay violation bound");
  auto* c3 = app.add_subcommand("exponent", "Error-rate QoS exponent");
  auto* c4 = app.add_subcommand("simulate", "Run the status-update queue simulator");
  auto* c5 = app.add_subcommand("sweep", "Evaluate the scenario's sweep grid");
  add_common(c0, opts[0]);
  add_common(c1, opts[1]);
  add_common(c2, opts[2]);
  add_common(c3, opts[3]);
  add_common(c4, opts[4]);
  add_common(c5, opts[5]);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c0->parsed()) return run_error_prob(opts[0]);
    if (c1->parsed()) return run_aoi_bound(opts[1]);
    if (c2->parsed()) return run_delay_bound(opts[2]);
    if (c3->parsed()) return run_exponent(opts[3]);
    if (c4->parsed()) return run_simulate(opts[4]);
    if (c5->parsed()) return run_sweep_cmd(opts[5]);
  } catch (const stqos::SchemaError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const stqos::StabilityError& e) {
    std::cerr << "stability error: " << e.what()
              << " (margin = " << e.stability_margin << ")\n";
    return 3;
  } catch (const stqos::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const stqos::TruncationError& e) {
    std::cerr << "numeric error: " << e.what() << " (partial = " << e.partial_value
              << ", tail <= " << e.tail_bound << ")\n";
    return 4;
  } catch (const stqos::ConvergenceError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const stqos::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 2;
}
