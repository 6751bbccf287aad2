#pragma once

// Scenario configuration for the CLI: a strict JSON schema covering every
// module's parameters, defaults for the stock geometry (10 km / 2 km
// annulus, 20 dBi satellite antenna, 30 dBm transmit power), and the sweep
// declaration. Unknown keys are rejected by name so parameter typos fail
// loudly instead of silently running the defaults.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stqos/channel.hpp"
#include "stqos/errors.hpp"
#include "stqos/harq.hpp"
#include "stqos/interference.hpp"
#include "stqos/simkit.hpp"
#include "stqos/snc.hpp"

namespace stqos {

class SchemaError : public Error {
public:
  explicit SchemaError(const std::string& what) : Error(what) {}
};

enum class SweepAxis { theta_aoi, blocklength, gbs_count, theta_delay, d_th, theta_error };

inline std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::theta_aoi: return "theta_aoi";
    case SweepAxis::blocklength: return "blocklength";
    case SweepAxis::gbs_count: return "gbs_count";
    case SweepAxis::theta_delay: return "theta_delay";
    case SweepAxis::d_th: return "d_th";
    case SweepAxis::theta_error: return "theta_error";
  }
  throw DomainError("unknown sweep axis");
}

inline SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "theta_aoi") return SweepAxis::theta_aoi;
  if (s == "blocklength") return SweepAxis::blocklength;
  if (s == "gbs_count") return SweepAxis::gbs_count;
  if (s == "theta_delay") return SweepAxis::theta_delay;
  if (s == "d_th") return SweepAxis::d_th;
  if (s == "theta_error") return SweepAxis::theta_error;
  throw SchemaError("unknown sweep axis '" + s + "'");
}

struct SweepSpec {
  SweepAxis axis = SweepAxis::theta_aoi;
  std::vector<double> grid;

  void validate() const {
    if (grid.empty()) throw SchemaError("sweep.grid must be non-empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1])) throw SchemaError("sweep.grid must be strictly sorted");
  }

  bool operator==(const SweepSpec&) const = default;
};

struct Scenario {
  std::string name = "default";
  std::uint64_t seed = 1;

  ShadowedRicianParams fade = shadowing_preset("average");
  LinkGeometry link{2e9, 600e3, 20.0, 0.0};
  double p_s_dbm = 30.0;     // satellite transmit power
  double noise_dbm = -120.0;  // receiver noise power

  // Annulus defaults 2 km / 10 km; the interferer budget keeps the stock
  // configuration interference-dominant (aggregate mean well above noise).
  double gbs_count = 30.0;  // expected retained interferers on the annulus
  double d_min = 100.0;
  double r_in = 2000.0;
  double r_out = 10000.0;
  double path_loss_exp = 3.0;
  double p_t_dbm = 57.5;
  double interferer_gain_dbi = 40.0;  // G_j + G_d combined
  double rayleigh_scale = 0.7071067811865476;

  HarqConfig harq{200, 4, 0.8, 1.0};
  double arrival_rate = 0.0015;  // packets per time unit

  AoiQosQuery aoi{5e-4, 2e6, 200};
  DelayQosQuery delay{2e-3, 8.0, 1.0};

  double error_rate_nats = 0.8;
  std::size_t error_blocklength = 200;
  bool use_jensen = false;

  SimConfig sim{1, 200000, 20000, 2000};
  SeriesControl series{};
  std::optional<SweepSpec> sweep;

  double tx_snr() const { return std::pow(10.0, (p_s_dbm - noise_dbm) / 10.0); }
  double tx_snr_t() const { return std::pow(10.0, (p_t_dbm - noise_dbm) / 10.0); }

  InterferenceConfig interference_config() const {
    InterferenceConfig cfg;
    cfg.lambda_m = parent_intensity_for_expected_count(gbs_count, d_min, r_in, r_out);
    cfg.d_min = d_min;
    cfg.r_in = r_in;
    cfg.r_out = r_out;
    cfg.path_loss_exp = path_loss_exp;
    cfg.tx_snr_t = tx_snr_t();
    cfg.rayleigh_scale = rayleigh_scale;
    cfg.pg_shape = 1.0;
    cfg.pg_scale = 2.0 * rayleigh_scale * rayleigh_scale;
    cfg.carrier_hz = link.carrier_hz;
    cfg.combined_gain_dbi = interferer_gain_dbi;
    cfg.validate();
    return cfg;
  }

  SinrModel sinr_model() const {
    return make_sinr_model(link, fade, tx_snr(), interference_config());
  }

  double codebook_bits() const {
    return bits_from_nats(harq.initial_rate * static_cast<double>(harq.sub_block_len));
  }

  void validate() const {
    fade.validate();
    link.validate();
    harq.validate();
    sim.validate();
    series.validate();
    aoi.validate();
    delay.validate();
    if (!(arrival_rate > 0.0)) throw SchemaError("arrival_rate must be > 0");
    if (!(error_rate_nats > 0.0)) throw SchemaError("error.rate_nats must be > 0");
    if (error_blocklength < 1) throw SchemaError("error.blocklength must be >= 1");
    if (sweep) sweep->validate();
    interference_config();  // validates the derived field configuration
  }

  bool operator==(const Scenario&) const = default;
};

namespace detail {

using json = nlohmann::ordered_json;

inline void expect_keys(const json& obj, const std::string& where,
                        const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw SchemaError("'" + where + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw SchemaError("unknown key '" + it.key() + "' in '" + where + "'");
  }
}

template <typename T>
inline void read_to(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::ordered_json& j) {
  using detail::expect_keys;
  using detail::read_to;
  Scenario s;
  expect_keys(j, "scenario",
              {"name", "seed", "channel", "link", "tx", "interference", "harq",
               "arrival_rate", "aoi", "delay", "error", "sim", "series", "sweep"});
  read_to(j, "name", s.name);
  read_to(j, "seed", s.seed);
  read_to(j, "arrival_rate", s.arrival_rate);

  if (j.contains("channel")) {
    const auto& c = j.at("channel");
    expect_keys(c, "channel", {"preset", "b", "m", "omega"});
    if (c.contains("preset")) s.fade = shadowing_preset(c.at("preset").get<std::string>());
    read_to(c, "b", s.fade.b);
    read_to(c, "m", s.fade.m);
    read_to(c, "omega", s.fade.omega);
  }
  if (j.contains("link")) {
    const auto& l = j.at("link");
    expect_keys(l, "link", {"carrier_hz", "distance_m", "tx_gain_dbi", "rx_gain_dbi"});
    read_to(l, "carrier_hz", s.link.carrier_hz);
    read_to(l, "distance_m", s.link.distance_m);
    read_to(l, "tx_gain_dbi", s.link.tx_gain_dbi);
    read_to(l, "rx_gain_dbi", s.link.rx_gain_dbi);
  }
  if (j.contains("tx")) {
    const auto& t = j.at("tx");
    expect_keys(t, "tx", {"p_s_dbm", "noise_dbm"});
    read_to(t, "p_s_dbm", s.p_s_dbm);
    read_to(t, "noise_dbm", s.noise_dbm);
  }
  if (j.contains("interference")) {
    const auto& i = j.at("interference");
    expect_keys(i, "interference",
                {"gbs_count", "d_min_m", "r_in_m", "r_out_m", "path_loss_exp", "p_t_dbm",
                 "combined_gain_dbi", "rayleigh_scale"});
    read_to(i, "gbs_count", s.gbs_count);
    read_to(i, "d_min_m", s.d_min);
    read_to(i, "r_in_m", s.r_in);
    read_to(i, "r_out_m", s.r_out);
    read_to(i, "path_loss_exp", s.path_loss_exp);
    read_to(i, "p_t_dbm", s.p_t_dbm);
    read_to(i, "combined_gain_dbi", s.interferer_gain_dbi);
    read_to(i, "rayleigh_scale", s.rayleigh_scale);
  }
  if (j.contains("harq")) {
    const auto& h = j.at("harq");
    expect_keys(h, "harq",
                {"sub_block_len", "max_rounds", "initial_rate_nats", "initial_rate_bits",
                 "symbol_time"});
    if (h.contains("initial_rate_nats") && h.contains("initial_rate_bits"))
      throw SchemaError("harq: give initial_rate_nats or initial_rate_bits, not both");
    read_to(h, "sub_block_len", s.harq.sub_block_len);
    read_to(h, "max_rounds", s.harq.max_rounds);
    read_to(h, "initial_rate_nats", s.harq.initial_rate);
    if (h.contains("initial_rate_bits"))
      s.harq.initial_rate = nats_from_bits(h.at("initial_rate_bits").get<double>());
    read_to(h, "symbol_time", s.harq.symbol_time);
  }
  if (j.contains("aoi")) {
    const auto& a = j.at("aoi");
    expect_keys(a, "aoi", {"theta_aoi", "a_th", "blocklength"});
    read_to(a, "theta_aoi", s.aoi.theta_aoi);
    read_to(a, "a_th", s.aoi.a_th);
    s.aoi.blocklength = s.harq.sub_block_len;
    read_to(a, "blocklength", s.aoi.blocklength);
  } else {
    s.aoi.blocklength = s.harq.sub_block_len;
  }
  if (j.contains("delay")) {
    const auto& d = j.at("delay");
    expect_keys(d, "delay", {"theta_delay", "d_th", "delta_s"});
    read_to(d, "theta_delay", s.delay.theta_delay);
    read_to(d, "d_th", s.delay.d_th);
    read_to(d, "delta_s", s.delay.delta_s);
  }
  if (j.contains("error")) {
    const auto& e = j.at("error");
    expect_keys(e, "error", {"rate_nats", "blocklength", "use_jensen"});
    read_to(e, "rate_nats", s.error_rate_nats);
    s.error_blocklength = s.harq.sub_block_len;
    read_to(e, "blocklength", s.error_blocklength);
    read_to(e, "use_jensen", s.use_jensen);
  } else {
    s.error_blocklength = s.harq.sub_block_len;
  }
  if (j.contains("sim")) {
    const auto& m = j.at("sim");
    expect_keys(m, "sim", {"n_samples", "n_packets", "warmup"});
    read_to(m, "n_samples", s.sim.n_samples);
    read_to(m, "n_packets", s.sim.n_packets);
    s.sim.warmup = s.sim.n_packets / 10;
    read_to(m, "warmup", s.sim.warmup);
  }
  s.sim.seed = s.seed;
  if (j.contains("series")) {
    const auto& c = j.at("series");
    expect_keys(c, "series", {"rel_tol", "max_terms"});
    read_to(c, "rel_tol", s.series.rel_tol);
    read_to(c, "max_terms", s.series.max_terms);
  }
  if (j.contains("sweep")) {
    const auto& w = j.at("sweep");
    expect_keys(w, "sweep", {"axis", "grid"});
    if (!w.contains("axis") || !w.contains("grid"))
      throw SchemaError("sweep requires both 'axis' and 'grid'");
    SweepSpec spec;
    spec.axis = sweep_axis_from_string(w.at("axis").get<std::string>());
    spec.grid = w.at("grid").get<std::vector<double>>();
    s.sweep = spec;
  }
  s.validate();
  return s;
}

inline nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["channel"] = {{"b", s.fade.b}, {"m", s.fade.m}, {"omega", s.fade.omega}};
  j["link"] = {{"carrier_hz", s.link.carrier_hz},
               {"distance_m", s.link.distance_m},
               {"tx_gain_dbi", s.link.tx_gain_dbi},
               {"rx_gain_dbi", s.link.rx_gain_dbi}};
  j["tx"] = {{"p_s_dbm", s.p_s_dbm}, {"noise_dbm", s.noise_dbm}};
  j["interference"] = {{"gbs_count", s.gbs_count},
                       {"d_min_m", s.d_min},
                       {"r_in_m", s.r_in},
                       {"r_out_m", s.r_out},
                       {"path_loss_exp", s.path_loss_exp},
                       {"p_t_dbm", s.p_t_dbm},
                       {"combined_gain_dbi", s.interferer_gain_dbi},
                       {"rayleigh_scale", s.rayleigh_scale}};
  j["harq"] = {{"sub_block_len", s.harq.sub_block_len},
               {"max_rounds", s.harq.max_rounds},
               {"initial_rate_nats", s.harq.initial_rate},
               {"symbol_time", s.harq.symbol_time}};
  j["arrival_rate"] = s.arrival_rate;
  j["aoi"] = {{"theta_aoi", s.aoi.theta_aoi},
              {"a_th", s.aoi.a_th},
              {"blocklength", s.aoi.blocklength}};
  j["delay"] = {{"theta_delay", s.delay.theta_delay},
                {"d_th", s.delay.d_th},
                {"delta_s", s.delay.delta_s}};
  j["error"] = {{"rate_nats", s.error_rate_nats},
                {"blocklength", s.error_blocklength},
                {"use_jensen", s.use_jensen}};
  j["sim"] = {{"n_samples", s.sim.n_samples},
              {"n_packets", s.sim.n_packets},
              {"warmup", s.sim.warmup}};
  j["series"] = {{"rel_tol", s.series.rel_tol}, {"max_terms", s.series.max_terms}};
  if (s.sweep) {
    j["sweep"] = {{"axis", to_string(s.sweep->axis)}, {"grid", s.sweep->grid}};
  }
  return j;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_scenario: cannot open '" + path + "'");
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("load_scenario: parse failure in '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("save_scenario: cannot open '" + path + "'");
  out << scenario_to_json(s).dump(2) << "\n";
}

}  // namespace stqos
