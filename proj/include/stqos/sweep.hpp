#pragma once

// Sweep evaluation over a scenario's grid and deterministic table output.
// Grid points are evaluated concurrently (seeds derived per point) and
// assembled in grid order, so repeated runs of the same scenario and seed
// produce byte-identical files. Per-point failures land in the row's status
// column and the run continues; numeric cells are never NaN.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "stqos/errors.hpp"
#include "stqos/gallager.hpp"
#include "stqos/scenario.hpp"
#include "stqos/simkit.hpp"
#include "stqos/snc.hpp"

namespace stqos {

// empty | number | text
using Cell = std::variant<std::monostate, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  bool operator==(const Table&) const = default;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto* end = std::to_chars(buf, buf + sizeof(buf), v).ptr;
  return std::string(buf, end);
}

inline std::string cell_to_csv(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return "";
  if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
  return std::get<std::string>(c);
}

// categorizes an exception for the status column
inline std::string error_category(const Error& e) {
  if (dynamic_cast<const StabilityError*>(&e)) return "error:stability";
  if (dynamic_cast<const TruncationError*>(&e)) return "error:truncation";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "error:convergence";
  if (dynamic_cast<const SchemaError*>(&e)) return "error:schema";
  if (dynamic_cast<const DomainError*>(&e)) return "error:domain";
  return "error:other";
}

}  // namespace detail

inline std::string table_to_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    out += t.columns[c];
    out += (c + 1 < t.columns.size()) ? ',' : '\n';
  }
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += detail::cell_to_csv(row[c]);
      out += (c + 1 < row.size()) ? ',' : '\n';
    }
  }
  return out;
}

// Inverse of table_to_csv for cells produced by it: numbers parse back
// exactly (shortest round-trip formatting), empty stays empty, anything
// else is text.
inline Table table_from_csv(const std::string& csv) {
  Table t;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    fields.push_back(cur);
    if (header) {
      t.columns = fields;
      header = false;
      continue;
    }
    std::vector<Cell> row;
    for (const auto& f : fields) {
      if (f.empty()) {
        row.emplace_back(std::monostate{});
        continue;
      }
      double v = 0.0;
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec == std::errc() && p == f.data() + f.size()) {
        row.emplace_back(v);
      } else {
        row.emplace_back(f);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline nlohmann::ordered_json table_to_json(const Table& t) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t c = 0; c < t.columns.size() && c < row.size(); ++c) {
      if (std::holds_alternative<std::monostate>(row[c])) {
        obj[t.columns[c]] = nullptr;
      } else if (std::holds_alternative<double>(row[c])) {
        obj[t.columns[c]] = std::get<double>(row[c]);
      } else {
        obj[t.columns[c]] = std::get<std::string>(row[c]);
      }
    }
    rows.push_back(obj);
  }
  nlohmann::ordered_json j;
  j["columns"] = t.columns;
  j["rows"] = rows;
  return j;
}

inline void emit(const Table& t, const std::string& format, const std::string& path) {
  if (t.rows.empty()) throw DomainError("emit: table has no rows");
  if (format != "csv" && format != "json")
    throw DomainError("emit: unknown format '" + format + "'");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("emit: cannot open '" + path + "'");
  if (format == "csv") {
    out << table_to_csv(t);
  } else {
    out << table_to_json(t).dump(2) << "\n";
  }
}

namespace detail {

inline Cell opt_cell(const std::optional<double>& v) {
  return v ? Cell{*v} : Cell{std::monostate{}};
}

// One sweep point: fills the row or sets its status column.
inline void eval_sweep_point(const Scenario& base, SweepAxis axis, double x, std::uint64_t,
                             std::vector<Cell>& row) {
  Scenario s = base;
  const Cell ok{std::monostate{}};
  switch (axis) {
    case SweepAxis::theta_aoi: {
      s.aoi.theta_aoi = x;
      const SinrModel model = s.sinr_model();
      const BoundResult b =
          peak_aoi_harq(model, s.harq, s.arrival_rate, s.aoi, s.series);
      row = {Cell{x}, Cell{b.value}, opt_cell(b.alt_value), Cell{b.stability_margin}, ok};
      break;
    }
    case SweepAxis::blocklength: {
      s.harq.sub_block_len = static_cast<std::size_t>(x);
      s.aoi.blocklength = s.harq.sub_block_len;
      const SinrModel model = s.sinr_model();
      const std::vector<double> errs = round_error_probs(model, s.harq, s.series);
      const BoundResult b =
          peak_aoi_harq(model, s.harq, s.arrival_rate, s.aoi, s.series);
      row = {Cell{x}, Cell{b.value}, opt_cell(b.alt_value),
             errs.empty() ? Cell{std::monostate{}} : Cell{errs.front()},
             Cell{b.stability_margin}, ok};
      break;
    }
    case SweepAxis::gbs_count: {
      s.gbs_count = x;
      const InterferenceConfig field = s.interference_config();
      const AggregateMoments mom = aggregate_moments(field);
      const SinrModel model = s.sinr_model();
      const std::vector<double> errs = round_error_probs(model, s.harq, s.series);
      const BoundResult b =
          peak_aoi_harq(model, s.harq, s.arrival_rate, s.aoi, s.series);
      const AoiTrace trace = simulate_aoi_queue(s.arrival_rate, model, s.harq, s.sim, field);
      row = {Cell{x},
             Cell{field.lambda_m},
             Cell{mom.mean},
             Cell{model.interference.k},
             Cell{model.interference.eta},
             errs.empty() ? Cell{std::monostate{}} : Cell{errs.front()},
             Cell{b.value},
             opt_cell(b.alt_value),
             Cell{mean_peak_aoi(trace)},
             ok};
      break;
    }
    case SweepAxis::theta_delay: {
      s.delay.theta_delay = x;
      const SinrModel model = s.sinr_model();
      const double eps =
          error_prob_closed_form(model, s.harq.initial_rate, s.harq.sub_block_len, s.series)
              .value;
      const double bits = s.codebook_bits();
      const double lambda_slot = s.arrival_rate * s.harq.round_duration();
      auto arr = [&](double order) { return poisson_arrival_mellin(lambda_slot, order, bits); };
      auto srv = [&](double order) { return service_mellin_fbc(eps, bits, order); };
      const BoundResult b = delay_violation_bound(arr, srv, s.delay, {x});
      row = {Cell{x}, Cell{b.value}, Cell{eps}, Cell{b.stability_margin},
             Cell{std::monostate{}}};
      break;
    }
    case SweepAxis::d_th: {
      s.delay.d_th = x;
      const SinrModel model = s.sinr_model();
      const double eps =
          error_prob_closed_form(model, s.harq.initial_rate, s.harq.sub_block_len, s.series)
              .value;
      const double bits = s.codebook_bits();
      const double lambda_slot = s.arrival_rate * s.harq.round_duration();
      auto arr = [&](double order) { return poisson_arrival_mellin(lambda_slot, order, bits); };
      auto srv = [&](double order) { return service_mellin_fbc(eps, bits, order); };
      std::vector<double> grid;
      for (int i = 0; i < 64; ++i)
        grid.push_back(std::exp(std::log(1e-5) +
                                (std::log(2.0 / bits) - std::log(1e-5)) * i / 63.0));
      const BoundResult b = delay_violation_bound(arr, srv, s.delay, grid);
      row = {Cell{x}, Cell{b.value}, Cell{b.theta_used}, Cell{b.stability_margin},
             Cell{std::monostate{}}};
      break;
    }
    case SweepAxis::theta_error: {
      const double n = static_cast<double>(s.error_blocklength);
      const SinrModel model = s.sinr_model();
      const ExponentResult star =
          theta_error(model, s.error_rate_nats, s.error_blocklength, s.use_jensen);
      row = {Cell{x}, Cell{std::exp(-n * x)}, Cell{star.theta_error},
             Cell{std::string(s.use_jensen ? "jensen" : "exact")},
             Cell{x <= star.theta_error ? 1.0 : 0.0}, Cell{std::monostate{}}};
      break;
    }
  }
}

inline std::vector<std::string> sweep_columns(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::theta_aoi:
      return {"theta_aoi", "aoi_bound[full]", "aoi_bound[literal]", "stability_margin",
              "status"};
    case SweepAxis::blocklength:
      return {"blocklength", "aoi_bound[full]", "aoi_bound[literal]",
              "eps_round1[closed_form]", "stability_margin", "status"};
    case SweepAxis::gbs_count:
      return {"gbs_count", "lambda_parent", "ia_mean", "ia_k", "ia_eta",
              "eps_round1[closed_form]", "aoi_bound[full]", "aoi_bound[literal]",
              "peak_aoi_mean[sim]", "status"};
    case SweepAxis::theta_delay:
      return {"theta_delay", "delay_bound[kernel]", "eps[closed_form]", "stability_margin",
              "status"};
    case SweepAxis::d_th:
      return {"d_th", "delay_bound[inf_theta]", "theta_star", "stability_margin", "status"};
    case SweepAxis::theta_error:
      return {"theta_error", "eps_exponent_bound", "theta_error_star", "exponent_path",
              "achievable", "status"};
  }
  throw DomainError("unknown sweep axis");
}

}  // namespace detail

inline Table run_sweep(const Scenario& s, unsigned n_threads = 0) {
  s.validate();
  if (!s.sweep) throw SchemaError("run_sweep: scenario has no sweep section");
  const SweepSpec& spec = *s.sweep;
  Table t;
  t.columns = detail::sweep_columns(spec.axis);
  t.rows.assign(spec.grid.size(), {});

  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, spec.grid.size());

  auto worker = [&](unsigned tid) {
    for (std::size_t i = tid; i < spec.grid.size(); i += n_threads) {
      std::vector<Cell> row;
      try {
        detail::eval_sweep_point(s, spec.axis, spec.grid[i], s.seed, row);
      } catch (const Error& e) {
        row.assign(t.columns.size(), Cell{std::monostate{}});
        row[0] = Cell{spec.grid[i]};
        row.back() = Cell{detail::error_category(e)};
      }
      while (row.size() < t.columns.size()) row.emplace_back(std::monostate{});
      t.rows[i] = std::move(row);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned tid = 1; tid < n_threads; ++tid) pool.emplace_back(worker, tid);
  worker(0);
  for (auto& th : pool) th.join();
  return t;
}

}  // namespace stqos
