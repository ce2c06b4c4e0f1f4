// File formats: trace CSV ingestion, the binary scenario cache, and the
// CSV/JSON result writers. Reports embed tool version, config hash,
// scenario fingerprint, and solver tolerances; nothing time- or
// machine-dependent, so a fixed seed reproduces files byte for byte.
#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "radk/common.hpp"
#include "radk/dispatch.hpp"
#include "radk/elcc.hpp"
#include "radk/model.hpp"
#include "radk/scenario.hpp"
#include "radk/traces.hpp"

namespace radk {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Trace CSV: header `timestamp,load_mw,wind_cf,solar_cf`, extra named
// capacity-factor columns allowed, hourly rows, plain decimal numbers.
// Every column except the timestamp becomes a trace under its header name.
// ---------------------------------------------------------------------------

inline TraceStore load_trace_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty trace file: " + path);
  std::vector<std::string> headers;
  {
    std::stringstream ss(line);
    std::string h;
    while (std::getline(ss, h, ',')) headers.push_back(h);
  }
  if (headers.empty() || headers[0] != "timestamp")
    throw IoError("trace file must start with a 'timestamp' column: " + path);
  std::vector<std::vector<double>> columns(headers.size() - 1);
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // timestamp, kept only for alignment
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (!std::getline(ss, cell, ','))
        throw IoError(path + ":" + std::to_string(line_no) +
                      ": missing column " + headers[c + 1]);
      try {
        columns[c].push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(line_no) +
                      ": bad number '" + cell + "'");
      }
    }
  }
  TraceStore ts;
  for (std::size_t c = 0; c < columns.size(); ++c)
    ts.put(headers[c + 1], std::move(columns[c]));
  return ts;
}

// Adds `<id>_shape`, the series normalized to a 1.0 peak, and returns the
// observed peak value.
inline double normalize_to_peak(TraceStore& traces, const std::string& id) {
  const auto& raw = traces.get(id);
  double peak = 0.0;
  for (double v : raw) peak = std::max(peak, v);
  if (!(peak > 0.0)) throw IoError("trace '" + id + "' has no positive peak");
  std::vector<double> shape(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) shape[i] = raw[i] / peak;
  traces.put(id + "_shape", std::move(shape));
  return peak;
}

// ---------------------------------------------------------------------------
// Scenario cache: little-endian binary keyed by the content fingerprint.
// ---------------------------------------------------------------------------

namespace iodetail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(os, bits);
}
inline void put_str(std::ostream& os, const std::string& s) {
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
inline void put_series(std::ostream& os, const std::vector<double>& v) {
  put_u64(os, v.size());
  for (double x : v) put_f64(os, x);
}

inline std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    int c = is.get();
    if (c == EOF) throw IoError("scenario cache truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}
inline double get_f64(std::istream& is) {
  std::uint64_t bits = get_u64(is);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}
inline std::string get_str(std::istream& is) {
  auto n = get_u64(is);
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw IoError("scenario cache truncated");
  return s;
}
inline std::vector<double> get_series(std::istream& is) {
  auto n = get_u64(is);
  std::vector<double> v(n);
  for (auto& x : v) x = get_f64(is);
  return v;
}

}  // namespace iodetail

inline void write_scenario_cache(const ScenarioSet& set,
                                 const std::string& path) {
  using namespace iodetail;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write scenario cache: " + path);
  os.write("RADKSC01", 8);
  put_u64(os, set.seed);
  put_u64(os, set.count);
  put_u64(os, set.horizon.steps);
  put_f64(os, set.horizon.step_hours);
  put_f64(os, set.base_peak_mw);
  put_u64(os, set.options.block_days);
  put_u64(os, set.options.randomize_storage_initial ? 1 : 0);
  put_str(os, set.fingerprint);
  put_str(os, set.input_hash);
  for (const auto& sc : set.scenarios) {
    put_u64(os, sc.scenario_id);
    put_u64(os, sc.day_indices.size());
    for (auto d : sc.day_indices) put_u64(os, d);
    put_series(os, sc.p_u);
    put_series(os, sc.p_v);
    put_series(os, sc.load_mw);
    put_u64(os, sc.storage_initials.size());
    for (const auto& [id, v] : sc.storage_initials) {
      put_str(os, id);
      put_f64(os, v);
    }
    put_u64(os, sc.flex_baselines.size());
    for (const auto& [id, v] : sc.flex_baselines) {
      put_str(os, id);
      put_series(os, v);
      put_series(os, sc.flex_caps.at(id));
    }
    put_u64(os, sc.col.size());
    for (const auto& [id, cr] : sc.col) {
      put_str(os, id);
      put_series(os, cr.wind_mw);
      put_series(os, cr.baseline_mw);
    }
  }
  if (!os) throw IoError("write failed: " + path);
}

inline ScenarioSet read_scenario_cache(const std::string& path) {
  using namespace iodetail;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open scenario cache: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string(magic, 8) != "RADKSC01")
    throw IoError("not a scenario cache: " + path);
  ScenarioSet set;
  set.seed = get_u64(is);
  set.count = get_u64(is);
  set.horizon.steps = get_u64(is);
  set.horizon.step_hours = get_f64(is);
  set.base_peak_mw = get_f64(is);
  set.options.block_days = get_u64(is);
  set.options.randomize_storage_initial = get_u64(is) != 0;
  set.fingerprint = get_str(is);
  set.input_hash = get_str(is);
  set.scenarios.resize(set.count);
  for (auto& sc : set.scenarios) {
    sc.scenario_id = get_u64(is);
    sc.day_indices.resize(get_u64(is));
    for (auto& d : sc.day_indices) d = get_u64(is);
    sc.p_u = get_series(is);
    sc.p_v = get_series(is);
    sc.load_mw = get_series(is);
    auto nsto = get_u64(is);
    for (std::uint64_t i = 0; i < nsto; ++i) {
      auto id = get_str(is);
      sc.storage_initials[id] = get_f64(is);
    }
    auto nflex = get_u64(is);
    for (std::uint64_t i = 0; i < nflex; ++i) {
      auto id = get_str(is);
      sc.flex_baselines[id] = get_series(is);
      sc.flex_caps[id] = get_series(is);
    }
    auto ncol = get_u64(is);
    for (std::uint64_t i = 0; i < ncol; ++i) {
      auto id = get_str(is);
      ColRealization cr;
      cr.wind_mw = get_series(is);
      cr.baseline_mw = get_series(is);
      sc.col[id] = std::move(cr);
    }
  }
  if (fingerprint_scenarios(set) != set.fingerprint)
    throw IoError("scenario cache corrupt: fingerprint mismatch");
  return set;
}

// ---------------------------------------------------------------------------
// Report writers
// ---------------------------------------------------------------------------

inline nlohmann::json provenance(const std::string& config_hash,
                                 const std::string& fingerprint,
                                 double feas_tol, double opt_tol) {
  return {{"tool_version", kToolVersion},
          {"config_hash", config_hash},
          {"scenario_fingerprint", fingerprint},
          {"feas_tol", feas_tol},
          {"opt_tol", opt_tol}};
}

// One row per step with aggregate trajectories.
inline void write_dispatch_csv(const SystemResources& res, const Scenario& sc,
                               const std::vector<double>& load_mw,
                               const DispatchResult& r, std::ostream& os) {
  os << "t,load_mw,p_u_mw,p_v_mw,shortfall_mw,flex_consumption_mw,"
        "flex_reduction_mw,storage_charge_mw,storage_discharge_mw,"
        "storage_soc_mwh,col_draw_mw,col_fc_mw,col_wind_to_grid_mw,"
        "col_wind_spill_mw,col_tank_mwh_h2,unserved_mw,curtailment_mw\n";
  const std::size_t T = res.horizon.steps;
  for (std::size_t t = 0; t < T; ++t) {
    double ch = 0.0, dis = 0.0, soc = 0.0;
    for (const auto& s : r.storage) {
      ch += s.charge_mw[t];
      dis += s.discharge_mw[t];
      soc += s.soc_mwh[t + 1];
    }
    double draw = 0.0, fc = 0.0, w2g = 0.0, spill = 0.0, tank = 0.0;
    for (const auto& c : r.colocated) {
      draw += c.steps[t].ely_draw_mw;
      fc += c.steps[t].fc_out_mw;
      w2g += c.steps[t].wind_to_grid_mw;
      spill += c.steps[t].wind_spill_mw;
      tank += c.steps[t].tank_mwh_h2;
    }
    os << t << ',' << load_mw[t] << ',' << sc.p_u[t] << ',' << sc.p_v[t] << ','
       << r.shortfall_mw[t] << ',' << r.flex_consumption_mw[t] << ','
       << r.flex_reduction_mw[t] << ',' << ch << ',' << dis << ',' << soc
       << ',' << draw << ',' << fc << ',' << w2g << ',' << spill << ','
       << tank << ',' << r.unserved_mw[t] << ',' << r.curtailment_mw[t]
       << '\n';
  }
}

inline nlohmann::json dispatch_summary_json(const DispatchResult& r) {
  return {{"eue_mwh", r.eue_mwh},
          {"lole_steps", r.lole_steps},
          {"peak_shortfall_mw", r.peak_shortfall_mw},
          {"lp_iterations", r.lp_iterations}};
}

inline nlohmann::json elcc_result_json(const ElccResult& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& [d, v] : r.trace) trace.push_back({{"delta_mw", d}, {"metric", v}});
  return {{"elcc_mw", r.delta_mw},
          {"baseline_metric", r.baseline_metric},
          {"matched_metric", r.matched_metric},
          {"residual", r.residual},
          {"iterations", r.iterations},
          {"iteration_bound", r.iteration_bound},
          {"scenario_fingerprint", r.scenario_fingerprint},
          {"trace", trace},
          {"per_scenario_baseline", r.per_scenario_baseline}};
}

}  // namespace radk
