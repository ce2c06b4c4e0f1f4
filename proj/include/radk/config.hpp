// Study configuration: one JSON document covering the system, the scenario
// generator, solver tolerances, the study request, and file paths. Unknown
// keys are rejected so typos fail loudly instead of silently defaulting.
#pragma once

#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "radk/common.hpp"
#include "radk/elcc.hpp"
#include "radk/heuristic.hpp"
#include "radk/model.hpp"
#include "radk/scenario.hpp"

namespace radk {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StudyConfig {
  SystemResources system;
  LoadModel load;  // trace id refers to the raw CSV column; the CLI
                   // normalizes it into "<id>_shape" before use

  std::size_t scenario_count = 100;
  std::uint64_t seed = 1;
  GenOptions gen;

  double feas_tol = 1e-6;
  double opt_tol = 1e-6;
  double lole_eps = 1e-4;

  ReliabilityMetric metric = ReliabilityMetric::EUE;
  double epsilon = 1e-6;
  double delta_lo = 0.0;
  double delta_hi = 10.0;
  double delta_resolution = 0.01;
  BenchmarkMode benchmark = BenchmarkMode::LoadIncrease;
  double reference_efor = 0.05;
  double reference_mean_repair_hours = 24.0;
  std::optional<double> target_metric;
  ResourceAddition addition;
  std::vector<double> scaling_factors;
  PriorityConfig priority;

  std::string traces_path;
  std::string output_dir = ".";
  std::string scenario_cache = "scenarios.bin";

  std::string config_hash;  // hash of the canonical JSON text
  nlohmann::json raw;       // parsed document, echoed into reports
};

namespace cfgdetail {

using nlohmann::json;

inline void expect_keys(const json& j, const std::string& where,
                        std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key()))
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T get_req(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key))
    throw ConfigError(where + ": missing required key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

inline UnlimitedUnit parse_unlimited(const json& j, const std::string& where) {
  expect_keys(j, where, {"id", "capacity_mw", "efor", "mean_repair_hours"});
  UnlimitedUnit u;
  u.id = get_req<std::string>(j, where, "id");
  u.capacity_mw = get_req<double>(j, where, "capacity_mw");
  u.efor = get_or<double>(j, "efor", 0.0);
  u.mean_repair_hours = get_or<double>(j, "mean_repair_hours", 24.0);
  return u;
}

inline VariableUnit parse_variable(const json& j, const std::string& where) {
  expect_keys(j, where, {"id", "capacity_mw", "trace"});
  return {get_req<std::string>(j, where, "id"),
          get_req<double>(j, where, "capacity_mw"),
          get_req<std::string>(j, where, "trace")};
}

inline StorageUnit parse_storage(const json& j, const std::string& where) {
  expect_keys(j, where,
              {"id", "p_charge_max_mw", "p_discharge_max_mw", "e_min_mwh",
               "e_max_mwh", "eta_charge", "initial_soc_mwh"});
  StorageUnit s;
  s.id = get_req<std::string>(j, where, "id");
  s.p_charge_max_mw = get_req<double>(j, where, "p_charge_max_mw");
  s.p_discharge_max_mw = get_req<double>(j, where, "p_discharge_max_mw");
  s.e_min_mwh = get_or<double>(j, "e_min_mwh", 0.0);
  s.e_max_mwh = get_req<double>(j, where, "e_max_mwh");
  s.eta_charge = get_or<double>(j, "eta_charge", 1.0);
  s.initial_soc_mwh = get_req<double>(j, where, "initial_soc_mwh");
  return s;
}

inline FlexibleDemandUnit parse_flexible(const json& j,
                                         const std::string& where) {
  expect_keys(j, where, {"id", "baseline_trace", "reduction_cap_trace"});
  return {get_req<std::string>(j, where, "id"),
          get_req<std::string>(j, where, "baseline_trace"),
          get_req<std::string>(j, where, "reduction_cap_trace")};
}

inline HydrogenPortfolio parse_colocated(const json& j,
                                         const std::string& where) {
  expect_keys(j, where,
              {"id", "wind_capacity_mw", "wind_trace", "ely_nominal_mw",
               "ely_dr_fraction", "ely_eff_mwh_h2_per_mwh_e", "fc_max_mw",
               "fc_eff_mwh_e_per_mwh_h2", "tank_max_mwh_h2",
               "tank_initial_mwh_h2", "ely_sales_floor_mw"});
  HydrogenPortfolio p;
  p.id = get_req<std::string>(j, where, "id");
  p.wind_capacity_mw = get_or<double>(j, "wind_capacity_mw", 0.0);
  p.wind_trace_id = get_or<std::string>(j, "wind_trace", "");
  p.ely_nominal_mw = get_req<double>(j, where, "ely_nominal_mw");
  p.ely_dr_fraction = get_or<double>(j, "ely_dr_fraction", 0.0);
  p.ely_eff_mwh_h2_per_mwh_e = get_or<double>(j, "ely_eff_mwh_h2_per_mwh_e", 0.7);
  p.fc_max_mw = get_or<double>(j, "fc_max_mw", 0.0);
  p.fc_eff_mwh_e_per_mwh_h2 = get_or<double>(j, "fc_eff_mwh_e_per_mwh_h2", 0.5);
  p.tank_max_mwh_h2 = get_or<double>(j, "tank_max_mwh_h2", 0.0);
  p.tank_initial_mwh_h2 = get_or<double>(j, "tank_initial_mwh_h2", 0.0);
  p.ely_sales_floor_mw = get_or<double>(j, "ely_sales_floor_mw", -1.0);
  return p;
}

inline void parse_units(const json& j, const std::string& where,
                        SystemResources& res) {
  expect_keys(j, where,
              {"horizon", "unlimited", "variable", "storage", "flexible",
               "colocated"});
  const json& hz = j.contains("horizon") ? j.at("horizon") : json::object();
  expect_keys(hz, where + ".horizon", {"steps", "step_hours"});
  res.horizon.steps = get_or<std::size_t>(hz, "steps", 24);
  res.horizon.step_hours = get_or<double>(hz, "step_hours", 1.0);
  if (j.contains("unlimited"))
    for (std::size_t i = 0; i < j.at("unlimited").size(); ++i)
      res.unlimited.push_back(parse_unlimited(
          j.at("unlimited")[i], where + ".unlimited[" + std::to_string(i) + "]"));
  if (j.contains("variable"))
    for (std::size_t i = 0; i < j.at("variable").size(); ++i)
      res.variable.push_back(parse_variable(
          j.at("variable")[i], where + ".variable[" + std::to_string(i) + "]"));
  if (j.contains("storage"))
    for (std::size_t i = 0; i < j.at("storage").size(); ++i)
      res.storage.push_back(parse_storage(
          j.at("storage")[i], where + ".storage[" + std::to_string(i) + "]"));
  if (j.contains("flexible"))
    for (std::size_t i = 0; i < j.at("flexible").size(); ++i)
      res.flexible.push_back(parse_flexible(
          j.at("flexible")[i], where + ".flexible[" + std::to_string(i) + "]"));
  if (j.contains("colocated"))
    for (std::size_t i = 0; i < j.at("colocated").size(); ++i)
      res.colocated.push_back(parse_colocated(
          j.at("colocated")[i], where + ".colocated[" + std::to_string(i) + "]"));
}

}  // namespace cfgdetail

inline StudyConfig parse_config(const nlohmann::json& j) {
  using namespace cfgdetail;
  expect_keys(j, "config",
              {"system", "load", "scenario", "solver", "study", "paths"});
  StudyConfig cfg;

  if (!j.contains("system")) throw ConfigError("config: missing 'system'");
  parse_units(j.at("system"), "system", cfg.system);

  if (!j.contains("load")) throw ConfigError("config: missing 'load'");
  const json& jl = j.at("load");
  expect_keys(jl, "load", {"peak_mw", "trace"});
  cfg.load.peak_mw = get_req<double>(jl, "load", "peak_mw");
  cfg.load.load_trace_id = get_req<std::string>(jl, "load", "trace");

  if (j.contains("scenario")) {
    const json& js = j.at("scenario");
    expect_keys(js, "scenario",
                {"count", "seed", "block_days", "randomize_storage_initial"});
    cfg.scenario_count = get_or<std::size_t>(js, "count", 100);
    cfg.seed = get_or<std::uint64_t>(js, "seed", 1);
    cfg.gen.block_days = get_or<std::size_t>(js, "block_days", 1);
    cfg.gen.randomize_storage_initial =
        get_or<bool>(js, "randomize_storage_initial", false);
  }

  if (j.contains("solver")) {
    const json& js = j.at("solver");
    expect_keys(js, "solver", {"feas_tol", "opt_tol", "lole_eps"});
    cfg.feas_tol = get_or<double>(js, "feas_tol", 1e-6);
    cfg.opt_tol = get_or<double>(js, "opt_tol", 1e-6);
    cfg.lole_eps = get_or<double>(js, "lole_eps", 1e-4);
  }

  if (j.contains("study")) {
    const json& js = j.at("study");
    expect_keys(js, "study",
                {"metric", "epsilon", "delta_lo", "delta_hi",
                 "delta_resolution", "benchmark", "reference_efor",
                 "reference_mean_repair_hours", "target_metric", "addition",
                 "scaling_factors", "priority"});
    std::string metric = get_or<std::string>(js, "metric", "eue");
    if (metric == "eue")
      cfg.metric = ReliabilityMetric::EUE;
    else if (metric == "lole")
      cfg.metric = ReliabilityMetric::LOLE;
    else
      throw ConfigError("study.metric must be 'eue' or 'lole'");
    cfg.epsilon = get_or<double>(js, "epsilon", 1e-6);
    cfg.delta_lo = get_or<double>(js, "delta_lo", 0.0);
    cfg.delta_hi = get_or<double>(js, "delta_hi", 10.0);
    cfg.delta_resolution = get_or<double>(js, "delta_resolution", 0.01);
    std::string mode = get_or<std::string>(js, "benchmark", "load-increase");
    if (mode == "load-increase")
      cfg.benchmark = BenchmarkMode::LoadIncrease;
    else if (mode == "perfect-generator")
      cfg.benchmark = BenchmarkMode::PerfectGenerator;
    else if (mode == "reference-unit")
      cfg.benchmark = BenchmarkMode::ReferenceUnit;
    else
      throw ConfigError("study.benchmark must be load-increase, "
                        "perfect-generator, or reference-unit");
    cfg.reference_efor = get_or<double>(js, "reference_efor", 0.05);
    cfg.reference_mean_repair_hours =
        get_or<double>(js, "reference_mean_repair_hours", 24.0);
    if (js.contains("target_metric") && !js.at("target_metric").is_null())
      cfg.target_metric = js.at("target_metric").get<double>();
    if (js.contains("addition")) {
      SystemResources add;
      parse_units(js.at("addition"), "study.addition", add);
      cfg.addition.unlimited = add.unlimited;
      cfg.addition.variable = add.variable;
      cfg.addition.storage = add.storage;
      cfg.addition.flexible = add.flexible;
      cfg.addition.colocated = add.colocated;
    }
    if (js.contains("scaling_factors"))
      cfg.scaling_factors = js.at("scaling_factors").get<std::vector<double>>();
    if (js.contains("priority")) {
      const json& jp = js.at("priority");
      expect_keys(jp, "study.priority", {"charge_order", "discharge_order"});
      std::string co = get_or<std::string>(jp, "charge_order", "eta_desc");
      std::string dis = get_or<std::string>(jp, "discharge_order", "duration_desc");
      if (co == "eta_desc")
        cfg.priority.charge_order = ChargeOrder::EtaDescending;
      else if (co == "list")
        cfg.priority.charge_order = ChargeOrder::ListOrder;
      else
        throw ConfigError("priority.charge_order must be eta_desc or list");
      if (dis == "duration_desc")
        cfg.priority.discharge_order = DischargeOrder::DurationDescending;
      else if (dis == "list")
        cfg.priority.discharge_order = DischargeOrder::ListOrder;
      else
        throw ConfigError("priority.discharge_order must be duration_desc or list");
    }
  }

  if (j.contains("paths")) {
    const json& jp = j.at("paths");
    expect_keys(jp, "paths", {"traces", "output_dir", "scenario_cache"});
    cfg.traces_path = get_or<std::string>(jp, "traces", "");
    cfg.output_dir = get_or<std::string>(jp, "output_dir", ".");
    cfg.scenario_cache = get_or<std::string>(jp, "scenario_cache", "scenarios.bin");
  }

  Fnv1a h;
  h.add(j.dump());
  cfg.config_hash = h.hex();
  cfg.raw = j;
  return cfg;
}

inline StudyConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

// Scales the nameplate of every unit in an addition (capacity sweeps).
// Flexible-demand additions have trace-valued sizes and cannot be scaled
// this way.
inline ResourceAddition scale_addition(const ResourceAddition& add,
                                       double factor) {
  if (!add.flexible.empty())
    throw ConfigError("scaling_factors cannot scale flexible-demand additions");
  ResourceAddition out = add;
  for (auto& u : out.unlimited) u.capacity_mw *= factor;
  for (auto& v : out.variable) v.capacity_mw *= factor;
  for (auto& s : out.storage) {
    s.p_charge_max_mw *= factor;
    s.p_discharge_max_mw *= factor;
    s.e_min_mwh *= factor;
    s.e_max_mwh *= factor;
    s.initial_soc_mwh *= factor;
  }
  for (auto& c : out.colocated) {
    c.wind_capacity_mw *= factor;
    c.ely_nominal_mw *= factor;
    c.fc_max_mw *= factor;
    c.tank_max_mwh_h2 *= factor;
    c.tank_initial_mwh_h2 *= factor;
    if (c.ely_sales_floor_mw > 0.0) c.ely_sales_floor_mw *= factor;
  }
  return out;
}

}  // namespace radk
