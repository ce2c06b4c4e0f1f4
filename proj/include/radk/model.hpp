// Domain model: resource fleet, load, scenarios, and the transforms used by
// accreditation studies (validate / augment / scale_load / aggregate_classes).
//
// Conventions: MW and MWh throughout, hourly steps unless step_hours says
// otherwise. With step_hours = 1 power and per-step energy are numerically
// interchangeable; energy accumulation multiplies by step_hours explicitly.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "radk/traces.hpp"

namespace radk {

struct Horizon {
  std::size_t steps = 0;    // T
  double step_hours = 1.0;  // duration of one step
};

// Class U: conventional generation with forced outages.
struct UnlimitedUnit {
  std::string id;
  double capacity_mw = 0.0;
  double efor = 0.0;               // stationary unavailability probability
  double mean_repair_hours = 1.0;  // mean outage duration
};

// Class V: wind/solar, capacity factor trace in [0,1].
struct VariableUnit {
  std::string id;
  double capacity_mw = 0.0;
  std::string trace_id;
};

// Class STO: storage scheduled through SoC dynamics
// e_{t+1} = e_t + eta * charge - discharge.
struct StorageUnit {
  std::string id;
  double p_charge_max_mw = 0.0;
  double p_discharge_max_mw = 0.0;
  double e_min_mwh = 0.0;
  double e_max_mwh = 0.0;
  double eta_charge = 1.0;
  double initial_soc_mwh = 0.0;
};

// Class FLEX: load that can shed up to a per-step cap, but only during
// system shortage.
struct FlexibleDemandUnit {
  std::string id;
  std::string baseline_trace_id;       // nominal consumption, MW per step
  std::string reduction_cap_trace_id;  // max reduction, MW per step
};

// Class COL: colocated hydrogen portfolio (wind + electrolyzer + tank +
// fuel cell behind one interconnection). The electrolyzer is a
// flexible-demand component; the tank discharges through the fuel cell.
// Hydrogen production up to ely_sales_floor_mw (in electric-draw terms) is
// committed to sales; only draw above the floor may charge the tank, so the
// default floor = nominal disables recharge and the tank acts as a
// pre-filled reserve.
struct HydrogenPortfolio {
  std::string id;
  double wind_capacity_mw = 0.0;
  std::string wind_trace_id;
  double ely_nominal_mw = 0.0;
  double ely_dr_fraction = 0.0;         // max DR share of nominal draw
  double ely_eff_mwh_h2_per_mwh_e = 0.7;
  double fc_max_mw = 0.0;
  double fc_eff_mwh_e_per_mwh_h2 = 0.5;
  double tank_max_mwh_h2 = 0.0;
  double tank_initial_mwh_h2 = 0.0;
  double ely_sales_floor_mw = -1.0;  // -1: default to ely_nominal_mw

  double sales_floor() const {
    return ely_sales_floor_mw < 0.0 ? ely_nominal_mw : ely_sales_floor_mw;
  }
};

// The full parameterized fleet.
struct SystemResources {
  Horizon horizon;
  std::vector<UnlimitedUnit> unlimited;
  std::vector<VariableUnit> variable;
  std::vector<StorageUnit> storage;
  std::vector<FlexibleDemandUnit> flexible;
  std::vector<HydrogenPortfolio> colocated;
};

// Annual peak plus a normalized shape trace (max value 1.0).
struct LoadModel {
  double peak_mw = 0.0;
  std::string load_trace_id;
};

// A bundle of units added in one augmentation; any subset of classes.
struct ResourceAddition {
  std::vector<UnlimitedUnit> unlimited;
  std::vector<VariableUnit> variable;
  std::vector<StorageUnit> storage;
  std::vector<FlexibleDemandUnit> flexible;
  std::vector<HydrogenPortfolio> colocated;

  bool empty() const {
    return unlimited.empty() && variable.empty() && storage.empty() &&
           flexible.empty() && colocated.empty();
  }
};

// ---------------------------------------------------------------------------
// Scenario: one joint realization of availability, profiles, and load over
// the horizon. Generated once, then treated as immutable.
// ---------------------------------------------------------------------------

struct ColRealization {
  std::vector<double> wind_mw;      // realized colocated wind output
  std::vector<double> baseline_mw;  // gross electrolyzer draw baseline
};

struct Scenario {
  std::uint64_t scenario_id = 0;
  std::vector<std::size_t> day_indices;  // sampled day blocks (joint across series)
  std::vector<double> p_u;               // aggregate available conventional, MW
  std::vector<double> p_v;               // aggregate variable output, MW
  std::map<std::string, double> storage_initials;            // MWh per unit
  std::map<std::string, std::vector<double>> flex_baselines; // MW per unit
  std::map<std::string, std::vector<double>> flex_caps;      // MW per unit
  std::map<std::string, ColRealization> col;                 // per portfolio
  std::vector<double> load_mw;           // realized load at baseline peak
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string unit_id;  // offending unit, or "" for system-level issues
  std::string field;
  std::string message;
  long step = -1;  // step index when the violation is per-step
};

namespace detail {

inline void add_violation(std::vector<Violation>& out, std::string unit,
                          std::string field, std::string msg, long step = -1) {
  out.push_back({std::move(unit), std::move(field), std::move(msg), step});
}

inline bool check_trace(const TraceStore& traces, const std::string& trace_id,
                        std::size_t T, const std::string& unit,
                        const std::string& field, bool unit_interval,
                        std::vector<Violation>& out) {
  if (!traces.has(trace_id)) {
    add_violation(out, unit, field, "trace '" + trace_id + "' not found");
    return false;
  }
  const auto& s = traces.get(trace_id);
  if (s.size() < T) {
    add_violation(out, unit, field,
                  "trace '" + trace_id + "' shorter than horizon");
    return false;
  }
  if (unit_interval) {
    for (std::size_t t = 0; t < s.size(); ++t) {
      if (s[t] < 0.0 || s[t] > 1.0) {
        add_violation(out, unit, field,
                      "trace '" + trace_id + "' value outside [0,1]",
                      static_cast<long>(t));
        return false;
      }
    }
  }
  return true;
}

}  // namespace detail

// Returns the list of invariant violations; empty means well-formed.
inline std::vector<Violation> validate(const SystemResources& res,
                                       const LoadModel& load,
                                       const TraceStore& traces) {
  using detail::add_violation;
  std::vector<Violation> out;
  const std::size_t T = res.horizon.steps;

  if (T < 1) add_violation(out, "", "horizon.steps", "must be >= 1");
  if (!(res.horizon.step_hours > 0.0))
    add_violation(out, "", "horizon.step_hours", "must be > 0");

  std::map<std::string, int> ids;
  auto claim_id = [&](const std::string& id) {
    if (id.empty()) add_violation(out, id, "id", "empty id");
    if (++ids[id] == 2) add_violation(out, id, "id", "duplicate id");
  };

  for (const auto& u : res.unlimited) {
    claim_id(u.id);
    if (u.capacity_mw < 0) add_violation(out, u.id, "capacity_mw", "negative");
    if (u.efor < 0 || u.efor > 1)
      add_violation(out, u.id, "efor", "outside [0,1]");
    if (!(u.mean_repair_hours > 0))
      add_violation(out, u.id, "mean_repair_hours", "must be > 0");
  }
  for (const auto& v : res.variable) {
    claim_id(v.id);
    if (v.capacity_mw < 0) add_violation(out, v.id, "capacity_mw", "negative");
    detail::check_trace(traces, v.trace_id, T, v.id, "trace_id", true, out);
  }
  for (const auto& s : res.storage) {
    claim_id(s.id);
    if (s.p_charge_max_mw < 0)
      add_violation(out, s.id, "p_charge_max_mw", "negative");
    if (s.p_discharge_max_mw < 0)
      add_violation(out, s.id, "p_discharge_max_mw", "negative");
    if (!(s.eta_charge > 0 && s.eta_charge <= 1))
      add_violation(out, s.id, "eta_charge", "outside (0,1]");
    if (s.e_min_mwh > s.initial_soc_mwh || s.initial_soc_mwh > s.e_max_mwh)
      add_violation(out, s.id, "initial_soc_mwh",
                    "not within [e_min_mwh, e_max_mwh]");
  }
  for (const auto& f : res.flexible) {
    claim_id(f.id);
    bool ok_b = detail::check_trace(traces, f.baseline_trace_id, T, f.id,
                                    "baseline_trace_id", false, out);
    bool ok_c = detail::check_trace(traces, f.reduction_cap_trace_id, T, f.id,
                                    "reduction_cap_trace_id", false, out);
    if (ok_b && ok_c) {
      const auto& base = traces.get(f.baseline_trace_id);
      const auto& cap = traces.get(f.reduction_cap_trace_id);
      for (std::size_t t = 0; t < T; ++t) {
        if (cap[t] < 0.0 || cap[t] > base[t] + 1e-12) {
          add_violation(out, f.id, "reduction_cap_trace_id",
                        "cap outside [0, baseline]", static_cast<long>(t));
          break;
        }
      }
    }
  }
  for (const auto& c : res.colocated) {
    claim_id(c.id);
    if (c.wind_capacity_mw < 0)
      add_violation(out, c.id, "wind_capacity_mw", "negative");
    if (c.wind_capacity_mw > 0)
      detail::check_trace(traces, c.wind_trace_id, T, c.id, "wind_trace_id",
                          true, out);
    if (c.ely_nominal_mw < 0)
      add_violation(out, c.id, "ely_nominal_mw", "negative");
    if (c.ely_dr_fraction < 0 || c.ely_dr_fraction > 1)
      add_violation(out, c.id, "ely_dr_fraction", "outside [0,1]");
    if (!(c.ely_eff_mwh_h2_per_mwh_e > 0 && c.ely_eff_mwh_h2_per_mwh_e <= 1))
      add_violation(out, c.id, "ely_eff_mwh_h2_per_mwh_e", "outside (0,1]");
    if (!(c.fc_eff_mwh_e_per_mwh_h2 > 0 && c.fc_eff_mwh_e_per_mwh_h2 <= 1))
      add_violation(out, c.id, "fc_eff_mwh_e_per_mwh_h2", "outside (0,1]");
    if (c.ely_eff_mwh_h2_per_mwh_e * c.fc_eff_mwh_e_per_mwh_h2 > 1.0)
      add_violation(out, c.id, "efficiency", "round-trip efficiency > 1");
    if (c.fc_max_mw < 0) add_violation(out, c.id, "fc_max_mw", "negative");
    if (c.tank_max_mwh_h2 < 0)
      add_violation(out, c.id, "tank_max_mwh_h2", "negative");
    if (c.tank_initial_mwh_h2 < 0 || c.tank_initial_mwh_h2 > c.tank_max_mwh_h2)
      add_violation(out, c.id, "tank_initial_mwh_h2",
                    "outside [0, tank_max_mwh_h2]");
    if (c.sales_floor() < 0 || c.sales_floor() > c.ely_nominal_mw)
      add_violation(out, c.id, "ely_sales_floor_mw",
                    "outside [0, ely_nominal_mw]");
  }

  if (!(load.peak_mw > 0)) add_violation(out, "", "load.peak_mw", "must be > 0");
  if (detail::check_trace(traces, load.load_trace_id, T, "", "load.trace_id",
                          false, out)) {
    const auto& s = traces.get(load.load_trace_id);
    double mx = 0.0;
    for (double v : s) {
      if (v < 0.0) {
        add_violation(out, "", "load.trace_id", "negative load shape value");
        break;
      }
      mx = std::max(mx, v);
    }
    if (std::fabs(mx - 1.0) > 1e-9)
      add_violation(out, "", "load.trace_id", "shape max must equal 1.0");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transforms. All return new values; inputs are never modified.
// ---------------------------------------------------------------------------

// theta_R ⊕ addition. Throws on duplicate ids.
inline SystemResources augment(const SystemResources& res,
                               const ResourceAddition& add) {
  SystemResources out = res;
  std::map<std::string, int> ids;
  auto claim = [&](const std::string& id) {
    if (++ids[id] == 2)
      throw std::invalid_argument("augment: duplicate id '" + id + "'");
  };
  for (const auto& u : res.unlimited) claim(u.id);
  for (const auto& u : res.variable) claim(u.id);
  for (const auto& u : res.storage) claim(u.id);
  for (const auto& u : res.flexible) claim(u.id);
  for (const auto& u : res.colocated) claim(u.id);
  for (const auto& u : add.unlimited) { claim(u.id); out.unlimited.push_back(u); }
  for (const auto& u : add.variable) { claim(u.id); out.variable.push_back(u); }
  for (const auto& u : add.storage) { claim(u.id); out.storage.push_back(u); }
  for (const auto& u : add.flexible) { claim(u.id); out.flexible.push_back(u); }
  for (const auto& u : add.colocated) { claim(u.id); out.colocated.push_back(u); }
  return out;
}

// theta_D(delta): peak rises by delta_mw, shape unchanged. Realized step
// loads scale by (peak + delta) / peak wherever a realization is computed.
inline LoadModel scale_load(const LoadModel& load, double delta_mw) {
  double peak = load.peak_mw + delta_mw;
  if (!(peak > 0.0))
    throw std::invalid_argument("scale_load: resulting peak must be > 0");
  return LoadModel{peak, load.load_trace_id};
}

// Groups storage units by technical characteristics (eta rounded to 3
// decimals, duration ratio e_max / p_discharge rounded to 1 decimal) and
// merges flexible-demand units into a single unit with summed traces.
// U and V are already aggregated into capability series at scenario time;
// colocated portfolios are never merged. The supplied TraceStore gains the
// merged flexible-demand traces.
inline SystemResources aggregate_classes(const SystemResources& res,
                                         TraceStore& traces) {
  SystemResources out;
  out.horizon = res.horizon;
  out.unlimited = res.unlimited;
  out.variable = res.variable;
  out.colocated = res.colocated;

  // Storage classes keyed by (eta, duration).
  std::map<std::pair<long, long>, StorageUnit> classes;
  std::vector<std::pair<long, long>> order;
  for (const auto& s : res.storage) {
    long eta_key = std::lround(s.eta_charge * 1000.0);
    long dur_key = s.p_discharge_max_mw > 0.0
                       ? std::lround(s.e_max_mwh / s.p_discharge_max_mw * 10.0)
                       : -1;  // no-discharge units form their own class
    auto key = std::make_pair(eta_key, dur_key);
    auto it = classes.find(key);
    if (it == classes.end()) {
      order.push_back(key);
      StorageUnit merged = s;
      std::ostringstream name;
      name << "sto-class-eta" << eta_key << "-dur" << dur_key;
      merged.id = name.str();
      classes[key] = merged;
    } else {
      StorageUnit& m = it->second;
      m.p_charge_max_mw += s.p_charge_max_mw;
      m.p_discharge_max_mw += s.p_discharge_max_mw;
      m.e_min_mwh += s.e_min_mwh;
      m.e_max_mwh += s.e_max_mwh;
      m.initial_soc_mwh += s.initial_soc_mwh;
    }
  }
  if (classes.size() == res.storage.size()) {
    out.storage = res.storage;  // nothing merged; keep original ids
  } else {
    for (const auto& key : order) out.storage.push_back(classes[key]);
  }

  // Flexible demand merges into one unit with element-wise summed traces.
  if (res.flexible.size() <= 1) {
    out.flexible = res.flexible;
  } else {
    std::size_t len = SIZE_MAX;
    for (const auto& f : res.flexible) {
      len = std::min(len, traces.length(f.baseline_trace_id));
      len = std::min(len, traces.length(f.reduction_cap_trace_id));
    }
    std::vector<double> base(len, 0.0), cap(len, 0.0);
    for (const auto& f : res.flexible) {
      const auto& b = traces.get(f.baseline_trace_id);
      const auto& c = traces.get(f.reduction_cap_trace_id);
      for (std::size_t t = 0; t < len; ++t) {
        base[t] += b[t];
        cap[t] += c[t];
      }
    }
    std::string base_id = "flex-class-baseline";
    std::string cap_id = "flex-class-cap";
    while (traces.has(base_id)) base_id += "+";
    while (traces.has(cap_id)) cap_id += "+";
    traces.put(base_id, std::move(base));
    traces.put(cap_id, std::move(cap));
    out.flexible.push_back({"flex-class", base_id, cap_id});
  }
  return out;
}

}  // namespace radk
