// Scenario generation Gen(.): N joint realizations of conventional
// availability (two-state Markov outage chains), variable output and load
// (joint day-block bootstrap), and flexible baselines. Generation is
// deterministic under a seed; every unit draws from its own stream keyed by
// (seed, scenario, unit id), so augmenting the resource set later realizes
// the new unit without disturbing any baseline series.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "radk/common.hpp"
#include "radk/model.hpp"
#include "radk/traces.hpp"

namespace radk {

struct GenOptions {
  std::size_t block_days = 1;
  bool randomize_storage_initial = false;
};

struct ScenarioSet {
  std::uint64_t seed = 0;
  std::size_t count = 0;
  Horizon horizon;
  double base_peak_mw = 0.0;  // peak the load series was realized at
  GenOptions options;
  std::vector<Scenario> scenarios;
  std::string fingerprint;  // content hash over every series
  std::string input_hash;   // hash of (resources, load, traces, N, seed)
};

// Two-state availability chain. The per-step repair probability comes from
// the geometric mean-duration convention r = step/mean_repair; the failure
// probability from the stationary relation efor = f / (f + r). When that
// pushes f past 1, f is capped and r is re-derived so the stationary
// unavailability still equals efor (mean repair time gives way).
inline std::vector<std::uint8_t> sample_outage_path(double efor,
                                                    double mean_repair_hours,
                                                    std::size_t T,
                                                    double step_hours,
                                                    Rng& rng) {
  std::vector<std::uint8_t> up(T, 1);
  if (efor <= 0.0) return up;
  if (efor >= 1.0) {
    std::fill(up.begin(), up.end(), 0);
    return up;
  }
  double r = std::min(1.0, step_hours / mean_repair_hours);
  double f = r * efor / (1.0 - efor);
  if (f > 1.0) {
    f = 1.0;
    r = (1.0 - efor) / efor;
  }
  bool down = rng.bernoulli(efor);  // stationary start
  for (std::size_t t = 0; t < T; ++t) {
    up[t] = down ? 0 : 1;
    down = down ? !rng.bernoulli(r) : rng.bernoulli(f);
  }
  return up;
}

// Day-block resampling with replacement. Returns one source-day index per
// horizon day; the same indices are applied to load, wind and solar so
// cross-series correlation within a day block survives.
inline std::vector<std::size_t> bootstrap_blocks(std::size_t trace_days,
                                                 std::size_t horizon_days,
                                                 std::size_t block_days,
                                                 Rng& rng) {
  if (block_days < 1) throw std::invalid_argument("block_days must be >= 1");
  if (trace_days < block_days)
    throw std::invalid_argument("trace shorter than one block");
  std::vector<std::size_t> days;
  days.reserve(horizon_days);
  std::size_t starts = trace_days - block_days + 1;
  while (days.size() < horizon_days) {
    std::size_t s = static_cast<std::size_t>(rng.below(starts));
    for (std::size_t d = 0; d < block_days && days.size() < horizon_days; ++d)
      days.push_back(s + d);
  }
  return days;
}

namespace detail {

inline std::size_t steps_per_day(const Horizon& hz) {
  double spd = 24.0 / hz.step_hours;
  auto n = static_cast<std::size_t>(spd + 0.5);
  return n == 0 ? 1 : n;
}

// Maps a horizon step onto the sampled source step of a trace.
inline std::size_t map_step(const std::vector<std::size_t>& day_indices,
                            std::size_t spd, std::size_t t) {
  std::size_t day = t / spd;
  return day_indices[day] * spd + t % spd;
}

inline std::vector<double> sample_trace(const std::vector<double>& trace,
                                        const std::vector<std::size_t>& days,
                                        std::size_t spd, std::size_t T,
                                        double scale) {
  std::vector<double> out(T);
  for (std::size_t t = 0; t < T; ++t) out[t] = scale * trace[map_step(days, spd, t)];
  return out;
}

inline std::size_t trace_days_available(const TraceStore& traces,
                                        const SystemResources& res,
                                        const LoadModel& load,
                                        std::size_t spd) {
  std::size_t min_len = traces.length(load.load_trace_id);
  for (const auto& v : res.variable)
    min_len = std::min(min_len, traces.length(v.trace_id));
  for (const auto& c : res.colocated)
    if (c.wind_capacity_mw > 0)
      min_len = std::min(min_len, traces.length(c.wind_trace_id));
  return min_len / spd;
}

inline Scenario realize_one(const SystemResources& res, const LoadModel& load,
                            const TraceStore& traces, const GenOptions& opt,
                            std::uint64_t seed, std::uint64_t sid,
                            std::size_t trace_days) {
  const std::size_t T = res.horizon.steps;
  const double h = res.horizon.step_hours;
  const std::size_t spd = steps_per_day(res.horizon);
  const std::size_t horizon_days = (T + spd - 1) / spd;

  Scenario sc;
  sc.scenario_id = sid;
  Rng block_rng(derive_stream(seed, sid, "blocks"));
  sc.day_indices =
      bootstrap_blocks(trace_days, horizon_days, opt.block_days, block_rng);

  sc.p_u.assign(T, 0.0);
  for (const auto& u : res.unlimited) {
    Rng rng(derive_stream(seed, sid, "outage:" + u.id));
    auto path = sample_outage_path(u.efor, u.mean_repair_hours, T, h, rng);
    for (std::size_t t = 0; t < T; ++t)
      if (path[t]) sc.p_u[t] += u.capacity_mw;
  }
  sc.p_v.assign(T, 0.0);
  for (const auto& v : res.variable) {
    const auto& cf = traces.get(v.trace_id);
    for (std::size_t t = 0; t < T; ++t)
      sc.p_v[t] += v.capacity_mw * cf[map_step(sc.day_indices, spd, t)];
  }
  for (const auto& s : res.storage) {
    double soc = s.initial_soc_mwh;
    if (opt.randomize_storage_initial) {
      Rng rng(derive_stream(seed, sid, "soc:" + s.id));
      soc = rng.uniform(s.e_min_mwh, s.e_max_mwh);
    }
    sc.storage_initials[s.id] = soc;
  }
  for (const auto& f : res.flexible) {
    // Baselines are deterministic nominal profiles, not bootstrapped.
    const auto& base = traces.get(f.baseline_trace_id);
    const auto& cap = traces.get(f.reduction_cap_trace_id);
    sc.flex_baselines[f.id] = std::vector<double>(base.begin(), base.begin() + T);
    sc.flex_caps[f.id] = std::vector<double>(cap.begin(), cap.begin() + T);
  }
  for (const auto& c : res.colocated) {
    ColRealization cr;
    cr.baseline_mw.assign(T, c.ely_nominal_mw);
    if (c.wind_capacity_mw > 0) {
      cr.wind_mw = sample_trace(traces.get(c.wind_trace_id), sc.day_indices,
                                spd, T, c.wind_capacity_mw);
    } else {
      cr.wind_mw.assign(T, 0.0);
    }
    sc.col[c.id] = std::move(cr);
  }
  sc.load_mw = sample_trace(traces.get(load.load_trace_id), sc.day_indices, spd,
                            T, load.peak_mw);
  return sc;
}

inline void hash_scenario(Fnv1a& h, const Scenario& sc) {
  h.add(sc.scenario_id);
  h.add(static_cast<std::uint64_t>(sc.day_indices.size()));
  for (auto d : sc.day_indices) h.add(static_cast<std::uint64_t>(d));
  h.add(sc.p_u);
  h.add(sc.p_v);
  for (const auto& [id, v] : sc.storage_initials) {
    h.add(id);
    h.add(v);
  }
  for (const auto& [id, v] : sc.flex_baselines) {
    h.add(id);
    h.add(v);
  }
  for (const auto& [id, v] : sc.flex_caps) {
    h.add(id);
    h.add(v);
  }
  for (const auto& [id, cr] : sc.col) {
    h.add(id);
    h.add(cr.wind_mw);
    h.add(cr.baseline_mw);
  }
  h.add(sc.load_mw);
}

}  // namespace detail

// Identifies one generation request: same hash, same scenarios. Used to
// detect config/cache mismatches without regenerating.
inline std::string hash_generation_inputs(const SystemResources& res,
                                          const LoadModel& load,
                                          const TraceStore& traces,
                                          std::size_t N, std::uint64_t seed,
                                          const GenOptions& opt) {
  Fnv1a h;
  h.add(seed);
  h.add(static_cast<std::uint64_t>(N));
  h.add(static_cast<std::uint64_t>(res.horizon.steps));
  h.add(res.horizon.step_hours);
  h.add(static_cast<std::uint64_t>(opt.block_days));
  h.add(static_cast<std::uint64_t>(opt.randomize_storage_initial));
  for (const auto& u : res.unlimited) {
    h.add(u.id);
    h.add(u.capacity_mw);
    h.add(u.efor);
    h.add(u.mean_repair_hours);
  }
  for (const auto& v : res.variable) {
    h.add(v.id);
    h.add(v.capacity_mw);
    h.add(v.trace_id);
  }
  for (const auto& s : res.storage) {
    h.add(s.id);
    h.add(s.p_charge_max_mw);
    h.add(s.p_discharge_max_mw);
    h.add(s.e_min_mwh);
    h.add(s.e_max_mwh);
    h.add(s.eta_charge);
    h.add(s.initial_soc_mwh);
  }
  for (const auto& f : res.flexible) {
    h.add(f.id);
    h.add(f.baseline_trace_id);
    h.add(f.reduction_cap_trace_id);
  }
  for (const auto& c : res.colocated) {
    h.add(c.id);
    h.add(c.wind_capacity_mw);
    h.add(c.wind_trace_id);
    h.add(c.ely_nominal_mw);
    h.add(c.ely_dr_fraction);
    h.add(c.ely_eff_mwh_h2_per_mwh_e);
    h.add(c.fc_max_mw);
    h.add(c.fc_eff_mwh_e_per_mwh_h2);
    h.add(c.tank_max_mwh_h2);
    h.add(c.tank_initial_mwh_h2);
    h.add(c.sales_floor());
  }
  h.add(load.peak_mw);
  h.add(load.load_trace_id);
  for (const auto& [id, series] : traces.all()) {
    h.add(id);
    h.add(series);
  }
  return h.hex();
}

inline std::string fingerprint_scenarios(const ScenarioSet& set) {
  Fnv1a h;
  h.add(set.seed);
  h.add(static_cast<std::uint64_t>(set.count));
  h.add(static_cast<std::uint64_t>(set.horizon.steps));
  h.add(set.horizon.step_hours);
  h.add(set.base_peak_mw);
  h.add(static_cast<std::uint64_t>(set.options.block_days));
  h.add(static_cast<std::uint64_t>(set.options.randomize_storage_initial));
  for (const auto& sc : set.scenarios) detail::hash_scenario(h, sc);
  return h.hex();
}

// Gen(.): sample N fixed scenarios. Throws on invalid input (the caller is
// expected to have run validate()); deterministic for a fixed seed.
inline ScenarioSet generate(const SystemResources& res, const LoadModel& load,
                            const TraceStore& traces, std::size_t N,
                            std::uint64_t seed, const GenOptions& opt = {},
                            unsigned threads = 1) {
  if (N < 1) throw std::invalid_argument("generate: N must be >= 1");
  auto violations = validate(res, load, traces);
  if (!violations.empty())
    throw std::invalid_argument("generate: invalid system: " +
                                violations.front().field + " (" +
                                violations.front().message + ")");
  const std::size_t spd = detail::steps_per_day(res.horizon);
  std::size_t trace_days = detail::trace_days_available(traces, res, load, spd);
  if (trace_days < opt.block_days)
    throw std::invalid_argument("generate: traces shorter than one block");

  ScenarioSet set;
  set.seed = seed;
  set.count = N;
  set.horizon = res.horizon;
  set.base_peak_mw = load.peak_mw;
  set.options = opt;
  set.scenarios.resize(N);
  parallel_for(N, threads, [&](std::size_t n) {
    set.scenarios[n] = detail::realize_one(res, load, traces, opt, seed,
                                           static_cast<std::uint64_t>(n),
                                           trace_days);
  });
  set.fingerprint = fingerprint_scenarios(set);
  set.input_hash = hash_generation_inputs(res, load, traces, N, seed, opt);
  return set;
}

// Realizes an addition inside an existing scenario: baseline series stay
// identical, the new units draw from their own (seed, scenario, id) streams
// and reuse the scenario's sampled day blocks.
inline Scenario extend_scenario(const Scenario& base, const ScenarioSet& set,
                                const SystemResources& augmented_res,
                                const ResourceAddition& add,
                                const TraceStore& traces) {
  const std::size_t T = set.horizon.steps;
  const double h = set.horizon.step_hours;
  const std::size_t spd = detail::steps_per_day(set.horizon);
  std::size_t max_day = 0;
  for (std::size_t d : base.day_indices) max_day = std::max(max_day, d);
  auto check_trace = [&](const std::string& id) {
    if (!traces.has(id))
      throw std::invalid_argument("extend_scenario: trace '" + id +
                                  "' not found");
    if (traces.length(id) < (max_day + 1) * spd)
      throw std::invalid_argument("extend_scenario: trace '" + id +
                                  "' does not cover the sampled days");
  };
  for (const auto& v : add.variable) check_trace(v.trace_id);
  for (const auto& c : add.colocated)
    if (c.wind_capacity_mw > 0) check_trace(c.wind_trace_id);
  for (const auto& f : add.flexible) {
    if (!traces.has(f.baseline_trace_id) ||
        traces.length(f.baseline_trace_id) < T ||
        !traces.has(f.reduction_cap_trace_id) ||
        traces.length(f.reduction_cap_trace_id) < T)
      throw std::invalid_argument(
          "extend_scenario: flexible-demand traces missing or too short");
  }
  Scenario sc = base;
  for (const auto& u : add.unlimited) {
    Rng rng(derive_stream(set.seed, sc.scenario_id, "outage:" + u.id));
    auto path = sample_outage_path(u.efor, u.mean_repair_hours, T, h, rng);
    for (std::size_t t = 0; t < T; ++t)
      if (path[t]) sc.p_u[t] += u.capacity_mw;
  }
  for (const auto& v : add.variable) {
    const auto& cf = traces.get(v.trace_id);
    for (std::size_t t = 0; t < T; ++t)
      sc.p_v[t] += v.capacity_mw * cf[detail::map_step(sc.day_indices, spd, t)];
  }
  for (const auto& s : add.storage) {
    double soc = s.initial_soc_mwh;
    if (set.options.randomize_storage_initial) {
      Rng rng(derive_stream(set.seed, sc.scenario_id, "soc:" + s.id));
      soc = rng.uniform(s.e_min_mwh, s.e_max_mwh);
    }
    sc.storage_initials[s.id] = soc;
  }
  for (const auto& f : add.flexible) {
    const auto& base_tr = traces.get(f.baseline_trace_id);
    const auto& cap_tr = traces.get(f.reduction_cap_trace_id);
    sc.flex_baselines[f.id] =
        std::vector<double>(base_tr.begin(), base_tr.begin() + T);
    sc.flex_caps[f.id] = std::vector<double>(cap_tr.begin(), cap_tr.begin() + T);
  }
  for (const auto& c : add.colocated) {
    ColRealization cr;
    cr.baseline_mw.assign(T, c.ely_nominal_mw);
    if (c.wind_capacity_mw > 0) {
      cr.wind_mw = detail::sample_trace(traces.get(c.wind_trace_id),
                                        sc.day_indices, spd, T,
                                        c.wind_capacity_mw);
    } else {
      cr.wind_mw.assign(T, 0.0);
    }
    sc.col[c.id] = std::move(cr);
  }
  (void)augmented_res;
  return sc;
}

}  // namespace radk
