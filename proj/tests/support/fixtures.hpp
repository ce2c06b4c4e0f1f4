// Builders shared by the unit tests and the acceptance suite: random small
// net-deficit instances with their system/scenario embedding, and the full
// toy-fixture system used for the wind/storage ELCC reproductions.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "radk/common.hpp"
#include "radk/model.hpp"
#include "radk/scenario.hpp"
#include "support/oracle.hpp"

namespace fixtures {

// Embeds an oracle::Instance into model types. The conventional fleet is a
// constant offset so the realized shortfall S_t equals the instance deficit
// exactly; flexible baselines equal their caps.
struct Embedded {
  radk::SystemResources res;
  radk::Scenario scenario;
  std::vector<double> load_mw;
};

inline Embedded embed_instance(const oracle::Instance& in) {
  const std::size_t T = in.deficit_mw.size();
  Embedded out;
  out.res.horizon = {T, in.step_hours};

  std::vector<double> cap_total(T, 0.0);
  for (std::size_t u = 0; u < in.flex_caps.size(); ++u)
    for (std::size_t t = 0; t < T; ++t) cap_total[t] += in.flex_caps[u][t];

  double offset = 0.0;
  for (std::size_t t = 0; t < T; ++t)
    offset = std::max(offset, cap_total[t] - in.deficit_mw[t]);
  offset = std::ceil(offset) + 1.0;

  out.scenario.scenario_id = 0;
  out.scenario.p_u.assign(T, offset);
  out.scenario.p_v.assign(T, 0.0);
  out.load_mw.resize(T);
  for (std::size_t t = 0; t < T; ++t)
    out.load_mw[t] = in.deficit_mw[t] + offset - cap_total[t];

  for (std::size_t i = 0; i < in.storage.size(); ++i) {
    const auto& s = in.storage[i];
    std::string id = "sto" + std::to_string(i);
    out.res.storage.push_back(
        {id, s.p_ch, s.p_dis, s.e_min, s.e_max, s.eta, s.s0});
    out.scenario.storage_initials[id] = s.s0;
  }
  for (std::size_t u = 0; u < in.flex_caps.size(); ++u) {
    std::string id = "flex" + std::to_string(u);
    out.res.flexible.push_back({id, id + "-base", id + "-cap"});
    out.scenario.flex_baselines[id] = in.flex_caps[u];
    out.scenario.flex_caps[id] = in.flex_caps[u];
  }
  return out;
}

inline double snap(double v, double g) { return std::round(v / g) * g; }

// Random instance on a 0.1 MW grid: T <= 6, up to two storage classes, up
// to one flexible unit, deficits in [-3, 3].
inline oracle::Instance random_instance(radk::Rng& rng, std::size_t max_sto = 2,
                                        std::size_t max_flex = 1,
                                        std::size_t max_T = 6) {
  oracle::Instance in;
  in.grid = 0.1;
  std::size_t T = 2 + rng.below(max_T - 1);
  in.deficit_mw.resize(T);
  for (auto& d : in.deficit_mw) d = snap(rng.uniform(-3.0, 3.0), 0.1);

  std::size_t ns = rng.below(max_sto + 1);
  for (std::size_t i = 0; i < ns; ++i) {
    oracle::Storage s;
    s.p_ch = snap(rng.uniform(0.2, 2.0), 0.1);
    s.p_dis = snap(rng.uniform(0.2, 2.0), 0.1);
    s.e_min = 0.0;
    s.e_max = snap(rng.uniform(0.5, 2.0), 0.1);
    s.eta = (rng.below(3) == 0) ? 1.0 : (rng.below(2) == 0 ? 0.9 : 0.8);
    double levels = std::floor(s.e_max / 0.1);
    s.s0 = 0.1 * static_cast<double>(rng.below(
                     static_cast<std::uint64_t>(levels) + 1));
    in.storage.push_back(s);
  }
  std::size_t nf = rng.below(max_flex + 1);
  for (std::size_t u = 0; u < nf; ++u) {
    std::vector<double> caps(T);
    for (auto& c : caps) c = snap(rng.uniform(0.0, 1.0), 0.1);
    in.flex_caps.push_back(caps);
  }
  return in;
}

// ---------------------------------------------------------------------------
// Toy-figure embedding: flat load at peak 8 MW, baseline supply via a
// variable unit whose profile realizes supply = peak - deficit, plus the
// wind / storage / joint additions.
// ---------------------------------------------------------------------------

struct ToySystem {
  radk::SystemResources res;
  radk::LoadModel load;
  radk::TraceStore traces;
  radk::ResourceAddition wind_add, storage_add, col_add;
};

inline ToySystem make_toy_system(const oracle::ToyCase& tc) {
  constexpr double kPeak = 8.0;
  constexpr std::size_t kPad = 24;  // one bootstrap day
  ToySystem f;
  f.res.horizon = {4, 1.0};
  f.load = {kPeak, "toy-load"};

  std::vector<double> load_shape(kPad, 0.0);
  for (std::size_t t = 0; t < 4; ++t) load_shape[t] = 1.0;
  load_shape[4] = 1.0;  // keep the max at 1.0 even outside the horizon
  f.traces.put("toy-load", load_shape);

  double cap = 0.0;
  for (double d : tc.deficit_mw) cap = std::max(cap, kPeak - d);
  std::vector<double> supply_cf(kPad, 0.0);
  for (std::size_t t = 0; t < 4; ++t)
    supply_cf[t] = (kPeak - tc.deficit_mw[t]) / cap;
  f.traces.put("toy-supply", supply_cf);
  f.res.variable.push_back({"base-supply", cap, "toy-supply"});

  std::vector<double> wind_cf(kPad, 0.0);
  for (std::size_t t = 0; t < 4; ++t) wind_cf[t] = tc.wind_mw[t] / 2.0;
  f.traces.put("toy-wind", wind_cf);

  radk::VariableUnit wind{"es-wind", 2.0, "toy-wind"};
  radk::StorageUnit sto{"es-sto", 5.0, 5.0, 0.0, 5.0, 1.0, 2.0};
  f.wind_add.variable.push_back(wind);
  f.storage_add.storage.push_back(sto);
  f.col_add.variable.push_back(wind);
  f.col_add.storage.push_back(sto);
  return f;
}

}  // namespace fixtures
