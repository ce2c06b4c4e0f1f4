// Rule-based chronological dispatch: a single forward pass with
// predetermined priorities and no look-ahead, standing in for the
// accreditation practice the optimal dispatcher is compared against. Its
// output satisfies every constraint of the reliability optimization, so its
// EUE can never beat the LP optimum.
#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "radk/dispatch.hpp"
#include "radk/model.hpp"

namespace radk {

enum class ChargeOrder { EtaDescending, ListOrder };
enum class DischargeOrder { DurationDescending, ListOrder };

struct PriorityConfig {
  ChargeOrder charge_order = ChargeOrder::EtaDescending;
  DischargeOrder discharge_order = DischargeOrder::DurationDescending;
};

inline DispatchResult dispatch_heuristic(const SystemResources& res,
                                         const Scenario& sc,
                                         const std::vector<double>& load_mw,
                                         const PriorityConfig& rules = {},
                                         double lole_eps = 1e-4) {
  const std::size_t T = res.horizon.steps;
  const double h = res.horizon.step_hours;
  const std::size_t ns = res.storage.size();
  const std::size_t nc = res.colocated.size();

  std::vector<std::size_t> charge_rank(ns), discharge_rank(ns);
  std::iota(charge_rank.begin(), charge_rank.end(), 0);
  std::iota(discharge_rank.begin(), discharge_rank.end(), 0);
  if (rules.charge_order == ChargeOrder::EtaDescending) {
    std::stable_sort(charge_rank.begin(), charge_rank.end(),
                     [&](std::size_t a, std::size_t b) {
                       return res.storage[a].eta_charge >
                              res.storage[b].eta_charge;
                     });
  }
  if (rules.discharge_order == DischargeOrder::DurationDescending) {
    auto duration = [&](std::size_t i) {
      const auto& s = res.storage[i];
      return s.p_discharge_max_mw > 0.0 ? s.e_max_mwh / s.p_discharge_max_mw
                                        : 0.0;
    };
    std::stable_sort(discharge_rank.begin(), discharge_rank.end(),
                     [&](std::size_t a, std::size_t b) {
                       return duration(a) > duration(b);
                     });
  }

  DispatchResult r;
  r.shortfall_mw = shortfall_series(sc, load_mw);
  r.flex_consumption_mw.assign(T, 0.0);
  r.flex_reduction_mw.assign(T, 0.0);
  r.unserved_mw.assign(T, 0.0);
  r.curtailment_mw.assign(T, 0.0);
  for (std::size_t i = 0; i < ns; ++i) {
    StorageTrajectory traj;
    traj.id = res.storage[i].id;
    traj.charge_mw.assign(T, 0.0);
    traj.discharge_mw.assign(T, 0.0);
    traj.soc_mwh.assign(T + 1, sc.storage_initials.at(res.storage[i].id));
    r.storage.push_back(std::move(traj));
  }
  for (std::size_t c = 0; c < nc; ++c) {
    ColTrajectory traj;
    traj.id = res.colocated[c].id;
    traj.steps.assign(T, ColDecision{});
    r.colocated.push_back(std::move(traj));
  }

  std::vector<double> soc(ns), tank(nc);
  for (std::size_t i = 0; i < ns; ++i) soc[i] = r.storage[i].soc_mwh[0];
  for (std::size_t c = 0; c < nc; ++c)
    tank[c] = res.colocated[c].tank_initial_mwh_h2;

  for (std::size_t t = 0; t < T; ++t) {
    const double S = r.shortfall_mw[t];
    double flex_base = 0.0, flex_cap = 0.0;
    for (const auto& [id, b] : sc.flex_baselines) flex_base += b[t];
    for (const auto& [id, c] : sc.flex_caps) flex_cap += c[t];

    double wind_total = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      const auto& real = sc.col.at(res.colocated[c].id);
      ColDecision& d = r.colocated[c].steps[t];
      d.tank_mwh_h2 = tank[c];
      d.ely_draw_mw = res.colocated[c].ely_nominal_mw;
      d.wind_to_grid_mw = real.wind_mw[t];  // never spill during operation
      d.wind_spill_mw = 0.0;
      wind_total += real.wind_mw[t];
    }

    if (S <= 0.0) {
      // Surplus hour: serve everything, charge storage by priority, top up
      // hydrogen tanks from electrolyzer headroom, curtail the rest.
      r.flex_consumption_mw[t] = flex_base;
      double surplus = -S + wind_total;
      for (std::size_t k = 0; k < ns; ++k) {
        std::size_t i = charge_rank[k];
        const auto& s = res.storage[i];
        double room = (s.e_max_mwh - soc[i]) / (s.eta_charge * h);
        double c = std::min({s.p_charge_max_mw, room, surplus});
        if (c < 0.0) c = 0.0;
        r.storage[i].charge_mw[t] = c;
        soc[i] += s.eta_charge * c * h;
        surplus -= c;
      }
      if (surplus > 0.0) {
        for (std::size_t c = 0; c < nc; ++c) {
          const auto& p = res.colocated[c];
          double headroom = p.ely_nominal_mw - p.sales_floor();
          if (headroom <= 0.0) continue;
          double space =
              (p.tank_max_mwh_h2 - tank[c]) / (p.ely_eff_mwh_h2_per_mwh_e * h);
          double chg = std::min(headroom, std::max(space, 0.0));
          r.colocated[c].steps[t].tank_charge_mw = chg;
          tank[c] += p.ely_eff_mwh_h2_per_mwh_e * chg * h;
        }
      }
    } else {
      // Shortage hour: storage, then flexible demand, then colocated DR,
      // then fuel cells; whatever is left goes unserved.
      double remaining = S - wind_total;
      for (std::size_t k = 0; k < ns; ++k) {
        std::size_t i = discharge_rank[k];
        if (remaining <= 0.0) break;
        const auto& s = res.storage[i];
        double avail = (soc[i] - s.e_min_mwh) / h;
        double d = std::min({s.p_discharge_max_mw, avail, remaining});
        if (d < 0.0) d = 0.0;
        r.storage[i].discharge_mw[t] = d;
        soc[i] -= d * h;
        remaining -= d;
      }
      double red = std::min(flex_cap, std::max(remaining, 0.0));
      r.flex_reduction_mw[t] = red;
      r.flex_consumption_mw[t] = flex_base - red;
      remaining -= red;
      for (std::size_t c = 0; c < nc; ++c) {
        if (remaining <= 0.0) break;
        const auto& p = res.colocated[c];
        ColDecision& d = r.colocated[c].steps[t];
        double min_draw = min_ely_draw(p, S);
        if (p.sales_floor() < p.ely_nominal_mw)
          min_draw = std::max(min_draw, p.sales_floor());
        double dr = std::min(p.ely_nominal_mw - min_draw,
                             std::max(remaining, 0.0));
        d.ely_draw_mw -= dr;
        remaining -= dr;
      }
      for (std::size_t c = 0; c < nc; ++c) {
        if (remaining <= 0.0) break;
        const auto& p = res.colocated[c];
        ColDecision& d = r.colocated[c].steps[t];
        double energy = tank[c] * p.fc_eff_mwh_e_per_mwh_h2 / h;
        double fc = std::min({p.fc_max_mw, energy, remaining});
        if (fc < 0.0) fc = 0.0;
        d.fc_out_mw = fc;
        tank[c] -= fc / p.fc_eff_mwh_e_per_mwh_h2 * h;
        remaining -= fc;
      }
    }

    // Close the balance exactly: the residual defines UE or curtailment.
    double gen = sc.p_u[t] + sc.p_v[t];
    double dem = load_mw[t] + r.flex_consumption_mw[t];
    for (std::size_t i = 0; i < ns; ++i) {
      gen += r.storage[i].discharge_mw[t];
      dem += r.storage[i].charge_mw[t];
      r.storage[i].soc_mwh[t + 1] = soc[i];
    }
    for (std::size_t c = 0; c < nc; ++c) {
      gen += col_generation(r.colocated[c].steps[t]);
      dem += col_consumption(r.colocated[c].steps[t]);
    }
    double diff = gen - dem;
    if (diff >= 0.0) {
      r.curtailment_mw[t] = diff;
    } else {
      r.unserved_mw[t] = -diff;
    }
  }

  detail::finalize_metrics(res, r, lole_eps);
  return r;
}

}  // namespace radk
