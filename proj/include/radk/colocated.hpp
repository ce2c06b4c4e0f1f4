// Colocated hydrogen portfolio: decision vector, aggregate output and
// consumption maps, and the linear constraint block embedded into the
// dispatch LP.
//
// Tank dynamics (MWh_H2, end-of-step):
//   tank_t = tank_{t-1} + ely_eff * tank_charge_t * h - fc_out_t / fc_eff * h
// where tank_charge is the electric-side charge flow, limited to the draw
// above the hydrogen sales floor: 0 <= tank_charge_t <= ely_draw_t - floor.
// With the default floor = nominal the charge flow is identically zero and
// the tank is a pre-filled reserve. Electrolyzer demand response is gated by
// the system shortfall exactly like flexible demand: the draw may fall below
// nominal only in steps with S_t > 0, by at most min(dr_fraction * nominal,
// S_t). The shortfall cap keeps reliability loss monotone in load; without
// it a marginal gate flip would hand the optimizer free energy to bank.
#pragma once

#include <vector>

#include "radk/lp.hpp"
#include "radk/model.hpp"

namespace radk {

// P^COL_{r,t}: the per-step operating point of one portfolio.
struct ColDecision {
  double ely_draw_mw = 0.0;
  double fc_out_mw = 0.0;
  double tank_mwh_h2 = 0.0;  // inventory at step start
  double wind_to_grid_mw = 0.0;
  double wind_spill_mw = 0.0;
  double tank_charge_mw = 0.0;  // electric-side flow into the tank
};

// g(.): aggregate colocated output seen by the grid.
inline double col_generation(const ColDecision& d) {
  return d.wind_to_grid_mw + d.fc_out_mw;
}

// l(.): aggregate colocated consumption seen by the grid.
inline double col_consumption(const ColDecision& d) { return d.ely_draw_mw; }

// Gated lower bound of the electrolyzer draw at one step.
inline double min_ely_draw(const HydrogenPortfolio& p, double shortfall) {
  if (shortfall <= 0.0) return p.ely_nominal_mw;
  double max_reduction =
      std::min(p.ely_nominal_mw * p.ely_dr_fraction, shortfall);
  return p.ely_nominal_mw - max_reduction;
}

// Variable block of one portfolio inside a dispatch LP. Offsets index the
// first step of each series; tank0 points at the end-of-step-1 inventory.
struct ColVarBlock {
  int draw0 = -1;
  int fc0 = -1;
  int tank0 = -1;
  int w2g0 = -1;
  int hchg0 = -1;  // -1 when the sales floor disables recharge
  bool recharge = false;
};

// Declares the portfolio's variables with their gating-dependent bounds.
// `shortfall[t] > 0` marks steps where demand response is permitted.
inline ColVarBlock add_col_variables(LinearProgram& lp,
                                     const HydrogenPortfolio& p,
                                     const ColRealization& real,
                                     const std::vector<double>& shortfall) {
  const std::size_t T = real.wind_mw.size();
  ColVarBlock b;
  b.recharge = p.sales_floor() < p.ely_nominal_mw;

  b.draw0 = lp.num_vars();
  for (std::size_t t = 0; t < T; ++t)
    lp.add_var(min_ely_draw(p, shortfall[t]), p.ely_nominal_mw, 0.0);
  b.fc0 = lp.num_vars();
  for (std::size_t t = 0; t < T; ++t) lp.add_var(0.0, p.fc_max_mw, 0.0);
  b.tank0 = lp.num_vars();
  for (std::size_t t = 0; t < T; ++t) lp.add_var(0.0, p.tank_max_mwh_h2, 0.0);
  b.w2g0 = lp.num_vars();
  for (std::size_t t = 0; t < T; ++t) lp.add_var(0.0, real.wind_mw[t], 0.0);
  if (b.recharge) {
    b.hchg0 = lp.num_vars();
    double headroom = p.ely_nominal_mw - p.sales_floor();
    for (std::size_t t = 0; t < T; ++t) lp.add_var(0.0, headroom, 0.0);
  }
  return b;
}

// Tank dynamics (EQ) and, when recharge is enabled, the sales-floor cap
// tank_charge_t - ely_draw_t <= -floor.
inline void add_col_rows(LinearProgram& lp, const HydrogenPortfolio& p,
                         const ColVarBlock& b, std::size_t T,
                         double step_hours) {
  const double in_coeff = p.ely_eff_mwh_h2_per_mwh_e * step_hours;
  const double out_coeff = step_hours / p.fc_eff_mwh_e_per_mwh_h2;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<int> idx;
    std::vector<double> val;
    int ti = b.tank0 + static_cast<int>(t);
    idx.push_back(ti);
    val.push_back(1.0);
    double rhs = 0.0;
    if (t == 0) {
      rhs = p.tank_initial_mwh_h2;
    } else {
      idx.push_back(ti - 1);
      val.push_back(-1.0);
    }
    idx.push_back(b.fc0 + static_cast<int>(t));
    val.push_back(out_coeff);
    if (b.recharge) {
      idx.push_back(b.hchg0 + static_cast<int>(t));
      val.push_back(-in_coeff);
    }
    lp.add_row(std::move(idx), std::move(val), Rel::EQ, rhs);
  }
  if (b.recharge) {
    for (std::size_t t = 0; t < T; ++t) {
      lp.add_row({b.hchg0 + static_cast<int>(t), b.draw0 + static_cast<int>(t)},
                 {1.0, -1.0}, Rel::LE, -p.sales_floor());
    }
  }
}

// Reads one portfolio's trajectory out of a solved dispatch LP.
inline std::vector<ColDecision> extract_col_decisions(
    const std::vector<double>& x, const ColVarBlock& b,
    const HydrogenPortfolio& p, const ColRealization& real) {
  const std::size_t T = real.wind_mw.size();
  std::vector<ColDecision> out(T);
  for (std::size_t t = 0; t < T; ++t) {
    ColDecision& d = out[t];
    d.ely_draw_mw = x[b.draw0 + t];
    d.fc_out_mw = x[b.fc0 + t];
    d.tank_mwh_h2 = t == 0 ? p.tank_initial_mwh_h2 : x[b.tank0 + t - 1];
    d.wind_to_grid_mw = x[b.w2g0 + t];
    d.wind_spill_mw = real.wind_mw[t] - d.wind_to_grid_mw;
    if (d.wind_spill_mw < 0.0) d.wind_spill_mw = 0.0;
    d.tank_charge_mw = b.recharge ? x[b.hchg0 + t] : 0.0;
  }
  return out;
}

}  // namespace radk
