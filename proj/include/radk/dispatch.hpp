// Per-scenario reliability loss minimization: the convex dispatch LP with
// flexible demand folded in closed form, plus post-processing to a
// physically meaningful storage trajectory and the derived reliability
// metrics (EUE is the objective, LOLE a diagnostic of the result).
#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "radk/colocated.hpp"
#include "radk/lp.hpp"
#include "radk/model.hpp"

namespace radk {

struct DispatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Net shortfall before flexible scheduling:
// S_t = D_t + sum(flex baselines) + sum(col baselines) - P^U_t - P^V_t.
inline std::vector<double> shortfall_series(const Scenario& sc,
                                            const std::vector<double>& load_mw) {
  const std::size_t T = load_mw.size();
  std::vector<double> s(T, 0.0);
  for (std::size_t t = 0; t < T; ++t)
    s[t] = load_mw[t] - sc.p_u[t] - sc.p_v[t];
  for (const auto& [id, base] : sc.flex_baselines)
    for (std::size_t t = 0; t < T; ++t) s[t] += base[t];
  for (const auto& [id, cr] : sc.col)
    for (std::size_t t = 0; t < T; ++t) s[t] += cr.baseline_mw[t];
  return s;
}

inline double shortfall(const Scenario& sc, const std::vector<double>& load_mw,
                        std::size_t t) {
  return shortfall_series(sc, load_mw)[t];
}

// Closed-form aggregate flexible consumption: full baseline when S_t <= 0,
// otherwise the total reduction is min(total cap, shortfall). Folding this
// constant into the balance is what keeps the dispatch program linear.
struct FlexAggregate {
  double consumption_mw = 0.0;
  double reduction_mw = 0.0;
};

inline FlexAggregate aggregate_flex(const Scenario& sc, double s_t,
                                    std::size_t t) {
  double base = 0.0, cap = 0.0;
  for (const auto& [id, b] : sc.flex_baselines) base += b[t];
  for (const auto& [id, c] : sc.flex_caps) cap += c[t];
  FlexAggregate out;
  out.reduction_mw = s_t > 0.0 ? std::min(cap, s_t) : 0.0;
  out.consumption_mw = base - out.reduction_mw;
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch LP assembly
// ---------------------------------------------------------------------------

struct StorageVarBlock {
  int c0 = -1, d0 = -1, e0 = -1;  // charge, discharge, end-of-step SoC
};

struct BuiltDispatchLP {
  LinearProgram lp;
  std::vector<StorageVarBlock> sto;
  std::vector<ColVarBlock> col;
  int ue0 = -1, cur0 = -1;
  std::vector<double> S;          // shortfall series
  std::vector<double> flex_cons;  // folded aggregate flexible consumption
  std::vector<double> flex_red;
  std::vector<VarStatus> crash_basis;  // primal-feasible starting basis
};

// Builds the convex program. Row order: balance rows (one per step), then
// SoC chains per storage class, then tank chains and recharge caps per
// portfolio. The crash basis puts the chain variables and the deficit slack
// (UE or CUR) into the basis, which is primal feasible and triangular, so
// the solver skips phase 1 entirely.
inline BuiltDispatchLP build_lp(const SystemResources& res, const Scenario& sc,
                                const std::vector<double>& load_mw) {
  const std::size_t T = res.horizon.steps;
  const double h = res.horizon.step_hours;
  if (load_mw.size() != T || sc.p_u.size() != T || sc.p_v.size() != T)
    throw DispatchError("dispatch: series length does not match horizon");
  for (const auto& s : res.storage)
    if (!sc.storage_initials.count(s.id))
      throw DispatchError("dispatch: scenario lacks initial SoC for '" + s.id +
                          "'");
  for (const auto& c : res.colocated)
    if (!sc.col.count(c.id))
      throw DispatchError("dispatch: scenario lacks realization for '" + c.id +
                          "'");

  BuiltDispatchLP built;
  built.S = shortfall_series(sc, load_mw);
  built.flex_cons.resize(T);
  built.flex_red.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    auto fa = aggregate_flex(sc, built.S[t], t);
    built.flex_cons[t] = fa.consumption_mw;
    built.flex_red[t] = fa.reduction_mw;
  }

  LinearProgram& lp = built.lp;
  for (const auto& s : res.storage) {
    StorageVarBlock b;
    b.c0 = lp.num_vars();
    for (std::size_t t = 0; t < T; ++t) lp.add_var(0.0, s.p_charge_max_mw, 0.0);
    b.d0 = lp.num_vars();
    for (std::size_t t = 0; t < T; ++t)
      lp.add_var(0.0, s.p_discharge_max_mw, 0.0);
    b.e0 = lp.num_vars();
    for (std::size_t t = 0; t < T; ++t) lp.add_var(s.e_min_mwh, s.e_max_mwh, 0.0);
    built.sto.push_back(b);
  }
  for (const auto& c : res.colocated)
    built.col.push_back(add_col_variables(lp, c, sc.col.at(c.id), built.S));
  built.ue0 = lp.num_vars();
  for (std::size_t t = 0; t < T; ++t) lp.add_var(0.0, kInf, h);  // objective
  built.cur0 = lp.num_vars();
  for (std::size_t t = 0; t < T; ++t) lp.add_var(0.0, kInf, 0.0);

  // Balance rows: sum(dis) - sum(ch) + sum(fc + w2g - draw) + ue - cur
  //             = load + flex_cons - p_u - p_v.
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<int> idx;
    std::vector<double> val;
    for (const auto& b : built.sto) {
      idx.push_back(b.d0 + static_cast<int>(t));
      val.push_back(1.0);
      idx.push_back(b.c0 + static_cast<int>(t));
      val.push_back(-1.0);
    }
    for (const auto& b : built.col) {
      idx.push_back(b.fc0 + static_cast<int>(t));
      val.push_back(1.0);
      idx.push_back(b.w2g0 + static_cast<int>(t));
      val.push_back(1.0);
      idx.push_back(b.draw0 + static_cast<int>(t));
      val.push_back(-1.0);
    }
    idx.push_back(built.ue0 + static_cast<int>(t));
    val.push_back(1.0);
    idx.push_back(built.cur0 + static_cast<int>(t));
    val.push_back(-1.0);
    double rhs = load_mw[t] + built.flex_cons[t] - sc.p_u[t] - sc.p_v[t];
    lp.add_row(std::move(idx), std::move(val), Rel::EQ, rhs);
  }

  // SoC chains: e_t - e_{t-1} - eta*h*c_t + h*d_t = 0 (t=1 pins to s_i).
  for (std::size_t i = 0; i < res.storage.size(); ++i) {
    const auto& s = res.storage[i];
    const auto& b = built.sto[i];
    double s0 = sc.storage_initials.at(s.id);
    for (std::size_t t = 0; t < T; ++t) {
      std::vector<int> idx{b.e0 + static_cast<int>(t),
                           b.c0 + static_cast<int>(t),
                           b.d0 + static_cast<int>(t)};
      std::vector<double> val{1.0, -s.eta_charge * h, h};
      double rhs = 0.0;
      if (t == 0) {
        rhs = s0;
      } else {
        idx.push_back(b.e0 + static_cast<int>(t) - 1);
        val.push_back(-1.0);
      }
      lp.add_row(std::move(idx), std::move(val), Rel::EQ, rhs);
    }
  }

  for (std::size_t r = 0; r < res.colocated.size(); ++r)
    add_col_rows(lp, res.colocated[r], built.col[r], T, h);

  // Crash basis: chain variables, UE/CUR per balance row, slacks elsewhere.
  const int nvars = lp.num_vars();
  const int nrows = lp.num_rows();
  std::vector<VarStatus> basis(static_cast<std::size_t>(nvars + nrows),
                               VarStatus::AtLower);
  for (std::size_t r = 0; r < res.colocated.size(); ++r) {
    const auto& b = built.col[r];
    for (std::size_t t = 0; t < T; ++t) {
      basis[b.draw0 + t] = VarStatus::AtUpper;  // nominal draw
      basis[b.w2g0 + t] = VarStatus::AtUpper;   // all wind to grid
      basis[b.tank0 + t] = VarStatus::Basic;    // tank chain
    }
  }
  for (const auto& b : built.sto)
    for (std::size_t t = 0; t < T; ++t) basis[b.e0 + t] = VarStatus::Basic;
  for (std::size_t t = 0; t < T; ++t) {
    double deficit = load_mw[t] + built.flex_cons[t] - sc.p_u[t] - sc.p_v[t];
    for (const auto& [id, cr] : sc.col)
      deficit += cr.baseline_mw[t] - cr.wind_mw[t];
    basis[(deficit >= 0.0 ? built.ue0 : built.cur0) + t] = VarStatus::Basic;
  }
  // Recharge-cap rows sit after the chains; give them their slack columns.
  int row = static_cast<int>(T) * (1 + static_cast<int>(res.storage.size()));
  for (std::size_t r = 0; r < res.colocated.size(); ++r) {
    row += static_cast<int>(T);  // tank rows
    if (built.col[r].recharge) {
      for (std::size_t t = 0; t < T; ++t)
        basis[static_cast<std::size_t>(nvars + row + static_cast<int>(t))] =
            VarStatus::Basic;
      row += static_cast<int>(T);
    }
  }
  built.crash_basis = std::move(basis);
  return built;
}

// ---------------------------------------------------------------------------
// Dispatch result
// ---------------------------------------------------------------------------

struct StorageTrajectory {
  std::string id;
  std::vector<double> charge_mw, discharge_mw;
  std::vector<double> soc_mwh;  // T+1 values, soc_mwh[0] = initial
};

struct ColTrajectory {
  std::string id;
  std::vector<ColDecision> steps;
};

struct DispatchResult {
  std::vector<StorageTrajectory> storage;
  std::vector<ColTrajectory> colocated;
  std::vector<double> flex_consumption_mw;  // aggregate realized consumption
  std::vector<double> flex_reduction_mw;
  std::vector<double> shortfall_mw;  // S_t, for gating audits
  std::vector<double> unserved_mw, curtailment_mw;
  double eue_mwh = 0.0;
  long lole_steps = 0;
  double peak_shortfall_mw = 0.0;
  // Solver telemetry; the basis warm-starts the next solve of this scenario.
  std::vector<VarStatus> lp_basis;
  long lp_iterations = 0;
  double lp_objective_mwh = 0.0;
};

struct DispatchOptions {
  double feas_tol = 1e-6;
  double opt_tol = 1e-6;
  double lole_eps = 1e-4;  // MW threshold a step must exceed to count for LOLE
  const std::vector<VarStatus>* warm_basis = nullptr;
};

// Replaces simultaneous charge/discharge with the net flow that preserves
// the SoC trajectory. Freed grid power first pays down unserved energy,
// the remainder curtails, so the objective never degrades.
inline void postprocess_storage(const SystemResources& res,
                                DispatchResult& result) {
  const std::size_t T = res.horizon.steps;
  for (std::size_t i = 0; i < result.storage.size(); ++i) {
    auto& traj = result.storage[i];
    double eta = res.storage[i].eta_charge;
    for (std::size_t t = 0; t < T; ++t) {
      double c = traj.charge_mw[t], d = traj.discharge_mw[t];
      if (c <= 0.0 || d <= 0.0) continue;
      double delta = eta * c - d;  // SoC change per hour of step
      double c2 = 0.0, d2 = 0.0;
      if (delta >= 0.0)
        c2 = delta / eta;
      else
        d2 = -delta;
      double freed = (c - d) - (c2 - d2);
      traj.charge_mw[t] = c2;
      traj.discharge_mw[t] = d2;
      if (freed > 0.0) {
        double payoff = std::min(result.unserved_mw[t], freed);
        result.unserved_mw[t] -= payoff;
        result.curtailment_mw[t] += freed - payoff;
      }
    }
  }
}

namespace detail {

inline void finalize_metrics(const SystemResources& res, DispatchResult& r,
                             double lole_eps) {
  const double h = res.horizon.step_hours;
  r.eue_mwh = 0.0;
  r.lole_steps = 0;
  r.peak_shortfall_mw = 0.0;
  for (double ue : r.unserved_mw) {
    r.eue_mwh += ue * h;
    if (ue > lole_eps) ++r.lole_steps;
    r.peak_shortfall_mw = std::max(r.peak_shortfall_mw, ue);
  }
}

}  // namespace detail

inline DispatchResult dispatch_optimal(const SystemResources& res,
                                       const Scenario& sc,
                                       const std::vector<double>& load_mw,
                                       const DispatchOptions& opt = {}) {
  const std::size_t T = res.horizon.steps;
  auto built = build_lp(res, sc, load_mw);

  SolveOptions sopt;
  sopt.feas_tol = opt.feas_tol;
  sopt.opt_tol = opt.opt_tol;
  sopt.warm_basis = opt.warm_basis ? opt.warm_basis : &built.crash_basis;
  LPSolution sol = solve(built.lp, sopt);
  if (sol.status != LPStatus::Optimal && opt.warm_basis) {
    // Stale warm basis; retry from the crash basis before giving up.
    sopt.warm_basis = &built.crash_basis;
    sol = solve(built.lp, sopt);
  }
  if (sol.status != LPStatus::Optimal) {
    std::ostringstream msg;
    msg << "dispatch LP not optimal (scenario " << sc.scenario_id
        << ", status "
        << (sol.status == LPStatus::Infeasible
                ? "infeasible"
                : sol.status == LPStatus::Unbounded ? "unbounded" : "numerical")
        << "); the balance slacks make this impossible for well-formed input";
    throw DispatchError(msg.str());
  }

  DispatchResult r;
  r.shortfall_mw = built.S;
  r.flex_consumption_mw = built.flex_cons;
  r.flex_reduction_mw = built.flex_red;
  r.unserved_mw.assign(T, 0.0);
  r.curtailment_mw.assign(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    r.unserved_mw[t] = sol.x[built.ue0 + t];
    r.curtailment_mw[t] = sol.x[built.cur0 + t];
  }
  for (std::size_t i = 0; i < res.storage.size(); ++i) {
    const auto& s = res.storage[i];
    const auto& b = built.sto[i];
    StorageTrajectory traj;
    traj.id = s.id;
    traj.charge_mw.resize(T);
    traj.discharge_mw.resize(T);
    traj.soc_mwh.resize(T + 1);
    traj.soc_mwh[0] = sc.storage_initials.at(s.id);
    for (std::size_t t = 0; t < T; ++t) {
      traj.charge_mw[t] = sol.x[b.c0 + t];
      traj.discharge_mw[t] = sol.x[b.d0 + t];
      traj.soc_mwh[t + 1] = sol.x[b.e0 + t];
    }
    r.storage.push_back(std::move(traj));
  }
  for (std::size_t c = 0; c < res.colocated.size(); ++c) {
    const auto& p = res.colocated[c];
    ColTrajectory traj;
    traj.id = p.id;
    traj.steps = extract_col_decisions(sol.x, built.col[c], p, sc.col.at(p.id));
    r.colocated.push_back(std::move(traj));
  }

  postprocess_storage(res, r);
  detail::finalize_metrics(res, r, opt.lole_eps);
  r.lp_basis = std::move(sol.basis);
  r.lp_iterations = sol.iterations;
  r.lp_objective_mwh = sol.objective;
  return r;
}

// ---------------------------------------------------------------------------
// Constraint checker shared by tests and the heuristic dispatcher: verifies
// a DispatchResult against every constraint of the reliability optimization.
// ---------------------------------------------------------------------------

inline std::vector<Violation> check_dispatch(const SystemResources& res,
                                             const Scenario& sc,
                                             const std::vector<double>& load_mw,
                                             const DispatchResult& r,
                                             double tol = 1e-6) {
  using detail::add_violation;
  std::vector<Violation> out;
  const std::size_t T = res.horizon.steps;
  const double h = res.horizon.step_hours;
  auto S = shortfall_series(sc, load_mw);

  for (std::size_t t = 0; t < T; ++t) {
    // Power balance G_t = L_t.
    double gen = sc.p_u[t] + sc.p_v[t] + r.unserved_mw[t];
    double dem = load_mw[t] + r.flex_consumption_mw[t] + r.curtailment_mw[t];
    for (const auto& traj : r.storage) {
      gen += traj.discharge_mw[t];
      dem += traj.charge_mw[t];
    }
    for (const auto& traj : r.colocated) {
      gen += col_generation(traj.steps[t]);
      dem += col_consumption(traj.steps[t]);
    }
    if (std::fabs(gen - dem) > tol)
      add_violation(out, "", "balance", "G != L", static_cast<long>(t));
    if (r.unserved_mw[t] < -tol)
      add_violation(out, "", "unserved", "negative", static_cast<long>(t));
    if (r.curtailment_mw[t] < -tol)
      add_violation(out, "", "curtailment", "negative", static_cast<long>(t));

    // Flexible-demand gating.
    double cap = 0.0, base = 0.0;
    for (const auto& [id, c] : sc.flex_caps) cap += c[t];
    for (const auto& [id, b] : sc.flex_baselines) base += b[t];
    double red = r.flex_reduction_mw[t];
    if (std::fabs((base - red) - r.flex_consumption_mw[t]) > tol)
      add_violation(out, "", "flex", "consumption != baseline - reduction",
                    static_cast<long>(t));
    if (S[t] <= 0.0 && red > tol)
      add_violation(out, "", "flex", "reduction outside shortage",
                    static_cast<long>(t));
    if (red > std::min(cap, std::max(S[t], 0.0)) + tol)
      add_violation(out, "", "flex", "reduction above min(cap, shortfall)",
                    static_cast<long>(t));
  }

  for (std::size_t i = 0; i < r.storage.size(); ++i) {
    const auto& s = res.storage[i];
    const auto& traj = r.storage[i];
    double e = sc.storage_initials.at(s.id);
    if (std::fabs(traj.soc_mwh[0] - e) > tol)
      add_violation(out, s.id, "soc", "initial SoC mismatch", 0);
    for (std::size_t t = 0; t < T; ++t) {
      double c = traj.charge_mw[t], d = traj.discharge_mw[t];
      if (c < -tol || c > s.p_charge_max_mw + tol)
        add_violation(out, s.id, "charge", "outside limits",
                      static_cast<long>(t));
      if (d < -tol || d > s.p_discharge_max_mw + tol)
        add_violation(out, s.id, "discharge", "outside limits",
                      static_cast<long>(t));
      if (c != 0.0 && d != 0.0)
        add_violation(out, s.id, "complementarity",
                      "simultaneous charge and discharge",
                      static_cast<long>(t));
      e += s.eta_charge * c * h - d * h;
      if (std::fabs(traj.soc_mwh[t + 1] - e) > tol)
        add_violation(out, s.id, "soc", "dynamics violated",
                      static_cast<long>(t));
      if (e < s.e_min_mwh - tol || e > s.e_max_mwh + tol)
        add_violation(out, s.id, "soc", "outside bounds", static_cast<long>(t));
    }
  }

  for (std::size_t ci = 0; ci < r.colocated.size(); ++ci) {
    const auto& p = res.colocated[ci];
    const auto& traj = r.colocated[ci];
    const auto& real = sc.col.at(p.id);
    double tank = p.tank_initial_mwh_h2;
    for (std::size_t t = 0; t < T; ++t) {
      const ColDecision& d = traj.steps[t];
      double lo = min_ely_draw(p, S[t]);
      if (d.ely_draw_mw < lo - tol || d.ely_draw_mw > p.ely_nominal_mw + tol)
        add_violation(out, p.id, "ely_draw", "outside gated range",
                      static_cast<long>(t));
      if (d.fc_out_mw < -tol || d.fc_out_mw > p.fc_max_mw + tol)
        add_violation(out, p.id, "fc_out", "outside limits",
                      static_cast<long>(t));
      if (std::fabs(d.wind_to_grid_mw + d.wind_spill_mw - real.wind_mw[t]) >
          tol)
        add_violation(out, p.id, "wind", "split != realized wind",
                      static_cast<long>(t));
      if (d.wind_to_grid_mw < -tol || d.wind_spill_mw < -tol)
        add_violation(out, p.id, "wind", "negative split",
                      static_cast<long>(t));
      if (d.tank_charge_mw < -tol ||
          d.tank_charge_mw > std::max(0.0, d.ely_draw_mw - p.sales_floor()) + tol)
        add_violation(out, p.id, "tank_charge", "above draw minus sales floor",
                      static_cast<long>(t));
      if (std::fabs(d.tank_mwh_h2 - tank) > tol)
        add_violation(out, p.id, "tank", "inventory mismatch",
                      static_cast<long>(t));
      tank += p.ely_eff_mwh_h2_per_mwh_e * d.tank_charge_mw * h -
              d.fc_out_mw / p.fc_eff_mwh_e_per_mwh_h2 * h;
      if (tank < -tol || tank > p.tank_max_mwh_h2 + tol)
        add_violation(out, p.id, "tank", "outside [0, max]",
                      static_cast<long>(t));
    }
  }
  return out;
}

}  // namespace radk
