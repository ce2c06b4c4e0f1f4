// Bounded-variable linear programs and a self-contained revised simplex
// solver. This is the single numerical engine behind optimal dispatch; it
// has no external dependencies so the toolkit stays portable.
//
// Solver design:
//   * one slack column per <= row, one fixed [0,0] column per == row, so a
//     cold start always has an identity basis;
//   * sparse LU of the basis via singleton peeling plus a dense kernel for
//     whatever refuses to triangularize (dispatch bases are chain-structured
//     and peel almost completely);
//   * product-form eta updates between refactorizations;
//   * piecewise phase 1 (minimize total bound infeasibility of the basics),
//     which also digests warm-start bases that went stale;
//   * Dantzig pricing with a Bland fallback once progress stalls.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace radk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Rel { LE, EQ };

enum class LPStatus { Optimal, Infeasible, Unbounded, Numerical };

enum class VarStatus : unsigned char { AtLower, AtUpper, Basic, FreeZero };

struct LinearProgram {
  // Structural variables.
  std::vector<double> lo, hi, obj;
  // Sparse constraint rows.
  struct Row {
    std::vector<int> idx;
    std::vector<double> val;
    Rel rel = Rel::LE;
    double rhs = 0.0;
  };
  std::vector<Row> rows;

  int add_var(double lower, double upper, double cost) {
    if (lower > upper)
      throw std::invalid_argument("lp: variable bounds out of order");
    lo.push_back(lower);
    hi.push_back(upper);
    obj.push_back(cost);
    return static_cast<int>(lo.size()) - 1;
  }
  void add_row(std::vector<int> idx, std::vector<double> val, Rel rel,
               double rhs) {
    if (idx.size() != val.size())
      throw std::invalid_argument("lp: row index/value size mismatch");
    Row row;
    row.rel = rel;
    row.rhs = rhs;
    // Merge duplicate indices so the factorization sees one entry per cell.
    for (std::size_t k = 0; k < idx.size(); ++k) {
      int j = idx[k];
      if (j < 0 || j >= num_vars())
        throw std::invalid_argument("lp: row index out of range");
      if (!std::isfinite(val[k]))
        throw std::invalid_argument("lp: non-finite coefficient");
      bool merged = false;
      for (std::size_t q = 0; q < row.idx.size(); ++q)
        if (row.idx[q] == j) {
          row.val[q] += val[k];
          merged = true;
          break;
        }
      if (!merged) {
        row.idx.push_back(j);
        row.val.push_back(val[k]);
      }
    }
    rows.push_back(std::move(row));
  }
  int num_vars() const { return static_cast<int>(lo.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
};

struct LPSolution {
  LPStatus status = LPStatus::Numerical;
  std::vector<double> x;   // structural values (valid when Optimal)
  double objective = 0.0;
  double max_residual = 0.0;  // max primal feasibility violation
  std::vector<VarStatus> basis;  // structural + logical slots, for warm start
  long iterations = 0;
};

struct SolveOptions {
  double feas_tol = 1e-6;
  double opt_tol = 1e-6;
  long max_iterations = 0;  // 0: scale with problem size
  const std::vector<VarStatus>* warm_basis = nullptr;
};

namespace lpdetail {

struct Eta {
  int pos = 0;                     // basis position that pivoted
  std::vector<std::pair<int, double>> w;  // sparse spike, includes pos entry
  double wp = 1.0;
};

// LU factorization of the basis; dense kernel limited so a pathological
// basis fails loudly instead of thrashing.
class BasisLU {
 public:
  // cols[p] = sparse column (row, val) of the variable at basis position p.
  bool factor(int m, const std::vector<std::vector<std::pair<int, double>>>& cols) {
    m_ = m;
    lops_.assign(m, {});
    urows_.assign(m, {});
    pivot_val_.assign(m, 0.0);
    pivot_row_of_k_.assign(m, -1);
    pivot_pos_of_k_.assign(m, -1);

    // Working matrix in both row and column directions.
    std::vector<std::vector<std::pair<int, double>>> rowlist(m);
    std::vector<int> colcount(m), rowcount(m);
    for (int p = 0; p < m; ++p) {
      colcount[p] = static_cast<int>(cols[p].size());
      if (colcount[p] == 0) return false;  // structurally singular
      for (auto [r, v] : cols[p]) rowlist[r].push_back({p, v});
    }
    for (int r = 0; r < m; ++r) rowcount[r] = static_cast<int>(rowlist[r].size());

    std::vector<char> row_done(m, 0), col_done(m, 0);
    std::vector<std::vector<std::pair<int, double>>> work_cols = cols;

    auto col_entry_alive = [&](int p, int r) {
      return !row_done[r] && !col_done[p];
    };

    int k = 0;
    // Singleton peeling. Row singletons produce no fill because the pivot
    // row has a single entry; column singletons need no elimination at all.
    std::vector<int> stack;
    for (int r = 0; r < m; ++r)
      if (rowcount[r] == 1) stack.push_back(r | (1 << 30));
    for (int p = 0; p < m; ++p)
      if (colcount[p] == 1) stack.push_back(p);

    auto live_col_entries = [&](int p, std::vector<std::pair<int, double>>& out) {
      out.clear();
      for (auto [r, v] : work_cols[p])
        if (!row_done[r]) out.push_back({r, v});
    };

    std::vector<std::pair<int, double>> tmp;
    while (!stack.empty()) {
      int tag = stack.back();
      stack.pop_back();
      bool is_row = tag & (1 << 30);
      int idx = tag & ~(1 << 30);
      int pr = -1, pp = -1;
      if (is_row) {
        if (row_done[idx] || rowcount[idx] != 1) continue;
        pr = idx;
        for (auto [p, v] : rowlist[pr])
          if (col_entry_alive(p, pr)) { pp = p; break; }
        if (pp < 0) continue;
      } else {
        if (col_done[idx] || colcount[idx] != 1) continue;
        pp = idx;
        for (auto [r, v] : work_cols[pp])
          if (!row_done[r]) { pr = r; break; }
        if (pr < 0) continue;
      }
      double pval = 0.0;
      for (auto [r, v] : work_cols[pp])
        if (r == pr) pval = v;
      if (std::fabs(pval) < 1e-11) return false;

      // Record pivot k at (pr, pp).
      pivot_row_of_k_[k] = pr;
      pivot_pos_of_k_[k] = pp;
      pivot_val_[k] = pval;

      if (is_row) {
        // Row singleton: eliminate the other entries of column pp. The pivot
        // row has no other entries, so no fill is created.
        live_col_entries(pp, tmp);
        for (auto [r, v] : tmp) {
          if (r == pr) continue;
          lops_[k].push_back({r, v / pval});
          // Entry disappears from row r.
          if (--rowcount[r] == 1) stack.push_back(r | (1 << 30));
        }
        urows_[k] = {};  // pivot-only row
      } else {
        // Column singleton: nothing to eliminate; remaining row entries form
        // the U row.
        for (auto [p, v] : rowlist[pr]) {
          if (p == pp || col_done[p]) continue;
          bool alive = false;
          for (auto [r2, v2] : work_cols[p])
            if (r2 == pr && !row_done[r2]) alive = true;
          if (!alive) continue;
          urows_[k].push_back({p, v});
          if (--colcount[p] == 1) stack.push_back(p);
        }
      }
      row_done[pr] = 1;
      col_done[pp] = 1;
      ++k;
    }

    // Dense kernel over whatever is left.
    std::vector<int> krows, kcols;
    for (int r = 0; r < m; ++r)
      if (!row_done[r]) krows.push_back(r);
    for (int p = 0; p < m; ++p)
      if (!col_done[p]) kcols.push_back(p);
    int kn = static_cast<int>(krows.size());
    if (kn != static_cast<int>(kcols.size())) return false;
    if (kn > 0) {
      if (kn > kMaxKernel) return false;
      std::vector<double> dense(static_cast<std::size_t>(kn) * kn, 0.0);
      std::vector<int> rpos(m, -1);
      for (int i = 0; i < kn; ++i) rpos[krows[i]] = i;
      for (int j = 0; j < kn; ++j)
        for (auto [r, v] : work_cols[kcols[j]])
          if (!row_done[r]) dense[static_cast<std::size_t>(rpos[r]) * kn + j] += v;

      std::vector<int> kr = krows;  // current row (original index) per dense row
      for (int step = 0; step < kn; ++step) {
        int best = -1;
        double bestval = 0.0;
        for (int i = step; i < kn; ++i) {
          double v = std::fabs(dense[static_cast<std::size_t>(i) * kn + step]);
          if (v > bestval) { bestval = v; best = i; }
        }
        if (best < 0 || bestval < 1e-11) return false;
        if (best != step) {
          for (int j = 0; j < kn; ++j)
            std::swap(dense[static_cast<std::size_t>(best) * kn + j],
                      dense[static_cast<std::size_t>(step) * kn + j]);
          std::swap(kr[best], kr[step]);
        }
        int pr = kr[step];
        int pp = kcols[step];
        double pval = dense[static_cast<std::size_t>(step) * kn + step];
        pivot_row_of_k_[k] = pr;
        pivot_pos_of_k_[k] = pp;
        pivot_val_[k] = pval;
        for (int i = step + 1; i < kn; ++i) {
          double mult = dense[static_cast<std::size_t>(i) * kn + step] / pval;
          if (mult == 0.0) continue;
          lops_[k].push_back({kr[i], mult});
          for (int j = step; j < kn; ++j)
            dense[static_cast<std::size_t>(i) * kn + j] -=
                mult * dense[static_cast<std::size_t>(step) * kn + j];
        }
        for (int j = step + 1; j < kn; ++j) {
          double v = dense[static_cast<std::size_t>(step) * kn + j];
          if (v != 0.0) urows_[k].push_back({kcols[j], v});
        }
        ++k;
      }
    }
    return k == m_;
  }

  // Solve B x = a. a is indexed by row, x by basis position.
  void ftran(std::vector<double>& a) const {
    for (int k = 0; k < m_; ++k) {
      double piv = a[pivot_row_of_k_[k]];
      if (piv != 0.0)
        for (auto [r, mult] : lops_[k]) a[r] -= mult * piv;
    }
    // Back substitution; result stored by basis position.
    scratch_.assign(static_cast<std::size_t>(m_), 0.0);
    for (int k = m_ - 1; k >= 0; --k) {
      double s = a[pivot_row_of_k_[k]];
      for (auto [p, v] : urows_[k]) s -= v * scratch_[p];
      scratch_[p0_(k)] = s / pivot_val_[k];
    }
    a = scratch_;
  }

  // Solve B^T y = d. d is indexed by basis position, y by row.
  void btran(std::vector<double>& d) const {
    scratch_.assign(static_cast<std::size_t>(m_), 0.0);
    wrow_scratch_.assign(static_cast<std::size_t>(m_), 0.0);
    yrow_scratch_.assign(static_cast<std::size_t>(m_), 0.0);
    for (int k = 0; k < m_; ++k) {
      double w = (d[pivot_pos_of_k_[k]] - scratch_[pivot_pos_of_k_[k]]) /
                 pivot_val_[k];
      wrow_scratch_[k] = w;
      for (auto [p, v] : urows_[k]) scratch_[p] += v * w;
    }
    for (int k = m_ - 1; k >= 0; --k) {
      double acc = wrow_scratch_[k];
      for (auto [r, mult] : lops_[k]) acc -= mult * yrow_scratch_[r];
      yrow_scratch_[pivot_row_of_k_[k]] = acc;
    }
    for (int r = 0; r < m_; ++r) d[r] = yrow_scratch_[r];
  }

 private:
  int p0_(int k) const { return pivot_pos_of_k_[k]; }

  static constexpr int kMaxKernel = 1500;
  int m_ = 0;
  std::vector<std::vector<std::pair<int, double>>> lops_;
  std::vector<std::vector<std::pair<int, double>>> urows_;
  std::vector<double> pivot_val_;
  std::vector<int> pivot_row_of_k_, pivot_pos_of_k_;
  mutable std::vector<double> scratch_;
  mutable std::vector<double> wrow_scratch_, yrow_scratch_;
};

}  // namespace lpdetail

class SimplexSolver {
 public:
  LPSolution solve(const LinearProgram& lp, const SolveOptions& opt) {
    build(lp);
    opt_ = opt;
    LPSolution sol;
    sol.basis.assign(static_cast<std::size_t>(ncols_), VarStatus::AtLower);

    init_basis(opt.warm_basis);
    if (!refactorize()) {
      // A stale warm basis can be singular; fall back to the logical basis.
      init_basis(nullptr);
      if (!refactorize()) return finish(lp, sol, LPStatus::Numerical);
    }
    compute_basics();

    long max_iters = opt.max_iterations > 0
                         ? opt.max_iterations
                         : 20000 + 40L * (nrows_ + ncols_);
    long iters = 0;
    bool bland = false;
    bool was_phase1 = true;
    long stall = 0;
    double last_progress_metric = kInf;

    while (true) {
      if (++iters > max_iters) return finish(lp, sol, LPStatus::Numerical);
      sol.iterations = iters;

      double infeas = total_infeasibility();
      bool phase1 = infeas > opt_.feas_tol;
      if (phase1 != was_phase1) {
        was_phase1 = phase1;
        last_progress_metric = kInf;
        stall = 0;
        bland = false;
      }

      // Stall detection drives the Bland fallback.
      double metric = phase1 ? infeas : current_objective();
      if (metric < last_progress_metric - 1e-12) {
        last_progress_metric = metric;
        stall = 0;
        bland = false;
      } else if (++stall > 2 * (nrows_ + 16)) {
        bland = true;
      }

      set_costs(phase1);
      int q = price(bland);
      if (q < 0) {
        if (phase1) return finish(lp, sol, LPStatus::Infeasible);
        return finish(lp, sol, LPStatus::Optimal);
      }

      // Direction of change for the entering variable.
      double sigma = entering_direction(q);
      column_of(q, colbuf_);
      ftranbuf_ = colbuf_;
      lu_.ftran(ftranbuf_);
      apply_etas_ftran(ftranbuf_);

      int leave_pos = -1;
      double step = 0.0;
      bool leave_at_lower = true, flip = false;
      if (!ratio_test(q, sigma, phase1, bland, leave_pos, step, leave_at_lower,
                      flip)) {
        if (phase1) return finish(lp, sol, LPStatus::Numerical);
        return finish(lp, sol, LPStatus::Unbounded);
      }

      if (flip) {
        // Entering variable runs to its opposite bound; basis unchanged.
        for (int p = 0; p < nrows_; ++p)
          if (ftranbuf_[p] != 0.0) xb_[p] -= sigma * step * ftranbuf_[p];
        vstat_[q] = vstat_[q] == VarStatus::AtLower ? VarStatus::AtUpper
                                                    : VarStatus::AtLower;
        continue;
      }

      pivot(q, sigma, step, leave_pos, leave_at_lower);
      if (eta_nnz_ > 2 * nrows_ + 1000 ||
          static_cast<long>(etas_.size()) >= refactor_every_ ||
          std::fabs(ftranbuf_[leave_pos]) < 1e-7) {
        if (!refactorize()) return finish(lp, sol, LPStatus::Numerical);
        compute_basics();
      }
    }
  }

 private:
  // --- problem in computational form -------------------------------------
  int nstruct_ = 0, nrows_ = 0, ncols_ = 0;
  std::vector<double> lo_, hi_, cost_, phase_cost_;
  const std::vector<double>* active_cost_ = nullptr;
  int price_cursor_ = 0;
  std::vector<double> rhs_;
  // Column-major structural matrix. Logical columns are implicit units.
  std::vector<int> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;

  // --- basis state --------------------------------------------------------
  std::vector<VarStatus> vstat_;
  std::vector<int> basic_;  // basis position -> variable
  std::vector<double> xb_;  // basic values by position
  lpdetail::BasisLU lu_;
  std::vector<lpdetail::Eta> etas_;
  long eta_nnz_ = 0;
  long refactor_every_ = 120;
  SolveOptions opt_;

  mutable std::vector<double> colbuf_, ftranbuf_, ybuf_;

  void build(const LinearProgram& lp) {
    nstruct_ = lp.num_vars();
    nrows_ = lp.num_rows();
    ncols_ = nstruct_ + nrows_;
    lo_.assign(static_cast<std::size_t>(ncols_), 0.0);
    hi_.assign(static_cast<std::size_t>(ncols_), 0.0);
    cost_.assign(static_cast<std::size_t>(ncols_), 0.0);
    rhs_.resize(static_cast<std::size_t>(nrows_));
    for (int j = 0; j < nstruct_; ++j) {
      lo_[j] = lp.lo[j];
      hi_[j] = lp.hi[j];
      cost_[j] = lp.obj[j];
    }
    for (int i = 0; i < nrows_; ++i) {
      rhs_[i] = lp.rows[i].rhs;
      int s = nstruct_ + i;
      if (lp.rows[i].rel == Rel::LE) {
        lo_[s] = 0.0;
        hi_[s] = kInf;
      } else {
        lo_[s] = hi_[s] = 0.0;
      }
    }
    // Transpose rows into columns.
    std::vector<int> count(static_cast<std::size_t>(nstruct_) + 1, 0);
    for (const auto& row : lp.rows)
      for (int j : row.idx) ++count[static_cast<std::size_t>(j) + 1];
    col_start_.assign(static_cast<std::size_t>(nstruct_) + 1, 0);
    for (int j = 0; j < nstruct_; ++j)
      col_start_[static_cast<std::size_t>(j) + 1] =
          col_start_[j] + count[static_cast<std::size_t>(j) + 1];
    col_row_.assign(static_cast<std::size_t>(col_start_[nstruct_]), 0);
    col_val_.assign(col_row_.size(), 0.0);
    std::vector<int> fill(static_cast<std::size_t>(nstruct_), 0);
    for (int i = 0; i < nrows_; ++i) {
      const auto& row = lp.rows[i];
      for (std::size_t k = 0; k < row.idx.size(); ++k) {
        int j = row.idx[k];
        int at = col_start_[j] + fill[j]++;
        col_row_[at] = i;
        col_val_[at] = row.val[k];
      }
    }
    colbuf_.assign(static_cast<std::size_t>(nrows_), 0.0);
    ftranbuf_.assign(static_cast<std::size_t>(nrows_), 0.0);
    ybuf_.assign(static_cast<std::size_t>(nrows_), 0.0);
  }

  // Sparse column of variable j into a dense row-indexed buffer.
  void column_of(int j, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (j < nstruct_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
        out[col_row_[k]] += col_val_[k];
    } else {
      out[j - nstruct_] = 1.0;
    }
  }

  void column_sparse(int j, std::vector<std::pair<int, double>>& out) const {
    out.clear();
    if (j < nstruct_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
        out.push_back({col_row_[k], col_val_[k]});
    } else {
      out.push_back({j - nstruct_, 1.0});
    }
  }

  double nb_value(int j) const {
    switch (vstat_[j]) {
      case VarStatus::AtLower: return lo_[j];
      case VarStatus::AtUpper: return hi_[j];
      default: return 0.0;
    }
  }

  void init_basis(const std::vector<VarStatus>* warm) {
    vstat_.assign(static_cast<std::size_t>(ncols_), VarStatus::AtLower);
    basic_.assign(static_cast<std::size_t>(nrows_), -1);
    bool used_warm = false;
    if (warm && static_cast<int>(warm->size()) == ncols_) {
      int nb = 0;
      for (int j = 0; j < ncols_; ++j)
        if ((*warm)[j] == VarStatus::Basic) ++nb;
      if (nb == nrows_) {
        vstat_ = *warm;
        int p = 0;
        for (int j = 0; j < ncols_; ++j)
          if (vstat_[j] == VarStatus::Basic) basic_[p++] = j;
        used_warm = true;
      }
    }
    if (!used_warm) {
      for (int i = 0; i < nrows_; ++i) {
        basic_[i] = nstruct_ + i;
        vstat_[nstruct_ + i] = VarStatus::Basic;
      }
    }
    // Sensible nonbasic placement.
    for (int j = 0; j < ncols_; ++j) {
      if (vstat_[j] == VarStatus::Basic) continue;
      if (vstat_[j] == VarStatus::AtUpper && std::isfinite(hi_[j])) continue;
      if (std::isfinite(lo_[j]))
        vstat_[j] = VarStatus::AtLower;
      else if (std::isfinite(hi_[j]))
        vstat_[j] = VarStatus::AtUpper;
      else
        vstat_[j] = VarStatus::FreeZero;
    }
    etas_.clear();
  }

  bool refactorize() {
    std::vector<std::vector<std::pair<int, double>>> cols(
        static_cast<std::size_t>(nrows_));
    for (int p = 0; p < nrows_; ++p) column_sparse(basic_[p], cols[p]);
    etas_.clear();
    eta_nnz_ = 0;
    return lu_.factor(nrows_, cols);
  }

  // Recompute basic values from scratch: B x_B = b - N x_N.
  void compute_basics() {
    std::vector<double> r = rhs_;
    std::vector<std::pair<int, double>> cbuf;
    for (int j = 0; j < ncols_; ++j) {
      if (vstat_[j] == VarStatus::Basic) continue;
      double v = nb_value(j);
      if (v == 0.0) continue;
      column_sparse(j, cbuf);
      for (auto [row, a] : cbuf) r[row] -= a * v;
    }
    lu_.ftran(r);
    apply_etas_ftran(r);
    xb_ = r;
  }

  void apply_etas_ftran(std::vector<double>& x) const {
    for (const auto& e : etas_) {
      double xp = x[e.pos] / e.wp;
      if (xp == 0.0) continue;
      for (auto [i, wi] : e.w) x[i] -= wi * xp;
      x[e.pos] = xp;
    }
  }

  void apply_etas_btran(std::vector<double>& d) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = d[it->pos];
      for (auto [i, wi] : it->w) acc -= wi * d[i];
      d[it->pos] = acc / it->wp;
    }
  }

  double total_infeasibility() const {
    double s = 0.0;
    for (int p = 0; p < nrows_; ++p) {
      int j = basic_[p];
      if (xb_[p] < lo_[j]) s += lo_[j] - xb_[p];
      if (xb_[p] > hi_[j]) s += xb_[p] - hi_[j];
    }
    return s;
  }

  double current_objective() const {
    double s = 0.0;
    for (int j = 0; j < ncols_; ++j)
      if (vstat_[j] != VarStatus::Basic) s += cost_[j] * nb_value(j);
    for (int p = 0; p < nrows_; ++p) s += cost_[basic_[p]] * xb_[p];
    return s;
  }

  void set_costs(bool phase1) {
    if (phase1) {
      phase_cost_.assign(static_cast<std::size_t>(ncols_), 0.0);
      for (int p = 0; p < nrows_; ++p) {
        int j = basic_[p];
        if (xb_[p] < lo_[j] - opt_.feas_tol)
          phase_cost_[j] = -1.0;
        else if (xb_[p] > hi_[j] + opt_.feas_tol)
          phase_cost_[j] = 1.0;
      }
      active_cost_ = &phase_cost_;
    } else {
      active_cost_ = &cost_;
    }
  }

  double reduced_cost(int j) const {
    double dj = (*active_cost_)[j];
    if (j < nstruct_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
        dj -= ybuf_[col_row_[k]] * col_val_[k];
    } else {
      dj -= ybuf_[j - nstruct_];
    }
    return dj;
  }

  double pricing_violation(int j) const {
    if (vstat_[j] == VarStatus::Basic) return 0.0;
    if (lo_[j] == hi_[j]) return 0.0;  // fixed
    double dj = reduced_cost(j);
    switch (vstat_[j]) {
      case VarStatus::AtLower: return -dj;          // wants to rise
      case VarStatus::AtUpper: return dj;           // wants to fall
      case VarStatus::FreeZero: return std::fabs(dj);
      default: return 0.0;
    }
  }

  // Returns the entering variable, or -1 when priced out. Dantzig within a
  // rotating window keeps pricing cheap on long-horizon LPs; Bland mode
  // scans everything and takes the smallest profitable index, which is what
  // its anti-cycling guarantee needs.
  int price(bool bland) {
    // y = B^-T c_B
    for (int i = 0; i < nrows_; ++i) ybuf_[i] = (*active_cost_)[basic_[i]];
    apply_etas_btran(ybuf_);
    lu_.btran(ybuf_);

    if (bland) {
      for (int j = 0; j < ncols_; ++j)
        if (pricing_violation(j) > opt_.opt_tol) return j;
      return -1;
    }
    int window = std::max(2000, ncols_ / 16);
    int scanned = 0;
    int best = -1;
    double bestv = 0.0;
    while (scanned < ncols_) {
      int block_end = std::min(price_cursor_ + window, ncols_);
      for (int j = price_cursor_; j < block_end; ++j) {
        double viol = pricing_violation(j);
        if (viol > opt_.opt_tol && viol > bestv) {
          bestv = viol;
          best = j;
        }
      }
      scanned += block_end - price_cursor_;
      price_cursor_ = block_end == ncols_ ? 0 : block_end;
      if (best >= 0) return best;
    }
    return -1;
  }

  double entering_direction(int q) {
    switch (vstat_[q]) {
      case VarStatus::AtLower: return 1.0;
      case VarStatus::AtUpper: return -1.0;
      default: break;
    }
    // Free variable: direction follows the sign of the reduced cost,
    // recomputed cheaply from the current y buffer.
    return reduced_cost(q) < 0 ? 1.0 : -1.0;
  }

  // Bounded-variable ratio test; phase 1 lets infeasible basics block at the
  // bound they are approaching from outside. Returns false when unbounded.
  bool ratio_test(int q, double sigma, bool phase1, bool bland, int& leave_pos,
                  double& step, bool& leave_at_lower, bool& flip) {
    const double piv_tol = 1e-9;
    double best = kInf;
    leave_pos = -1;
    bool best_at_lower = true;
    // Entering variable's own range.
    double own = kInf;
    if (std::isfinite(lo_[q]) && std::isfinite(hi_[q])) own = hi_[q] - lo_[q];
    for (int p = 0; p < nrows_; ++p) {
      double w = ftranbuf_[p];
      if (std::fabs(w) < piv_tol) continue;
      int j = basic_[p];
      double delta = -sigma * w;  // rate of change of x_B[p] per unit step
      double v = xb_[p];
      double t;
      bool at_lower;
      if (phase1 && v < lo_[j] - opt_.feas_tol) {
        if (delta <= 0) continue;        // moving further out: not a blocker
        at_lower = true;
        t = (lo_[j] - v) / delta;
      } else if (phase1 && v > hi_[j] + opt_.feas_tol) {
        if (delta >= 0) continue;
        at_lower = false;
        t = (hi_[j] - v) / delta;
      } else if (delta > 0) {
        if (!std::isfinite(hi_[j])) continue;
        at_lower = false;
        t = (hi_[j] - v) / delta;
      } else {
        if (!std::isfinite(lo_[j])) continue;
        at_lower = true;
        t = (lo_[j] - v) / delta;
      }
      if (t < 0) t = 0;
      bool take = false;
      if (t < best - 1e-12) {
        take = true;
      } else if (t < best + 1e-12 && leave_pos >= 0) {
        // Tie break: Bland wants the smallest variable index, otherwise
        // prefer the numerically strongest pivot.
        take = bland ? j < basic_[leave_pos]
                     : std::fabs(w) > std::fabs(ftranbuf_[leave_pos]);
      }
      if (take) {
        best = std::min(best, t);
        leave_pos = p;
        best_at_lower = at_lower;
      }
    }
    if (own < best) {
      step = own;
      flip = true;
      return true;
    }
    if (leave_pos < 0) return false;  // unbounded direction
    step = best;
    leave_at_lower = best_at_lower;
    flip = false;
    return true;
  }

  void pivot(int q, double sigma, double step, int leave_pos,
             bool leave_at_lower) {
    int leaving = basic_[leave_pos];
    // Update basic values.
    for (int p = 0; p < nrows_; ++p)
      if (ftranbuf_[p] != 0.0) xb_[p] -= sigma * step * ftranbuf_[p];
    double enter_val = nb_value(q) + sigma * step;

    // Record eta for the basis change.
    lpdetail::Eta e;
    e.pos = leave_pos;
    e.wp = ftranbuf_[leave_pos];
    for (int p = 0; p < nrows_; ++p)
      if (p != leave_pos && ftranbuf_[p] != 0.0) e.w.push_back({p, ftranbuf_[p]});
    eta_nnz_ += static_cast<long>(e.w.size()) + 1;
    etas_.push_back(std::move(e));

    basic_[leave_pos] = q;
    vstat_[q] = VarStatus::Basic;
    xb_[leave_pos] = enter_val;
    if (leave_at_lower && std::isfinite(lo_[leaving]))
      vstat_[leaving] = VarStatus::AtLower;
    else if (std::isfinite(hi_[leaving]))
      vstat_[leaving] = VarStatus::AtUpper;
    else if (std::isfinite(lo_[leaving]))
      vstat_[leaving] = VarStatus::AtLower;
    else
      vstat_[leaving] = VarStatus::FreeZero;
  }

  LPSolution finish(const LinearProgram& lp, LPSolution& sol, LPStatus st) {
    sol.status = st;
    sol.basis = vstat_;
    sol.x.assign(static_cast<std::size_t>(nstruct_), 0.0);
    if (st != LPStatus::Optimal) return sol;

    std::vector<double> full(static_cast<std::size_t>(ncols_), 0.0);
    for (int j = 0; j < ncols_; ++j)
      if (vstat_[j] != VarStatus::Basic) full[j] = nb_value(j);
    for (int p = 0; p < nrows_; ++p) full[basic_[p]] = xb_[p];
    for (int j = 0; j < nstruct_; ++j) sol.x[j] = full[j];

    // Independent residual check straight from the row data.
    double resid = 0.0;
    for (int i = 0; i < nrows_; ++i) {
      const auto& row = lp.rows[i];
      double act = 0.0;
      for (std::size_t k = 0; k < row.idx.size(); ++k)
        act += row.val[k] * sol.x[row.idx[k]];
      double r = row.rel == Rel::EQ ? std::fabs(act - row.rhs)
                                    : std::max(0.0, act - row.rhs);
      resid = std::max(resid, r);
    }
    for (int j = 0; j < nstruct_; ++j) {
      resid = std::max(resid, lo_[j] - sol.x[j]);
      resid = std::max(resid, sol.x[j] - hi_[j]);
    }
    sol.max_residual = resid;
    if (resid > 10 * opt_.feas_tol) {
      sol.status = LPStatus::Numerical;
      return sol;
    }
    double obj = 0.0;
    for (int j = 0; j < nstruct_; ++j) obj += lp.obj[j] * sol.x[j];
    sol.objective = obj;
    return sol;
  }
};

inline LPSolution solve(const LinearProgram& lp, const SolveOptions& opt = {}) {
  SimplexSolver s;
  return s.solve(lp, opt);
}

// Fixed-format MPS export for cross-checking against external solvers.
inline void write_mps(const LinearProgram& lp, std::ostream& os,
                      const std::string& name = "RADK") {
  os << "NAME          " << name << "\n";
  os << "ROWS\n N  COST\n";
  for (int i = 0; i < lp.num_rows(); ++i)
    os << (lp.rows[i].rel == Rel::LE ? " L  R" : " E  R") << i << "\n";
  os << "COLUMNS\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.obj[j] != 0.0)
      os << "    X" << j << "  COST  " << lp.obj[j] << "\n";
    for (int i = 0; i < lp.num_rows(); ++i) {
      const auto& row = lp.rows[i];
      for (std::size_t k = 0; k < row.idx.size(); ++k)
        if (row.idx[k] == j)
          os << "    X" << j << "  R" << i << "  " << row.val[k] << "\n";
    }
  }
  os << "RHS\n";
  for (int i = 0; i < lp.num_rows(); ++i)
    if (lp.rows[i].rhs != 0.0)
      os << "    RHS  R" << i << "  " << lp.rows[i].rhs << "\n";
  os << "BOUNDS\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (std::isfinite(lp.lo[j]) && lp.lo[j] != 0.0)
      os << " LO BND  X" << j << "  " << lp.lo[j] << "\n";
    if (!std::isfinite(lp.lo[j])) os << " MI BND  X" << j << "\n";
    if (std::isfinite(lp.hi[j])) os << " UP BND  X" << j << "  " << lp.hi[j] << "\n";
  }
  os << "ENDATA\n";
}

}  // namespace radk
