#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "basis_factor.hpp"
#include "phasebal/formulation.hpp"
#include "phasebal/lp.hpp"

namespace phasebal::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration_limit";
  }
  return "?";
}

Problem from_model(const MilpModel& model) {
  const auto n = static_cast<Eigen::Index>(model.variables.size());
  const auto m = static_cast<Eigen::Index>(model.constraints.size());
  Problem p;
  p.cost = model.objective;
  p.col_lower.resize(n);
  p.col_upper.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    p.col_lower[j] = model.variables[j].lower;
    p.col_upper[j] = model.variables[j].upper;
  }
  p.row_lower.resize(m);
  p.row_upper.resize(m);
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& c = model.constraints[i];
    for (const auto& t : c.terms) trips.emplace_back(static_cast<int>(i), t.var, t.coef);
    switch (c.relation) {
      case Relation::LessEqual: p.row_lower[i] = -kInfinity; p.row_upper[i] = c.rhs; break;
      case Relation::GreaterEqual: p.row_lower[i] = c.rhs; p.row_upper[i] = kInfinity; break;
      case Relation::Equal: p.row_lower[i] = p.row_upper[i] = c.rhs; break;
    }
  }
  p.a.resize(m, n);
  p.a.setFromTriplets(trips.begin(), trips.end());
  p.a.makeCompressed();
  return p;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Eta {
  int row;
  double pivot;
  std::vector<int> index;  // excludes row
  std::vector<double> value;
};

}  // namespace

struct Simplex::Impl {
  const Problem& prob;
  Options opt;
  int n = 0;  // columns
  int m = 0;  // rows
  Eigen::SparseMatrix<double, Eigen::RowMajor> a_rows;

  Eigen::VectorXd base_lo, base_hi;  // problem bounds incl. overrides, size n+m
  Eigen::VectorXd lo, hi;            // working bounds (may carry boxes)
  std::vector<bool> boxed;
  Eigen::VectorXd cost_base;  // size n+m, logicals zero
  Eigen::VectorXd cost;       // working costs, perturbed during the dual phase

  std::vector<VarState> state;
  std::vector<int> head;
  std::vector<int> pos;  // position in head, -1 if nonbasic
  Eigen::VectorXd x;     // size n+m
  Eigen::VectorXd d;     // reduced costs, size n+m

  std::unique_ptr<detail::BasisLu> lu;
  bool dense = true;
  std::vector<Eta> etas;
  bool factored = false;
  long iterations = 0;

  Impl(const Problem& p, Options o) : prob(p), opt(o) {
    n = p.cols();
    m = p.rows();
    a_rows = p.a;
    base_lo.resize(n + m);
    base_hi.resize(n + m);
    base_lo.head(n) = p.col_lower;
    base_hi.head(n) = p.col_upper;
    base_lo.tail(m) = p.row_lower;
    base_hi.tail(m) = p.row_upper;
    cost_base = Eigen::VectorXd::Zero(n + m);
    cost_base.head(n) = p.cost;
    cost = cost_base;
    dense = opt.factor == FactorKind::Dense ||
            (opt.factor == FactorKind::Auto && m <= opt.dense_row_limit);
    if (dense)
      lu = std::make_unique<detail::DenseLu>();
    else
      lu = std::make_unique<detail::SparseLu>();
  }

  // ---- column access ----------------------------------------------------

  template <typename F>
  void for_column(int j, F&& f) const {
    if (j < n) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(prob.a, j); it; ++it) f(static_cast<int>(it.row()), it.value());
    } else {
      f(j - n, -1.0);
    }
  }

  Eigen::VectorXd column(int j) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    for_column(j, [&](int i, double a) { v[i] = a; });
    return v;
  }

  // ---- basis inverse ------------------------------------------------------

  bool refactor() {
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < m; ++k) for_column(head[k], [&](int i, double a) { trips.emplace_back(i, k, a); });
    Eigen::SparseMatrix<double> b(m, m);
    b.setFromTriplets(trips.begin(), trips.end());
    b.makeCompressed();
    etas.clear();
    factored = m == 0 || lu->factor(b);
    return factored;
  }

  void ftran(Eigen::VectorXd& v) const {
    if (m == 0) return;
    lu->solve(v);
    for (const auto& e : etas) {
      const double yr = v[e.row] / e.pivot;
      v[e.row] = yr;
      if (yr != 0.0)
        for (std::size_t k = 0; k < e.index.size(); ++k) v[e.index[k]] -= e.value[k] * yr;
    }
  }

  void btran(Eigen::VectorXd& v) const {
    if (m == 0) return;
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      double s = v[it->row];
      for (std::size_t k = 0; k < it->index.size(); ++k) s -= it->value[k] * v[it->index[k]];
      v[it->row] = s / it->pivot;
    }
    lu->solve_transpose(v);
  }

  void push_eta(int r, const Eigen::VectorXd& alpha) {
    Eta e;
    e.row = r;
    e.pivot = alpha[r];
    for (int i = 0; i < m; ++i)
      if (i != r && alpha[i] != 0.0) {
        e.index.push_back(i);
        e.value.push_back(alpha[i]);
      }
    etas.push_back(std::move(e));
  }

  // ---- state ------------------------------------------------------------

  double nonbasic_value(int j) const {
    switch (state[j]) {
      case VarState::AtLower: return lo[j];
      case VarState::AtUpper: return hi[j];
      default: return 0.0;
    }
  }

  // Makes a nonbasic state consistent with finite bounds.
  void normalize_nonbasic(int j) {
    if (state[j] == VarState::Basic) return;
    const bool lf = std::isfinite(lo[j]);
    const bool uf = std::isfinite(hi[j]);
    if (state[j] == VarState::AtLower && !lf) state[j] = uf ? VarState::AtUpper : VarState::AtZero;
    if (state[j] == VarState::AtUpper && !uf) state[j] = lf ? VarState::AtLower : VarState::AtZero;
    if (state[j] == VarState::AtZero && (lf || uf)) state[j] = lf ? VarState::AtLower : VarState::AtUpper;
  }

  void slack_basis() {
    state.assign(n + m, VarState::AtLower);
    head.resize(m);
    for (int i = 0; i < m; ++i) {
      head[i] = n + i;
      state[n + i] = VarState::Basic;
    }
    for (int j = 0; j < n; ++j) {
      const double c = cost[j];
      if (c > 0.0)
        state[j] = VarState::AtLower;
      else if (c < 0.0)
        state[j] = VarState::AtUpper;
      else
        state[j] = std::isfinite(lo[j]) ? VarState::AtLower
                   : std::isfinite(hi[j]) ? VarState::AtUpper
                                          : VarState::AtZero;
    }
    rebuild_positions();
  }

  bool load_basis(const Basis& b) {
    if (static_cast<int>(b.state.size()) != n + m) return false;
    int basic = 0;
    for (auto s : b.state) basic += s == VarState::Basic;
    if (basic != m) return false;
    state = b.state;
    head.clear();
    for (int j = 0; j < n + m; ++j)
      if (state[j] == VarState::Basic) head.push_back(j);
    rebuild_positions();
    return true;
  }

  void rebuild_positions() {
    pos.assign(n + m, -1);
    for (int k = 0; k < m; ++k) pos[head[k]] = k;
  }

  void compute_primal() {
    for (int j = 0; j < n + m; ++j)
      if (state[j] != VarState::Basic) x[j] = nonbasic_value(j);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < n + m; ++j) {
      if (state[j] == VarState::Basic || x[j] == 0.0) continue;
      const double xj = x[j];
      for_column(j, [&](int i, double a) { rhs[i] -= a * xj; });
    }
    ftran(rhs);
    for (int k = 0; k < m; ++k) x[head[k]] = rhs[k];
  }

  void compute_duals() {
    Eigen::VectorXd y(m);
    for (int k = 0; k < m; ++k) y[k] = cost[head[k]];
    btran(y);
    for (int j = 0; j < n + m; ++j) {
      if (state[j] == VarState::Basic) {
        d[j] = 0.0;
        continue;
      }
      double s = cost[j];
      for_column(j, [&](int i, double a) { s -= a * y[i]; });
      d[j] = s;
    }
  }

  bool is_fixed(int j) const { return lo[j] == hi[j]; }

  double infeasibility(int j) const {
    if (x[j] < lo[j] - opt.primal_tol) return lo[j] - x[j];
    if (x[j] > hi[j] + opt.primal_tol) return x[j] - hi[j];
    return 0.0;
  }

  // Moves nonbasic columns to the bound their reduced cost asks for. Columns
  // whose required bound is infinite get an artificial box. Returns true if
  // any value changed.
  bool restore_dual_feasibility() {
    bool changed = false;
    for (int j = 0; j < n + m; ++j) {
      if (state[j] == VarState::Basic || is_fixed(j)) continue;
      const double dj = d[j];
      VarState want = state[j];
      if (dj > opt.dual_tol) want = VarState::AtLower;
      else if (dj < -opt.dual_tol) want = VarState::AtUpper;
      else continue;
      if (want == state[j]) continue;
      if (want == VarState::AtLower && !std::isfinite(lo[j])) {
        lo[j] = (std::isfinite(hi[j]) ? std::min(hi[j], 0.0) : 0.0) - opt.box;
        boxed[j] = true;
      }
      if (want == VarState::AtUpper && !std::isfinite(hi[j])) {
        hi[j] = (std::isfinite(lo[j]) ? std::max(lo[j], 0.0) : 0.0) + opt.box;
        boxed[j] = true;
      }
      state[j] = want;
      changed = true;
    }
    return changed;
  }

  // Row r of B^-1 [A -I] for every nonbasic column (entries of basic
  // columns are left unspecified).
  void pivot_row(const Eigen::VectorXd& rho, Eigen::VectorXd& alpha) const {
    alpha.setZero(n + m);
    for (int i = 0; i < m; ++i) {
      const double ri = rho[i];
      if (std::abs(ri) < 1e-14) continue;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a_rows, i); it; ++it)
        alpha[it.col()] += ri * it.value();
      alpha[n + i] = -ri;
    }
  }

  void pivot(int r, int q, const Eigen::VectorXd& alpha_q, VarState leaving_state) {
    const int p = head[r];
    state[p] = leaving_state;
    x[p] = leaving_state == VarState::AtLower ? lo[p] : leaving_state == VarState::AtUpper ? hi[p] : 0.0;
    head[r] = q;
    state[q] = VarState::Basic;
    pos[p] = -1;
    pos[q] = r;
    push_eta(r, alpha_q);
    ++iterations;
  }

  bool maybe_refactor() {
    if (static_cast<int>(etas.size()) < opt.refactor_interval) return true;
    if (!refactor()) return false;
    compute_primal();
    compute_duals();
    return true;
  }

  // ---- dual simplex -----------------------------------------------------

  // Shifts each nonbasic cost away from dual infeasibility by a small
  // pseudo-random amount, which breaks the ties that make the dual stall.
  void perturb_costs(int round) {
    cost = cost_base;
    if (opt.perturbation <= 0.0) return;
    for (int j = 0; j < n + m; ++j) {
      if (state[j] == VarState::Basic || state[j] == VarState::AtZero || is_fixed(j)) continue;
      std::uint64_t h = (static_cast<std::uint64_t>(j) + 1) * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(round);
      h ^= h >> 31;
      h *= 0xBF58476D1CE4E5B9ull;
      h ^= h >> 29;
      const double u = 0.5 + 0.5 * static_cast<double>(h >> 11) / 9007199254740992.0;
      const double eps = opt.perturbation * (1.0 + std::abs(cost_base[j])) * u;
      cost[j] += state[j] == VarState::AtLower ? eps : -eps;
    }
  }

  enum class Outcome { Done, Infeasible, Limit, Singular };

  Outcome dual_phase(std::string& certificate) {
    Eigen::VectorXd rho(m), alpha_r, alpha_q;
    int stalled = 0;
    while (true) {
      if (iterations >= opt.iteration_limit) return Outcome::Limit;
      if (!maybe_refactor()) return Outcome::Singular;
      const bool bland = stalled > opt.stall_limit;

      int r = -1;
      double best = 0.0;
      for (int k = 0; k < m; ++k) {
        const double inf = infeasibility(head[k]);
        if (inf <= 0.0) continue;
        if (bland) {
          if (r < 0 || head[k] < head[r]) r = k;
        } else if (inf > best) {
          best = inf;
          r = k;
        }
      }
      if (r < 0) return Outcome::Done;

      const int p = head[r];
      const bool to_lower = x[p] < lo[p];
      const double delta = to_lower ? x[p] - lo[p] : x[p] - hi[p];
      rho.setZero(m);
      rho[r] = 1.0;
      btran(rho);
      pivot_row(rho, alpha_r);

      // Harris two-pass ratio test over columns that can move towards
      // restoring row r.
      const double sgn = to_lower ? -1.0 : 1.0;
      double theta_max = kInf;
      for (int j = 0; j < n + m; ++j) {
        if (state[j] == VarState::Basic || is_fixed(j)) continue;
        const double a = sgn * alpha_r[j];
        if (std::abs(a) < opt.pivot_tol) continue;
        double dj;
        if (state[j] == VarState::AtLower) {
          if (a <= 0.0) continue;
          dj = d[j];
        } else if (state[j] == VarState::AtUpper) {
          if (a >= 0.0) continue;
          dj = -d[j];
        } else {
          dj = a > 0.0 ? d[j] : -d[j];
        }
        theta_max = std::min(theta_max, (std::max(dj, 0.0) + (bland ? 0.0 : opt.harris_tol)) / std::abs(a));
      }
      if (!std::isfinite(theta_max)) {
        std::ostringstream os;
        os << "row combination through basic variable " << p << " cannot reach its "
           << (to_lower ? "lower" : "upper") << " bound (gap " << std::abs(delta) << ")";
        certificate = os.str();
        return Outcome::Infeasible;
      }
      int q = -1;
      double q_abs = 0.0;
      for (int j = 0; j < n + m; ++j) {
        if (state[j] == VarState::Basic || is_fixed(j)) continue;
        const double a = sgn * alpha_r[j];
        if (std::abs(a) < opt.pivot_tol) continue;
        double dj;
        if (state[j] == VarState::AtLower) {
          if (a <= 0.0) continue;
          dj = d[j];
        } else if (state[j] == VarState::AtUpper) {
          if (a >= 0.0) continue;
          dj = -d[j];
        } else {
          dj = a > 0.0 ? d[j] : -d[j];
        }
        if (std::max(dj, 0.0) / std::abs(a) > theta_max) continue;
        if (bland) {
          if (q < 0) q = j;  // lowest index among the minimum ratios
        } else if (std::abs(a) > q_abs) {
          q_abs = std::abs(a);
          q = j;
        }
      }

      alpha_q = column(q);
      ftran(alpha_q);
      const double arq = alpha_r[q];
      if (std::abs(alpha_q[r] - arq) > 1e-7 * (1.0 + std::abs(arq))) {
        // Eta file drifted; rebuild and retry the iteration.
        if (etas.empty()) return Outcome::Singular;
        if (!refactor()) return Outcome::Singular;
        compute_primal();
        compute_duals();
        continue;
      }

      // Dual update; the entering reduced cost is clipped to zero if it is
      // marginally on the wrong side.
      double dq = d[q];
      if ((state[q] == VarState::AtLower && dq < 0.0) || (state[q] == VarState::AtUpper && dq > 0.0) ||
          state[q] == VarState::AtZero)
        dq = 0.0;
      const double theta_d = dq / alpha_q[r];
      if (theta_d != 0.0)
        for (int j = 0; j < n + m; ++j)
          if (state[j] != VarState::Basic) d[j] -= theta_d * alpha_r[j];
      d[q] = 0.0;
      d[p] = -theta_d;

      const double theta_p = delta / alpha_q[r];
      for (int k = 0; k < m; ++k) x[head[k]] -= theta_p * alpha_q[k];
      x[q] += theta_p;
      stalled = std::abs(theta_d * delta) < 1e-12 ? stalled + 1 : 0;
      pivot(r, q, alpha_q, to_lower ? VarState::AtLower : VarState::AtUpper);
    }
  }

  // ---- primal simplex (from a primal feasible basis) --------------------

  enum class PrimalOutcome { Done, Unbounded, Limit, Singular };

  PrimalOutcome primal_phase() {
    Eigen::VectorXd rho(m), alpha_r, alpha_q;
    int stalled = 0;
    while (true) {
      if (iterations >= opt.iteration_limit) return PrimalOutcome::Limit;
      if (!maybe_refactor()) return PrimalOutcome::Singular;
      const bool bland = stalled > opt.stall_limit;

      int q = -1;
      double best = 0.0;
      for (int j = 0; j < n + m; ++j) {
        if (state[j] == VarState::Basic || is_fixed(j)) continue;
        double viol = 0.0;
        if (state[j] == VarState::AtLower) viol = -d[j];
        else if (state[j] == VarState::AtUpper) viol = d[j];
        else viol = std::abs(d[j]);
        if (viol <= opt.dual_tol) continue;
        if (bland) {
          q = j;
          break;
        }
        if (viol > best) {
          best = viol;
          q = j;
        }
      }
      if (q < 0) return PrimalOutcome::Done;

      const double dir = d[q] < 0.0 ? 1.0 : -1.0;
      alpha_q = column(q);
      ftran(alpha_q);

      double t_best = (std::isfinite(lo[q]) && std::isfinite(hi[q])) ? hi[q] - lo[q] : kInf;
      int r = -1;
      double r_abs = 0.0;
      for (int k = 0; k < m; ++k) {
        const double a = dir * alpha_q[k];
        if (std::abs(a) < opt.pivot_tol) continue;
        const int b = head[k];
        double limit = kInf;
        if (a > 0.0 && std::isfinite(lo[b])) limit = std::max(0.0, x[b] - lo[b]) / a;
        if (a < 0.0 && std::isfinite(hi[b])) limit = std::max(0.0, hi[b] - x[b]) / -a;
        if (!std::isfinite(limit)) continue;
        if (limit < t_best - 1e-12 || (limit <= t_best + 1e-12 && r >= 0 && std::abs(a) > r_abs)) {
          t_best = std::min(t_best, limit);
          r = k;
          r_abs = std::abs(a);
        }
      }
      if (!std::isfinite(t_best)) return PrimalOutcome::Unbounded;

      for (int k = 0; k < m; ++k) x[head[k]] -= dir * t_best * alpha_q[k];
      if (r < 0) {
        // Bound flip of the entering column.
        state[q] = state[q] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
        x[q] = nonbasic_value(q);
        ++iterations;
        stalled = 0;
        continue;
      }
      x[q] += dir * t_best;
      const int p = head[r];
      const VarState leaving = dir * alpha_q[r] > 0.0 ? VarState::AtLower : VarState::AtUpper;

      rho.setZero(m);
      rho[r] = 1.0;
      btran(rho);
      pivot_row(rho, alpha_r);
      const double theta_d = d[q] / alpha_q[r];
      for (int j = 0; j < n + m; ++j)
        if (state[j] != VarState::Basic) d[j] -= theta_d * alpha_r[j];
      d[q] = 0.0;
      d[p] = -theta_d;
      stalled = t_best < 1e-12 ? stalled + 1 : 0;
      pivot(r, q, alpha_q, leaving);
    }
  }

  // ---- driver -------------------------------------------------------------

  Result solve(const Basis* warm) {
    lo = base_lo;
    hi = base_hi;
    boxed.assign(n + m, false);
    x = Eigen::VectorXd::Zero(n + m);
    d = Eigen::VectorXd::Zero(n + m);
    iterations = 0;

    Result res;
    for (int j = 0; j < n + m; ++j)
      if (lo[j] > hi[j]) {
        std::ostringstream os;
        os << "variable " << j << " has crossing bounds";
        res.status = Status::Infeasible;
        res.certificate = os.str();
        res.x = Eigen::VectorXd::Zero(n);
        return res;
      }

    bool need_factor = true;
    if (warm && !warm->empty() && (state.empty() || warm->state != state)) {
      if (!load_basis(*warm)) slack_basis();
    } else if (state.empty()) {
      slack_basis();
    } else {
      need_factor = !factored;
    }
    for (int j = 0; j < n + m; ++j) normalize_nonbasic(j);
    if (need_factor && !refactor()) {
      slack_basis();
      refactor();
    }

    std::string certificate;
    // Stays at the limit status unless a round reaches a verdict.
    res.status = Status::IterationLimit;
    for (int round = 0; round < 20; ++round) {
      compute_duals();
      restore_dual_feasibility();
      compute_primal();
      perturb_costs(round);
      compute_duals();
      auto outcome = dual_phase(certificate);
      cost = cost_base;
      if (outcome == Outcome::Singular) {
        slack_basis();
        refactor();
        continue;
      }
      if (outcome == Outcome::Limit) {
        res.status = Status::IterationLimit;
        break;
      }
      if (outcome == Outcome::Infeasible) {
        res.status = Status::Infeasible;
        break;
      }
      refactor();
      compute_primal();
      compute_duals();
      bool primal_ok = true;
      for (int k = 0; k < m && primal_ok; ++k) primal_ok = infeasibility(head[k]) <= 0.0;
      if (!primal_ok) continue;
      auto pout = primal_phase();
      if (pout == PrimalOutcome::Singular) {
        slack_basis();
        refactor();
        continue;
      }
      if (pout == PrimalOutcome::Limit) {
        res.status = Status::IterationLimit;
        break;
      }
      if (pout == PrimalOutcome::Unbounded) {
        res.status = Status::Unbounded;
        break;
      }
      refactor();
      compute_primal();
      compute_duals();
      primal_ok = true;
      for (int k = 0; k < m && primal_ok; ++k) primal_ok = infeasibility(head[k]) <= 0.0;
      bool dual_ok = true;
      for (int j = 0; j < n + m && dual_ok; ++j) {
        if (state[j] == VarState::Basic || is_fixed(j)) continue;
        if (state[j] == VarState::AtLower) dual_ok = d[j] >= -opt.dual_tol;
        else if (state[j] == VarState::AtUpper) dual_ok = d[j] <= opt.dual_tol;
        else dual_ok = std::abs(d[j]) <= opt.dual_tol;
      }
      if (!primal_ok || !dual_ok) continue;
      res.status = Status::Optimal;
      for (int j = 0; j < n + m; ++j)
        if (boxed[j] && (x[j] <= lo[j] + opt.primal_tol || x[j] >= hi[j] - opt.primal_tol) &&
            (x[j] < base_lo[j] - opt.primal_tol || x[j] > base_hi[j] + opt.primal_tol ||
             !std::isfinite(base_lo[j]) || !std::isfinite(base_hi[j]))) {
          if (std::abs(x[j]) >= opt.box * 0.5) res.status = Status::Unbounded;
        }
      break;
    }

    res.x = x.head(n);
    res.objective = res.status == Status::Optimal     ? cost_base.head(n).dot(res.x)
                    : res.status == Status::Unbounded ? -kInf
                                                      : kInf;
    res.iterations = iterations;
    res.basis.state = state;
    res.certificate = certificate;
    // Boxed columns revert to their real bounds for the stored basis.
    for (int j = 0; j < n + m; ++j)
      if (boxed[j] && state[j] != VarState::Basic) {
        if (state[j] == VarState::AtLower && !std::isfinite(base_lo[j])) res.basis.state[j] = VarState::AtZero;
        if (state[j] == VarState::AtUpper && !std::isfinite(base_hi[j])) res.basis.state[j] = VarState::AtZero;
      }
    return res;
  }
};

Simplex::Simplex(const Problem& problem, Options options)
    : impl_(std::make_unique<Impl>(problem, options)) {}
Simplex::~Simplex() = default;
Simplex::Simplex(Simplex&&) noexcept = default;
Simplex& Simplex::operator=(Simplex&&) noexcept = default;

void Simplex::set_column_bounds(int col, double lower, double upper) {
  impl_->base_lo[col] = lower;
  impl_->base_hi[col] = upper;
}

void Simplex::reset_bounds() {
  impl_->base_lo.head(impl_->n) = impl_->prob.col_lower;
  impl_->base_hi.head(impl_->n) = impl_->prob.col_upper;
}

Result Simplex::solve(const Basis* warm) { return impl_->solve(warm); }

bool Simplex::uses_dense_factor() const { return impl_->dense; }

Result solve(const Problem& problem, const Options& options) {
  Simplex s(problem, options);
  return s.solve();
}

}  // namespace phasebal::lp
