#include "phasebal/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phasebal {

void CaseConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (!(capacity_multiplier >= 1.0)) throw std::invalid_argument("capacity multiplier must be >= 1");
  if (!(v_min > 0.0 && v_min < v_max)) throw std::invalid_argument("voltage bounds need 0 < v_min < v_max");
  if (!(mip_gap >= 0.0)) throw std::invalid_argument("mip gap must be nonnegative");
  if (!(time_limit > 0.0)) throw std::invalid_argument("time limit must be positive");
}

const char* to_string(ConstraintTag tag) {
  switch (tag) {
    case ConstraintTag::SourceFix: return "source_fix";
    case ConstraintTag::InjectionCapP: return "cap_p";
    case ConstraintTag::InjectionCapQ: return "cap_q";
    case ConstraintTag::PowerFactor: return "pf";
    case ConstraintTag::TotalP: return "total_p";
    case ConstraintTag::TotalQ: return "total_q";
    case ConstraintTag::PhaseCount: return "phase_count";
    case ConstraintTag::Energized: return "energized";
    case ConstraintTag::Consistency: return "consistency";
    case ConstraintTag::BalanceP: return "balance_p";
    case ConstraintTag::BalanceQ: return "balance_q";
    case ConstraintTag::VoltageDrop: return "vdrop";
    case ConstraintTag::VoltageBounds: return "vbounds";
    case ConstraintTag::VoltageMean: return "vmean";
    case ConstraintTag::AbsUpper: return "abs_up";
    case ConstraintTag::AbsLower: return "abs_lo";
  }
  return "?";
}

const char* to_string(VarRole role) {
  switch (role) {
    case VarRole::Xi: return "xi";
    case VarRole::PInj: return "p_inj";
    case VarRole::QInj: return "q_inj";
    case VarRole::PFlow: return "p_flow";
    case VarRole::QFlow: return "q_flow";
    case VarRole::V: return "v";
    case VarRole::VMean: return "v_mean";
    case VarRole::TAbs: return "t_abs";
  }
  return "?";
}

std::size_t MilpModel::count(ConstraintTag tag) const {
  auto rows = std::count_if(constraints.begin(), constraints.end(),
                            [tag](const Constraint& c) { return c.tag == tag; });
  auto bounds = std::count_if(bound_records.begin(), bound_records.end(),
                              [tag](const BoundRecord& b) { return b.tag == tag; });
  return static_cast<std::size_t>(rows + bounds);
}

std::size_t MilpModel::count(VarRole role) const {
  return static_cast<std::size_t>(std::count_if(variables.begin(), variables.end(),
                                                [role](const Variable& v) { return v.role == role; }));
}

std::size_t MilpModel::binary_count() const {
  return static_cast<std::size_t>(std::count_if(
      variables.begin(), variables.end(), [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

double MilpModel::evaluate_objective(const Eigen::VectorXd& x) const { return objective.dot(x); }

double MilpModel::max_violation(const Eigen::VectorXd& x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < variables.size(); ++j) {
    worst = std::max(worst, variables[j].lower - x[j]);
    worst = std::max(worst, x[j] - variables[j].upper);
  }
  for (const auto& c : constraints) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * x[t.var];
    switch (c.relation) {
      case Relation::LessEqual: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::GreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

namespace {

class ModelBuilder {
 public:
  explicit ModelBuilder(MilpModel& model) : m_(model) {}

  int add_var(VarRole role, int bus, std::optional<Phase> phase, const std::string& bus_id, VarKind kind,
              double lo, double hi) {
    Variable v;
    v.name = std::string(to_string(role)) + "_" + bus_id;
    if (phase) v.name += std::string("_") + to_char(*phase);
    v.kind = kind;
    v.lower = lo;
    v.upper = hi;
    v.role = role;
    v.bus = bus;
    v.phase = phase;
    const int id = static_cast<int>(m_.variables.size());
    m_.variables.push_back(std::move(v));
    m_.var_index[static_cast<int>(role)][bus][phase ? index(*phase) : 0] = id;
    return id;
  }

  void add_row(ConstraintTag tag, std::vector<Term> terms, Relation rel, double rhs, const std::string& suffix) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> merged;
    for (const auto& t : terms) {
      if (!merged.empty() && merged.back().var == t.var)
        merged.back().coef += t.coef;
      else
        merged.push_back(t);
    }
    std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
    Constraint c;
    c.name = std::string(to_string(tag)) + "_" + suffix;
    c.terms = std::move(merged);
    c.relation = rel;
    c.rhs = rhs;
    c.tag = tag;
    m_.constraints.push_back(std::move(c));
  }

 private:
  MilpModel& m_;
};

void check_constructible(const Network& net, const CaseConfig& cfg) {
  for (const auto& b : net.buses()) {
    const double p_total = b.load_p_kw.sum();
    const double q_total = b.load_q_kvar.sum();
    double q_reach = 0.0;
    for (Phase p : kPhases) {
      const int k = index(p);
      q_reach += std::min(cfg.capacity_multiplier * b.load_q_kvar[k], cfg.capacity_multiplier * b.load_p_kw[k]);
    }
    if (q_total > p_total * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "bus " << b.id << ": reactive demand " << q_total << " kVAr exceeds real demand " << p_total
         << " kW, which the per-phase limit q <= p cannot serve";
      throw FormulationError(b.id, os.str());
    }
    if (q_total > q_reach * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "bus " << b.id << ": reactive demand " << q_total << " kVAr exceeds the " << q_reach
         << " kVAr reachable under per-phase limits";
      throw FormulationError(b.id, os.str());
    }
  }
}

}  // namespace

MilpModel build_model(const Network& net, const CaseConfig& cfg) {
  cfg.validate();
  check_constructible(net, cfg);

  const std::size_t n = net.bus_count();
  MilpModel model;
  for (auto& table : model.var_index) table.assign(n, {-1, -1, -1});

  auto& topo = model.topology;
  topo.source = static_cast<int>(net.source());
  for (std::size_t b = 0; b < n; ++b) {
    topo.bus_ids.push_back(net.bus(b).id);
    topo.parent.push_back(net.parent(b) == Network::npos ? -1 : static_cast<int>(net.parent(b)));
    topo.phases.push_back(net.bus(b).phases);
  }

  ModelBuilder mb(model);
  const double base = net.phase_power_base_kw();
  const auto src = net.source();
  const auto& order = net.topological_order();

  for (auto b : order) {
    const auto& bus = net.bus(b);
    const int bi = static_cast<int>(b);
    const bool is_src = b == src;
    for (Phase p : kPhases) {
      if (!bus.phases.contains(p)) continue;
      const int k = index(p);
      const int xi = mb.add_var(VarRole::Xi, bi, p, bus.id, VarKind::Binary, is_src ? 1.0 : 0.0, 1.0);
      if (is_src) model.bound_records.push_back({xi, ConstraintTag::SourceFix});
      mb.add_var(VarRole::PInj, bi, p, bus.id, VarKind::Continuous, 0.0,
                 cfg.capacity_multiplier * bus.load_p_kw[k] / base);
      mb.add_var(VarRole::QInj, bi, p, bus.id, VarKind::Continuous, 0.0,
                 cfg.capacity_multiplier * bus.load_q_kvar[k] / base);
      const double vlo = is_src ? net.info().source_v[k] : cfg.v_min;
      const double vhi = is_src ? net.info().source_v[k] : cfg.v_max;
      const int v = mb.add_var(VarRole::V, bi, p, bus.id, VarKind::Continuous, vlo, vhi);
      if (!is_src) model.bound_records.push_back({v, ConstraintTag::VoltageBounds});
      mb.add_var(VarRole::TAbs, bi, p, bus.id, VarKind::Continuous, 0.0, kInfinity);
    }
    mb.add_var(VarRole::VMean, bi, std::nullopt, bus.id, VarKind::Continuous, -kInfinity, kInfinity);
    if (!is_src)
      for (Phase p : kPhases)
        if (bus.phases.contains(p)) {
          mb.add_var(VarRole::PFlow, bi, p, bus.id, VarKind::Continuous, -kInfinity, kInfinity);
          mb.add_var(VarRole::QFlow, bi, p, bus.id, VarKind::Continuous, -kInfinity, kInfinity);
        }
  }

  auto V = [&](VarRole role, std::size_t b, Phase p = Phase::A) { return model.var(role, b, p); };

  for (auto b : order) {
    const auto& bus = net.bus(b);
    const std::string& id = bus.id;
    const double np = static_cast<double>(bus.phases.size());
    std::vector<Term> xi_sum, p_sum, q_sum, v_avg;
    for (Phase p : kPhases) {
      if (!bus.phases.contains(p)) continue;
      const int k = index(p);
      const std::string sfx = id + "_" + to_char(p);
      const double pbar = cfg.capacity_multiplier * bus.load_p_kw[k] / base;
      const double qbar = cfg.capacity_multiplier * bus.load_q_kvar[k] / base;
      const int xi = V(VarRole::Xi, b, p);
      const int pi = V(VarRole::PInj, b, p);
      const int qi = V(VarRole::QInj, b, p);
      const int v = V(VarRole::V, b, p);
      const int t = V(VarRole::TAbs, b, p);
      const int vm = V(VarRole::VMean, b);
      mb.add_row(ConstraintTag::InjectionCapP, {{pi, 1.0}, {xi, -pbar}}, Relation::LessEqual, 0.0, sfx);
      mb.add_row(ConstraintTag::InjectionCapQ, {{qi, 1.0}, {xi, -qbar}}, Relation::LessEqual, 0.0, sfx);
      mb.add_row(ConstraintTag::PowerFactor, {{qi, 1.0}, {pi, -1.0}}, Relation::LessEqual, 0.0, sfx);
      mb.add_row(ConstraintTag::AbsUpper, {{t, 1.0}, {vm, -1.0}, {v, 1.0}}, Relation::GreaterEqual, 0.0, sfx);
      mb.add_row(ConstraintTag::AbsLower, {{t, 1.0}, {vm, 1.0}, {v, -1.0}}, Relation::GreaterEqual, 0.0, sfx);
      xi_sum.push_back({xi, 1.0});
      p_sum.push_back({pi, 1.0});
      q_sum.push_back({qi, 1.0});
      v_avg.push_back({v, -1.0 / np});
    }
    mb.add_row(ConstraintTag::TotalP, p_sum, Relation::Equal, bus.load_p_kw.sum() / base, id);
    mb.add_row(ConstraintTag::TotalQ, q_sum, Relation::Equal, bus.load_q_kvar.sum() / base, id);
    mb.add_row(ConstraintTag::PhaseCount, xi_sum, Relation::LessEqual, np, id);
    mb.add_row(ConstraintTag::Energized, xi_sum, Relation::GreaterEqual, 1.0, id);
    v_avg.push_back({V(VarRole::VMean, b), 1.0});
    mb.add_row(ConstraintTag::VoltageMean, v_avg, Relation::Equal, 0.0, id);

    if (b == src) continue;
    const auto parent = net.parent(b);
    const auto sens = line_sensitivity(net, b);
    for (Phase p : kPhases) {
      if (!bus.phases.contains(p)) continue;
      const int k = index(p);
      const std::string sfx = id + "_" + to_char(p);
      mb.add_row(ConstraintTag::Consistency, {{V(VarRole::Xi, parent, p), 1.0}, {V(VarRole::Xi, b, p), -1.0}},
                 Relation::GreaterEqual, 0.0, sfx);
      std::vector<Term> bp{{V(VarRole::PFlow, b, p), 1.0}, {V(VarRole::PInj, b, p), -1.0}};
      std::vector<Term> bq{{V(VarRole::QFlow, b, p), 1.0}, {V(VarRole::QInj, b, p), -1.0}};
      for (auto c : net.children(b))
        if (net.bus(c).phases.contains(p)) {
          bp.push_back({V(VarRole::PFlow, c, p), -1.0});
          bq.push_back({V(VarRole::QFlow, c, p), -1.0});
        }
      mb.add_row(ConstraintTag::BalanceP, bp, Relation::Equal, 0.0, sfx);
      mb.add_row(ConstraintTag::BalanceQ, bq, Relation::Equal, 0.0, sfx);

      std::vector<Term> drop{{V(VarRole::V, b, p), 1.0}, {V(VarRole::V, parent, p), -1.0}};
      for (Phase q : kPhases) {
        if (!bus.phases.contains(q)) continue;
        drop.push_back({V(VarRole::PFlow, b, q), -sens.mp(k, index(q))});
        drop.push_back({V(VarRole::QFlow, b, q), -sens.mq(k, index(q))});
      }
      mb.add_row(ConstraintTag::VoltageDrop, drop, Relation::Equal, 0.0, sfx);
    }
  }

  model.objective = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.variables.size()));
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    if (model.variables[j].role == VarRole::Xi) model.objective[j] = 1.0;
    if (model.variables[j].role == VarRole::TAbs) model.objective[j] = cfg.alpha;
  }
  return model;
}

std::string check_assignment(const ModelTopology& topo, const PhaseAssignment& xi) {
  if (xi.size() != topo.bus_ids.size()) return "assignment has the wrong number of buses";
  for (std::size_t b = 0; b < xi.size(); ++b) {
    const auto& id = topo.bus_ids[b];
    if (!xi[b].is_subset_of(topo.phases[b]))
      return "bus " + id + " activates a phase it does not have (" + xi[b].to_string() + " vs " +
             topo.phases[b].to_string() + ")";
    if (xi[b].empty()) return "bus " + id + " has no active phase";
    if (xi[b].size() > topo.phases[b].size()) return "bus " + id + " exceeds its phase count";
    if (static_cast<int>(b) == topo.source && xi[b] != topo.phases[b])
      return "source bus " + id + " must keep all of its phases";
    const int parent = topo.parent[b];
    if (parent >= 0 && !xi[b].is_subset_of(xi[parent]))
      return "bus " + id + " (" + xi[b].to_string() + ") activates a phase inactive upstream at " +
             topo.bus_ids[parent] + " (" + xi[parent].to_string() + ")";
  }
  return {};
}

MilpModel fix_assignment(const MilpModel& model, const PhaseAssignment& xi) {
  if (auto problem = check_assignment(model.topology, xi); !problem.empty())
    throw std::invalid_argument(problem);
  MilpModel fixed = model;
  for (auto& v : fixed.variables) {
    if (v.kind != VarKind::Binary) continue;
    const double val = xi[v.bus].contains(*v.phase) ? 1.0 : 0.0;
    v.lower = v.upper = val;
  }
  return fixed;
}

Solution decode_solution(const MilpModel& model, const Network& net, const Eigen::VectorXd& x) {
  const std::size_t n = net.bus_count();
  Solution sol;
  sol.xi.assign(n, PhaseSet{});
  sol.p_inj = PhaseMatrix::Zero(n, 3);
  sol.q_inj = PhaseMatrix::Zero(n, 3);
  sol.flows.p = PhaseMatrix::Zero(n, 3);
  sol.flows.q = PhaseMatrix::Zero(n, 3);
  sol.state.v = PhaseMatrix::Zero(n, 3);
  sol.v_mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t b = 0; b < n; ++b) {
    sol.v_mean[b] = x[model.var(VarRole::VMean, b)];
    for (Phase p : kPhases) {
      if (!net.bus(b).phases.contains(p)) continue;
      const int k = index(p);
      if (x[model.var(VarRole::Xi, b, p)] > 0.5) sol.xi[b].insert(p);
      sol.p_inj(b, k) = x[model.var(VarRole::PInj, b, p)];
      sol.q_inj(b, k) = x[model.var(VarRole::QInj, b, p)];
      sol.state.v(b, k) = x[model.var(VarRole::V, b, p)];
      if (b != net.source()) {
        sol.flows.p(b, k) = x[model.var(VarRole::PFlow, b, p)];
        sol.flows.q(b, k) = x[model.var(VarRole::QFlow, b, p)];
      }
    }
  }
  // The reported state covers energized phases only.
  sol.state.phases = sol.xi;
  for (std::size_t b = 0; b < n; ++b)
    for (Phase p : kPhases)
      if (!sol.xi[b].contains(p)) sol.state.v(b, index(p)) = 0.0;
  sol.objective = model.evaluate_objective(x);
  return sol;
}

}  // namespace phasebal
