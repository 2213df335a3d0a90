#include "phasebal/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace phasebal {

UnbalanceReport unbalance_metric(const PhasorState& state) {
  const auto n = static_cast<Eigen::Index>(state.phases.size());
  UnbalanceReport r;
  r.per_bus = Eigen::VectorXd::Zero(n);
  r.v_mean = Eigen::VectorXd::Zero(n);
  r.phases = state.phases;
  for (Eigen::Index b = 0; b < n; ++b) {
    const PhaseSet ph = state.phases[b];
    if (ph.empty()) continue;
    double mean = 0.0;
    for (Phase p : kPhases)
      if (ph.contains(p)) mean += state.v(b, index(p));
    mean /= static_cast<double>(ph.size());
    double dev = 0.0;
    for (Phase p : kPhases)
      if (ph.contains(p)) dev += std::abs(mean - state.v(b, index(p)));
    r.v_mean[b] = mean;
    r.per_bus[b] = dev;

    double mag_mean = 0.0;
    for (Phase p : kPhases)
      if (ph.contains(p)) mag_mean += std::sqrt(std::max(0.0, state.v(b, index(p))));
    mag_mean /= static_cast<double>(ph.size());
    for (Phase p : kPhases)
      if (ph.contains(p)) r.magnitude_total += std::abs(mag_mean - std::sqrt(std::max(0.0, state.v(b, index(p)))));
  }
  r.total = r.per_bus.sum();
  return r;
}

ReassignmentTable reassignment(const Network& net, const Solution& sol) {
  const double base = net.phase_power_base_kw();
  ReassignmentTable t;
  for (std::size_t b = 0; b < net.bus_count(); ++b) {
    const auto& bus = net.bus(b);
    if (bus.load_p_kw.isZero(0.0) && bus.load_q_kvar.isZero(0.0)) continue;
    ReassignmentRow row;
    row.bus = bus.id;
    row.original_p_kw = bus.load_p_kw;
    row.original_q_kvar = bus.load_q_kvar;
    row.optimized_p_kw = sol.p_inj.row(b).transpose() * base;
    row.optimized_q_kvar = sol.q_inj.row(b).transpose() * base;
    row.changed = (row.optimized_p_kw - row.original_p_kw).cwiseAbs().maxCoeff() > kChangedThresholdKw ||
                  (row.optimized_q_kvar - row.original_q_kvar).cwiseAbs().maxCoeff() > kChangedThresholdKw;
    t.original_p_kw += row.original_p_kw;
    t.original_q_kvar += row.original_q_kvar;
    t.optimized_p_kw += row.optimized_p_kw;
    t.optimized_q_kvar += row.optimized_q_kvar;
    t.rows.push_back(std::move(row));
  }
  return t;
}

bool SolutionAudit::ok(double total_tol_kw, double balance_tol, double pf_tol) const {
  return total_p_error_kw <= total_tol_kw && total_q_error_kvar <= total_tol_kw &&
         balance_residual_pu <= balance_tol && power_factor_violation_pu <= pf_tol && consistent &&
         phase_count_ok && injections_on_active;
}

SolutionAudit audit(const Network& net, const Solution& sol) {
  SolutionAudit a;
  const double base = net.phase_power_base_kw();
  for (std::size_t b = 0; b < net.bus_count(); ++b) {
    const auto& bus = net.bus(b);
    const double ep = std::abs(sol.p_inj.row(b).sum() * base - bus.load_p_kw.sum());
    const double eq = std::abs(sol.q_inj.row(b).sum() * base - bus.load_q_kvar.sum());
    a.total_p_error_kw = std::max(a.total_p_error_kw, ep);
    a.total_q_error_kvar = std::max(a.total_q_error_kvar, eq);
    for (Phase p : kPhases) {
      const int k = index(p);
      const double pi = sol.p_inj(b, k);
      const double qi = sol.q_inj(b, k);
      a.power_factor_violation_pu = std::max({a.power_factor_violation_pu, qi - pi, -qi, -pi});
      if (!sol.xi[b].contains(p) && (std::abs(pi) > 1e-9 || std::abs(qi) > 1e-9)) {
        a.injections_on_active = false;
        a.problems.push_back("bus " + bus.id + " draws power on deactivated phase " + to_char(p));
      }
    }
    if (!sol.xi[b].is_subset_of(bus.phases) || sol.xi[b].size() > bus.phases.size()) {
      a.phase_count_ok = false;
      a.problems.push_back("bus " + bus.id + " uses phases " + sol.xi[b].to_string() + " outside " +
                           bus.phases.to_string());
    }
    const std::size_t parent = net.parent(b);
    if (parent != Network::npos && !sol.xi[b].is_subset_of(sol.xi[parent])) {
      a.consistent = false;
      a.problems.push_back("bus " + bus.id + " (" + sol.xi[b].to_string() + ") is not covered by parent " +
                           net.bus(parent).id + " (" + sol.xi[parent].to_string() + ")");
    }
    if (parent != Network::npos) {
      const auto m = line_sensitivity(net, b);
      const PhaseVector pf = sol.flows.p.row(b).transpose();
      const PhaseVector qf = sol.flows.q.row(b).transpose();
      const PhaseVector expect = sol.state.v.row(parent).transpose() + m.mp * pf + m.mq * qf;
      for (Phase p : kPhases)
        if (sol.xi[b].contains(p))
          a.voltage_drop_residual_pu =
              std::max(a.voltage_drop_residual_pu, std::abs(expect[index(p)] - sol.state.v(b, index(p))));
    }
  }
  a.balance_residual_pu = flow_balance_residual(net, sol.flows, sol.p_inj, sol.q_inj);
  if (a.total_p_error_kw > 1e-6 || a.total_q_error_kvar > 1e-6)
    a.problems.push_back("per-bus demand totals are not conserved");
  return a;
}

namespace {

std::string num(double v) {
  if (std::abs(v) < 5e-13) v = 0.0;
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string fixed(double v, int digits) {
  if (std::abs(v) < 0.5 * std::pow(10.0, -digits)) v = 0.0;
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

void write_unbalance_csv(std::ostream& os, const Network& net, const UnbalanceReport& report) {
  os << "bus,phases,v_mean,contribution\n";
  for (std::size_t b = 0; b < net.bus_count(); ++b)
    os << net.bus(b).id << ',' << report.phases[b].to_string() << ',' << num(report.v_mean[b]) << ','
       << num(report.per_bus[b]) << '\n';
  os << "total,,," << num(report.total) << '\n';
}

void write_reassignment_csv(std::ostream& os, const ReassignmentTable& table) {
  os << "bus,p_a_orig,p_b_orig,p_c_orig,q_a_orig,q_b_orig,q_c_orig,p_a_opt,p_b_opt,p_c_opt,q_a_opt,q_b_opt,q_c_opt,"
        "changed\n";
  auto vec = [&](const PhaseVector& v) { os << ',' << fixed(v[0], 4) << ',' << fixed(v[1], 4) << ',' << fixed(v[2], 4); };
  for (const auto& r : table.rows) {
    os << r.bus;
    vec(r.original_p_kw);
    vec(r.original_q_kvar);
    vec(r.optimized_p_kw);
    vec(r.optimized_q_kvar);
    os << ',' << (r.changed ? 1 : 0) << '\n';
  }
  os << "total";
  vec(table.original_p_kw);
  vec(table.original_q_kvar);
  vec(table.optimized_p_kw);
  vec(table.optimized_q_kvar);
  os << ",\n";
}

void write_solution_csv(std::ostream& os, const Network& net, const Solution& sol) {
  const double base = net.phase_power_base_kw();
  os << "bus,phase,present,active,p_kw,q_kvar,v_pu2,p_flow_kw,q_flow_kvar\n";
  for (std::size_t b = 0; b < net.bus_count(); ++b)
    for (Phase p : kPhases) {
      if (!net.bus(b).phases.contains(p)) continue;
      const int k = index(p);
      os << net.bus(b).id << ',' << to_char(p) << ",1," << (sol.xi[b].contains(p) ? 1 : 0) << ','
         << fixed(sol.p_inj(b, k) * base, 6) << ',' << fixed(sol.q_inj(b, k) * base, 6) << ','
         << fixed(sol.state.v(b, k), 9) << ',' << fixed(sol.flows.p(b, k) * base, 6) << ','
         << fixed(sol.flows.q(b, k) * base, 6) << '\n';
    }
}

std::string format_reassignment(const ReassignmentTable& table) {
  std::ostringstream os;
  auto cell = [](double p, double q) { return fixed(p, 1) + " / " + fixed(q, 1); };
  os << std::left << std::setw(8) << "bus" << std::setw(20) << "orig a" << std::setw(20) << "orig b"
     << std::setw(20) << "orig c" << std::setw(20) << "opt a" << std::setw(20) << "opt b" << std::setw(20)
     << "opt c" << '\n';
  auto line = [&](const std::string& name, const PhaseVector& op, const PhaseVector& oq, const PhaseVector& np,
                  const PhaseVector& nq, bool changed) {
    os << std::setw(8) << name;
    for (int k = 0; k < 3; ++k) os << std::setw(20) << cell(op[k], oq[k]);
    for (int k = 0; k < 3; ++k) os << std::setw(20) << cell(np[k], nq[k]);
    if (changed) os << '*';
    os << '\n';
  };
  for (const auto& r : table.rows)
    line(r.bus, r.original_p_kw, r.original_q_kvar, r.optimized_p_kw, r.optimized_q_kvar, r.changed);
  line("total", table.original_p_kw, table.original_q_kvar, table.optimized_p_kw, table.optimized_q_kvar, false);
  return os.str();
}

std::string format_unbalance(const Network& net, const UnbalanceReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "bus" << std::setw(8) << "phases" << std::setw(14) << "v_mean"
     << "contribution\n";
  for (std::size_t b = 0; b < net.bus_count(); ++b)
    os << std::setw(10) << net.bus(b).id << std::setw(8) << report.phases[b].to_string() << std::setw(14)
       << fixed(report.v_mean[b], 6) << fixed(report.per_bus[b], 6) << '\n';
  os << std::setw(32) << "total" << fixed(report.total, 6) << '\n';
  return os.str();
}

}  // namespace phasebal
