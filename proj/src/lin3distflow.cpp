#include "phasebal/lin3distflow.hpp"

#include <stdexcept>

namespace phasebal {

SensitivityMatrices<double> line_sensitivity(const Network& net, std::size_t bus) {
  const auto l = net.line_into(bus);
  if (l == Network::npos) return {};
  const ImpedanceMatrix z_pu = net.lines()[l].z_ohm / net.impedance_base_ohm();
  return build_sensitivity<double>(z_pu, net.bus(bus).phases);
}

BranchFlows downstream_flows(const Network& net, const PhaseMatrix& p_inj, const PhaseMatrix& q_inj) {
  const auto n = static_cast<Eigen::Index>(net.bus_count());
  if (p_inj.rows() != n || q_inj.rows() != n)
    throw std::invalid_argument("injection matrices must have one row per bus");
  for (Eigen::Index b = 0; b < n; ++b)
    for (Phase p : kPhases)
      if (!net.bus(b).phases.contains(p) && (p_inj(b, index(p)) != 0.0 || q_inj(b, index(p)) != 0.0))
        throw std::invalid_argument("injection on absent phase " + std::string(1, to_char(p)) + " at bus " +
                                    net.bus(b).id);

  BranchFlows flows{p_inj, q_inj};
  const auto& order = net.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    for (auto c : net.children(*it)) {
      flows.p.row(*it) += flows.p.row(c);
      flows.q.row(*it) += flows.q.row(c);
    }
  flows.p.row(net.source()).setZero();
  flows.q.row(net.source()).setZero();
  return flows;
}

PhasorState propagate_voltages(const Network& net, const BranchFlows& flows, const PhaseVector& v_source) {
  PhasorState state;
  state.v = PhaseMatrix::Zero(net.bus_count(), 3);
  state.phases.reserve(net.bus_count());
  for (const auto& b : net.buses()) state.phases.push_back(b.phases);

  const auto src = net.source();
  for (Phase p : kPhases)
    if (net.bus(src).phases.contains(p)) state.v(src, index(p)) = v_source[index(p)];

  for (auto b : net.topological_order()) {
    if (b == src) continue;
    const auto m = line_sensitivity(net, b);
    const PhaseVector drop = m.mp * flows.p.row(b).transpose() + m.mq * flows.q.row(b).transpose();
    const auto parent = net.parent(b);
    for (Phase p : kPhases)
      if (net.bus(b).phases.contains(p))
        state.v(b, index(p)) = state.v(parent, index(p)) + drop[index(p)];
  }
  return state;
}

PhasorState base_case_state(const Network& net) {
  const auto flows = downstream_flows(net, net.load_p_pu(), net.load_q_pu());
  return propagate_voltages(net, flows, net.info().source_v);
}

double flow_balance_residual(const Network& net, const BranchFlows& flows, const PhaseMatrix& p_inj,
                             const PhaseMatrix& q_inj) {
  double worst = 0.0;
  for (std::size_t b = 0; b < net.bus_count(); ++b) {
    if (b == net.source()) continue;
    for (Phase p : kPhases) {
      if (!net.bus(b).phases.contains(p)) continue;
      const int k = index(p);
      double rp = flows.p(b, k) - p_inj(b, k);
      double rq = flows.q(b, k) - q_inj(b, k);
      for (auto c : net.children(b)) {
        rp -= flows.p(c, k);
        rq -= flows.q(c, k);
      }
      worst = std::max({worst, std::abs(rp), std::abs(rq)});
    }
  }
  return worst;
}

}  // namespace phasebal
