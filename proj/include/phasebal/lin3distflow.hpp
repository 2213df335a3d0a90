#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "phasebal/network.hpp"

namespace phasebal {

/// Voltage sensitivities of a line: squared-voltage change at the downstream
/// bus per unit of real (mp) and reactive (mq) flow on each phase.
template <typename Scalar>
struct SensitivityMatrices {
  Eigen::Matrix<Scalar, 3, 3> mp = Eigen::Matrix<Scalar, 3, 3>::Zero();
  Eigen::Matrix<Scalar, 3, 3> mq = Eigen::Matrix<Scalar, 3, 3>::Zero();
};

/// Builds M^P and M^Q from the line impedance. Diagonal entries are -2r and
/// -2x; an off-diagonal (j, k) entry is r + s*sqrt(3)*x for M^P and
/// x - s*sqrt(3)*r for M^Q, with s = -1 when k is the phase following j in
/// the a -> b -> c rotation and s = +1 otherwise. Rows and columns of phases
/// outside `phases` stay zero.
template <typename Scalar>
SensitivityMatrices<Scalar> build_sensitivity(const Eigen::Matrix<std::complex<Scalar>, 3, 3>& z,
                                              PhaseSet phases) {
  const Scalar sqrt3 = std::numbers::sqrt3_v<Scalar>;
  SensitivityMatrices<Scalar> m;
  for (Phase row : kPhases) {
    if (!phases.contains(row)) continue;
    for (Phase col : kPhases) {
      if (!phases.contains(col)) continue;
      const int i = index(row);
      const int j = index(col);
      const Scalar r = z(i, j).real();
      const Scalar x = z(i, j).imag();
      if (i == j) {
        m.mp(i, j) = Scalar(-2) * r;
        m.mq(i, j) = Scalar(-2) * x;
      } else {
        const Scalar s = (col == next(row)) ? Scalar(-1) : Scalar(1);
        m.mp(i, j) = r + s * sqrt3 * x;
        m.mq(i, j) = x - s * sqrt3 * r;
      }
    }
  }
  return m;
}

/// Per-unit sensitivities of the line feeding `bus` (zero for the source).
SensitivityMatrices<double> line_sensitivity(const Network& net, std::size_t bus);

/// Flows on the line feeding each bus (row = downstream bus, source row zero),
/// positive in the downstream direction, per-unit.
struct BranchFlows {
  PhaseMatrix p;
  PhaseMatrix q;
};

struct PhasorState {
  PhaseMatrix v;  // squared voltage magnitude, pu^2; zero on absent phases
  std::vector<PhaseSet> phases;
};

/// Lossless flows: each line carries the total injection of its downstream
/// subtree, accumulated in one reverse topological sweep. Injections are
/// demands in pu. Throws std::invalid_argument for an injection on an absent
/// phase.
BranchFlows downstream_flows(const Network& net, const PhaseMatrix& p_inj, const PhaseMatrix& q_inj);

/// v_child = v_parent + M^P p + M^Q q in one forward sweep from the source.
PhasorState propagate_voltages(const Network& net, const BranchFlows& flows,
                               const PhaseVector& v_source);

/// Voltages with every spot load served on its original phase.
PhasorState base_case_state(const Network& net);

/// Largest |flow_in - sum(child flows) - injection| over buses and phases.
double flow_balance_residual(const Network& net, const BranchFlows& flows, const PhaseMatrix& p_inj,
                             const PhaseMatrix& q_inj);

}  // namespace phasebal
