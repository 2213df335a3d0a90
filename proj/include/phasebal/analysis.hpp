#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phasebal/formulation.hpp"
#include "phasebal/lin3distflow.hpp"
#include "phasebal/network.hpp"

namespace phasebal {

/// Voltage unbalance: sum over buses and present phases of |mean(v) - v|,
/// the mean taken over the bus's present phases. Units are pu^2.
struct UnbalanceReport {
  double total = 0.0;
  Eigen::VectorXd per_bus;
  Eigen::VectorXd v_mean;
  std::vector<PhaseSet> phases;  // phases the metric ran over
  /// Same deviation sum taken on magnitudes sqrt(v), in pu.
  double magnitude_total = 0.0;
};

UnbalanceReport unbalance_metric(const PhasorState& state);

struct ReassignmentRow {
  std::string bus;
  PhaseVector original_p_kw, original_q_kvar;
  PhaseVector optimized_p_kw, optimized_q_kvar;
  bool changed = false;
};

struct ReassignmentTable {
  std::vector<ReassignmentRow> rows;  // loaded buses, network order
  PhaseVector original_p_kw = PhaseVector::Zero(), original_q_kvar = PhaseVector::Zero();
  PhaseVector optimized_p_kw = PhaseVector::Zero(), optimized_q_kvar = PhaseVector::Zero();
};

/// Rows differing from the original split by more than this (kW or kVAr) are
/// flagged as changed.
inline constexpr double kChangedThresholdKw = 0.5;

ReassignmentTable reassignment(const Network& net, const Solution& sol);

/// Programmatic check of a decoded solution against the model's physics and
/// phase rules. Errors are absolute: kW/kVAr for totals, pu otherwise.
struct SolutionAudit {
  double total_p_error_kw = 0.0;
  double total_q_error_kvar = 0.0;
  double balance_residual_pu = 0.0;
  double power_factor_violation_pu = 0.0;  // max over phases of q - p and -q, -p
  double voltage_drop_residual_pu = 0.0;
  bool consistent = true;         // xi_child within xi_parent on every line
  bool phase_count_ok = true;     // sum xi within |P_n|
  bool injections_on_active = true;  // no injection on a deactivated phase
  std::vector<std::string> problems;

  bool ok(double total_tol_kw = 1e-6, double balance_tol = 1e-8, double pf_tol = 1e-9) const;
};

SolutionAudit audit(const Network& net, const Solution& sol);

void write_unbalance_csv(std::ostream& os, const Network& net, const UnbalanceReport& report);
void write_reassignment_csv(std::ostream& os, const ReassignmentTable& table);
/// Per-bus phase assignment, injections (kW, kVAr) and squared voltages.
void write_solution_csv(std::ostream& os, const Network& net, const Solution& sol);

/// Aligned text tables for terminal output.
std::string format_reassignment(const ReassignmentTable& table);
std::string format_unbalance(const Network& net, const UnbalanceReport& report);

}  // namespace phasebal
