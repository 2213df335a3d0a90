#pragma once

#include <array>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phasebal/lin3distflow.hpp"
#include "phasebal/network.hpp"

namespace phasebal {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct CaseConfig {
  double alpha = 1e-2;
  double capacity_multiplier = 1.0;
  double v_min = 0.95 * 0.95;  // pu^2
  double v_max = 1.05 * 1.05;  // pu^2
  double mip_gap = 1e-6;
  double time_limit = 600.0;  // seconds

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

enum class VarKind { Continuous, Binary };

enum class VarRole { Xi, PInj, QInj, PFlow, QFlow, V, VMean, TAbs };

enum class Relation { LessEqual, Equal, GreaterEqual };

/// Constraint families of the phase-allocation model. SourceFix and
/// VoltageBounds are carried as variable bounds rather than rows.
enum class ConstraintTag {
  SourceFix,      // xi fixed to 1 on the source phases
  InjectionCapP,  // p_inj <= pbar * xi
  InjectionCapQ,  // q_inj <= qbar * xi
  PowerFactor,    // q_inj <= p_inj
  TotalP,         // sum_phi p_inj = sum_phi phat
  TotalQ,         // sum_phi q_inj = sum_phi qhat
  PhaseCount,     // sum_phi xi <= |P_n|
  Energized,      // sum_phi xi >= 1
  Consistency,    // xi_parent >= xi_child
  BalanceP,       // p_flow = sum child p_flow + p_inj
  BalanceQ,
  VoltageDrop,    // v_k = v_l + M^P p + M^Q q
  VoltageBounds,  // v_min <= v <= v_max
  VoltageMean,    // v_mean = mean over present phases of v
  AbsUpper,       // t >= v_mean - v
  AbsLower,       // t >= v - v_mean
};

inline constexpr int kConstraintTagCount = 16;

const char* to_string(ConstraintTag tag);
const char* to_string(VarRole role);

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = kInfinity;
  VarRole role = VarRole::PInj;
  int bus = -1;
  std::optional<Phase> phase;
};

struct Term {
  int var;
  double coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;  // sorted by variable index, no duplicates
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
  ConstraintTag tag = ConstraintTag::InjectionCapP;
};

struct BoundRecord {
  int var;
  ConstraintTag tag;
};

/// Topology carried with the model so assignments can be checked without the
/// originating Network.
struct ModelTopology {
  std::vector<std::string> bus_ids;
  std::vector<int> parent;  // -1 for the source
  std::vector<PhaseSet> phases;
  int source = -1;
};

/// Per-bus phase activation (xi = 1 on the phases in the set).
using PhaseAssignment = std::vector<PhaseSet>;

/// Solver-agnostic MILP in minimization form.
struct MilpModel {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<BoundRecord> bound_records;
  Eigen::VectorXd objective;
  ModelTopology topology;
  /// var_index[role][bus][phase] (VMean uses phase slot 0), -1 where absent.
  std::array<std::vector<std::array<int, 3>>, 8> var_index;

  int var(VarRole role, std::size_t bus, Phase p = Phase::A) const {
    return var_index[static_cast<int>(role)][bus][index(p)];
  }
  std::size_t count(ConstraintTag tag) const;
  std::size_t count(VarRole role) const;
  std::size_t binary_count() const;
  double evaluate_objective(const Eigen::VectorXd& x) const;
  /// Largest bound or row violation of x (integrality not checked).
  double max_violation(const Eigen::VectorXd& x) const;
};

/// Raised before solving when the data make the model infeasible by
/// construction; names the offending bus.
class FormulationError : public std::runtime_error {
 public:
  FormulationError(std::string bus, const std::string& message)
      : std::runtime_error(message), bus_(std::move(bus)) {}
  const std::string& bus() const { return bus_; }

 private:
  std::string bus_;
};

MilpModel build_model(const Network& net, const CaseConfig& cfg);

/// Copy of `model` with every binary fixed to the assignment; the result has
/// no free integer decisions. Throws std::invalid_argument for an assignment
/// that is inconsistent, changes the source phases, uses an absent phase or
/// leaves a bus without phases.
MilpModel fix_assignment(const MilpModel& model, const PhaseAssignment& xi);

/// Checks an assignment against the model topology; returns an empty string
/// when valid, otherwise a description of the first problem.
std::string check_assignment(const ModelTopology& topo, const PhaseAssignment& xi);

/// Decoded model solution in network terms.
struct Solution {
  PhaseAssignment xi;
  PhaseMatrix p_inj;  // pu
  PhaseMatrix q_inj;
  BranchFlows flows;
  PhasorState state;  // energized phases only
  Eigen::VectorXd v_mean;
  double objective = 0.0;
};

Solution decode_solution(const MilpModel& model, const Network& net, const Eigen::VectorXd& x);

}  // namespace phasebal
