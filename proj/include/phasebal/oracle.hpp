#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "phasebal/formulation.hpp"
#include "phasebal/lp.hpp"

namespace phasebal {

/// Raised when the assignment space is too large to enumerate.
class EnumerationLimit : public std::runtime_error {
 public:
  EnumerationLimit(double count, double limit);
  double count() const { return count_; }

 private:
  double count_;
};

inline constexpr double kEnumerationLimit = 1e6;

/// Product over buses of the number of nonempty phase subsets.
double assignment_space_size(const Network& net);

/// Calls `visit` once for every consistent assignment: nonempty subsets,
/// children within their parent's chosen phases, the source on all of its
/// phases. Buses are decided in topological order and subsets are tried in
/// increasing bitmask order. Returns the number of assignments visited.
std::uint64_t enumerate_assignments(const Network& net, const std::function<void(const PhaseAssignment&)>& visit,
                                    double limit = kEnumerationLimit);

struct Certificate {
  bool feasible = false;
  double best_objective = kInfinity;
  std::vector<PhaseAssignment> best_assignments;  // ties within 1e-6 relative
  std::uint64_t assignments = 0;
  std::uint64_t infeasible_assignments = 0;
};

/// Global optimum by exhaustive enumeration, solving the LP of every fixed
/// assignment.
Certificate certify(const Network& net, const CaseConfig& cfg, double limit = kEnumerationLimit);

/// Objective of the LP with every binary fixed to `xi`; +inf if infeasible.
double fixed_assignment_objective(const MilpModel& model, const PhaseAssignment& xi,
                                  const lp::Options& options = {});

}  // namespace phasebal
