#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phasebal/lp.hpp"

namespace phasebal {

struct MilpModel;

enum class MipStatus { Optimal, Infeasible, Unbounded, TimeLimit, NodeLimit, Error };

const char* to_string(MipStatus s);

struct MipOptions {
  /// Stop when incumbent - bound <= gap * max(1, |incumbent|).
  double gap = 1e-6;
  double time_limit = 600.0;  // seconds
  long node_limit = 10'000'000;
  double integrality_tol = 1e-6;
  /// Round every integer column of the root relaxation up and re-solve.
  bool round_up_heuristic = true;
  lp::Options lp;
};

struct TracePoint {
  long node = 0;
  double seconds = 0.0;
  double bound = 0.0;
  double incumbent = 0.0;  // +inf before the first incumbent
};

struct MipResult {
  MipStatus status = MipStatus::Error;
  Eigen::VectorXd x;  // empty when no incumbent exists
  double objective = 0.0;
  double bound = 0.0;
  long nodes = 0;
  long lp_iterations = 0;
  double seconds = 0.0;
  std::vector<TracePoint> trace;  // one entry per change of bound or incumbent
  std::string certificate;

  bool has_solution() const { return x.size() > 0; }
  double gap() const;
};

/// Branch-and-bound over the integer columns of an LP. Nodes are explored
/// best-bound first, diving into the child on the rounding side; branching
/// picks the most fractional column, lowest index on ties. Each node warm
/// starts the dual simplex from its parent's optimal basis.
MipResult solve_mip(const lp::Problem& problem, const std::vector<int>& integer_cols,
                    const MipOptions& options = {});

/// Solves a model's binaries with branch-and-bound.
MipResult solve_mip(const MilpModel& model, const MipOptions& options = {});

/// LP relaxation of a model.
lp::Result solve_relaxation(const MilpModel& model, const lp::Options& options = {});

}  // namespace phasebal
