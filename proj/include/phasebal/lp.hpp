#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace phasebal {
struct MilpModel;
}

namespace phasebal::lp {

/// min c'x  s.t.  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper.
/// Infinite bounds are +/-infinity.
struct Problem {
  Eigen::SparseMatrix<double> a;  // rows x cols, column major
  Eigen::VectorXd cost;
  Eigen::VectorXd col_lower, col_upper;
  Eigen::VectorXd row_lower, row_upper;

  int rows() const { return static_cast<int>(a.rows()); }
  int cols() const { return static_cast<int>(a.cols()); }
};

/// LP view of a model; binaries are relaxed to their bounds.
Problem from_model(const MilpModel& model);

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(Status s);

enum class VarState : std::int8_t { Basic, AtLower, AtUpper, AtZero };

/// State of every column followed by every row logical (A x - r = 0).
struct Basis {
  std::vector<VarState> state;
  bool empty() const { return state.empty(); }
  bool operator==(const Basis&) const = default;
};

enum class FactorKind { Auto, Dense, Sparse };

struct Options {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-7;
  /// Reduced-cost slack allowed in the two-pass dual ratio test.
  double harris_tol = 1e-7;
  /// Relative size of the cost perturbation used during the dual phase
  /// (0 disables it). Removed before the final primal pass.
  double perturbation = 1e-6;
  long iteration_limit = 2'000'000;
  int refactor_interval = 100;
  /// Stalled (degenerate) iterations before switching to lowest-index rules.
  int stall_limit = 200;
  FactorKind factor = FactorKind::Auto;
  /// Auto uses the dense basis factorization up to this many rows.
  int dense_row_limit = 200;
  /// Magnitude of the temporary bound placed on an unbounded column whose
  /// reduced cost points to its infinite side.
  double box = 1e7;
};

struct Result {
  Status status = Status::Infeasible;
  Eigen::VectorXd x;  // column values
  double objective = 0.0;
  long iterations = 0;
  Basis basis;
  /// For Infeasible: the basic variable that no pivot could bring within bounds.
  std::string certificate;
};

/// Bounded-variable simplex. Runs the dual simplex from a dual feasible basis
/// (slack basis on a cold start, the previous basis on a warm start) and
/// finishes with primal simplex iterations if rounding left reduced costs
/// with the wrong sign. The basis inverse is kept as an LU factorization of
/// the refactored basis plus a product-form eta file; the LU is dense or
/// sparse depending on Options::factor. Pivoting rules are identical for both.
///
/// The engine keeps its basis between solve() calls, so changing column
/// bounds and re-solving continues from the last optimal basis.
class Simplex {
 public:
  explicit Simplex(const Problem& problem, Options options = {});
  ~Simplex();
  Simplex(Simplex&&) noexcept;
  Simplex& operator=(Simplex&&) noexcept;

  void set_column_bounds(int col, double lower, double upper);
  /// Restores every column bound to the problem's.
  void reset_bounds();

  /// Solves from `warm` if given, otherwise from the current basis (slack
  /// basis on the first call).
  Result solve(const Basis* warm = nullptr);

  bool uses_dense_factor() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Result solve(const Problem& problem, const Options& options = {});

}  // namespace phasebal::lp
