#pragma once

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "phasebal/formulation.hpp"

namespace phasebal {

/// Writes the model in CPLEX LP text format (Minimize / Subject To / Bounds /
/// Binaries / End). Numbers use the shortest round-trip representation, so
/// the file reproduces the model exactly. Layout is documented in README.md.
void write_lp(std::ostream& os, const MilpModel& model);

class SolutionFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads variable values from "name value" lines, as written by most LP
/// solvers. Lines whose first token is not a model variable are skipped, and
/// reading stops at a "# Rows" marker so row activities are not mistaken for
/// columns. Variables not listed are zero. Throws SolutionFormatError on a
/// malformed value or a variable listed twice.
Eigen::VectorXd read_solution(std::istream& is, const MilpModel& model);

/// Writes "name value" lines for every variable, in model order.
void write_solution_values(std::ostream& os, const MilpModel& model, const Eigen::VectorXd& x);

}  // namespace phasebal
