#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "phasebal/analysis.hpp"
#include "phasebal/formulation.hpp"
#include "phasebal/mip.hpp"
#include "phasebal/network.hpp"
#include "phasebal/oracle.hpp"

namespace phasebal::cli {

enum ExitCode : int {
  kExitOptimal = 0,
  kExitSolverError = 1,
  kExitInfeasible = 2,
  kExitLimit = 3,
  kExitInputError = 4,
};

/// Everything that determines a run. No randomness is involved.
struct RunManifest {
  std::filesystem::path feeder;
  std::string case_name = "1";  // "1", "2", "3" or "custom"
  std::optional<double> multiplier;
  double alpha = 1e-2;
  std::optional<double> v_min, v_max;  // pu^2
  double gap = 1e-6;
  double time_limit = 600.0;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> export_model;
  bool oracle = false;
};

/// Raised for bad manifests and unreadable or invalid feeders.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Capacity multiplier of a case; custom requires `multiplier`.
double case_multiplier(const RunManifest& m);

/// Voltage band precedence: manifest, then feeder document, then defaults.
CaseConfig make_config(const RunManifest& m, const Network& net);

struct RunResult {
  int exit_code = kExitOptimal;
  CaseConfig config;
  std::optional<MilpModel> model;  // absent when infeasible by construction
  MipResult mip;
  std::optional<Solution> solution;
  UnbalanceReport base_metric;
  std::optional<UnbalanceReport> metric;
  std::optional<SolutionAudit> audit;
  std::optional<Certificate> certificate;
  std::optional<bool> oracle_agrees;
  std::string message;  // set when no solution exists
};

/// Loads the feeder, builds and solves the model and (optionally) certifies
/// it. Throws InputError before any solving if the inputs are unusable.
RunResult solve_case(const RunManifest& m, const Network& net);

/// Full `run` command: solves and writes solution.csv, unbalance.csv,
/// reassignment.csv, summary.json and timing.json into m.out_dir. Every file
/// but timing.json is byte-identical across runs with the same manifest.
/// Nothing is written when the inputs are unusable.
int run(const RunManifest& m, std::ostream& out, std::ostream& err);

/// `sweep` command: one run per alpha, rows in the given order, written to
/// sweep.csv (timings in timing.json). Returns the first non-optimal exit
/// code, or 0.
int sweep(const RunManifest& m, const std::vector<double>& alphas, std::ostream& out, std::ostream& err);

/// Buses whose chosen phases differ from `reference`, in network order. Buses
/// with an empty reference (nothing to serve) are not compared.
std::vector<std::string> changed_buses(const Network& net, const PhaseAssignment& xi,
                                       const std::vector<PhaseSet>& reference);

/// Parses the command line and dispatches. Output directory defaults to
/// $PHASEBAL_OUT_DIR, then ./phasebal_out.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace phasebal::cli
