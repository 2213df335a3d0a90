#include "phasebal/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "phasebal/feeder_io.hpp"
#include "phasebal/lp_format.hpp"

namespace phasebal::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kBalanceConvention =
    "p_flow(line into bus) = sum(p_flow of child lines) + p_inj(bus), per phase; same for q";

Network read_network(const fs::path& path) {
  try {
    return load_feeder(path);
  } catch (const ParseError& e) {
    throw InputError(path.string() + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " +
                     e.what());
  } catch (const NetworkError& e) {
    throw InputError(path.string() + ": invalid feeder\n" + e.report().to_string());
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

const char* band_source(const RunManifest& m, const Network& net) {
  if (m.v_min || m.v_max) return "flag";
  if (net.info().v_min || net.info().v_max) return "feeder";
  return "default";
}

int exit_code(MipStatus s) {
  switch (s) {
    case MipStatus::Optimal: return kExitOptimal;
    case MipStatus::Infeasible: return kExitInfeasible;
    case MipStatus::TimeLimit:
    case MipStatus::NodeLimit: return kExitLimit;
    case MipStatus::Unbounded:
    case MipStatus::Error: return kExitSolverError;
  }
  return kExitSolverError;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json assignment_json(const Network& net, const PhaseAssignment& xi) {
  Json j = Json::object();
  for (std::size_t b = 0; b < net.bus_count(); ++b) j[net.bus(b).id] = xi[b].to_string();
  return j;
}

Json summary_json(const RunManifest& m, const Network& net, const MilpModel* model, const RunResult& r) {
  Json s;
  s["feeder"] = {{"name", net.info().name},
                 {"file", m.feeder.filename().string()},
                 {"buses", net.bus_count()},
                 {"lines", net.line_count()}};
  s["case"] = {{"name", m.case_name},
               {"capacity_multiplier", r.config.capacity_multiplier},
               {"alpha", r.config.alpha},
               {"v_min_pu2", r.config.v_min},
               {"v_max_pu2", r.config.v_max},
               {"voltage_band_source", band_source(m, net)},
               {"mip_gap", r.config.mip_gap},
               {"time_limit_s", r.config.time_limit}};
  if (model)
    s["model"] = {{"variables", model->variables.size()},
                  {"binaries", model->binary_count()},
                  {"constraints", model->constraints.size()}};
  s["solver"] = {{"status", to_string(r.mip.status)},
                 {"objective", number_or_null(r.mip.objective)},
                 {"bound", number_or_null(r.mip.bound)},
                 {"relative_gap", number_or_null(r.mip.gap())},
                 {"nodes", r.mip.nodes},
                 {"lp_iterations", r.mip.lp_iterations}};
  if (!r.message.empty()) s["message"] = r.message;
  s["unbalance"] = {{"base_metric_pu2", r.base_metric.total},
                    {"base_metric_magnitude_pu", r.base_metric.magnitude_total}};
  if (r.solution) {
    const auto& sol = *r.solution;
    const auto vs_input = changed_buses(net, sol.xi, [&] {
      std::vector<PhaseSet> in;
      for (const auto& b : net.buses()) in.push_back(b.phases);
      return in;
    }());
    const auto vs_served = changed_buses(net, sol.xi, net.served_phases());
    int active = 0;
    for (const auto& x : sol.xi) active += x.size();
    s["phases"] = {{"unchanged_vs_input", vs_input.empty()},
                   {"unchanged_vs_served", vs_served.empty()},
                   {"changed_vs_input", vs_input},
                   {"changed_vs_served", vs_served},
                   {"active_phase_count", active},
                   {"assignment", assignment_json(net, sol.xi)}};
    s["unbalance"]["metric_pu2"] = r.metric->total;
    s["unbalance"]["metric_magnitude_pu"] = r.metric->magnitude_total;
    s["unbalance"]["phases_measured"] = "energized";
    const auto& a = *r.audit;
    s["conservation"] = {{"flow_balance_convention", kBalanceConvention},
                         {"max_total_p_error_kw", a.total_p_error_kw},
                         {"max_total_q_error_kvar", a.total_q_error_kvar},
                         {"max_balance_residual_pu", a.balance_residual_pu},
                         {"max_power_factor_violation_pu", a.power_factor_violation_pu},
                         {"max_voltage_drop_residual_pu2", a.voltage_drop_residual_pu},
                         {"phase_consistent", a.consistent},
                         {"phase_count_ok", a.phase_count_ok},
                         {"ok", a.ok()},
                         {"problems", a.problems}};
  }
  if (r.certificate) {
    const auto& c = *r.certificate;
    Json o = {{"feasible", c.feasible},
              {"best_objective", number_or_null(c.best_objective)},
              {"assignments", c.assignments},
              {"infeasible_assignments", c.infeasible_assignments},
              {"tie_count", c.best_assignments.size()},
              {"agrees", r.oracle_agrees.value_or(false)}};
    if (r.solution) {
      bool in_argmin = false;
      for (const auto& t : c.best_assignments) in_argmin = in_argmin || t == r.solution->xi;
      o["incumbent_in_argmin"] = in_argmin;
    }
    s["oracle"] = o;
  }
  return s;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

template <typename Fn>
std::string capture(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

std::string fmt(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

double case_multiplier(const RunManifest& m) {
  if (m.case_name == "custom") {
    if (!m.multiplier) throw InputError("--case custom requires --multiplier");
    return *m.multiplier;
  }
  if (m.multiplier) throw InputError("--multiplier is only valid with --case custom");
  if (m.case_name == "1") return 1.0;
  if (m.case_name == "2") return 2.0;
  if (m.case_name == "3") return 3.0;
  throw InputError("unknown case '" + m.case_name + "' (expected 1, 2, 3 or custom)");
}

CaseConfig make_config(const RunManifest& m, const Network& net) {
  CaseConfig cfg;
  cfg.capacity_multiplier = case_multiplier(m);
  cfg.alpha = m.alpha;
  if (net.info().v_min) cfg.v_min = *net.info().v_min;
  if (net.info().v_max) cfg.v_max = *net.info().v_max;
  if (m.v_min) cfg.v_min = *m.v_min;
  if (m.v_max) cfg.v_max = *m.v_max;
  cfg.mip_gap = m.gap;
  cfg.time_limit = m.time_limit;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return cfg;
}

std::vector<std::string> changed_buses(const Network& net, const PhaseAssignment& xi,
                                       const std::vector<PhaseSet>& reference) {
  std::vector<std::string> out;
  for (std::size_t b = 0; b < net.bus_count(); ++b)
    if (!reference[b].empty() && !(xi[b] == reference[b])) out.push_back(net.bus(b).id);
  return out;
}

RunResult solve_case(const RunManifest& m, const Network& net) {
  RunResult r;
  r.config = make_config(m, net);
  if (m.oracle && assignment_space_size(net) > kEnumerationLimit)
    throw InputError("--oracle refused: " + fmt(assignment_space_size(net), 0) + " assignments exceed the limit of " +
                     fmt(kEnumerationLimit, 0));
  r.base_metric = unbalance_metric(base_case_state(net));

  try {
    r.model = build_model(net, r.config);
  } catch (const FormulationError& e) {
    r.exit_code = kExitInfeasible;
    r.mip.status = MipStatus::Infeasible;
    r.mip.objective = kInfinity;
    r.message = e.what();
    return r;
  }

  MipOptions opt;
  opt.gap = r.config.mip_gap;
  opt.time_limit = r.config.time_limit;
  r.mip = solve_mip(*r.model, opt);
  r.exit_code = exit_code(r.mip.status);
  if (r.mip.has_solution()) {
    r.solution = decode_solution(*r.model, net, r.mip.x);
    r.metric = unbalance_metric(r.solution->state);
    r.audit = audit(net, *r.solution);
  } else {
    r.message = r.mip.certificate.empty() ? std::string(to_string(r.mip.status)) : r.mip.certificate;
  }

  if (m.oracle) {
    r.certificate = certify(net, r.config);
    const auto& c = *r.certificate;
    if (!c.feasible) {
      r.oracle_agrees = r.mip.status == MipStatus::Infeasible;
    } else if (r.mip.has_solution()) {
      const double tol = std::max(1e-6, r.config.mip_gap) * std::max(1.0, std::abs(c.best_objective));
      r.oracle_agrees = std::abs(r.mip.objective - c.best_objective) <= tol;
    } else {
      r.oracle_agrees = false;
    }
  }
  return r;
}

int run(const RunManifest& m, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Network net = read_network(m.feeder);
  RunResult r = solve_case(m, net);
  if (m.export_model) {
    if (r.model) {
      write_file(*m.export_model, capture([&](std::ostream& os) { write_lp(os, *r.model); }));
      out << "model written to " << m.export_model->string() << '\n';
    } else {
      err << "model not exported: " << r.message << '\n';
    }
  }
  const double total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(m.out_dir);
  const Json summary = summary_json(m, net, r.model ? &*r.model : nullptr, r);
  write_file(m.out_dir / "summary.json", summary.dump(2) + "\n");
  Json timing = {{"solve_seconds", r.mip.seconds}, {"total_seconds", total_seconds}};
  write_file(m.out_dir / "timing.json", timing.dump(2) + "\n");

  out << "feeder " << net.info().name << ", case " << m.case_name << " (multiplier "
      << r.config.capacity_multiplier << "), alpha " << r.config.alpha << '\n';
  out << "status " << to_string(r.mip.status) << ", nodes " << r.mip.nodes << ", " << fmt(r.mip.seconds, 3)
      << " s\n";
  if (r.solution) {
    write_file(m.out_dir / "solution.csv",
               capture([&](std::ostream& os) { write_solution_csv(os, net, *r.solution); }));
    write_file(m.out_dir / "unbalance.csv",
               capture([&](std::ostream& os) { write_unbalance_csv(os, net, *r.metric); }));
    const auto table = reassignment(net, *r.solution);
    write_file(m.out_dir / "reassignment.csv",
               capture([&](std::ostream& os) { write_reassignment_csv(os, table); }));
    out << "objective " << fmt(r.mip.objective, 6) << ", bound " << fmt(r.mip.bound, 6) << '\n';
    out << "unbalance " << fmt(r.metric->total, 6) << " pu^2 (base " << fmt(r.base_metric.total, 6) << ")\n";
    const auto changed = summary["phases"]["changed_vs_input"];
    out << "phase configuration " << (changed.empty() ? "unchanged" : "changed at " + changed.dump()) << '\n';
    out << format_reassignment(table);
    if (!r.audit->ok()) {
      err << "solution audit failed:\n";
      for (const auto& p : r.audit->problems) err << "  " << p << '\n';
    }
  } else {
    err << r.message << '\n';
  }
  if (r.certificate)
    out << "oracle: best " << fmt(r.certificate->best_objective, 6) << " over " << r.certificate->assignments
        << " assignments, " << (r.oracle_agrees.value_or(false) ? "agrees" : "DISAGREES") << '\n';
  out << "artifacts in " << m.out_dir.string() << '\n';
  if (r.certificate && !r.oracle_agrees.value_or(false) && r.exit_code == kExitOptimal) return kExitSolverError;
  return r.exit_code;
}

int sweep(const RunManifest& m, const std::vector<double>& alphas, std::ostream& out, std::ostream& err) {
  if (alphas.empty()) throw InputError("sweep needs at least one alpha");
  Network net = read_network(m.feeder);
  for (double a : alphas) {
    RunManifest mm = m;
    mm.alpha = a;
    make_config(mm, net);
  }

  std::ostringstream csv;
  csv << "alpha,status,objective,bound,metric_pu2,metric_magnitude_pu,active_phases,changed_buses,nodes\n";
  Json timing = Json::array();
  int code = kExitOptimal;
  for (double a : alphas) {
    RunManifest mm = m;
    mm.alpha = a;
    mm.oracle = false;
    const RunResult r = solve_case(mm, net);
    if (code == kExitOptimal) code = r.exit_code;
    csv << std::setprecision(12) << a << ',' << to_string(r.mip.status) << ',';
    if (r.solution) {
      int active = 0;
      for (const auto& x : r.solution->xi) active += x.size();
      const auto changed = changed_buses(net, r.solution->xi, net.served_phases());
      std::string names;
      for (const auto& c : changed) names += (names.empty() ? "" : " ") + c;
      csv << r.mip.objective << ',' << r.mip.bound << ',' << r.metric->total << ',' << r.metric->magnitude_total
          << ',' << active << ',' << names << ',' << r.mip.nodes << '\n';
    } else {
      csv << ",,,,,," << r.mip.nodes << '\n';
      err << "alpha " << a << ": " << r.message << '\n';
    }
    timing.push_back({{"alpha", a}, {"solve_seconds", r.mip.seconds}});
  }
  fs::create_directories(m.out_dir);
  write_file(m.out_dir / "sweep.csv", csv.str());
  write_file(m.out_dir / "timing.json", timing.dump(2) + "\n");
  out << csv.str();
  return code;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal phase allocation for radial distribution feeders"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "phasebal 1.0");

  RunManifest m;
  std::string out_dir;
  std::string export_path;
  std::vector<double> alphas;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--feeder", m.feeder, "Feeder document")->required();
    sub->add_option("--case", m.case_name, "Capacity case: 1, 2, 3 or custom")->capture_default_str();
    sub->add_option_function<double>("--multiplier", [&](double v) { m.multiplier = v; },
                                     "Capacity multiplier (implies --case custom)");
    sub->add_option_function<double>("--vmin", [&](double v) { m.v_min = v; }, "Lower squared-voltage bound, pu^2");
    sub->add_option_function<double>("--vmax", [&](double v) { m.v_max = v; }, "Upper squared-voltage bound, pu^2");
    sub->add_option("--gap", m.gap, "Relative MIP gap")->capture_default_str();
    sub->add_option("--time-limit", m.time_limit, "Solver time limit, seconds")->capture_default_str();
    sub->add_option("--out", out_dir, "Output directory (default $PHASEBAL_OUT_DIR or ./phasebal_out)");
  };
  auto* run_cmd = app.add_subcommand("run", "Solve one case and write its artifacts");
  common(run_cmd);
  run_cmd->add_option("--alpha", m.alpha, "Weight of the unbalance term")->capture_default_str();
  run_cmd->add_option("--export-model", export_path, "Write the model in LP format to this path");
  run_cmd->add_flag("--oracle", m.oracle, "Certify the optimum by exhaustive enumeration (small feeders)");
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve one case for several alpha values");
  common(sweep_cmd);
  sweep_cmd->add_option("--alpha", alphas, "Comma-separated alpha values")->delimiter(',')->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOptimal : kExitInputError;
  }

  if (m.multiplier && m.case_name == "1" && run_cmd->count("--case") + sweep_cmd->count("--case") == 0)
    m.case_name = "custom";
  if (!out_dir.empty()) {
    m.out_dir = out_dir;
  } else if (const char* env = std::getenv("PHASEBAL_OUT_DIR"); env && *env) {
    m.out_dir = env;
  } else {
    m.out_dir = "phasebal_out";
  }
  if (!export_path.empty()) m.export_model = export_path;

  try {
    if (run_cmd->parsed()) return run(m, out, err);
    return sweep(m, alphas, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolverError;
  }
}

}  // namespace phasebal::cli
