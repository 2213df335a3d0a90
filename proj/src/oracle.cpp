#include "phasebal/oracle.hpp"

#include <cmath>
#include <sstream>

namespace phasebal {

namespace {

std::string limit_message(double count, double limit) {
  std::ostringstream os;
  os << "assignment space has " << count << " combinations, above the enumeration limit of " << limit;
  return os.str();
}

std::vector<PhaseSet> nonempty_subsets(PhaseSet set) {
  std::vector<PhaseSet> out;
  for (unsigned mask = 1; mask < 8; ++mask) {
    PhaseSet s;
    for (Phase p : kPhases)
      if (mask & (1u << index(p))) s.insert(p);
    if (s.is_subset_of(set)) out.push_back(s);
  }
  return out;
}

}  // namespace

EnumerationLimit::EnumerationLimit(double count, double limit)
    : std::runtime_error(limit_message(count, limit)), count_(count) {}

double assignment_space_size(const Network& net) {
  double total = 1.0;
  for (const auto& b : net.buses()) total *= std::exp2(static_cast<double>(b.phases.size())) - 1.0;
  return total;
}

std::uint64_t enumerate_assignments(const Network& net, const std::function<void(const PhaseAssignment&)>& visit,
                                    double limit) {
  const double size = assignment_space_size(net);
  if (size > limit) throw EnumerationLimit(size, limit);
  const auto& order = net.topological_order();
  std::vector<std::vector<PhaseSet>> candidates(net.bus_count());
  for (std::size_t b = 0; b < net.bus_count(); ++b)
    candidates[b] = b == net.source() ? std::vector<PhaseSet>{net.bus(b).phases} : nonempty_subsets(net.bus(b).phases);

  PhaseAssignment xi(net.bus_count());
  std::uint64_t visited = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t depth) {
    if (depth == order.size()) {
      ++visited;
      visit(xi);
      return;
    }
    const std::size_t b = order[depth];
    const std::size_t parent = net.parent(b);
    for (PhaseSet s : candidates[b]) {
      if (parent != Network::npos && !s.is_subset_of(xi[parent])) continue;
      xi[b] = s;
      rec(depth + 1);
    }
  };
  rec(0);
  return visited;
}

namespace {

void apply_assignment(lp::Simplex& simplex, const MilpModel& model, const PhaseAssignment& xi) {
  const auto& topo = model.topology;
  for (std::size_t b = 0; b < topo.phases.size(); ++b)
    for (Phase p : kPhases) {
      if (!topo.phases[b].contains(p)) continue;
      const double v = xi[b].contains(p) ? 1.0 : 0.0;
      simplex.set_column_bounds(model.var(VarRole::Xi, b, p), v, v);
    }
}

}  // namespace

double fixed_assignment_objective(const MilpModel& model, const PhaseAssignment& xi, const lp::Options& options) {
  const auto fixed = fix_assignment(model, xi);
  const auto r = lp::solve(lp::from_model(fixed), options);
  return r.status == lp::Status::Optimal ? r.objective : kInfinity;
}

Certificate certify(const Network& net, const CaseConfig& cfg, double limit) {
  const auto model = build_model(net, cfg);
  const auto problem = lp::from_model(model);
  lp::Simplex simplex(problem);
  Certificate cert;
  std::vector<std::pair<double, PhaseAssignment>> values;
  cert.assignments = enumerate_assignments(
      net,
      [&](const PhaseAssignment& xi) {
        apply_assignment(simplex, model, xi);
        const auto r = simplex.solve();
        if (r.status != lp::Status::Optimal) {
          ++cert.infeasible_assignments;
          return;
        }
        values.emplace_back(r.objective, xi);
        if (r.objective < cert.best_objective) cert.best_objective = r.objective;
      },
      limit);
  cert.feasible = !values.empty();
  if (!cert.feasible) return cert;
  const double tol = 1e-6 * std::max(1.0, std::abs(cert.best_objective));
  for (auto& [obj, xi] : values)
    if (obj <= cert.best_objective + tol) cert.best_assignments.push_back(std::move(xi));
  return cert;
}

}  // namespace phasebal
