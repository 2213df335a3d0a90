#include "phasebal/mip.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <sstream>

#include "phasebal/formulation.hpp"

namespace phasebal {

const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::Optimal: return "optimal";
    case MipStatus::Infeasible: return "infeasible";
    case MipStatus::Unbounded: return "unbounded";
    case MipStatus::TimeLimit: return "time_limit";
    case MipStatus::NodeLimit: return "node_limit";
    case MipStatus::Error: return "error";
  }
  return "?";
}

double MipResult::gap() const {
  if (!has_solution()) return std::numeric_limits<double>::infinity();
  return std::max(0.0, objective - bound) / std::max(1.0, std::abs(objective));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BoundChange {
  int col;
  double lower;
  double upper;
};

struct Node {
  long id = 0;
  int depth = 0;
  double bound = -kInf;
  std::vector<BoundChange> changes;  // cumulative from the root
  std::shared_ptr<const lp::Basis> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const lp::Problem& p, const std::vector<int>& ints, const MipOptions& o)
      : prob_(p), ints_(ints), opt_(o), simplex_(p, o.lp), start_(std::chrono::steady_clock::now()) {}

  MipResult run() {
    result_.objective = kInf;
    Node root;
    root.id = next_id_++;
    auto root_lp = solve_node(root);
    if (root_lp.status == lp::Status::Infeasible) {
      result_.status = MipStatus::Infeasible;
      result_.certificate = "root relaxation infeasible: " + root_lp.certificate;
      return finish();
    }
    if (root_lp.status == lp::Status::Unbounded) {
      result_.status = MipStatus::Unbounded;
      return finish();
    }
    if (root_lp.status != lp::Status::Optimal) {
      result_.status = MipStatus::Error;
      result_.certificate = "root relaxation: " + std::string(lp::to_string(root_lp.status));
      return finish();
    }
    if (opt_.round_up_heuristic) round_up(root_lp);
    root.bound = root_lp.objective;
    update_bound(root.bound);
    if (expand(root, root_lp)) return finish();

    while (!open_.empty()) {
      update_bound(open_.top().bound);
      if (gap_closed()) break;
      if (out_of_time()) {
        result_.status = MipStatus::TimeLimit;
        return finish();
      }
      if (result_.nodes >= opt_.node_limit) {
        result_.status = MipStatus::NodeLimit;
        return finish();
      }
      Node node = open_.top();
      open_.pop();
      if (prunable(node.bound)) continue;
      if (dive(std::move(node))) return finish();
    }
    if (open_.empty()) update_bound(result_.has_solution() ? result_.objective : kInf);
    result_.status = result_.has_solution() ? MipStatus::Optimal : MipStatus::Infeasible;
    if (!result_.has_solution())
      result_.certificate = "every branch-and-bound node is infeasible (" + std::to_string(result_.nodes) + " nodes)";
    return finish();
  }

 private:
  lp::Result solve_node(const Node& node) {
    simplex_.reset_bounds();
    for (const auto& c : node.changes) simplex_.set_column_bounds(c.col, c.lower, c.upper);
    auto r = simplex_.solve(node.basis.get());
    ++result_.nodes;
    result_.lp_iterations += r.iterations;
    return r;
  }

  // Processes a node and keeps diving into the rounding-side child until the
  // dive ends. Returns true if the search must stop.
  bool dive(Node node) {
    while (true) {
      auto r = solve_node(node);
      if (r.status == lp::Status::Infeasible) return false;
      if (r.status != lp::Status::Optimal) {
        result_.status = MipStatus::Error;
        result_.certificate = "node relaxation: " + std::string(lp::to_string(r.status));
        return true;
      }
      node.bound = std::max(node.bound, r.objective);
      if (prunable(node.bound)) return false;
      auto child = branch(node, r);
      if (!child) return false;
      if (out_of_time() || result_.nodes >= opt_.node_limit) {
        open_.push(std::move(*child));
        result_.status = out_of_time() ? MipStatus::TimeLimit : MipStatus::NodeLimit;
        return true;
      }
      node = std::move(*child);
    }
  }

  // Root handling: branch without solving again.
  bool expand(const Node& root, const lp::Result& r) {
    if (prunable(root.bound)) return false;
    auto child = branch(root, r);
    if (!child) return false;
    return dive(std::move(*child));
  }

  // Accepts an integral LP solution as incumbent, or creates two children,
  // queues the far one and returns the near one.
  std::optional<Node> branch(const Node& node, const lp::Result& r) {
    int col = -1;
    double frac_best = 0.0;
    for (int j : ints_) {
      const double v = r.x[j];
      const double f = v - std::floor(v);
      const double dist = std::min(f, 1.0 - f);
      if (dist <= opt_.integrality_tol) continue;
      if (dist > frac_best + 1e-12 || (std::abs(dist - frac_best) <= 1e-12 && j < col)) {
        frac_best = dist;
        col = j;
      }
    }
    if (col < 0) {
      offer(r.x, r.objective);
      return std::nullopt;
    }
    const double v = r.x[col];
    auto basis = std::make_shared<const lp::Basis>(r.basis);
    auto make_child = [&](double lo, double hi) {
      Node c;
      c.id = next_id_++;
      c.depth = node.depth + 1;
      c.bound = node.bound;
      c.basis = basis;
      c.changes = node.changes;
      c.changes.push_back({col, lo, hi});
      return c;
    };
    Node down = make_child(current_lower(node, col), std::floor(v));
    Node up = make_child(std::ceil(v), current_upper(node, col));
    const bool prefer_up = v - std::floor(v) >= 0.5;
    if (prefer_up) {
      open_.push(std::move(down));
      return up;
    }
    open_.push(std::move(up));
    return down;
  }

  double current_lower(const Node& node, int col) const {
    double lo = prob_.col_lower[col];
    for (const auto& c : node.changes)
      if (c.col == col) lo = c.lower;
    return lo;
  }
  double current_upper(const Node& node, int col) const {
    double hi = prob_.col_upper[col];
    for (const auto& c : node.changes)
      if (c.col == col) hi = c.upper;
    return hi;
  }

  void round_up(const lp::Result& root) {
    Node h;
    for (int j : ints_) {
      double v = std::ceil(root.x[j] - opt_.integrality_tol);
      v = std::clamp(v, prob_.col_lower[j], prob_.col_upper[j]);
      h.changes.push_back({j, v, v});
    }
    h.basis = std::make_shared<const lp::Basis>(root.basis);
    auto r = solve_node(h);
    if (r.status == lp::Status::Optimal) {
      // Snap the fixed integers exactly.
      Eigen::VectorXd x = r.x;
      for (const auto& c : h.changes) x[c.col] = c.lower;
      offer(x, prob_.cost.dot(x));
    }
  }

  void offer(Eigen::VectorXd x, double obj) {
    for (int j : ints_) x[j] = std::round(x[j]);
    obj = prob_.cost.dot(x);
    if (obj < result_.objective - 1e-12) {
      result_.objective = obj;
      result_.x = std::move(x);
      record();
    }
  }

  bool prunable(double bound) const {
    if (!result_.has_solution()) return false;
    return result_.objective - bound <= opt_.gap * std::max(1.0, std::abs(result_.objective));
  }

  bool gap_closed() const { return prunable(result_.bound); }

  void update_bound(double b) {
    if (b > result_.bound + 1e-12) {
      result_.bound = b;
      record();
    }
  }

  void record() {
    TracePoint t;
    t.node = result_.nodes;
    t.seconds = elapsed();
    t.bound = result_.bound;
    t.incumbent = result_.objective;
    result_.trace.push_back(t);
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  bool out_of_time() const { return elapsed() > opt_.time_limit; }

  MipResult finish() {
    if (result_.has_solution() && result_.bound > result_.objective) result_.bound = result_.objective;
    if (!result_.has_solution() && result_.status == MipStatus::Optimal) result_.status = MipStatus::Infeasible;
    result_.seconds = elapsed();
    if (!result_.has_solution()) result_.objective = kInf;
    return std::move(result_);
  }

  const lp::Problem& prob_;
  const std::vector<int>& ints_;
  MipOptions opt_;
  lp::Simplex simplex_;
  std::chrono::steady_clock::time_point start_;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open_;
  long next_id_ = 0;
  MipResult result_{.bound = -kInf};
};

}  // namespace

MipResult solve_mip(const lp::Problem& problem, const std::vector<int>& integer_cols, const MipOptions& options) {
  BranchAndBound bb(problem, integer_cols, options);
  return bb.run();
}

MipResult solve_mip(const MilpModel& model, const MipOptions& options) {
  const auto problem = lp::from_model(model);
  std::vector<int> ints;
  for (std::size_t j = 0; j < model.variables.size(); ++j)
    if (model.variables[j].kind == VarKind::Binary) ints.push_back(static_cast<int>(j));
  return solve_mip(problem, ints, options);
}

lp::Result solve_relaxation(const MilpModel& model, const lp::Options& options) {
  return lp::solve(lp::from_model(model), options);
}

}  // namespace phasebal
