#include <doctest.h>

#include "lp_oracle.hpp"
#include "phasebal/mip.hpp"

using namespace testing_oracle;
using phasebal::MipStatus;
using phasebal::solve_mip;

namespace {

// Enumerates every 0/1 setting of the integer columns and takes the best
// vertex minimum of the remaining LP.
std::optional<double> brute_force(const Problem& p, const std::vector<int>& ints) {
  std::optional<double> best;
  for (unsigned mask = 0; mask < (1u << ints.size()); ++mask) {
    Problem q = p;
    for (std::size_t k = 0; k < ints.size(); ++k) q.col_lower[ints[k]] = q.col_upper[ints[k]] = (mask >> k) & 1u;
    if (auto v = vertex_minimum(q); v && (!best || *v < *best)) best = v;
  }
  return best;
}

}  // namespace

TEST_CASE("mip: knapsack") {
  // max 5a + 4b + 3c  s.t. 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8
  Eigen::MatrixXd a(3, 3);
  a << 2, 3, 1, 4, 1, 2, 3, 4, 2;
  auto p = make(a, Eigen::Vector3d(-5, -4, -3), Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(),
                Eigen::Vector3d::Constant(-kInf), Eigen::Vector3d(5, 11, 8));
  auto r = solve_mip(p, {0, 1, 2});
  REQUIRE(r.status == MipStatus::Optimal);
  CHECK(r.objective == doctest::Approx(-9.0));
  Eigen::Vector3d load = a * r.x;
  CHECK(load[0] <= 5.0);
  CHECK(load[1] <= 11.0);
  CHECK(load[2] <= 8.0);
  CHECK(r.bound <= r.objective + 1e-12);
  CHECK(r.nodes >= 1);
}

TEST_CASE("mip: infeasible integer program") {
  // x + y = 1.5 with x, y binary
  Eigen::MatrixXd a(1, 2);
  a << 1, 1;
  auto p = make(a, Eigen::Vector2d(1, 1), Eigen::Vector2d::Zero(), Eigen::Vector2d::Ones(),
                Eigen::VectorXd::Constant(1, 1.5), Eigen::VectorXd::Constant(1, 1.5));
  auto r = solve_mip(p, {0, 1});
  CHECK(r.status == MipStatus::Infeasible);
  CHECK_FALSE(r.has_solution());
  CHECK_FALSE(r.certificate.empty());
}

TEST_CASE("mip: random mixed binary programs match enumeration") {
  std::mt19937 rng(2024);
  int solved = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 3 + trial % 3;
    auto p = random_problem(rng, 2 + trial % 3, n, false);
    std::vector<int> ints;
    for (int j = 0; j < n; j += 2) {
      ints.push_back(j);
      p.col_lower[j] = 0.0;
      p.col_upper[j] = 1.0;
    }
    auto oracle = brute_force(p, ints);
    auto r = solve_mip(p, ints);
    CAPTURE(trial);
    if (!oracle) {
      CHECK(r.status == MipStatus::Infeasible);
      continue;
    }
    ++solved;
    REQUIRE(r.status == MipStatus::Optimal);
    CHECK(r.objective == doctest::Approx(*oracle).epsilon(1e-6).scale(1.0));
    for (int j : ints) CHECK((r.x[j] == 0.0 || r.x[j] == 1.0));
  }
  CHECK(solved > 40);
}

TEST_CASE("mip: traces are monotone") {
  std::mt19937 rng(5);
  auto p = random_problem(rng, 4, 6, false);
  for (int j = 0; j < 6; ++j) p.col_lower[j] = 0.0, p.col_upper[j] = 1.0;
  p.row_lower.setConstant(-kInf);
  p.row_upper.setConstant(1.0);
  auto r = solve_mip(p, {0, 1, 2, 3, 4, 5});
  REQUIRE(r.status == MipStatus::Optimal);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].bound >= r.trace[i - 1].bound);
    CHECK(r.trace[i].incumbent <= r.trace[i - 1].incumbent);
  }
}

TEST_CASE("mip: node limit stops the search") {
  std::mt19937 rng(11);
  auto p = random_problem(rng, 6, 10, false);
  for (int j = 0; j < 10; ++j) p.col_lower[j] = 0.0, p.col_upper[j] = 1.0;
  p.row_lower.setConstant(-kInf);
  p.row_upper.setConstant(0.5);
  phasebal::MipOptions o;
  o.node_limit = 1;
  o.round_up_heuristic = false;
  auto r = solve_mip(p, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, o);
  CHECK((r.status == MipStatus::NodeLimit || r.status == MipStatus::Optimal || r.status == MipStatus::Infeasible));
  CHECK(r.nodes <= 2);
}
