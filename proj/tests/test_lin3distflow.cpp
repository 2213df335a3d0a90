#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "phasebal/feeder_io.hpp"
#include "phasebal/lin3distflow.hpp"
#include "random_feeder.hpp"

using namespace phasebal;

namespace {

Network fixture(const std::string& name) { return load_feeder(std::string(PHASEBAL_DATA_DIR) + "/" + name); }

// Sensitivities from the rotation form: with a = (1, w^2, w), w = exp(j 2pi/3)
// and Gamma = a a^H, M^P = -2 Re(Gamma o conj Z) and M^Q = 2 Im(Gamma o conj Z).
SensitivityMatrices<double> rotation_form(const Eigen::Matrix3cd& z, PhaseSet phases) {
  const std::complex<double> w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  const Eigen::Vector3cd a(1.0, w * w, w);
  const Eigen::Matrix3cd gamma = a * a.adjoint();
  const Eigen::Matrix3cd prod = gamma.cwiseProduct(z.conjugate());
  SensitivityMatrices<double> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (!phases.contains(static_cast<Phase>(i)) || !phases.contains(static_cast<Phase>(j))) continue;
      m.mp(i, j) = -2.0 * prod(i, j).real();
      m.mq(i, j) = 2.0 * prod(i, j).imag();
    }
  return m;
}

FeederData chain(int length, const Eigen::Matrix3cd& z) {
  FeederData d;
  d.info = {"chain", 3000.0, std::sqrt(3.0), "b0", PhaseVector::Ones(), std::nullopt, std::nullopt};
  for (int k = 0; k <= length; ++k) {
    Bus b;
    b.id = "b" + std::to_string(k);
    b.phases = PhaseSet::all();
    b.is_source = k == 0;
    d.buses.push_back(b);
    if (k > 0) d.lines.push_back({"b" + std::to_string(k - 1), b.id, z});
  }
  return d;
}

}  // namespace

TEST_CASE("sensitivity entries by hand") {
  Eigen::Matrix3cd z = Eigen::Matrix3cd::Zero();
  z(0, 0) = {0.3, 0.0};
  auto m = build_sensitivity<double>(z, PhaseSet::all());
  CHECK(m.mp(0, 0) == doctest::Approx(-0.6).epsilon(1e-12));
  Eigen::Matrix3d rest = m.mp;
  rest(0, 0) = 0.0;
  CHECK(rest.isZero(0.0));
  CHECK(m.mq.isZero(0.0));

  z.setZero();
  z(0, 1) = z(1, 0) = {0.1, 0.2};
  m = build_sensitivity<double>(z, PhaseSet::all());
  CHECK(std::abs(m.mp(0, 1) - (0.1 - std::sqrt(3.0) * 0.2)) < 1e-12);
  CHECK(std::abs(m.mp(0, 1) - -0.2464101615137755) < 1e-12);
  CHECK(std::abs(m.mq(0, 1) - 0.3732050807568877) < 1e-12);
}

TEST_CASE("sensitivities match the rotation form") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    Eigen::Matrix3cd z;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) z(i, j) = {u(rng), u(rng)};
    const PhaseSet phases(static_cast<std::uint8_t>(1 + t % 7));
    const auto m = build_sensitivity<double>(z, phases);
    const auto ref = rotation_form(z, phases);
    CHECK((m.mp - ref.mp).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((m.mq - ref.mq).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("absent phases have zero rows and columns") {
  Eigen::Matrix3cd z = Eigen::Matrix3cd::Constant({0.4, 0.7});
  const auto m = build_sensitivity<double>(z, PhaseSet::parse("ac").value());
  CHECK(m.mp.row(1).isZero(0.0));
  CHECK(m.mp.col(1).isZero(0.0));
  CHECK(m.mq.row(1).isZero(0.0));
  CHECK(m.mq.col(1).isZero(0.0));
}

TEST_CASE("downstream flows") {
  SUBCASE("a leaf line carries the leaf injection") {
    const Network net(chain(2, Eigen::Matrix3cd::Identity()));
    PhaseMatrix p = PhaseMatrix::Zero(3, 3), q = PhaseMatrix::Zero(3, 3);
    p.row(2) << 0.1, 0.2, 0.3;
    q.row(2) << 0.05, 0.0, 0.01;
    const auto f = downstream_flows(net, p, q);
    CHECK(f.p.row(2) == p.row(2));
    CHECK(f.q.row(2) == q.row(2));
  }
  SUBCASE("IEEE-13 head line carries the feeder demand") {
    const auto net = fixture("ieee13.feeder");
    const auto f = downstream_flows(net, net.load_p_pu(), net.load_q_pu());
    const auto head = net.children(net.source()).front();
    const double base = net.phase_power_base_kw();
    CHECK(f.p(head, 0) * base == doctest::Approx(1175.0));
    CHECK(f.q(head, 0) * base == doctest::Approx(616.0));
  }
  SUBCASE("random trees: source lines sum to the total injection") {
    std::mt19937 rng(8);
    for (int t = 0; t < 40; ++t) {
      const Network net(testing_feeders::random_feeder(rng, 2 + t % 15));
      const auto p = net.load_p_pu();
      const auto q = net.load_q_pu();
      const auto f = downstream_flows(net, p, q);
      Eigen::RowVector3d head_p = Eigen::RowVector3d::Zero(), head_q = Eigen::RowVector3d::Zero();
      for (auto c : net.children(net.source())) {
        head_p += f.p.row(c);
        head_q += f.q.row(c);
      }
      const auto s = net.source();
      CHECK((head_p + p.row(s) - p.colwise().sum()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((head_q + q.row(s) - q.colwise().sum()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(flow_balance_residual(net, f, p, q) < 1e-10);
    }
  }
  SUBCASE("injection on an absent phase is rejected") {
    const auto net = fixture("ieee13.feeder");
    PhaseMatrix p = net.load_p_pu();
    p(net.index_of("652"), 2) = 0.1;
    CHECK_THROWS_AS(downstream_flows(net, p, net.load_q_pu()), std::invalid_argument);
  }
}

TEST_CASE("voltage propagation") {
  SUBCASE("zero flow gives a flat profile") {
    std::mt19937 rng(2);
    for (int t = 0; t < 20; ++t) {
      const Network net(testing_feeders::random_feeder(rng, 2 + t % 10));
      const PhaseMatrix zero = PhaseMatrix::Zero(net.bus_count(), 3);
      const PhaseVector vs(1.01, 0.99, 1.02);
      const auto st = propagate_voltages(net, downstream_flows(net, zero, zero), vs);
      for (std::size_t b = 0; b < net.bus_count(); ++b)
        for (Phase p : kPhases)
          if (net.bus(b).phases.contains(p)) CHECK(st.v(b, index(p)) == vs[index(p)]);
    }
  }
  SUBCASE("single line with unit flows adds the row sums of M^P + M^Q") {
    Eigen::Matrix3cd z = Eigen::Matrix3cd::Zero();
    z(0, 1) = z(1, 0) = {0.1, 0.2};
    // Bases chosen so the impedance base is 1 ohm.
    const Network net(chain(1, z));
    REQUIRE(net.impedance_base_ohm() == doctest::Approx(1.0));
    BranchFlows f{PhaseMatrix::Zero(2, 3), PhaseMatrix::Zero(2, 3)};
    f.p.row(1).setOnes();
    f.q.row(1).setOnes();
    const auto st = propagate_voltages(net, f, PhaseVector::Ones());
    const double s3 = std::sqrt(3.0);
    // Row a: (0, r - s3 x, 0) + (0, x + s3 r, 0); row b: (r + s3 x) + (x - s3 r).
    CHECK(std::abs(st.v(1, 0) - (1.0 + (0.1 - s3 * 0.2) + (0.2 + s3 * 0.1))) < 1e-12);
    CHECK(std::abs(st.v(1, 1) - (1.0 + (0.1 + s3 * 0.2) + (0.2 - s3 * 0.1))) < 1e-12);
    CHECK(st.v(1, 2) == 1.0);
  }
  SUBCASE("two-line chain telescopes") {
    Eigen::Matrix3cd z = Eigen::Matrix3cd::Constant({0.05, 0.1});
    z.diagonal().setConstant({0.3, 0.6});
    const Network net(chain(2, z));
    PhaseMatrix p = PhaseMatrix::Zero(3, 3), q = PhaseMatrix::Zero(3, 3);
    p.row(1) << 0.1, 0.2, 0.15;
    p.row(2) << 0.05, 0.0, 0.3;
    q.row(2) << 0.02, 0.0, 0.1;
    const auto f = downstream_flows(net, p, q);
    const auto st = propagate_voltages(net, f, PhaseVector::Ones());
    const auto m1 = line_sensitivity(net, 1);
    const auto m2 = line_sensitivity(net, 2);
    const PhaseVector d1 = m1.mp * f.p.row(1).transpose() + m1.mq * f.q.row(1).transpose();
    const PhaseVector d2 = m2.mp * f.p.row(2).transpose() + m2.mq * f.q.row(2).transpose();
    const PhaseVector total = st.v.row(2).transpose() - PhaseVector::Ones();
    CHECK((total - (d1 + d2)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("linearity in the flows") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 30; ++t) {
      const Network net(testing_feeders::random_feeder(rng, 3 + t % 10));
      const auto n = static_cast<Eigen::Index>(net.bus_count());
      auto rand_flows = [&] {
        BranchFlows f{PhaseMatrix::Zero(n, 3), PhaseMatrix::Zero(n, 3)};
        for (Eigen::Index b = 0; b < n; ++b)
          for (Phase p : kPhases)
            if (net.bus(b).phases.contains(p) && b != static_cast<Eigen::Index>(net.source())) {
              f.p(b, index(p)) = 0.1 * u(rng);
              f.q(b, index(p)) = 0.1 * u(rng);
            }
        return f;
      };
      const auto f1 = rand_flows();
      const auto f2 = rand_flows();
      const double a = u(rng), b = u(rng);
      const BranchFlows mix{a * f1.p + b * f2.p, a * f1.q + b * f2.q};
      const PhaseVector vs = PhaseVector::Ones();
      const PhaseMatrix base = propagate_voltages(net, {PhaseMatrix::Zero(n, 3), PhaseMatrix::Zero(n, 3)}, vs).v;
      const PhaseMatrix lhs = propagate_voltages(net, mix, vs).v - base;
      const PhaseMatrix rhs =
          a * (propagate_voltages(net, f1, vs).v - base) + b * (propagate_voltages(net, f2, vs).v - base);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("balanced line with equal flows drops every phase equally") {
    Eigen::Matrix3cd z = Eigen::Matrix3cd::Constant({0.1, 0.35});
    z.diagonal().setConstant({0.4, 0.9});
    const Network net(chain(1, z));
    BranchFlows f{PhaseMatrix::Zero(2, 3), PhaseMatrix::Zero(2, 3)};
    f.p.row(1).setConstant(0.3);
    f.q.row(1).setConstant(0.1);
    const auto st = propagate_voltages(net, f, PhaseVector::Ones());
    CHECK(std::abs(st.v(1, 0) - st.v(1, 1)) < 1e-12);
    CHECK(std::abs(st.v(1, 1) - st.v(1, 2)) < 1e-12);
    CHECK(st.v(1, 0) < 1.0);
  }
}
