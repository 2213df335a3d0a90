#include <doctest.h>

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>

#include "phasebal/feeder_io.hpp"
#include "phasebal/network.hpp"
#include "random_feeder.hpp"

using namespace phasebal;

namespace {

Network fixture(const std::string& name) { return load_feeder(std::string(PHASEBAL_DATA_DIR) + "/" + name); }

// Children computed straight from the line list, without the Network's own
// traversal.
std::map<std::string, std::set<std::string>> bfs_children(const FeederData& d) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& l : d.lines) {
    adj[l.from].push_back(l.to);
    adj[l.to].push_back(l.from);
  }
  std::map<std::string, std::set<std::string>> kids;
  std::set<std::string> seen{d.info.source_id};
  std::queue<std::string> q;
  q.push(d.info.source_id);
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    kids[u];
    for (const auto& v : adj[u])
      if (seen.insert(v).second) {
        kids[u].insert(v);
        q.push(v);
      }
  }
  return kids;
}

const char* kTiny = R"(
[feeder]
name = tiny
kva_base = 1000
kv_base = 4.16
source = s
[bus s]
phases = abc
)";

}  // namespace

TEST_CASE("IEEE-13 fixture has the published spot loads") {
  const auto net = fixture("ieee13.feeder");
  int loaded = 0;
  PhaseVector p = PhaseVector::Zero(), q = PhaseVector::Zero();
  for (const auto& b : net.buses()) {
    if (!b.load_p_kw.isZero() || !b.load_q_kvar.isZero()) ++loaded;
    p += b.load_p_kw;
    q += b.load_q_kvar;
  }
  CHECK(loaded == 9);
  CHECK(p[0] == doctest::Approx(1175.0));
  CHECK(q[0] == doctest::Approx(616.0));
  CHECK(validate(net.data()).ok());
}

TEST_CASE("all fixtures are valid radial feeders") {
  for (const char* f : {"ieee13.feeder", "ieee37.feeder", "ieee123.feeder", "branch11.feeder"}) {
    CAPTURE(f);
    const auto net = fixture(f);
    CHECK(net.line_count() + 1 == net.bus_count());
  }
}

TEST_CASE("a source-only document is a one-bus network") {
  const auto net = parse_feeder(kTiny);
  CHECK(net.bus_count() == 1);
  CHECK(net.line_count() == 0);
  CHECK(net.bus(net.source()).is_source);
}

TEST_CASE("serialize then parse is the identity") {
  for (const char* f : {"ieee13.feeder", "ieee37.feeder", "ieee123.feeder", "branch11.feeder"}) {
    CAPTURE(f);
    const auto net = fixture(f);
    const auto again = parse_feeder(serialize_feeder(net));
    CHECK(again.data() == net.data());
  }
  std::mt19937 rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto d = testing_feeders::random_feeder(rng, 2 + t % 9);
    const Network net(d);
    CHECK(parse_feeder(serialize_feeder(net)).data() == net.data());
  }
}

TEST_CASE("children on the example feeder") {
  const auto net = fixture("branch11.feeder");
  CHECK(children(net, "3") == std::vector<std::string>{"5", "6"});
  CHECK(children(net, "4") == std::vector<std::string>{"7", "8"});
  CHECK(children(net, "7").empty());
  CHECK_THROWS_AS(children(net, "nope"), std::out_of_range);
}

TEST_CASE("child sets partition the non-source buses and match a BFS") {
  std::mt19937 rng(5);
  std::vector<Network> nets{fixture("ieee13.feeder"), fixture("ieee123.feeder")};
  for (int t = 0; t < 30; ++t) nets.emplace_back(testing_feeders::random_feeder(rng, 2 + t % 12));
  for (const auto& net : nets) {
    const auto expected = bfs_children(net.data());
    std::multiset<std::string> all;
    for (const auto& b : net.buses()) {
      const auto kids = children(net, b.id);
      CHECK(std::is_sorted(kids.begin(), kids.end()));
      CHECK(std::set<std::string>(kids.begin(), kids.end()) == expected.at(b.id));
      all.insert(kids.begin(), kids.end());
      for (const auto& k : kids) {
        const auto back = children(net, k);
        CHECK(std::find(back.begin(), back.end(), b.id) == back.end());
      }
    }
    std::multiset<std::string> others;
    for (const auto& b : net.buses())
      if (!b.is_source) others.insert(b.id);
    CHECK(all == others);
  }
}

TEST_CASE("validation reports") {
  auto d = fixture("ieee13.feeder").data();

  SUBCASE("an extra line closing a cycle is one radiality violation") {
    Line extra;
    extra.from = "671";
    extra.to = "633";
    d.lines.push_back(extra);
    const auto report = validate(d);
    CHECK(report.count(ViolationKind::NonRadial) == 1);
  }
  SUBCASE("a child phase missing upstream names both buses") {
    for (auto& b : d.buses)
      if (b.id == "684") b.phases = PhaseSet::parse("ab").value();
    const auto report = validate(d);
    REQUIRE(report.count(ViolationKind::PhaseInconsistent) >= 1);
    bool named = false;
    for (const auto& v : report.violations)
      if (v.kind == ViolationKind::PhaseInconsistent)
        named = named || (std::find(v.elements.begin(), v.elements.end(), "684") != v.elements.end());
    CHECK(named);
  }
  SUBCASE("load on an absent phase") {
    for (auto& b : d.buses)
      if (b.id == "652") b.load_p_kw[1] = 5.0;
    CHECK(validate(d).count(ViolationKind::LoadOnAbsentPhase) == 1);
  }
  SUBCASE("duplicate bus") {
    d.buses.push_back(d.buses[3]);
    CHECK(validate(d).count(ViolationKind::DuplicateBus) == 1);
  }
  SUBCASE("unknown bus on a line") {
    d.lines[0].to = "ghost";
    CHECK(validate(d).count(ViolationKind::UnknownBus) >= 1);
  }
  SUBCASE("negative load") {
    d.buses[4].load_q_kvar[0] = -1.0;
    CHECK(validate(d).count(ViolationKind::NegativeLoad) == 1);
  }
}

TEST_CASE("syntax errors carry a position") {
  const std::string bad = std::string(kTiny) + "[bus t]\nphases = abd\n";
  try {
    parse_feeder(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 10);
    CHECK(e.column() >= 1);
  }
  CHECK_THROWS_AS(parse_feeder(std::string(kTiny) + "[line s]\n"), ParseError);
  CHECK_THROWS_AS(parse_feeder(std::string(kTiny) + "kva_base = 3\n"), ParseError);
  CHECK_THROWS_AS(parse_feeder(std::string(kTiny) + "[bus t]\nphases = a\n[line s x]\nr = 1 0 0 0 0 0 0 0 0\n"
                                                    "x = 1 0 0 0 0 0 0 0 0\n"),
                  NetworkError);
  CHECK_THROWS(load_feeder("/nonexistent/feeder"));
}
