#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "phasebal/cli.hpp"
#include "phasebal/feeder_io.hpp"
#include "phasebal/lp_format.hpp"

using namespace phasebal;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(PHASEBAL_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("phasebal_test_" + name);
  fs::remove_all(dir);
  return dir;
}

int invoke(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "phasebal");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

nlohmann::json summary(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "summary.json")); }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// Minimal reader for the LP files the tool writes, kept separate from the
// library so the export is checked against an independent interpretation.
struct ParsedLp {
  std::map<std::string, double> objective;
  struct Row {
    std::map<std::string, double> terms;
    std::string rel;
    double rhs = 0.0;
  };
  std::map<std::string, Row> rows;
  std::map<std::string, std::pair<double, double>> bounds;
  std::set<std::string> binaries;
};

double number(const std::string& s) {
  if (s == "inf" || s == "+inf") return kInfinity;
  if (s == "-inf") return -kInfinity;
  return std::stod(s);
}

bool is_rel(const std::string& t) { return t == "<=" || t == ">=" || t == "="; }

ParsedLp parse_lp(const std::string& text) {
  ParsedLp lp;
  std::istringstream in(text);
  std::string line, section;
  std::vector<std::string> pending;  // tokens of the statement being read
  auto linear = [](const std::vector<std::string>& toks, std::size_t from, std::size_t to) {
    std::map<std::string, double> terms;
    double sign = 1.0;
    for (std::size_t i = from; i < to; ++i) {
      if (toks[i] == "+") sign = 1.0;
      else if (toks[i] == "-") sign = -1.0;
      else {
        const double c = sign * number(toks[i]);
        terms[toks[i + 1]] += c;
        ++i;
        sign = 1.0;
      }
    }
    return terms;
  };
  auto flush_row = [&] {
    if (pending.empty()) return;
    REQUIRE(pending.size() >= 4);
    const std::string name = pending[0].substr(0, pending[0].size() - 1);
    ParsedLp::Row row;
    row.rel = pending[pending.size() - 2];
    row.rhs = number(pending.back());
    row.terms = linear(pending, 1, pending.size() - 2);
    CHECK(lp.rows.count(name) == 0);
    lp.rows[name] = row;
    pending.clear();
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '\\') continue;
    if (line == "Minimize" || line == "Subject To" || line == "Bounds" || line == "Binaries" || line == "End") {
      if (section == "Minimize") lp.objective = linear(pending, 1, pending.size());
      pending.clear();
      section = line;
      continue;
    }
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (section == "Minimize") {
      pending.insert(pending.end(), toks.begin(), toks.end());
    } else if (section == "Subject To") {
      pending.insert(pending.end(), toks.begin(), toks.end());
      if (pending.size() >= 2 && is_rel(pending[pending.size() - 2])) flush_row();
    } else if (section == "Bounds") {
      if (toks.size() == 2 && toks[1] == "free") lp.bounds[toks[0]] = {-kInfinity, kInfinity};
      else if (toks.size() == 3 && toks[1] == "=") lp.bounds[toks[0]] = {number(toks[2]), number(toks[2])};
      else {
        REQUIRE(toks.size() == 5);
        lp.bounds[toks[2]] = {number(toks[0]), number(toks[4])};
      }
    } else if (section == "Binaries") {
      lp.binaries.insert(toks.begin(), toks.end());
    }
  }
  CHECK(section == "End");
  return lp;
}

const char* rel_text(Relation r) {
  return r == Relation::LessEqual ? "<=" : r == Relation::GreaterEqual ? ">=" : "=";
}

}  // namespace

TEST_CASE("exported LP reproduces the model") {
  for (const char* f : {"branch11.feeder", "ieee13.feeder"}) {
    CAPTURE(f);
    CaseConfig cfg;
    cfg.capacity_multiplier = 2.0;
    const auto model = build_model(load_feeder(data(f)), cfg);
    std::ostringstream os;
    write_lp(os, model);
    const auto lp = parse_lp(os.str());

    REQUIRE(lp.rows.size() == model.constraints.size());
    for (const auto& c : model.constraints) {
      const auto it = lp.rows.find(c.name);
      REQUIRE(it != lp.rows.end());
      CHECK(it->second.rel == rel_text(c.relation));
      CHECK(it->second.rhs == c.rhs);
      std::map<std::string, double> expected;
      for (const auto& t : c.terms)
        if (t.coef != 0.0) expected[model.variables[t.var].name] = t.coef;
      std::map<std::string, double> got;
      for (const auto& [name, coef] : it->second.terms)
        if (coef != 0.0) got[name] = coef;
      CHECK(got == expected);
    }
    for (std::size_t j = 0; j < model.variables.size(); ++j) {
      const auto& v = model.variables[j];
      const double obj = lp.objective.count(v.name) ? lp.objective.at(v.name) : 0.0;
      CHECK(obj == model.objective[static_cast<Eigen::Index>(j)]);
      const bool binary = v.kind == VarKind::Binary;
      CHECK(lp.binaries.count(v.name) == (binary ? 1u : 0u));
      std::pair<double, double> bounds{0.0, binary ? 1.0 : kInfinity};
      if (lp.bounds.count(v.name)) bounds = lp.bounds.at(v.name);
      CHECK(bounds.first == v.lower);
      CHECK(bounds.second == v.upper);
    }
  }
}

TEST_CASE("solution files round trip") {
  const auto model = build_model(load_feeder(data("branch11.feeder")), CaseConfig{});
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(model.variables.size()), -1.0, 1.0 / 3.0);
  std::stringstream ss;
  ss << "Objective value: 12\n";
  write_solution_values(ss, model, x);
  ss << "# Rows\n" << model.variables[0].name << " 99\n";
  CHECK(read_solution(ss, model) == x);

  std::stringstream partial(model.variables[3].name + " 2.5\n");
  const auto y = read_solution(partial, model);
  CHECK(y[3] == 2.5);
  CHECK(y.sum() == 2.5);

  std::stringstream dup(model.variables[0].name + " 1\n" + model.variables[0].name + " 2\n");
  CHECK_THROWS_AS(read_solution(dup, model), SolutionFormatError);
  std::stringstream bad(model.variables[0].name + " abc\n");
  CHECK_THROWS_AS(read_solution(bad, model), SolutionFormatError);
}

TEST_CASE("input errors exit with code 4 and write nothing") {
  const auto dir = scratch("input");
  CHECK(invoke({"run", "--feeder", "/nonexistent.feeder", "--out", dir.string()}) == cli::kExitInputError);
  CHECK_FALSE(fs::exists(dir));
  CHECK(invoke({"run", "--feeder", data("ieee13.feeder"), "--case", "7", "--out", dir.string()}) ==
        cli::kExitInputError);
  CHECK(invoke({"run", "--feeder", data("ieee13.feeder"), "--case", "custom", "--out", dir.string()}) ==
        cli::kExitInputError);
  CHECK(invoke({"run", "--feeder", data("ieee13.feeder"), "--case", "2", "--multiplier", "4", "--out",
                dir.string()}) == cli::kExitInputError);
  CHECK(invoke({"run", "--feeder", data("ieee13.feeder"), "--alpha", "-1", "--out", dir.string()}) ==
        cli::kExitInputError);
  CHECK(invoke({"run", "--feeder", data("ieee123.feeder"), "--oracle", "--out", dir.string()}) ==
        cli::kExitInputError);
  CHECK(invoke({"frobnicate"}) == cli::kExitInputError);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("case 1 on IEEE-13 keeps the served phases") {
  const auto dir = scratch("case1");
  REQUIRE(invoke({"run", "--feeder", data("ieee13.feeder"), "--case", "1", "--gap", "1e-4", "--out", dir.string()}) ==
          cli::kExitOptimal);
  const auto s = summary(dir);
  CHECK(s["solver"]["status"] == "optimal");
  CHECK(s["phases"]["unchanged_vs_served"] == true);
  CHECK(s["phases"]["changed_vs_served"].empty());
  CHECK(s["conservation"]["ok"] == true);
  for (const char* f : {"solution.csv", "unbalance.csv", "reassignment.csv", "timing.json"})
    CHECK(fs::exists(dir / f));
}

TEST_CASE("custom multiplier and the oracle") {
  const auto dir = scratch("oracle");
  REQUIRE(invoke({"run", "--feeder", data("branch11.feeder"), "--multiplier", "2.5", "--oracle", "--out",
                  dir.string()}) == cli::kExitOptimal);
  const auto s = summary(dir);
  CHECK(s["case"]["name"] == "custom");
  CHECK(s["case"]["capacity_multiplier"] == 2.5);
  CHECK(s["oracle"]["agrees"] == true);
}

TEST_CASE("artifacts are byte-identical across runs") {
  const auto a = scratch("repeat_a");
  const auto b = scratch("repeat_b");
  for (const auto& dir : {a, b})
    REQUIRE(invoke({"run", "--feeder", data("ieee13.feeder"), "--case", "3", "--out", dir.string(), "--export-model",
                    (dir / "model.lp").string()}) == cli::kExitOptimal);
  for (const char* f : {"summary.json", "solution.csv", "unbalance.csv", "reassignment.csv", "model.lp"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("output directory from the environment") {
  const auto dir = scratch("env");
  ::setenv("PHASEBAL_OUT_DIR", dir.string().c_str(), 1);
  const int code = invoke({"run", "--feeder", data("branch11.feeder")});
  ::unsetenv("PHASEBAL_OUT_DIR");
  CHECK(code == cli::kExitOptimal);
  CHECK(fs::exists(dir / "summary.json"));
}

TEST_CASE("sweep") {
  SUBCASE("alpha = 0 is accepted") {
    const auto dir = scratch("sweep0");
    CHECK(invoke({"sweep", "--feeder", data("branch11.feeder"), "--case", "2", "--alpha", "0", "--out", dir.string()}) ==
          cli::kExitOptimal);
    const auto rows = read_csv(dir / "sweep.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][1] == "optimal");
  }
  SUBCASE("a one-point sweep matches run") {
    const auto sd = scratch("sweep1");
    const auto rd = scratch("run1");
    REQUIRE(invoke({"sweep", "--feeder", data("ieee13.feeder"), "--case", "2", "--alpha", "0.1", "--out",
                    sd.string()}) == cli::kExitOptimal);
    REQUIRE(invoke({"run", "--feeder", data("ieee13.feeder"), "--case", "2", "--alpha", "0.1", "--out",
                    rd.string()}) == cli::kExitOptimal);
    const auto rows = read_csv(sd / "sweep.csv");
    REQUIRE(rows.size() == 2);
    const auto s = summary(rd);
    CHECK(std::stod(rows[1][2]) == doctest::Approx(s["solver"]["objective"].get<double>()).epsilon(1e-9));
    CHECK(std::stod(rows[1][4]) == doctest::Approx(s["unbalance"]["metric_pu2"].get<double>()).epsilon(1e-9));
    CHECK(std::stoi(rows[1][6]) == s["phases"]["active_phase_count"].get<int>());
  }
  SUBCASE("larger alpha never buys fewer phases or more deviation") {
    const auto dir = scratch("pareto");
    REQUIRE(invoke({"sweep", "--feeder", data("ieee13.feeder"), "--case", "3", "--alpha", "0.001,0.01,0.1,1", "--out",
                    dir.string()}) == cli::kExitOptimal);
    const auto rows = read_csv(dir / "sweep.csv");
    REQUIRE(rows.size() == 5);
    double prev_dev = kInfinity;
    int prev_phases = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double alpha = std::stod(rows[i][0]);
      const int phases = std::stoi(rows[i][6]);
      const double deviation = (std::stod(rows[i][2]) - phases) / alpha;
      CHECK(phases >= prev_phases);
      CHECK(deviation <= prev_dev + 1e-6);
      prev_phases = phases;
      prev_dev = deviation;
    }
  }
}
