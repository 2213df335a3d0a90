#include "phasebal/lp_format.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace phasebal {

namespace {

std::string number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string bound(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return number(v);
}

// Writes signed terms, wrapping long expressions onto indented lines.
void write_terms(std::ostream& os, const std::vector<Term>& terms, const MilpModel& model) {
  if (terms.empty()) {
    os << " 0 " << model.variables.front().name;
    return;
  }
  int on_line = 0;
  for (const auto& t : terms) {
    if (on_line == 6) {
      os << "\n   ";
      on_line = 0;
    }
    os << (t.coef < 0 ? " - " : " + ") << number(std::abs(t.coef)) << ' ' << model.variables[t.var].name;
    ++on_line;
  }
}

const char* relation(Relation r) {
  switch (r) {
    case Relation::LessEqual: return "<=";
    case Relation::Equal: return "=";
    case Relation::GreaterEqual: return ">=";
  }
  return "?";
}

}  // namespace

void write_lp(std::ostream& os, const MilpModel& model) {
  os << "\\ phase allocation model: " << model.variables.size() << " variables, " << model.constraints.size()
     << " constraints, " << model.binary_count() << " binaries\n";
  os << "Minimize\n obj:";
  std::vector<Term> objective;
  for (Eigen::Index j = 0; j < model.objective.size(); ++j)
    if (model.objective[j] != 0.0) objective.push_back({static_cast<int>(j), model.objective[j]});
  write_terms(os, objective, model);
  os << "\nSubject To\n";
  for (const auto& c : model.constraints) {
    os << ' ' << c.name << ':';
    write_terms(os, c.terms, model);
    os << ' ' << relation(c.relation) << ' ' << number(c.rhs) << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : model.variables) {
    const bool binary = v.kind == VarKind::Binary;
    const double def_hi = binary ? 1.0 : kInfinity;
    if (v.lower == 0.0 && v.upper == def_hi) continue;
    if (v.lower == v.upper) {
      os << ' ' << v.name << " = " << number(v.lower) << '\n';
    } else if (std::isinf(v.lower) && std::isinf(v.upper)) {
      os << ' ' << v.name << " free\n";
    } else {
      os << ' ' << bound(v.lower) << " <= " << v.name << " <= " << bound(v.upper) << '\n';
    }
  }
  os << "Binaries\n";
  int on_line = 0;
  for (const auto& v : model.variables) {
    if (v.kind != VarKind::Binary) continue;
    os << ' ' << v.name;
    if (++on_line == 8) {
      os << '\n';
      on_line = 0;
    }
  }
  if (on_line) os << '\n';
  os << "End\n";
}

Eigen::VectorXd read_solution(std::istream& is, const MilpModel& model) {
  std::unordered_map<std::string, int> by_name;
  for (std::size_t j = 0; j < model.variables.size(); ++j) by_name.emplace(model.variables[j].name, static_cast<int>(j));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.variables.size()));
  std::vector<bool> seen(model.variables.size(), false);

  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.rfind("# Rows", 0) == 0) break;
    std::istringstream tokens(line);
    std::string name, value;
    if (!(tokens >> name)) continue;
    auto it = by_name.find(name);
    if (it == by_name.end()) continue;
    if (!(tokens >> value))
      throw SolutionFormatError("line " + std::to_string(line_no) + ": no value for " + name);
    double v = 0.0;
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || end != value.data() + value.size())
      throw SolutionFormatError("line " + std::to_string(line_no) + ": bad value '" + value + "' for " + name);
    if (seen[it->second]) throw SolutionFormatError("line " + std::to_string(line_no) + ": " + name + " listed twice");
    seen[it->second] = true;
    x[it->second] = v;
  }
  return x;
}

void write_solution_values(std::ostream& os, const MilpModel& model, const Eigen::VectorXd& x) {
  for (std::size_t j = 0; j < model.variables.size(); ++j)
    os << model.variables[j].name << ' ' << number(x[static_cast<Eigen::Index>(j)]) << '\n';
}

}  // namespace phasebal
