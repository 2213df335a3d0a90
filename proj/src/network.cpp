#include "phasebal/network.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <deque>
#include <optional>
#include <sstream>
#include <unordered_set>

namespace phasebal {

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::BadBase: return "bad-base";
    case ViolationKind::DuplicateBus: return "duplicate-bus";
    case ViolationKind::InvalidBusId: return "invalid-bus-id";
    case ViolationKind::SourceMismatch: return "source";
    case ViolationKind::UnknownBus: return "unknown-bus";
    case ViolationKind::NonRadial: return "non-radial";
    case ViolationKind::EmptyPhaseSet: return "empty-phase-set";
    case ViolationKind::LoadOnAbsentPhase: return "load-on-absent-phase";
    case ViolationKind::NegativeLoad: return "negative-load";
    case ViolationKind::PhaseInconsistent: return "phase-inconsistent";
    case ViolationKind::ImpedanceOnAbsentPhase: return "impedance-on-absent-phase";
    case ViolationKind::NegativeResistance: return "negative-resistance";
  }
  return "unknown";
}

std::size_t ValidationReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; }));
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) os << phasebal::to_string(v.kind) << ": " << v.message << '\n';
  return os.str();
}

bool is_valid_bus_id(std::string_view id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

namespace {

void add(ValidationReport& report, ViolationKind kind, std::string message,
         std::vector<std::string> elements) {
  report.violations.push_back({kind, std::move(message), std::move(elements)});
}

// At most one violation describing why the line graph is not a tree rooted at
// the source. Assumes every line endpoint names a known bus.
std::optional<std::string> radiality_problem(
    const FeederData& data, const std::unordered_map<std::string, std::size_t>& index,
    std::size_t source) {
  const std::size_t n = data.buses.size();
  if (data.lines.size() + 1 != n) {
    std::ostringstream os;
    os << data.lines.size() << " lines for " << n << " buses (a radial feeder has "
       << (n == 0 ? 0 : n - 1) << ")";
    return os.str();
  }
  std::vector<int> incoming(n, 0);
  std::vector<std::vector<std::size_t>> down(n);
  for (const auto& line : data.lines) {
    const auto f = index.at(line.from);
    const auto t = index.at(line.to);
    if (f == t) return "line " + line.from + " -> " + line.to + " is a self loop";
    ++incoming[t];
    down[f].push_back(t);
  }
  if (source != Network::npos && incoming[source] != 0)
    return "source bus " + data.buses[source].id + " has an incoming line";
  for (std::size_t i = 0; i < n; ++i)
    if (i != source && incoming[i] > 1)
      return "bus " + data.buses[i].id + " is fed by " + std::to_string(incoming[i]) + " lines";
  if (source == Network::npos) return std::nullopt;
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{source};
  seen[source] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const auto b = queue.front();
    queue.pop_front();
    for (auto c : down[b])
      if (!seen[c]) {
        seen[c] = true;
        ++reached;
        queue.push_back(c);
      }
  }
  if (reached != n) {
    for (std::size_t i = 0; i < n; ++i)
      if (!seen[i]) return "bus " + data.buses[i].id + " is not reachable from the source";
  }
  return std::nullopt;
}

}  // namespace

ValidationReport validate(const FeederData& data) {
  ValidationReport report;
  const auto& info = data.info;
  if (!(info.kva_base > 0.0) || !(info.kv_base > 0.0))
    add(report, ViolationKind::BadBase, "power and voltage bases must be positive", {});
  if ((info.v_min && !(*info.v_min > 0.0)) || (info.v_max && !(*info.v_max > info.v_min.value_or(0.0))))
    add(report, ViolationKind::BadBase, "voltage band needs 0 < v_min < v_max", {});
  if (!(info.source_v.array() > 0.0).all())
    add(report, ViolationKind::BadBase, "source squared voltage must be positive", {info.source_id});

  std::unordered_map<std::string, std::size_t> by_id;
  std::size_t sources = 0;
  std::size_t source = Network::npos;
  for (std::size_t i = 0; i < data.buses.size(); ++i) {
    const auto& bus = data.buses[i];
    if (!is_valid_bus_id(bus.id))
      add(report, ViolationKind::InvalidBusId, "bus id '" + bus.id + "' is not [A-Za-z0-9_.]+", {bus.id});
    if (!by_id.emplace(bus.id, i).second)
      add(report, ViolationKind::DuplicateBus, "bus " + bus.id + " is declared twice", {bus.id});
    if (bus.is_source) {
      ++sources;
      source = i;
    }
    if (bus.phases.empty())
      add(report, ViolationKind::EmptyPhaseSet, "bus " + bus.id + " has no phases", {bus.id});
    for (Phase p : kPhases) {
      const double lp = bus.load_p_kw[index(p)];
      const double lq = bus.load_q_kvar[index(p)];
      if (!(lp >= 0.0) || !(lq >= 0.0))
        add(report, ViolationKind::NegativeLoad,
            "bus " + bus.id + " has a negative or non-finite load on phase " + to_char(p), {bus.id});
      if (!bus.phases.contains(p) && (lp != 0.0 || lq != 0.0))
        add(report, ViolationKind::LoadOnAbsentPhase,
            "bus " + bus.id + " carries load on absent phase " + to_char(p), {bus.id});
    }
  }
  if (sources != 1) {
    add(report, ViolationKind::SourceMismatch,
        std::to_string(sources) + " buses are marked as source (exactly one required)", {});
    source = Network::npos;
  } else if (data.buses[source].id != info.source_id) {
    add(report, ViolationKind::SourceMismatch,
        "source bus " + data.buses[source].id + " does not match header source '" + info.source_id + "'",
        {data.buses[source].id});
  }

  bool endpoints_known = true;
  for (const auto& line : data.lines) {
    for (const auto* end : {&line.from, &line.to})
      if (!by_id.contains(*end)) {
        endpoints_known = false;
        add(report, ViolationKind::UnknownBus,
            "line " + line.from + " -> " + line.to + " references unknown bus " + *end, {*end});
      }
  }
  if (endpoints_known && report.count(ViolationKind::DuplicateBus) == 0) {
    if (auto problem = radiality_problem(data, by_id, source))
      add(report, ViolationKind::NonRadial, *problem, {});
  }

  for (const auto& line : data.lines) {
    auto f = by_id.find(line.from);
    auto t = by_id.find(line.to);
    if (f == by_id.end() || t == by_id.end()) continue;
    const auto& up = data.buses[f->second];
    const auto& down = data.buses[t->second];
    if (!down.phases.is_subset_of(up.phases))
      add(report, ViolationKind::PhaseInconsistent,
          "bus " + down.id + " (" + down.phases.to_string() + ") has phases absent upstream at " + up.id +
              " (" + up.phases.to_string() + ")",
          {up.id, down.id});
    for (Phase p : kPhases) {
      const int k = index(p);
      if (down.phases.contains(p)) {
        if (line.z_ohm(k, k).real() < 0.0)
          add(report, ViolationKind::NegativeResistance,
              "line " + up.id + " -> " + down.id + " has negative resistance on phase " + to_char(p),
              {up.id, down.id});
      } else if (!line.z_ohm.row(k).isZero(0.0) || !line.z_ohm.col(k).isZero(0.0)) {
        add(report, ViolationKind::ImpedanceOnAbsentPhase,
            "line " + up.id + " -> " + down.id + " has impedance on absent phase " + to_char(p),
            {up.id, down.id});
      }
    }
  }
  return report;
}

NetworkError::NetworkError(ValidationReport report)
    : std::runtime_error("invalid feeder:\n" + report.to_string()), report_(std::move(report)) {}

Network::Network(FeederData data) : data_(std::move(data)) {
  auto report = validate(data_);
  if (!report.ok()) throw NetworkError(std::move(report));

  const std::size_t n = data_.buses.size();
  for (std::size_t i = 0; i < n; ++i) {
    index_.emplace(data_.buses[i].id, i);
    if (data_.buses[i].is_source) source_ = i;
  }
  parent_.assign(n, npos);
  line_into_.assign(n, npos);
  children_.assign(n, {});
  for (std::size_t l = 0; l < data_.lines.size(); ++l) {
    const auto f = index_.at(data_.lines[l].from);
    const auto t = index_.at(data_.lines[l].to);
    parent_[t] = f;
    line_into_[t] = l;
    children_[f].push_back(t);
  }
  for (auto& kids : children_)
    std::sort(kids.begin(), kids.end(),
              [this](std::size_t a, std::size_t b) { return data_.buses[a].id < data_.buses[b].id; });

  order_.reserve(n);
  order_.push_back(source_);
  for (std::size_t head = 0; head < order_.size(); ++head)
    for (auto c : children_[order_[head]]) order_.push_back(c);
}

std::size_t Network::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw std::out_of_range("unknown bus id '" + std::string(id) + "'");
  return it->second;
}

bool Network::contains(std::string_view id) const { return index_.contains(std::string(id)); }

PhaseMatrix Network::load_p_pu() const {
  PhaseMatrix m(bus_count(), 3);
  for (std::size_t i = 0; i < bus_count(); ++i) m.row(i) = bus(i).load_p_kw.transpose() / phase_power_base_kw();
  return m;
}

PhaseMatrix Network::load_q_pu() const {
  PhaseMatrix m(bus_count(), 3);
  for (std::size_t i = 0; i < bus_count(); ++i) m.row(i) = bus(i).load_q_kvar.transpose() / phase_power_base_kw();
  return m;
}

std::vector<PhaseSet> Network::served_phases() const {
  std::vector<PhaseSet> served(bus_count());
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    const auto& b = bus(*it);
    for (Phase p : kPhases)
      if (b.load_p_kw[index(p)] != 0.0 || b.load_q_kvar[index(p)] != 0.0) served[*it].insert(p);
    for (auto c : children_[*it]) served[*it] |= served[c];
  }
  return served;
}

std::vector<std::string> children(const Network& net, std::string_view id) {
  std::vector<std::string> out;
  for (auto c : net.children(net.index_of(id))) out.push_back(net.bus(c).id);
  return out;
}

}  // namespace phasebal
