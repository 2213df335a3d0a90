#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "phasebal/phase.hpp"

namespace phasebal {

/// Per-phase quantity indexed by phase (a, b, c).
using PhaseVector = Eigen::Vector3d;
/// Series impedance matrix of a three-phase line, rows/columns in a, b, c order.
using ImpedanceMatrix = Eigen::Matrix3cd;
/// One row per bus, one column per phase.
using PhaseMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

struct Bus {
  std::string id;
  PhaseSet phases;
  PhaseVector load_p_kw = PhaseVector::Zero();
  PhaseVector load_q_kvar = PhaseVector::Zero();
  bool is_source = false;

  bool operator==(const Bus&) const = default;
};

/// A line carries exactly the phases of its downstream bus.
struct Line {
  std::string from;
  std::string to;
  ImpedanceMatrix z_ohm = ImpedanceMatrix::Zero();

  bool operator==(const Line&) const = default;
};

struct FeederInfo {
  std::string name;
  double kva_base = 0.0;  // three-phase power base
  double kv_base = 0.0;   // line-to-line voltage base
  std::string source_id;
  PhaseVector source_v = PhaseVector::Ones();  // squared magnitude, pu^2
  /// Operating voltage band of the feeder (pu^2), used when a run does not
  /// set one.
  std::optional<double> v_min, v_max;

  bool operator==(const FeederInfo&) const = default;
};

/// Unvalidated feeder description, as read from a document or built in code.
struct FeederData {
  FeederInfo info;
  std::vector<Bus> buses;
  std::vector<Line> lines;

  bool operator==(const FeederData&) const = default;
};

enum class ViolationKind {
  BadBase,
  DuplicateBus,
  InvalidBusId,
  SourceMismatch,
  UnknownBus,
  NonRadial,
  EmptyPhaseSet,
  LoadOnAbsentPhase,
  NegativeLoad,
  PhaseInconsistent,
  ImpedanceOnAbsentPhase,
  NegativeResistance,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string message;
  std::vector<std::string> elements;  // offending bus ids (line endpoints for line issues)
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
  std::string to_string() const;
};

ValidationReport validate(const FeederData& data);

class NetworkError : public std::runtime_error {
 public:
  explicit NetworkError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Validated radial feeder. Immutable after construction.
///
/// Buses keep their input order for storage; traversal helpers expose a
/// breadth-first order from the source in which children are visited in
/// lexicographic id order, so every sweep over the network is deterministic.
class Network {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// Throws NetworkError when `validate(data)` reports any violation.
  explicit Network(FeederData data);

  const FeederData& data() const { return data_; }
  const FeederInfo& info() const { return data_.info; }

  std::size_t bus_count() const { return data_.buses.size(); }
  std::size_t line_count() const { return data_.lines.size(); }
  const Bus& bus(std::size_t i) const { return data_.buses[i]; }
  const std::vector<Bus>& buses() const { return data_.buses; }
  const std::vector<Line>& lines() const { return data_.lines; }

  std::size_t source() const { return source_; }
  /// Throws std::out_of_range for an unknown id.
  std::size_t index_of(std::string_view id) const;
  bool contains(std::string_view id) const;

  /// Parent bus index, npos for the source.
  std::size_t parent(std::size_t bus) const { return parent_[bus]; }
  /// Index into lines() of the line feeding `bus`, npos for the source.
  std::size_t line_into(std::size_t bus) const { return line_into_[bus]; }
  /// Direct downstream neighbours, ordered by id.
  const std::vector<std::size_t>& children(std::size_t bus) const { return children_[bus]; }
  /// Source first; every bus appears after its parent.
  const std::vector<std::size_t>& topological_order() const { return order_; }

  /// Per-phase power base in kW (three-phase base / 3).
  double phase_power_base_kw() const { return data_.info.kva_base / 3.0; }
  /// Impedance base in ohm, kV_LL^2 / MVA_3ph.
  double impedance_base_ohm() const {
    return data_.info.kv_base * data_.info.kv_base * 1000.0 / data_.info.kva_base;
  }

  /// Spot loads in per-unit of the per-phase power base.
  PhaseMatrix load_p_pu() const;
  PhaseMatrix load_q_pu() const;

  /// Phases with nonzero demand anywhere in the subtree rooted at each bus.
  std::vector<PhaseSet> served_phases() const;

 private:
  FeederData data_;
  std::size_t source_ = npos;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> line_into_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> order_;
};

/// Ids of the immediate children of `id`, in lexicographic order.
std::vector<std::string> children(const Network& net, std::string_view id);

bool is_valid_bus_id(std::string_view id);

}  // namespace phasebal
