#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "phasebal/network.hpp"

namespace phasebal {

/// Syntax error in a feeder document; line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Reads a feeder document (grammar in README.md) without checking network
/// invariants.
FeederData parse_feeder_data(std::string_view text);

/// Parses and validates. Throws ParseError or NetworkError.
Network parse_feeder(std::string_view text);

/// Reads a feeder document from disk. Throws std::runtime_error if unreadable.
Network load_feeder(const std::filesystem::path& path);

/// Canonical document: explicit ohmic r/x matrices, shortest round-trip numbers.
std::string serialize_feeder(const FeederData& data);
inline std::string serialize_feeder(const Network& net) { return serialize_feeder(net.data()); }

}  // namespace phasebal
