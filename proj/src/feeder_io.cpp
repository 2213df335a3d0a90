#include "phasebal/feeder_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace phasebal {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         message),
      line_(line),
      column_(column) {}

namespace {

constexpr double kFeetPerMile = 5280.0;

struct Token {
  std::string_view text;
  int column;  // 1-based
};

std::vector<Token> split(std::string_view s, std::size_t offset) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    out.push_back({s.substr(i, j - i), static_cast<int>(offset + i + 1)});
    i = j;
  }
  return out;
}

struct Entry {
  int line;
  int key_column;
  std::vector<Token> values;
};

struct Section {
  enum class Kind { Feeder, Config, Bus, Line } kind;
  int line;
  std::vector<Token> args;
  std::map<std::string, Entry, std::less<>> entries;
};

double to_number(const Token& tok, int line) {
  double v = 0.0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError(line, tok.column, "expected a number, got '" + std::string(tok.text) + "'");
  return v;
}

const Entry* find(const Section& s, std::string_view key) {
  auto it = s.entries.find(key);
  return it == s.entries.end() ? nullptr : &it->second;
}

const Entry& require(const Section& s, std::string_view key) {
  if (const auto* e = find(s, key)) return *e;
  throw ParseError(s.line, 1, "section is missing required key '" + std::string(key) + "'");
}

std::vector<double> numbers(const Entry& e, std::size_t count, std::string_view key) {
  if (e.values.size() != count) {
    const int col = e.values.empty() ? e.key_column : e.values.back().column;
    throw ParseError(e.line, col,
                     "'" + std::string(key) + "' expects " + std::to_string(count) + " values, got " +
                         std::to_string(e.values.size()));
  }
  std::vector<double> out;
  for (const auto& tok : e.values) out.push_back(to_number(tok, e.line));
  return out;
}

const Token& single(const Entry& e, std::string_view key) {
  if (e.values.size() != 1)
    throw ParseError(e.line, e.key_column, "'" + std::string(key) + "' expects a single value");
  return e.values.front();
}

Eigen::Matrix3d matrix(const std::vector<double>& v) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = v[3 * i + j];
  return m;
}

const std::map<std::string_view, std::vector<std::string_view>>& allowed_keys() {
  static const std::map<std::string_view, std::vector<std::string_view>> keys{
      {"feeder", {"name", "kva_base", "kv_base", "source", "source_v", "v_min", "v_max"}},
      {"config", {"r", "x"}},
      {"bus", {"phases", "p", "q"}},
      {"line", {"r", "x", "config", "length_ft"}},
  };
  return keys;
}

std::vector<Section> sections(std::string_view text) {
  std::vector<Section> out;
  int line_no = 0;
  for (std::size_t pos = 0; pos < text.size();) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    if (line[first] == '[') {
      auto close = line.find(']', first);
      if (close == std::string_view::npos)
        throw ParseError(line_no, static_cast<int>(line.size() + 1), "missing ']' in section header");
      if (line.find_first_not_of(" \t", close + 1) != std::string_view::npos)
        throw ParseError(line_no, static_cast<int>(close + 2), "unexpected text after section header");
      auto toks = split(line.substr(first + 1, close - first - 1), first + 1);
      if (toks.empty()) throw ParseError(line_no, static_cast<int>(first + 1), "empty section header");
      Section s{};
      s.line = line_no;
      const auto kind = toks.front().text;
      std::size_t expected = 0;
      if (kind == "feeder") {
        s.kind = Section::Kind::Feeder;
        expected = 0;
      } else if (kind == "config") {
        s.kind = Section::Kind::Config;
        expected = 1;
      } else if (kind == "bus") {
        s.kind = Section::Kind::Bus;
        expected = 1;
      } else if (kind == "line") {
        s.kind = Section::Kind::Line;
        expected = 2;
      } else {
        throw ParseError(line_no, toks.front().column, "unknown section '" + std::string(kind) + "'");
      }
      if (toks.size() != expected + 1)
        throw ParseError(line_no, toks.front().column,
                         "section '" + std::string(kind) + "' takes " + std::to_string(expected) +
                             " argument(s)");
      s.args.assign(toks.begin() + 1, toks.end());
      out.push_back(std::move(s));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(line_no, static_cast<int>(first + 1), "expected 'key = value' or a section header");
    if (out.empty()) throw ParseError(line_no, static_cast<int>(first + 1), "key outside of any section");
    auto key_toks = split(line.substr(0, eq), 0);
    if (key_toks.size() != 1) throw ParseError(line_no, static_cast<int>(first + 1), "malformed key");
    auto& section = out.back();
    static constexpr std::array<std::string_view, 4> names{"feeder", "config", "bus", "line"};
    const auto& allowed = allowed_keys().at(names[static_cast<int>(section.kind)]);
    const auto key = key_toks.front().text;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ParseError(line_no, key_toks.front().column, "unknown key '" + std::string(key) + "'");
    Entry e{line_no, key_toks.front().column, split(line.substr(eq + 1), eq + 1)};
    if (e.values.empty()) throw ParseError(line_no, static_cast<int>(eq + 2), "missing value");
    if (!section.entries.emplace(std::string(key), std::move(e)).second)
      throw ParseError(line_no, key_toks.front().column, "duplicate key '" + std::string(key) + "'");
  }
  return out;
}

void write_number(std::ostream& os, double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  os.write(buf.data(), ptr - buf.data());
}

void write_numbers(std::ostream& os, std::string_view key, const double* v, int count) {
  os << key << " =";
  for (int i = 0; i < count; ++i) {
    os << ' ';
    write_number(os, v[i]);
  }
  os << '\n';
}

}  // namespace

FeederData parse_feeder_data(std::string_view text) {
  auto secs = sections(text);
  FeederData data;
  const Section* header = nullptr;
  std::map<std::string, std::pair<Eigen::Matrix3d, Eigen::Matrix3d>, std::less<>> configs;

  for (const auto& s : secs) {
    switch (s.kind) {
      case Section::Kind::Feeder:
        if (header) throw ParseError(s.line, 1, "duplicate [feeder] section");
        header = &s;
        break;
      case Section::Kind::Config: {
        const auto name = std::string(s.args[0].text);
        auto r = matrix(numbers(require(s, "r"), 9, "r"));
        auto x = matrix(numbers(require(s, "x"), 9, "x"));
        if (!configs.emplace(name, std::make_pair(r, x)).second)
          throw ParseError(s.line, s.args[0].column, "duplicate config '" + name + "'");
        break;
      }
      default:
        break;
    }
  }
  if (!header) throw ParseError(1, 1, "document has no [feeder] section");

  auto& info = data.info;
  if (const auto* e = find(*header, "name")) {
    std::string name;
    for (const auto& t : e->values) {
      if (!name.empty()) name += ' ';
      name += t.text;
    }
    info.name = name;
  }
  {
    const auto& e = require(*header, "kva_base");
    info.kva_base = to_number(single(e, "kva_base"), e.line);
  }
  {
    const auto& e = require(*header, "kv_base");
    info.kv_base = to_number(single(e, "kv_base"), e.line);
  }
  info.source_id = std::string(single(require(*header, "source"), "source").text);
  if (const auto* e = find(*header, "source_v")) {
    auto v = numbers(*e, 3, "source_v");
    info.source_v = PhaseVector(v[0], v[1], v[2]);
  }
  for (auto [key, slot] : {std::pair{"v_min", &info.v_min}, std::pair{"v_max", &info.v_max}})
    if (const auto* e = find(*header, key)) *slot = to_number(single(*e, key), e->line);

  for (const auto& s : secs) {
    if (s.kind == Section::Kind::Bus) {
      Bus bus;
      bus.id = std::string(s.args[0].text);
      const auto& pe = require(s, "phases");
      const auto& ptok = single(pe, "phases");
      auto phases = PhaseSet::parse(ptok.text);
      if (!phases)
        throw ParseError(pe.line, ptok.column, "phases must be letters from 'abc', got '" +
                                                   std::string(ptok.text) + "'");
      bus.phases = *phases;
      if (const auto* e = find(s, "p")) {
        auto v = numbers(*e, 3, "p");
        bus.load_p_kw = PhaseVector(v[0], v[1], v[2]);
      }
      if (const auto* e = find(s, "q")) {
        auto v = numbers(*e, 3, "q");
        bus.load_q_kvar = PhaseVector(v[0], v[1], v[2]);
      }
      bus.is_source = bus.id == info.source_id;
      data.buses.push_back(std::move(bus));
    } else if (s.kind == Section::Kind::Line) {
      Line line;
      line.from = std::string(s.args[0].text);
      line.to = std::string(s.args[1].text);
      const auto* r = find(s, "r");
      const auto* x = find(s, "x");
      const auto* cfg = find(s, "config");
      const auto* len = find(s, "length_ft");
      if ((r || x) && (cfg || len))
        throw ParseError(s.line, 1, "line gives both explicit r/x and config/length_ft");
      if (r || x) {
        Eigen::Matrix3d rm = r ? matrix(numbers(*r, 9, "r")) : Eigen::Matrix3d::Zero();
        Eigen::Matrix3d xm = x ? matrix(numbers(*x, 9, "x")) : Eigen::Matrix3d::Zero();
        line.z_ohm.real() = rm;
        line.z_ohm.imag() = xm;
      } else if (cfg && len) {
        const auto& ctok = single(*cfg, "config");
        auto it = configs.find(ctok.text);
        if (it == configs.end())
          throw ParseError(cfg->line, ctok.column, "unknown config '" + std::string(ctok.text) + "'");
        const double miles = to_number(single(*len, "length_ft"), len->line) / kFeetPerMile;
        line.z_ohm.real() = it->second.first * miles;
        line.z_ohm.imag() = it->second.second * miles;
      } else {
        throw ParseError(s.line, 1, "line needs either r/x or config and length_ft");
      }
      data.lines.push_back(std::move(line));
    }
  }
  return data;
}

Network parse_feeder(std::string_view text) { return Network(parse_feeder_data(text)); }

Network load_feeder(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read feeder file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_feeder(ss.str());
}

std::string serialize_feeder(const FeederData& data) {
  std::ostringstream os;
  const auto& info = data.info;
  os << "[feeder]\n";
  if (!info.name.empty()) os << "name = " << info.name << '\n';
  os << "kva_base = ";
  write_number(os, info.kva_base);
  os << "\nkv_base = ";
  write_number(os, info.kv_base);
  os << "\nsource = " << info.source_id << '\n';
  write_numbers(os, "source_v", info.source_v.data(), 3);
  if (info.v_min) {
    os << "v_min = ";
    write_number(os, *info.v_min);
    os << '\n';
  }
  if (info.v_max) {
    os << "v_max = ";
    write_number(os, *info.v_max);
    os << '\n';
  }

  for (const auto& bus : data.buses) {
    os << "\n[bus " << bus.id << "]\n";
    os << "phases = " << bus.phases.to_string() << '\n';
    if (!bus.load_p_kw.isZero(0.0)) write_numbers(os, "p", bus.load_p_kw.data(), 3);
    if (!bus.load_q_kvar.isZero(0.0)) write_numbers(os, "q", bus.load_q_kvar.data(), 3);
  }
  for (const auto& line : data.lines) {
    os << "\n[line " << line.from << ' ' << line.to << "]\n";
    Eigen::Matrix<double, 3, 3, Eigen::RowMajor> r = line.z_ohm.real();
    Eigen::Matrix<double, 3, 3, Eigen::RowMajor> x = line.z_ohm.imag();
    write_numbers(os, "r", r.data(), 9);
    write_numbers(os, "x", x.data(), 9);
  }
  return os.str();
}

}  // namespace phasebal
