#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace phasebal {

enum class Phase : std::uint8_t { A = 0, B = 1, C = 2 };

inline constexpr std::array<Phase, 3> kPhases{Phase::A, Phase::B, Phase::C};

constexpr int index(Phase p) { return static_cast<int>(p); }

constexpr char to_char(Phase p) { return "abc"[index(p)]; }

constexpr std::optional<Phase> phase_from_char(char c) {
  switch (c) {
    case 'a': case 'A': return Phase::A;
    case 'b': case 'B': return Phase::B;
    case 'c': case 'C': return Phase::C;
    default: return std::nullopt;
  }
}

// The phase following p in the a -> b -> c -> a rotation.
constexpr Phase next(Phase p) { return static_cast<Phase>((index(p) + 1) % 3); }

// Subset of {a, b, c} stored as a 3-bit mask; iteration order is always a, b, c.
class PhaseSet {
 public:
  constexpr PhaseSet() = default;
  constexpr explicit PhaseSet(std::uint8_t mask) : mask_(mask & 0x7u) {}

  static constexpr PhaseSet all() { return PhaseSet(0x7u); }
  static constexpr PhaseSet of(Phase p) { return PhaseSet(std::uint8_t(1u << index(p))); }

  // Parses strings such as "abc", "ca" or "b". Returns nullopt on any other
  // character or on a repeated phase.
  static std::optional<PhaseSet> parse(std::string_view text) {
    PhaseSet out;
    for (char c : text) {
      auto p = phase_from_char(c);
      if (!p || out.contains(*p)) return std::nullopt;
      out.insert(*p);
    }
    return out;
  }

  constexpr bool contains(Phase p) const { return (mask_ >> index(p)) & 1u; }
  constexpr void insert(Phase p) { mask_ |= std::uint8_t(1u << index(p)); }
  constexpr void erase(Phase p) { mask_ &= std::uint8_t(~(1u << index(p)) & 0x7u); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr int size() const { return (mask_ & 1u) + ((mask_ >> 1) & 1u) + ((mask_ >> 2) & 1u); }
  constexpr std::uint8_t mask() const { return mask_; }

  constexpr bool is_subset_of(PhaseSet other) const { return (mask_ & ~other.mask_) == 0; }

  constexpr PhaseSet operator|(PhaseSet o) const { return PhaseSet(std::uint8_t(mask_ | o.mask_)); }
  constexpr PhaseSet operator&(PhaseSet o) const { return PhaseSet(std::uint8_t(mask_ & o.mask_)); }
  constexpr PhaseSet& operator|=(PhaseSet o) { mask_ |= o.mask_; return *this; }
  constexpr bool operator==(const PhaseSet&) const = default;

  std::string to_string() const {
    std::string s;
    for (Phase p : kPhases)
      if (contains(p)) s.push_back(to_char(p));
    return s;
  }

 private:
  std::uint8_t mask_ = 0;
};

// Image of a phase set under a relabelling of the phases.
inline PhaseSet permute(PhaseSet set, const std::array<Phase, 3>& map) {
  PhaseSet out;
  for (Phase p : kPhases)
    if (set.contains(p)) out.insert(map[index(p)]);
  return out;
}

}  // namespace phasebal
