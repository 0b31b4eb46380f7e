#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace graphid {

enum class ValueUnit { Wei, Ether };

ValueUnit parse_value_unit(std::string_view text);
std::string to_string(ValueUnit unit);

/// Non-negative transaction amount held as an exact 128-bit count of wei
/// (1 ether = 1e18 wei). Sums of amounts stay exact; conversion to double
/// happens only when a value enters a feature vector.
struct Amount {
  unsigned __int128 wei = 0;

  static Amount from_wei(uint64_t w) { return Amount{w}; }
  static Amount from_milli_ether(uint64_t m);

  /// Parses a decimal string in the given unit. Wei values must be plain
  /// integers; ether values allow up to 18 fractional digits. Returns
  /// nullopt on malformed text, negative values or overflow.
  static std::optional<Amount> parse(std::string_view text, ValueUnit unit);

  /// Canonical decimal form: integer wei, or ether with trailing zeros
  /// trimmed ("2.5", "0", "0.000000000000000001").
  std::string str(ValueUnit unit) const;

  double to_ether() const { return static_cast<double>(wei) * 1e-18; }

  /// Addition with overflow detection.
  Amount checked_add(const Amount& other) const;

  friend bool operator==(const Amount& a, const Amount& b) { return a.wei == b.wei; }
  friend std::strong_ordering operator<=>(const Amount& a, const Amount& b) {
    if (a.wei < b.wei) return std::strong_ordering::less;
    if (a.wei > b.wei) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
};

}  // namespace graphid
