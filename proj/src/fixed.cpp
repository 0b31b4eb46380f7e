#include "graphid/fixed.hpp"

#include "graphid/common.hpp"

namespace graphid {

namespace {

using u128 = unsigned __int128;

constexpr u128 kWeiPerEther = static_cast<u128>(1000000000000000000ULL);

std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  char buf[40];
  int pos = 40;
  while (v > 0) {
    buf[--pos] = static_cast<char>('0' + static_cast<int>(v % 10));
    v /= 10;
  }
  return std::string(buf + pos, buf + 40);
}

// Parses a run of digits into a u128, failing on overflow or empty input.
bool parse_digits(std::string_view s, u128& out) {
  if (s.empty()) return false;
  u128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    const u128 prev = v;
    v = v * 10 + static_cast<unsigned>(c - '0');
    if (v / 10 < prev) return false;  // overflow
  }
  out = v;
  return true;
}

}  // namespace

ValueUnit parse_value_unit(std::string_view text) {
  if (text == "wei") return ValueUnit::Wei;
  if (text == "ether") return ValueUnit::Ether;
  throw Error("unknown value unit '" + std::string(text) + "' (expected wei or ether)");
}

std::string to_string(ValueUnit unit) { return unit == ValueUnit::Wei ? "wei" : "ether"; }

Amount Amount::from_milli_ether(uint64_t m) {
  return Amount{static_cast<u128>(m) * static_cast<u128>(1000000000000000ULL)};
}

std::optional<Amount> Amount::parse(std::string_view text, ValueUnit unit) {
  if (text.empty()) return std::nullopt;
  const size_t dot = text.find('.');
  if (unit == ValueUnit::Wei) {
    if (dot != std::string_view::npos) return std::nullopt;
    u128 v;
    if (!parse_digits(text, v)) return std::nullopt;
    return Amount{v};
  }
  std::string_view int_part = dot == std::string_view::npos ? text : text.substr(0, dot);
  std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  if (frac_part.size() > 18) return std::nullopt;
  u128 whole = 0;
  if (!int_part.empty() && !parse_digits(int_part, whole)) return std::nullopt;
  u128 frac = 0;
  if (!frac_part.empty()) {
    if (!parse_digits(frac_part, frac)) return std::nullopt;
    for (size_t i = frac_part.size(); i < 18; ++i) frac *= 10;
  }
  // whole * 1e18 + frac, overflow-checked
  const u128 scaled = whole * kWeiPerEther;
  if (whole != 0 && scaled / whole != kWeiPerEther) return std::nullopt;
  const u128 total = scaled + frac;
  if (total < scaled) return std::nullopt;
  return Amount{total};
}

std::string Amount::str(ValueUnit unit) const {
  if (unit == ValueUnit::Wei) return u128_to_string(wei);
  const u128 whole = wei / kWeiPerEther;
  u128 frac = wei % kWeiPerEther;
  std::string out = u128_to_string(whole);
  if (frac != 0) {
    std::string digits = u128_to_string(frac);
    digits.insert(0, 18 - digits.size(), '0');
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    out += '.';
    out += digits;
  }
  return out;
}

Amount Amount::checked_add(const Amount& other) const {
  const u128 sum = wei + other.wei;
  if (sum < wei) throw Error("amount overflow in 128-bit wei accumulator");
  return Amount{sum};
}

}  // namespace graphid
