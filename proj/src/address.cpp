#include "segsketch/address.hpp"

#include <charconv>

namespace segsketch {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<Address> parse_address(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;

  if (text.find('.') == std::string_view::npos) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value > 0xffffffffULL) {
      return std::nullopt;
    }
    return static_cast<Address>(value);
  }

  Address addr = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(p, end, value);
    if (ec != std::errc{} || ptr == p || value > 255 || ptr - p > 3) return std::nullopt;
    addr = (addr << 8) | value;
    p = ptr;
    if (octet < 3) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
  }
  if (p != end) return std::nullopt;
  return addr;
}

std::string format_address(Address addr) {
  std::string out;
  out.reserve(15);
  for (int shift = 24; shift >= 0; shift -= 8) {
    out += std::to_string((addr >> shift) & 0xffu);
    if (shift) out += '.';
  }
  return out;
}

}  // namespace segsketch
