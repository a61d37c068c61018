#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace segsketch {

// IPv4 address in host byte order; 192.168.1.2 is 0xC0A80102.
using Address = std::uint32_t;

// Accepts a dotted quad ("10.0.0.1") or an unsigned 32-bit decimal ("167772161").
std::optional<Address> parse_address(std::string_view text);

std::string format_address(Address addr);

}  // namespace segsketch
