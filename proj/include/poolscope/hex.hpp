#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace poolscope {

/// Decodes hex with an optional 0x prefix. Throws ConfigError on bad input.
std::vector<std::uint8_t> hex_decode(std::string_view hex);

/// Lowercase hex with a 0x prefix.
std::string hex_encode(std::span<const std::uint8_t> bytes);

/// "0x1a" style JSON-RPC quantities.
std::uint64_t parse_quantity(std::string_view hex);
std::string to_quantity(std::uint64_t value);

}  // namespace poolscope
