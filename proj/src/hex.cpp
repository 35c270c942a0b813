#include "poolscope/hex.hpp"

#include "poolscope/error.hpp"

namespace poolscope {

namespace {

int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string_view strip_prefix(std::string_view hex) {
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
    return hex;
}

}  // namespace

std::vector<std::uint8_t> hex_decode(std::string_view hex) {
    hex = strip_prefix(hex);
    if (hex.size() % 2 != 0) throw ConfigError("odd-length hex string");
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = nibble(hex[2 * i]);
        const int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw ConfigError("invalid hex digit");
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

std::string hex_encode(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out = "0x";
    out.reserve(2 + bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

std::uint64_t parse_quantity(std::string_view hex) {
    hex = strip_prefix(hex);
    if (hex.empty() || hex.size() > 16) throw ConfigError("invalid quantity");
    std::uint64_t v = 0;
    for (char c : hex) {
        const int n = nibble(c);
        if (n < 0) throw ConfigError("invalid quantity digit");
        v = v << 4 | static_cast<std::uint64_t>(n);
    }
    return v;
}

std::string to_quantity(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    if (value == 0) return "0x0";
    std::string rev;
    while (value) {
        rev.push_back(digits[value & 0xf]);
        value >>= 4;
    }
    return "0x" + std::string(rev.rbegin(), rev.rend());
}

}  // namespace poolscope
