#include "poolscope/events.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "poolscope/error.hpp"
#include "poolscope/hex.hpp"

namespace poolscope {

Address Address::from_hex(std::string_view hex) {
    const auto raw = hex_decode(hex);
    if (raw.size() != 20) {
        throw ConfigError("address must be 20 bytes: " + std::string(hex));
    }
    Address a;
    std::copy(raw.begin(), raw.end(), a.bytes.begin());
    return a;
}

std::string Address::hex() const { return hex_encode(bytes); }

std::string to_string(Label label) {
    switch (label) {
        case Label::honeypot: return "honeypot";
        case Label::sellable: return "sellable";
        case Label::unknown: return "unknown";
    }
    return "unknown";
}

Label label_from_string(std::string_view s) {
    if (s == "honeypot") return Label::honeypot;
    if (s == "sellable") return Label::sellable;
    if (s == "unknown" || s.empty()) return Label::unknown;
    throw ConfigError("unknown label: " + std::string(s));
}

std::string to_string(LiquidityKind kind) { return kind == LiquidityKind::mint ? "mint" : "burn"; }

const EventKey& key_of(const Event& e) {
    return std::visit([](const auto& ev) -> const EventKey& { return ev.key; }, e);
}

std::int64_t timestamp_of(const Event& e) {
    return std::visit([](const auto& ev) { return ev.timestamp; }, e);
}

namespace {

long double pow10l_exact(unsigned decimals) {
    long double p = 1.0L;
    for (unsigned i = 0; i < decimals; ++i) p *= 10.0L;
    return p;
}

}  // namespace

double to_display(const int256& raw, unsigned decimals) {
    return static_cast<double>(raw.convert_to<long double>() / pow10l_exact(decimals));
}

double to_display(const uint256& raw, unsigned decimals) {
    return static_cast<double>(raw.convert_to<long double>() / pow10l_exact(decimals));
}

int256 parse_display(std::string_view text, unsigned decimals) {
    const std::string original(text);
    auto fail = [&](const char* why) -> int256 {
        throw ConfigError("cannot parse amount '" + original + "': " + why);
    };
    if (text.empty()) return fail("empty");

    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    std::string digits;
    int exponent = 0;
    bool seen_dot = false;
    bool any_digit = false;
    std::size_t i = 0;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_dot) --exponent;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!any_digit) return fail("no digits");
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') return fail("unexpected character");
        const std::string exp_text(text.substr(i + 1));
        std::size_t used = 0;
        int e = 0;
        try {
            e = std::stoi(exp_text, &used);
        } catch (const std::exception&) {
            return fail("bad exponent");
        }
        if (used != exp_text.size()) return fail("bad exponent");
        exponent += e;
    }
    exponent += static_cast<int>(decimals);

    // Drop trailing zeros that a negative exponent would otherwise require us to divide out.
    while (exponent < 0 && !digits.empty() && digits.back() == '0') {
        digits.pop_back();
        ++exponent;
    }
    if (exponent < 0) return fail("more fractional digits than the token supports");
    if (exponent > 80) return fail("exponent out of range");

    try {
        int256 value = 0;
        for (char c : digits) value = value * 10 + (c - '0');
        for (int k = 0; k < exponent; ++k) value *= 10;
        return negative ? int256(-value) : value;
    } catch (const std::overflow_error&) {
        return fail("overflows 256 bits");
    }
}

SwapEvent make_swap(EventKey key, std::int64_t timestamp, const Address& trader,
                    int256 weth_raw, int256 token_raw, unsigned token_decimals) {
    SwapEvent s;
    s.key = key;
    s.timestamp = timestamp;
    s.trader = trader;
    s.weth_raw = std::move(weth_raw);
    s.token_raw = std::move(token_raw);
    s.weth_delta = to_display(s.weth_raw, weth_decimals);
    s.token_delta = to_display(s.token_raw, token_decimals);
    return s;
}

LiquidityEvent make_liquidity(LiquidityKind kind, EventKey key, std::int64_t timestamp,
                              uint256 weth_raw, uint256 token_raw, unsigned token_decimals) {
    LiquidityEvent l;
    l.kind = kind;
    l.key = key;
    l.timestamp = timestamp;
    l.weth_raw = std::move(weth_raw);
    l.token_raw = std::move(token_raw);
    l.weth_amount = to_display(l.weth_raw, weth_decimals);
    l.token_amount = to_display(l.token_raw, token_decimals);
    return l;
}

SyncEvent make_sync(EventKey key, std::int64_t timestamp, uint256 reserve_weth_raw,
                    uint256 reserve_token_raw, unsigned token_decimals) {
    SyncEvent s;
    s.key = key;
    s.timestamp = timestamp;
    s.reserve_weth_raw = std::move(reserve_weth_raw);
    s.reserve_token_raw = std::move(reserve_token_raw);
    s.reserve_weth = to_display(s.reserve_weth_raw, weth_decimals);
    s.reserve_token = to_display(s.reserve_token_raw, token_decimals);
    return s;
}

}  // namespace poolscope
