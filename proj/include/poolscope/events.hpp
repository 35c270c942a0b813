#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "poolscope/amm.hpp"

namespace poolscope {

inline constexpr unsigned weth_decimals = 18;

/// 20-byte account or contract address.
struct Address {
    std::array<std::uint8_t, 20> bytes{};

    static Address from_hex(std::string_view hex);
    std::string hex() const;  // lowercase, 0x-prefixed
    auto operator<=>(const Address&) const = default;
};

/// Strict total order of events within one pair history.
struct EventKey {
    std::uint64_t block = 0;
    std::uint32_t tx_index = 0;
    std::uint32_t log_index = 0;

    auto operator<=>(const EventKey&) const = default;
};

enum class Label { honeypot, sellable, unknown };

std::string to_string(Label label);
Label label_from_string(std::string_view s);

struct PairRecord {
    Address pair;
    Address token0;
    Address token1;
    bool weth_is_token0 = true;
    std::uint8_t new_token_decimals = 18;
    std::uint64_t creation_block = 0;
    std::int64_t creation_timestamp = 0;

    const Address& new_token() const { return weth_is_token0 ? token1 : token0; }
    friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

/// One swap, deltas seen from the pool: positive means the asset entered the
/// pool. A trader buying the new token produces weth > 0 and token < 0.
struct SwapEvent {
    EventKey key;
    std::int64_t timestamp = 0;
    Address trader;
    int256 weth_raw;   // base units (wei)
    int256 token_raw;  // base units of the new token
    double weth_delta = 0.0;   // display units
    double token_delta = 0.0;

    /// Signed amount bought by traders (positive on buys).
    double bought() const { return -token_delta; }
    friend bool operator==(const SwapEvent&, const SwapEvent&) = default;
};

enum class LiquidityKind { mint, burn };

struct LiquidityEvent {
    LiquidityKind kind = LiquidityKind::mint;
    EventKey key;
    std::int64_t timestamp = 0;
    uint256 weth_raw;
    uint256 token_raw;
    double weth_amount = 0.0;
    double token_amount = 0.0;

    friend bool operator==(const LiquidityEvent&, const LiquidityEvent&) = default;
};

/// Reserve checkpoint (the pair's Sync log), already oriented WETH/token.
struct SyncEvent {
    EventKey key;
    std::int64_t timestamp = 0;
    uint256 reserve_weth_raw;
    uint256 reserve_token_raw;
    double reserve_weth = 0.0;
    double reserve_token = 0.0;

    friend bool operator==(const SyncEvent&, const SyncEvent&) = default;
};

using Event = std::variant<SwapEvent, LiquidityEvent, SyncEvent>;

const EventKey& key_of(const Event& e);
std::int64_t timestamp_of(const Event& e);

/// Converts a base-unit integer into display units (value / 10^decimals).
double to_display(const int256& raw, unsigned decimals);
double to_display(const uint256& raw, unsigned decimals);

/// Parses a decimal string ("1.5", "-0.02365", "1.89e11") into base units,
/// exactly. Throws ConfigError when the value is not representable.
int256 parse_display(std::string_view text, unsigned decimals);

SwapEvent make_swap(EventKey key, std::int64_t timestamp, const Address& trader,
                    int256 weth_raw, int256 token_raw, unsigned token_decimals);
LiquidityEvent make_liquidity(LiquidityKind kind, EventKey key, std::int64_t timestamp,
                              uint256 weth_raw, uint256 token_raw, unsigned token_decimals);
SyncEvent make_sync(EventKey key, std::int64_t timestamp, uint256 reserve_weth_raw,
                    uint256 reserve_token_raw, unsigned token_decimals);

std::string to_string(LiquidityKind kind);

}  // namespace poolscope
