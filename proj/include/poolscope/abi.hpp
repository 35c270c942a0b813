#pragma once

// Uniswap V2 log decoding. Only the factory's PairCreated and the pair's
// Swap/Mint/Burn/Sync events are understood.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "poolscope/events.hpp"

namespace poolscope {

using Word = std::array<std::uint8_t, 32>;

/// One eth_getLogs entry.
struct RawLog {
    Address address;
    std::vector<Word> topics;
    std::vector<std::uint8_t> data;
    std::uint64_t block_number = 0;
    std::uint32_t tx_index = 0;
    std::uint32_t log_index = 0;
    std::string tx_hash;

    EventKey key() const { return {block_number, tx_index, log_index}; }
    friend bool operator==(const RawLog&, const RawLog&) = default;
};

namespace topics {
// keccak-256 of the canonical event signatures.
extern const Word pair_created;  // PairCreated(address,address,address,uint256)
extern const Word swap;          // Swap(address,uint256,uint256,uint256,uint256,address)
extern const Word mint;          // Mint(address,uint256,uint256)
extern const Word burn;          // Burn(address,uint256,uint256,address)
extern const Word sync;          // Sync(uint112,uint112)
}  // namespace topics

Word word_from_hex(std::string_view hex);
std::string word_hex(const Word& w);

nlohmann::json to_json(const RawLog& log);
RawLog raw_log_from_json(const nlohmann::json& j);

/// Returns nullopt when neither token is WETH (the pair is out of scope).
/// Throws DecodeError on malformed logs and when both tokens are WETH.
std::optional<PairRecord> decode_pair_created(const RawLog& log, const Address& weth,
                                              std::int64_t creation_timestamp,
                                              std::uint8_t new_token_decimals = 18);

SwapEvent decode_swap(const RawLog& log, const PairRecord& pair, std::int64_t timestamp);
LiquidityEvent decode_mint(const RawLog& log, const PairRecord& pair, std::int64_t timestamp);
LiquidityEvent decode_burn(const RawLog& log, const PairRecord& pair, std::int64_t timestamp);
SyncEvent decode_sync(const RawLog& log, const PairRecord& pair, std::int64_t timestamp);

/// Dispatches on topic0 to one of the pair decoders above.
Event decode_pair_event(const RawLog& log, const PairRecord& pair, std::int64_t timestamp);

}  // namespace poolscope
