#include "poolscope/abi.hpp"

#include <algorithm>

#include "poolscope/error.hpp"
#include "poolscope/hex.hpp"

namespace poolscope {

namespace topics {
const Word pair_created = word_from_hex("0x0d3648bd0f6ba80134a33ba9275ac585d9d315f0ad8355cddefde31afa28d0e9");
const Word swap = word_from_hex("0xd78ad95fa46c994b6551d0da85fc275fe613ce37657fb8d5e3d130840159d822");
const Word mint = word_from_hex("0x4c209b5fc8ad50758f13e2e1088ba56a560dff690a1c6fef26394f4c03821c4f");
const Word burn = word_from_hex("0xdccd412f0b1252819cb1fd330b93224ca42612892bb3f4f789976e6d81936496");
const Word sync = word_from_hex("0x1c411e9a96e071241c2f21f7726b17ae89e3cab4c78be50e062b03a9fffbbad1");
}  // namespace topics

Word word_from_hex(std::string_view hex) {
    const auto raw = hex_decode(hex);
    if (raw.size() != 32) throw ConfigError("expected a 32-byte word");
    Word w;
    std::copy(raw.begin(), raw.end(), w.begin());
    return w;
}

std::string word_hex(const Word& w) { return hex_encode(w); }

nlohmann::json to_json(const RawLog& log) {
    nlohmann::json topics = nlohmann::json::array();
    for (const auto& t : log.topics) topics.push_back(word_hex(t));
    return {
        {"address", log.address.hex()},
        {"topics", topics},
        {"data", hex_encode(log.data)},
        {"blockNumber", to_quantity(log.block_number)},
        {"transactionIndex", to_quantity(log.tx_index)},
        {"logIndex", to_quantity(log.log_index)},
        {"transactionHash", log.tx_hash},
    };
}

RawLog raw_log_from_json(const nlohmann::json& j) {
    try {
        RawLog log;
        log.address = Address::from_hex(j.at("address").get<std::string>());
        for (const auto& t : j.at("topics")) log.topics.push_back(word_from_hex(t.get<std::string>()));
        log.data = hex_decode(j.at("data").get<std::string>());
        log.block_number = parse_quantity(j.at("blockNumber").get<std::string>());
        log.tx_index = static_cast<std::uint32_t>(parse_quantity(j.at("transactionIndex").get<std::string>()));
        log.log_index = static_cast<std::uint32_t>(parse_quantity(j.at("logIndex").get<std::string>()));
        if (j.contains("transactionHash") && j["transactionHash"].is_string()) {
            log.tx_hash = j["transactionHash"].get<std::string>();
        }
        return log;
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError(std::string("malformed log object: ") + e.what(), j.dump());
    } catch (const ConfigError& e) {
        throw DecodeError(std::string("malformed log field: ") + e.what(), j.dump());
    }
}

namespace {

const uint256& uint112_max() {
    static const uint256 v = (uint256(1) << 112) - 1;
    return v;
}

uint256 read_word(const std::vector<std::uint8_t>& data, std::size_t index) {
    uint256 v = 0;
    for (std::size_t i = 0; i < 32; ++i) {
        v <<= 8;
        v |= data[index * 32 + i];
    }
    return v;
}

Address address_from_word(const Word& w) {
    Address a;
    std::copy(w.begin() + 12, w.end(), a.bytes.begin());
    return a;
}

Address address_from_data(const std::vector<std::uint8_t>& data, std::size_t index) {
    Address a;
    std::copy(data.begin() + static_cast<std::ptrdiff_t>(index * 32 + 12),
              data.begin() + static_cast<std::ptrdiff_t>(index * 32 + 32), a.bytes.begin());
    return a;
}

[[noreturn]] void reject(const RawLog& log, const std::string& why) {
    throw DecodeError(why, to_json(log).dump());
}

void expect_shape(const RawLog& log, const Word& topic0, std::size_t n_topics,
                  std::size_t data_words, const char* name) {
    if (log.topics.empty() || log.topics.front() != topic0) {
        reject(log, std::string(name) + ": topic0 mismatch");
    }
    if (log.topics.size() != n_topics) {
        reject(log, std::string(name) + ": expected " + std::to_string(n_topics) + " topics");
    }
    if (log.data.size() != data_words * 32) {
        reject(log, std::string(name) + ": data must be " + std::to_string(data_words * 32) + " bytes, got " +
                        std::to_string(log.data.size()));
    }
}

uint256 bounded_amount(const RawLog& log, std::size_t index, const char* name) {
    uint256 v = read_word(log.data, index);
    if (v > uint112_max()) reject(log, std::string(name) + ": amount exceeds the uint112 reserve cap");
    return v;
}

void expect_pair(const RawLog& log, const PairRecord& pair) {
    if (log.address != pair.pair) reject(log, "log emitted by a different contract than the pair");
}

}  // namespace

std::optional<PairRecord> decode_pair_created(const RawLog& log, const Address& weth,
                                              std::int64_t creation_timestamp,
                                              std::uint8_t new_token_decimals) {
    expect_shape(log, topics::pair_created, 3, 2, "PairCreated");
    PairRecord p;
    p.token0 = address_from_word(log.topics[1]);
    p.token1 = address_from_word(log.topics[2]);
    p.pair = address_from_data(log.data, 0);
    const bool w0 = p.token0 == weth;
    const bool w1 = p.token1 == weth;
    if (w0 && w1) reject(log, "PairCreated: both tokens are WETH");
    if (!w0 && !w1) return std::nullopt;
    p.weth_is_token0 = w0;
    p.new_token_decimals = new_token_decimals;
    p.creation_block = log.block_number;
    p.creation_timestamp = creation_timestamp;
    return p;
}

SwapEvent decode_swap(const RawLog& log, const PairRecord& pair, std::int64_t timestamp) {
    expect_shape(log, topics::swap, 3, 4, "Swap");
    expect_pair(log, pair);
    const uint256 in0 = bounded_amount(log, 0, "Swap");
    const uint256 in1 = bounded_amount(log, 1, "Swap");
    const uint256 out0 = bounded_amount(log, 2, "Swap");
    const uint256 out1 = bounded_amount(log, 3, "Swap");
    if (in0 == 0 && in1 == 0 && out0 == 0 && out1 == 0) reject(log, "Swap: all amounts are zero");

    const int256 delta0 = int256(in0) - int256(out0);
    const int256 delta1 = int256(in1) - int256(out1);
    const int256& weth = pair.weth_is_token0 ? delta0 : delta1;
    const int256& token = pair.weth_is_token0 ? delta1 : delta0;
    if (!((weth > 0 && token < 0) || (weth < 0 && token > 0))) {
        reject(log, "Swap: net WETH and token deltas do not have opposite signs");
    }
    return make_swap(log.key(), timestamp, address_from_word(log.topics[2]), weth, token,
                     pair.new_token_decimals);
}

namespace {

LiquidityEvent decode_liquidity(const RawLog& log, const PairRecord& pair, std::int64_t timestamp,
                                LiquidityKind kind) {
    const bool mint = kind == LiquidityKind::mint;
    expect_shape(log, mint ? topics::mint : topics::burn, mint ? 2 : 3, 2, mint ? "Mint" : "Burn");
    expect_pair(log, pair);
    const char* name = mint ? "Mint" : "Burn";
    const uint256 a0 = bounded_amount(log, 0, name);
    const uint256 a1 = bounded_amount(log, 1, name);
    return make_liquidity(kind, log.key(), timestamp, pair.weth_is_token0 ? a0 : a1,
                          pair.weth_is_token0 ? a1 : a0, pair.new_token_decimals);
}

}  // namespace

LiquidityEvent decode_mint(const RawLog& log, const PairRecord& pair, std::int64_t timestamp) {
    return decode_liquidity(log, pair, timestamp, LiquidityKind::mint);
}

LiquidityEvent decode_burn(const RawLog& log, const PairRecord& pair, std::int64_t timestamp) {
    return decode_liquidity(log, pair, timestamp, LiquidityKind::burn);
}

SyncEvent decode_sync(const RawLog& log, const PairRecord& pair, std::int64_t timestamp) {
    expect_shape(log, topics::sync, 1, 2, "Sync");
    expect_pair(log, pair);
    const uint256 r0 = bounded_amount(log, 0, "Sync");
    const uint256 r1 = bounded_amount(log, 1, "Sync");
    return make_sync(log.key(), timestamp, pair.weth_is_token0 ? r0 : r1, pair.weth_is_token0 ? r1 : r0,
                     pair.new_token_decimals);
}

Event decode_pair_event(const RawLog& log, const PairRecord& pair, std::int64_t timestamp) {
    if (log.topics.empty()) reject(log, "log has no topics");
    const Word& t0 = log.topics.front();
    if (t0 == topics::swap) return decode_swap(log, pair, timestamp);
    if (t0 == topics::mint) return decode_mint(log, pair, timestamp);
    if (t0 == topics::burn) return decode_burn(log, pair, timestamp);
    if (t0 == topics::sync) return decode_sync(log, pair, timestamp);
    reject(log, "unrecognised topic0 " + word_hex(t0));
}

}  // namespace poolscope
