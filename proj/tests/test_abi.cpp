#include <doctest.h>

#include <nlohmann/json.hpp>

#include "poolscope/abi.hpp"
#include "poolscope/error.hpp"
#include "poolscope/hex.hpp"
#include "support/oracles.hpp"

using namespace poolscope;
using nlohmann::json;

namespace {

const json& golden() {
    static const json j = json::parse(oracle::slurp(oracle::data_dir() / "golden_logs.json"));
    return j;
}

PairRecord context_pair(const json& c) {
    PairRecord p;
    p.pair = Address::from_hex(c.at("pair").get<std::string>());
    p.token0 = Address::from_hex(c.at("token0").get<std::string>());
    p.token1 = Address::from_hex(c.at("token1").get<std::string>());
    p.weth_is_token0 = c.at("weth_is_token0");
    p.new_token_decimals = c.at("token_decimals").get<std::uint8_t>();
    p.creation_block = c.at("creation_block");
    p.creation_timestamp = c.at("creation_timestamp");
    return p;
}

void check_key(const EventKey& k, const json& e) {
    CHECK(k.block == e.at("block").get<std::uint64_t>());
    CHECK(k.tx_index == e.at("tx_index").get<std::uint32_t>());
    CHECK(k.log_index == e.at("log_index").get<std::uint32_t>());
}

}  // namespace

TEST_SUITE("abi") {

TEST_CASE("event topics are the keccak hashes of the signatures") {
    const auto& t = golden().at("topics");
    CHECK(word_hex(topics::pair_created) == t.at("pair_created").get<std::string>());
    CHECK(word_hex(topics::swap) == t.at("swap").get<std::string>());
    CHECK(word_hex(topics::mint) == t.at("mint").get<std::string>());
    CHECK(word_hex(topics::burn) == t.at("burn").get<std::string>());
    CHECK(word_hex(topics::sync) == t.at("sync").get<std::string>());
}

TEST_CASE("hex helpers") {
    CHECK(hex_encode(hex_decode("0x00ff10")) == "0x00ff10");
    CHECK(hex_decode("AB").at(0) == 0xab);
    CHECK_THROWS_AS(hex_decode("0xabc"), ConfigError);
    CHECK_THROWS_AS(hex_decode("0xzz"), ConfigError);
    CHECK(parse_quantity("0x1a") == 26);
    CHECK(to_quantity(0) == "0x0");
    CHECK(to_quantity(255) == "0xff");
    CHECK(Address::from_hex("0xC02AAA39B223FE8D0A0E5C4F27EAD9083C756CC2").hex() ==
          "0xc02aaa39b223fe8d0a0e5c4f27ead9083c756cc2");
}

TEST_CASE("raw log JSON round trip") {
    for (const auto& c : golden().at("cases")) {
        const auto log = raw_log_from_json(c.at("log"));
        CHECK(raw_log_from_json(to_json(log)) == log);
    }
}

TEST_CASE("golden logs decode to the expected typed events") {
    const Address weth = Address::from_hex("0xc02aaa39b223fe8d0a0e5c4f27ead9083c756cc2");
    for (const auto& c : golden().at("cases")) {
        const std::string name = c.at("name");
        CAPTURE(name);
        const auto log = raw_log_from_json(c.at("log"));
        const auto& e = c.at("expected");
        const std::string kind = e.at("kind");
        const std::int64_t ts = c.at("timestamp");

        if (kind == "pair" || kind == "none") {
            const auto p = decode_pair_created(log, weth, ts);
            if (kind == "none") {
                CHECK_FALSE(p.has_value());
                continue;
            }
            REQUIRE(p.has_value());
            CHECK(p->pair.hex() == e.at("pair").get<std::string>());
            CHECK(p->token0.hex() == e.at("token0").get<std::string>());
            CHECK(p->token1.hex() == e.at("token1").get<std::string>());
            CHECK(p->weth_is_token0 == e.at("weth_is_token0").get<bool>());
            CHECK(p->creation_block == e.at("creation_block").get<std::uint64_t>());
            CHECK(p->creation_timestamp == ts);
            continue;
        }

        const auto pair = context_pair(c.at("context"));
        if (kind == "error") {
            CHECK_THROWS_AS(decode_pair_event(log, pair, ts), DecodeError);
            continue;
        }
        const auto ev = decode_pair_event(log, pair, ts);
        if (kind == "swap") {
            const auto& s = std::get<SwapEvent>(ev);
            check_key(s.key, e);
            CHECK(s.timestamp == e.at("timestamp").get<std::int64_t>());
            CHECK(s.weth_raw.str() == e.at("weth").get<std::string>());
            CHECK(s.token_raw.str() == e.at("token").get<std::string>());
            CHECK(s.trader.hex() == e.at("trader").get<std::string>());
            CHECK(s.weth_delta == doctest::Approx(to_display(s.weth_raw, 18)));
        } else if (kind == "mint" || kind == "burn") {
            const auto& l = std::get<LiquidityEvent>(ev);
            check_key(l.key, e);
            CHECK(l.kind == (kind == "mint" ? LiquidityKind::mint : LiquidityKind::burn));
            CHECK(l.weth_raw.str() == e.at("weth").get<std::string>());
            CHECK(l.token_raw.str() == e.at("token").get<std::string>());
        } else if (kind == "sync") {
            const auto& s = std::get<SyncEvent>(ev);
            check_key(s.key, e);
            CHECK(s.reserve_weth_raw.str() == e.at("reserve_weth").get<std::string>());
            CHECK(s.reserve_token_raw.str() == e.at("reserve_token").get<std::string>());
        } else {
            FAIL("unknown golden kind " << kind);
        }
    }
}

TEST_CASE("orientation flip yields identical WETH-oriented events") {
    std::map<std::string, std::vector<std::string>> by_stem;
    const auto& cases = golden().at("cases");
    for (const auto& c : cases) {
        const std::string name = c.at("name");
        if (!c.contains("context")) continue;
        for (const std::string suffix : {"_weth_token0", "_weth_token1"}) {
            if (name.size() > suffix.size() && name.ends_with(suffix)) {
                const auto pair = context_pair(c.at("context"));
                const auto ev = decode_pair_event(raw_log_from_json(c.at("log")), pair, c.at("timestamp"));
                std::string fingerprint = std::visit(
                    [](const auto& x) {
                        using T = std::decay_t<decltype(x)>;
                        if constexpr (std::is_same_v<T, SwapEvent>) return x.weth_raw.str() + "/" + x.token_raw.str();
                        else if constexpr (std::is_same_v<T, LiquidityEvent>) return x.weth_raw.str() + "/" + x.token_raw.str();
                        else return x.reserve_weth_raw.str() + "/" + x.reserve_token_raw.str();
                    },
                    ev);
                by_stem[name.substr(0, name.size() - suffix.size())].push_back(fingerprint);
            }
        }
    }
    REQUIRE(by_stem.size() == 5);
    for (const auto& [stem, prints] : by_stem) {
        CAPTURE(stem);
        REQUIRE(prints.size() == 2);
        CHECK(prints[0] == prints[1]);
    }
}

TEST_CASE("a pair of two WETH tokens is malformed") {
    const Address weth = Address::from_hex("0xc02aaa39b223fe8d0a0e5c4f27ead9083c756cc2");
    auto log = raw_log_from_json(golden().at("cases").at(0).at("log"));
    log.topics[2] = log.topics[1];
    CHECK_THROWS_AS(decode_pair_created(log, weth, 0), DecodeError);
}

TEST_CASE("a burn log matching the rug-pull fixture burn") {
    auto pad = [](const uint256& v) {
        std::string h = v.str(0, std::ios_base::hex);
        return std::string(64 - h.size(), '0') + h;
    };
    const auto pair = oracle::make_pair(0xee);
    json j = {{"address", pair.pair.hex()},
              {"topics", {word_hex(topics::burn), "0x" + std::string(24, '0') + std::string(40, '1'), "0x" + std::string(24, '0') + std::string(40, '2')}},
              {"data", "0x" + pad(oracle::uraw("0.89905")) + pad(oracle::uraw("1.89e11"))},
              {"blockNumber", "0x3e9"},
              {"transactionIndex", "0x0"},
              {"logIndex", "0x4"},
              {"transactionHash", "0x" + std::string(64, '0')}};
    const auto burn = decode_burn(raw_log_from_json(j), pair, 1730494451);
    CHECK(burn.kind == LiquidityKind::burn);
    CHECK(burn.weth_amount == doctest::Approx(0.89905).epsilon(1e-12));
    CHECK(burn.token_amount == doctest::Approx(1.89e11).epsilon(1e-12));
    CHECK(burn.key == EventKey{1001, 0, 4});
}

}
