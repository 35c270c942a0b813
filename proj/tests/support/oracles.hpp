#pragma once

// Independent reference implementations and data builders for the tests.
// Nothing here calls into the code under test except to build inputs.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "poolscope/backtest.hpp"
#include "poolscope/clustering.hpp"
#include "poolscope/events.hpp"
#include "poolscope/series.hpp"

namespace oracle {

inline std::filesystem::path source_dir() { return POOLSCOPE_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return source_dir() / "tests" / "data"; }
inline std::filesystem::path cli_path() { return POOLSCOPE_CLI_PATH; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("poolscope_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------- integers

struct GmpQuote {
    mpz_class out;
    bool overflow = false;  // some intermediate needs more than 256 bits
};

inline GmpQuote gmp_amount_out(const mpz_class& in, const mpz_class& r_in, const mpz_class& r_out,
                               unsigned num = 997, unsigned den = 1000) {
    const mpz_class limit = (mpz_class(1) << 256) - 1;
    const mpz_class in_fee = in * num;
    const mpz_class numerator = in_fee * r_out;
    const mpz_class r_in_scaled = r_in * den;
    const mpz_class denominator = r_in_scaled + in_fee;
    GmpQuote q;
    q.overflow = in_fee > limit || numerator > limit || r_in_scaled > limit || denominator > limit;
    if (denominator != 0) q.out = numerator / denominator;
    return q;
}

inline mpz_class to_mpz(const poolscope::uint256& v) { return mpz_class(v.str(), 10); }
inline poolscope::uint256 from_mpz(const mpz_class& v) { return poolscope::uint256(v.get_str(10)); }

// Uniform in [0, 2^bits).
inline mpz_class random_bits(std::mt19937_64& rng, unsigned bits) {
    mpz_class v = 0;
    for (unsigned done = 0; done < bits; done += 64) {
        const unsigned take = std::min(64u, bits - done);
        std::uint64_t chunk = rng();
        if (take < 64) chunk &= (std::uint64_t{1} << take) - 1;
        v = (v << take) + mpz_class(std::to_string(chunk), 10);
    }
    return v;
}

// -------------------------------------------------------------------- DTW

// Minimum over every monotone warping path, enumerated explicitly.
inline double brute_dtw(const std::vector<double>& a, const std::vector<double>& b) {
    double best = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
        acc += (a[i] - b[j]) * (a[i] - b[j]);
        if (i + 1 == a.size() && j + 1 == b.size()) {
            best = std::min(best, acc);
            return;
        }
        if (i + 1 < a.size()) walk(i + 1, j, acc);
        if (j + 1 < b.size()) walk(i, j + 1, acc);
        if (i + 1 < a.size() && j + 1 < b.size()) walk(i + 1, j + 1, acc);
    };
    walk(0, 0, 0.0);
    return best;
}

// --------------------------------------------------------------- sandwich

struct Match {
    std::uint64_t block;
    std::uint32_t front;
    std::uint32_t back;
};

// Scans every ordered pair of swaps in a block in lexicographic order and
// accepts a pair when neither side is taken yet.
inline std::vector<Match> exhaustive_sandwiches(const poolscope::TokenSeries& s, double tol) {
    std::vector<Match> out;
    std::map<std::uint64_t, std::vector<const poolscope::SwapEvent*>> blocks;
    for (std::size_t t = 1; t <= s.swap_count(); ++t) blocks[s.swap(t).key.block].push_back(&s.swap(t));
    for (const auto& [block, swaps] : blocks) {
        std::vector<std::pair<std::size_t, std::size_t>> candidates;
        for (std::size_t i = 0; i < swaps.size(); ++i) {
            for (std::size_t j = i + 1; j < swaps.size(); ++j) {
                const double a = swaps[i]->token_delta;
                const double b = swaps[j]->token_delta;
                if (!((a < 0 && b > 0) || (a > 0 && b < 0))) continue;
                const double hi = std::max(std::fabs(a), std::fabs(b));
                if (std::fabs(std::fabs(a) - std::fabs(b)) / hi <= tol) candidates.emplace_back(i, j);
            }
        }
        std::vector<bool> used(swaps.size(), false);
        for (const auto& [i, j] : candidates) {
            if (used[i] || used[j]) continue;
            used[i] = used[j] = true;
            out.push_back({block, swaps[i]->key.log_index, swaps[j]->key.log_index});
        }
    }
    return out;
}

// --------------------------------------------------------------- strategy

struct ScanResult {
    std::optional<std::size_t> exit_swap;
    double profit = 0.0;
};

// Evaluates the sell condition at every swap and takes the smallest hit.
// Counterfactual impact only.
inline ScanResult exhaustive_strategy(const poolscope::TokenSeries& s, const poolscope::StrategyConfig& c) {
    ScanResult res;
    const std::size_t n_swaps = s.swap_count();
    if (n_swaps <= c.entry_swap) return res;
    const double r = static_cast<double>(c.fee.numerator) / c.fee.denominator;
    const auto& e = s.pool_after_swap(c.entry_swap);
    const double bought = r * c.investment * e.reserve_token / (e.reserve_weth + r * c.investment);
    const double cost = c.investment + 2 * c.gas;

    std::vector<std::size_t> hits;
    for (std::size_t n = 1; n <= n_swaps; ++n) {
        if (n <= c.entry_swap || n >= c.hard_cutoff) continue;
        double mult = std::numeric_limits<double>::quiet_NaN();
        std::size_t lo = 0;
        for (const auto& t : c.tiers) {
            if (n >= lo && n < t.upper_swap) {
                mult = t.multiplier;
                break;
            }
            lo = t.upper_swap;
        }
        if (std::isnan(mult) && n >= c.late_window_start) mult = c.late_multiplier;
        if (std::isnan(mult)) continue;
        const auto& p = s.pool_after_swap(n);
        double value = r * bought * p.reserve_weth / (p.reserve_token + r * bought);
        if (!c.strict_amm) value *= r;
        if (value > mult * cost) hits.push_back(n);
    }
    if (hits.empty()) {
        res.profit = -c.investment - c.gas;
        return res;
    }
    res.exit_swap = *std::min_element(hits.begin(), hits.end());
    const auto& p = s.pool_after_swap(*res.exit_swap);
    double value = r * bought * p.reserve_weth / (p.reserve_token + r * bought);
    if (!c.strict_amm) value *= r;
    res.profit = value - c.investment - 2 * c.gas;
    return res;
}

// ------------------------------------------------------------ time bases

// Last swap price per timestamp, grouped with a map.
inline std::vector<std::pair<std::int64_t, double>> groupby_last(const poolscope::TokenSeries& s) {
    std::map<std::int64_t, double> last;
    for (std::size_t t = 1; t <= s.swap_count(); ++t) last[s.swap(t).timestamp] = s.price_after_swap(t);
    return {last.begin(), last.end()};
}

// ------------------------------------------------------------ fixtures

inline poolscope::Address address_of(std::uint8_t fill) {
    poolscope::Address a;
    a.bytes.fill(fill);
    return a;
}

inline poolscope::PairRecord make_pair(std::uint8_t fill, unsigned decimals = 18, bool weth_is_token0 = true) {
    poolscope::PairRecord p;
    p.pair = address_of(fill);
    const auto weth = poolscope::Address::from_hex("0xc02aaa39b223fe8d0a0e5c4f27ead9083c756cc2");
    const auto token = address_of(static_cast<std::uint8_t>(fill + 1));
    p.weth_is_token0 = weth_is_token0;
    p.token0 = weth_is_token0 ? weth : token;
    p.token1 = weth_is_token0 ? token : weth;
    p.new_token_decimals = static_cast<std::uint8_t>(decimals);
    p.creation_block = 1000;
    p.creation_timestamp = 1'730'490'000;
    return p;
}

inline poolscope::int256 raw(const std::string& display, unsigned decimals = 18) {
    return poolscope::parse_display(display, decimals);
}
inline poolscope::uint256 uraw(const std::string& display, unsigned decimals = 18) {
    return poolscope::uint256(poolscope::parse_display(display, decimals));
}

// The rug pull on a fresh 18-decimal pool: three buys and a sell bring the
// reserves to (0.89905 WETH, 1.89e11 tokens) plus a residue of 1 wei and
// 1.311e-4 tokens; the owner burns the round part and one last buy of
// 0.04965 WETH for 1.46e-5 tokens follows. No Sync logs.
inline poolscope::TokenSeries rug_pull_series() {
    using namespace poolscope;
    const auto pair = make_pair(0xee);
    const Address trader = address_of(0x42);
    std::vector<Event> ev;
    std::uint64_t block = 1001;
    std::int64_t ts = pair.creation_timestamp;
    auto key = [&] { return EventKey{block++, 0, 0}; };
    auto tick = [&] { return ts += 12; };
    ev.push_back(make_liquidity(LiquidityKind::mint, key(), tick(), uraw("0.622700000000000001"),
                                uraw("199140000000.000131100"), 18));
    for (int i = 0; i < 3; ++i) ev.push_back(make_swap(key(), tick(), trader, raw("0.1"), raw("-5e9"), 18));
    ev.push_back(make_swap(key(), tick(), trader, raw("-0.02365"), raw("4.86e9"), 18));
    ev.push_back(make_liquidity(LiquidityKind::burn, key(), tick(), uraw("0.89905"), uraw("1.89e11"), 18));
    ev.push_back(make_swap(key(), tick(), trader, raw("0.04965"), raw("-0.0000146"), 18));
    return build_series(pair, std::move(ev), Label::honeypot, "test");
}

// A token driven by random swaps through the integer pool, Sync-free.
inline poolscope::TokenSeries random_series(std::mt19937_64& rng, std::uint8_t fill, std::size_t swaps,
                                            double p_buy = 0.6, unsigned per_block = 3) {
    using namespace poolscope;
    const auto pair = make_pair(fill);
    IntegerPoolState pool{uraw("2"), uraw("1e9"), Fee{}};
    std::vector<Event> ev;
    std::uint64_t block = pair.creation_block + 1;
    std::uint32_t log = 0;
    auto ts = [&] { return pair.creation_timestamp + static_cast<std::int64_t>(block - pair.creation_block) * 12; };
    ev.push_back(make_liquidity(LiquidityKind::mint, {block, 0, log++}, ts(), pool.reserve_weth, pool.reserve_token, 18));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < swaps; ++i) {
        if (u(rng) < 1.0 / per_block) {
            ++block;
            log = 0;
        }
        const bool buy = u(rng) < p_buy;
        const double size = std::exp(std::log(0.001) + u(rng) * std::log(300.0));
        const uint256 w(static_cast<std::uint64_t>(size * 1e9) + 1);
        const uint256 weth_in = w * uint256(1'000'000'000);
        if (buy) {
            const auto q = apply_swap(pool, Direction::weth_in, weth_in);
            pool = q.resulting_pool;
            ev.push_back(make_swap({block, 0, log++}, ts(), address_of(0x51), int256(weth_in), -int256(q.amount_out), 18));
        } else {
            const uint256 tokens_in = weth_in * pool.reserve_token / pool.reserve_weth + 1;
            const auto q = apply_swap(pool, Direction::token_in, tokens_in);
            pool = q.resulting_pool;
            ev.push_back(make_swap({block, 0, log++}, ts(), address_of(0x52), -int256(q.amount_out), int256(tokens_in), 18));
        }
    }
    return build_series(pair, std::move(ev), Label::unknown, "test");
}

// -------------------------------------------------------------- clusters

// Two trajectory families in swap time: a pump that keeps rising and a pump
// that collapses halfway. Members get small noise; family of item i is i % 2.
inline std::vector<poolscope::NormalizedSeries> two_families_swap(std::mt19937_64& rng, std::size_t n, std::size_t len) {
    std::normal_distribution<double> noise(0.0, 0.02);
    std::vector<poolscope::NormalizedSeries> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(len);
        for (std::size_t t = 0; t < len; ++t) {
            const double u = static_cast<double>(t) / static_cast<double>(len - 1);
            v[t] = (i % 2 == 0 ? u : (u < 0.5 ? 2 * u : 2 * (1 - u))) + noise(rng);
        }
        auto s = poolscope::minmax_normalize(v, poolscope::TimeBasis::swap);
        s.token = "s" + std::to_string(i);
        out.push_back(std::move(s));
    }
    return out;
}

// Two families with uneven lengths and warped timing: a step up at a random
// point versus a spike that decays back to the start level.
inline std::vector<poolscope::NormalizedSeries> two_families_physical(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<std::size_t> len_d(12, 30);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<poolscope::NormalizedSeries> out;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t len = len_d(rng);
        const std::size_t at = 2 + static_cast<std::size_t>(u(rng) * static_cast<double>(len / 3));
        std::vector<double> v(len);
        for (std::size_t t = 0; t < len; ++t) {
            if (i % 2 == 0) {
                v[t] = t < at ? 0.0 : 1.0;
            } else {
                v[t] = t < at ? 0.0 : std::exp(-0.8 * static_cast<double>(t - at));
            }
            v[t] += 0.01 * u(rng);
        }
        auto s = poolscope::minmax_normalize(v, poolscope::TimeBasis::physical);
        s.time_offsets.resize(len);
        for (std::size_t t = 0; t < len; ++t) s.time_offsets[t] = 12.0 * static_cast<double>(t);
        s.token = "p" + std::to_string(i);
        out.push_back(std::move(s));
    }
    return out;
}

// Gaussian blobs of a fixed dimension (values are not restricted to [0, 1]).
inline std::vector<poolscope::NormalizedSeries> random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_int_distribution<int> centre(0, 3);
    std::vector<poolscope::NormalizedSeries> out(n);
    for (auto& s : out) {
        const double c = 3.0 * centre(rng);
        s.values.resize(dim);
        for (auto& v : s.values) v = c + nd(rng);
        s.original_length = dim;
    }
    return out;
}

// Permutation-invariant check: same partition up to relabelling.
inline bool same_partition(const std::vector<std::size_t>& got, const std::vector<std::size_t>& want) {
    if (got.size() != want.size()) return false;
    std::map<std::size_t, std::size_t> fwd, back;
    for (std::size_t i = 0; i < got.size(); ++i) {
        auto [f, fnew] = fwd.emplace(got[i], want[i]);
        auto [b, bnew] = back.emplace(want[i], got[i]);
        if (f->second != want[i] || b->second != got[i]) return false;
    }
    return true;
}

}  // namespace oracle
