#include "poolscope/series.hpp"

#include <optional>
#include <sstream>

#include "poolscope/error.hpp"

namespace poolscope {

const SwapEvent& TokenSeries::swap(std::size_t t) const {
    if (t == 0 || t > swap_count()) throw NotEnoughSwaps("swap index out of range");
    return std::get<SwapEvent>(events[swap_events[t - 1]]);
}

const PoolState& TokenSeries::pool_after_swap(std::size_t n) const {
    if (n > swap_count()) throw NotEnoughSwaps("swap index out of range");
    if (n > 0) return reserves_after[swap_events[n - 1]];
    if (swap_events.empty() || swap_events.front() == 0) {
        throw NotEnoughSwaps("no pool state precedes the first swap");
    }
    return reserves_after[swap_events.front() - 1];
}

double TokenSeries::price_after_swap(std::size_t n) const {
    if (n > 0) {
        if (n > swap_count()) throw NotEnoughSwaps("swap index out of range");
        return prices[n - 1];
    }
    return marginal_price(pool_after_swap(0));
}

namespace {

struct RawReserves {
    int256 weth = 0;
    int256 token = 0;
};

bool diverges(const int256& a, const int256& b) {
    if (a == b) return false;
    const long double x = a.convert_to<long double>();
    const long double y = b.convert_to<long double>();
    const long double scale = std::max(std::abs(x), std::abs(y));
    return std::abs(x - y) / scale > 1e-6L;
}

bool same_tx(const EventKey& a, const EventKey& b) {
    return a.block == b.block && a.tx_index == b.tx_index;
}

}  // namespace

TokenSeries build_series(const PairRecord& pair, std::vector<Event> events, Label label,
                         std::string label_source) {
    TokenSeries s;
    s.pair = pair;
    s.label = label;
    s.label_source = std::move(label_source);
    s.events = std::move(events);
    s.reserves_after.reserve(s.events.size());

    const unsigned token_decimals = pair.new_token_decimals;
    RawReserves r;
    bool seen_liquidity = false;
    std::optional<std::size_t> pending_sync;

    auto to_pool = [&] {
        return PoolState{to_display(r.weth, weth_decimals), to_display(r.token, token_decimals), Fee{}};
    };
    auto apply_sync = [&](const SyncEvent& sync, std::size_t index) {
        const int256 w(sync.reserve_weth_raw);
        const int256 t(sync.reserve_token_raw);
        if (diverges(w, r.weth) || diverges(t, r.token)) {
            std::ostringstream msg;
            msg << "sync at event " << index << " diverges from reconstructed reserves (weth "
                << r.weth << " vs " << w << ", token " << r.token << " vs " << t << ")";
            s.warnings.push_back(msg.str());
        }
        r.weth = w;
        r.token = t;
    };

    for (std::size_t i = 0; i < s.events.size(); ++i) {
        const Event& ev = s.events[i];
        const EventKey& key = key_of(ev);
        if (i > 0 && !(key_of(s.events[i - 1]) < key)) {
            throw SeriesIntegrityError("events are not strictly ordered by (block, tx, log)", i);
        }
        if (key.block < pair.creation_block) {
            throw SeriesIntegrityError("event precedes the pair creation block", i);
        }

        if (const auto* sync = std::get_if<SyncEvent>(&ev)) {
            const bool defer = i + 1 < s.events.size() &&
                               !std::holds_alternative<SyncEvent>(s.events[i + 1]) &&
                               same_tx(key, key_of(s.events[i + 1]));
            if (defer) {
                pending_sync = i;
            } else {
                apply_sync(*sync, i);
            }
            s.reserves_after.push_back(to_pool());
            continue;
        }

        if (const auto* liq = std::get_if<LiquidityEvent>(&ev)) {
            if (!seen_liquidity && liq->kind != LiquidityKind::mint) {
                throw SeriesIntegrityError("first liquidity event must be a mint", i);
            }
            seen_liquidity = true;
            if (liq->kind == LiquidityKind::mint) {
                r.weth += int256(liq->weth_raw);
                r.token += int256(liq->token_raw);
            } else {
                r.weth -= int256(liq->weth_raw);
                r.token -= int256(liq->token_raw);
                if (r.weth < 0 || r.token < 0) {
                    throw SeriesIntegrityError("burn removes more than the reconstructed reserves", i);
                }
            }
        } else {
            const auto& sw = std::get<SwapEvent>(ev);
            r.weth += sw.weth_raw;
            r.token += sw.token_raw;
            if (r.weth < 0 || r.token < 0) {
                throw SeriesIntegrityError("swap drives a reserve negative", i);
            }
            if (r.weth == 0 || r.token == 0) {
                throw SeriesIntegrityError("swap leaves the pool without reserves", i);
            }
        }

        if (pending_sync) {
            apply_sync(std::get<SyncEvent>(s.events[*pending_sync]), *pending_sync);
            pending_sync.reset();
        }

        s.reserves_after.push_back(to_pool());
        if (std::holds_alternative<SwapEvent>(ev)) {
            s.swap_events.push_back(i);
            s.prices.push_back(marginal_price(s.reserves_after.back()));
        }
    }
    return s;
}

}  // namespace poolscope
