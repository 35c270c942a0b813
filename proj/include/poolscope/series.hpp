#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "poolscope/amm.hpp"
#include "poolscope/events.hpp"

namespace poolscope {

/// Full ordered history of one pair with reconstructed reserves.
///
/// Swap numbering is 1-based in the accessors: swap n is the n-th swap of the
/// pair, and "after swap 0" means the pool right before the first swap.
struct TokenSeries {
    PairRecord pair;
    Label label = Label::unknown;
    std::string label_source;

    std::vector<Event> events;
    std::vector<PoolState> reserves_after;  // one per event, display units
    std::vector<std::size_t> swap_events;   // event index of each swap, in order
    std::vector<double> prices;             // marginal price after each swap
    std::vector<std::string> warnings;      // data-quality notes (Sync divergence)

    std::size_t swap_count() const { return swap_events.size(); }

    /// t in [1, swap_count].
    const SwapEvent& swap(std::size_t t) const;
    /// n in [0, swap_count]; n = 0 gives the pool right before the first swap.
    const PoolState& pool_after_swap(std::size_t n) const;
    double price_after_swap(std::size_t n) const;

    friend bool operator==(const TokenSeries&, const TokenSeries&) = default;
};

/// Replays events in order: mint adds, burn subtracts, swap applies both
/// deltas, all in exact base units. A Sync checkpoint overrides the running
/// reserves; divergence above 1e-6 relative is recorded in `warnings`.
///
/// Uniswap V2 emits Sync right before the Mint/Burn/Swap of the same
/// transaction, so a Sync followed by another event of the same transaction is
/// checked against the reserves after that event.
TokenSeries build_series(const PairRecord& pair, std::vector<Event> events,
                         Label label = Label::unknown, std::string label_source = {});

struct Corpus {
    std::vector<TokenSeries> tokens;
};

}  // namespace poolscope
