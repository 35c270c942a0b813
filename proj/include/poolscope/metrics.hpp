#pragma once

// Token- and corpus-level analytics over reconstructed pair histories.
//
// Conventions:
//  * v_t = -token_delta of swap t (positive when traders buy);
//  * NTV(n) = (v_1 + ... + v_n) * p(n) with p(n) the marginal price after swap n;
//  * corpus statistics at a swap count N only include tokens with >= N swaps,
//    and report how many tokens that was.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "poolscope/series.hpp"

namespace poolscope {

/// Throws NotEnoughSwaps when the series has fewer than n_swaps swaps.
double ntv(const TokenSeries& series, std::size_t n_swaps);

/// NTV after every swap, built with the incremental update
/// NTV(n) = NTV(n-1) + v_n p(n) + (sum_{t<n} v_t)(p(n) - p(n-1)).
std::vector<double> ntv_curve(const TokenSeries& series);

struct LabelTotals {
    double value = 0.0;
    std::size_t tokens = 0;
    double share = 0.0;
};

struct NtvTotal {
    std::size_t n_swaps = 0;
    std::map<Label, LabelTotals> by_label;  // always has all three labels
    std::size_t skipped = 0;                // tokens below the swap gate
    double total = 0.0;

    const LabelTotals& operator[](Label l) const { return by_label.at(l); }
};

/// Sums per-token NTV by label in corpus order; shares are value / total.
NtvTotal ntv_total(const Corpus& corpus, std::size_t n_swaps);

struct MaxNtv {
    double value = 0.0;
    std::size_t swap = 0;      // 1-based swap index of the maximum (earliest on ties)
    double liquidity = 0.0;    // L after that swap
    bool max_negative = false; // the lifetime maximum itself is negative
    bool any_negative = false; // NTV dipped below zero at some swap
};

/// Throws NotEnoughSwaps for a series without swaps.
MaxNtv max_ntv_with_liquidity(const TokenSeries& series);

/// ln(p(n_swaps) / p(start_swap)); p(0) is the price right before the first swap.
double lagged_log_return(const TokenSeries& series, std::size_t n_swaps, std::size_t start_swap);

struct ReturnStatPoint {
    std::size_t n_swaps = 0;
    std::size_t tokens = 0;  // tokens with >= max(n_swaps, start_swap) swaps
    double mean = 0.0;
    double stddev = 0.0;     // population standard deviation
};

std::vector<ReturnStatPoint> return_statistics(const Corpus& corpus, std::size_t start_swap,
                                               std::span<const std::size_t> n_values);

struct Histogram {
    std::vector<double> edges;          // bins are [edges[i], edges[i+1])
    std::vector<std::size_t> counts;
    std::size_t underflow = 0;
    std::size_t overflow = 0;

    std::size_t total() const;
    /// Index of the bin holding v, or nullopt if v falls outside the edges.
    std::optional<std::size_t> bin_of(double v) const;
};

Histogram make_histogram(std::span<const double> values, std::vector<double> edges);

/// 1, then integer-rounded log-spaced edges up to 10^max_decade (duplicates removed).
std::vector<double> log_spaced_edges(int max_decade = 5, int per_decade = 10);
/// n equal bins on [-half_width, half_width].
std::vector<double> symmetric_edges(double half_width, std::size_t n_bins);

struct DistributionConfig {
    std::vector<double> swap_count_edges = log_spaced_edges();
    std::vector<double> weth_edges = symmetric_edges(1.0, 100);
};

struct Distributions {
    std::map<Label, Histogram> swap_counts;   // per label
    Histogram swap_counts_all;
    std::map<Label, double> median_swaps;     // tokens of that label only
    Histogram weth_amounts;                   // per-swap weth_delta
    std::size_t buys = 0;                     // swaps with weth_delta > 0
    std::size_t sells = 0;
    std::map<std::int64_t, std::size_t> creations_per_day;   // UTC day start -> count
    std::map<std::int64_t, std::size_t> creations_per_hour;  // hour start -> count (zero hours included)
    std::map<std::size_t, std::size_t> hourly_creation_distribution;  // tokens/hour -> hours
};

Distributions lifetime_and_size_distributions(const Corpus& corpus, const DistributionConfig& cfg = {});

struct RugPull {
    std::size_t event_index = 0;
    EventKey key;
    PoolState before;
    PoolState after;
    double removed_fraction = 0.0;   // 1 - L_after / L_before
    double price_before = 0.0;
    std::optional<double> next_swap_price;
    std::optional<double> price_jump;  // next_swap_price / price_before
};

/// Burns removing at least drain_fraction of the pre-burn liquidity L.
std::vector<RugPull> rug_pull_scan(const TokenSeries& series, double drain_fraction = 0.99);

double median(std::vector<double> values);

}  // namespace poolscope
