#pragma once

// Buy-and-hold replay in swap time.
//
// The bot buys `investment` WETH worth of the new token right after swap
// `entry_swap`, then at every later swap n values its position as
// S_n = quote(token -> WETH) * r and sells at the first n where S_n beats the
// active tier's multiple of (I + 2G). No sale by the hard cutoff, or a flow
// that ends first, books the fixed loss -I - G.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "poolscope/metrics.hpp"
#include "poolscope/series.hpp"

namespace poolscope {

struct Tier {
    std::size_t upper_swap = 0;  // tier applies while n < upper_swap
    double multiplier = 1.0;
    friend bool operator==(const Tier&, const Tier&) = default;
};

enum class ImpactMode { counterfactual, injected };

struct StrategyConfig {
    std::size_t entry_swap = 60;
    double investment = 0.016;  // I, WETH
    double gas = 0.002;         // G, WETH per transaction
    std::vector<Tier> tiers{{200, 2.0}, {300, 1.5}, {400, 1.2}};
    std::size_t late_window_start = 800;  // hold between the last tier and here
    double late_multiplier = 1.0;
    std::size_t hard_cutoff = 1500;       // sells are considered while n < hard_cutoff
    ImpactMode impact_mode = ImpactMode::counterfactual;
    bool strict_amm = false;              // S_n = quote without the extra factor r
    Fee fee{};

    /// Throws ConfigError when the invariants on tiers and windows fail.
    void validate() const;
    /// Threshold multiplier active at swap n, or nullopt inside the hold window.
    std::optional<double> multiplier_at(std::size_t n) const;
    friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

enum class ExitKind { threshold, late_floor, cutoff_loss, flow_ended_loss, never_entered };

struct TradeOutcome {
    std::string token;                  // pair address
    Label label = Label::unknown;
    bool entered = false;
    std::optional<std::size_t> exit_swap;
    ExitKind exit_kind = ExitKind::never_entered;
    std::size_t tier_upper = 0;         // set for threshold exits
    double tokens_bought = 0.0;
    double revenue = 0.0;               // S_n at exit
    double profit = 0.0;

    /// "threshold_200", "late_floor", "cutoff_loss", ...
    std::string exit_reason() const;
    bool sold() const { return exit_kind == ExitKind::threshold || exit_kind == ExitKind::late_floor; }
};

TradeOutcome run_token(const TokenSeries& series, const StrategyConfig& cfg);

struct LabelAggregate {
    std::size_t tokens = 0;
    std::size_t entered = 0;
    std::size_t positive = 0;
    double invested = 0.0;
    double profit = 0.0;
    double percent_profit() const { return invested > 0.0 ? 100.0 * profit / invested : 0.0; }
    double percent_positive() const {
        return entered > 0 ? 100.0 * static_cast<double>(positive) / static_cast<double>(entered) : 0.0;
    }
};

struct AggregateReport {
    StrategyConfig config;
    std::vector<TradeOutcome> outcomes;  // corpus order
    LabelAggregate all;
    std::map<Label, LabelAggregate> by_label;
    std::map<std::string, std::size_t> exit_reasons;
    double max_profit = 0.0;
    Histogram profit_histogram;  // over [hist_lo, hist_hi)
};

struct HistogramRange {
    double lo = 0.0;
    double hi = 0.015;
    std::size_t bins = 30;
};

/// Invested capital counts I once per entered token.
AggregateReport run_corpus(const Corpus& corpus, const StrategyConfig& cfg, const HistogramRange& hist = {});

struct SweepGrid {
    std::vector<std::size_t> entry_swaps;
    std::vector<double> gas;
    std::vector<std::vector<Tier>> tier_sets;
};

struct SweepPoint {
    StrategyConfig config;
    AggregateReport report;
};

/// Cartesian product of the non-empty grid axes; empty axes keep the base value.
std::vector<SweepPoint> sensitivity_sweep(const Corpus& corpus, const StrategyConfig& base, const SweepGrid& grid,
                                          const HistogramRange& hist = {});

std::string to_string(ImpactMode m);

}  // namespace poolscope
