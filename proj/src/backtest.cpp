#include "poolscope/backtest.hpp"

#include "poolscope/amm.hpp"
#include "poolscope/error.hpp"
#include "poolscope/parallel.hpp"

namespace poolscope {

void StrategyConfig::validate() const {
    if (tiers.empty()) throw ConfigError("strategy needs at least one threshold tier");
    for (std::size_t i = 1; i < tiers.size(); ++i) {
        if (tiers[i].upper_swap <= tiers[i - 1].upper_swap) {
            throw ConfigError("tier upper swaps must be strictly increasing");
        }
        if (tiers[i].multiplier >= tiers[i - 1].multiplier) {
            throw ConfigError("tier multipliers must be strictly decreasing");
        }
    }
    if (!(entry_swap < tiers.front().upper_swap && tiers.front().upper_swap < hard_cutoff)) {
        throw ConfigError("need entry_swap < first tier upper swap < hard_cutoff");
    }
    if (late_window_start < tiers.back().upper_swap) {
        throw ConfigError("late window cannot start inside the tiers");
    }
    if (!(investment > 0.0)) throw ConfigError("investment must be positive");
    if (!(gas >= 0.0)) throw ConfigError("gas must be non-negative");
    if (!fee.valid()) throw ConfigError("invalid fee");
}

std::optional<double> StrategyConfig::multiplier_at(std::size_t n) const {
    for (const auto& t : tiers) {
        if (n < t.upper_swap) return t.multiplier;
    }
    if (n >= late_window_start) return late_multiplier;
    return std::nullopt;
}

std::string TradeOutcome::exit_reason() const {
    switch (exit_kind) {
        case ExitKind::threshold: return "threshold_" + std::to_string(tier_upper);
        case ExitKind::late_floor: return "late_floor";
        case ExitKind::cutoff_loss: return "cutoff_loss";
        case ExitKind::flow_ended_loss: return "flow_ended_loss";
        case ExitKind::never_entered: return "never_entered";
    }
    return "never_entered";
}

std::string to_string(ImpactMode m) { return m == ImpactMode::counterfactual ? "counterfactual" : "injected"; }

namespace {

std::size_t tier_upper_at(const StrategyConfig& cfg, std::size_t n) {
    for (const auto& t : cfg.tiers) {
        if (n < t.upper_swap) return t.upper_swap;
    }
    return 0;
}

}  // namespace

TradeOutcome run_token(const TokenSeries& series, const StrategyConfig& cfg) {
    cfg.validate();
    TradeOutcome out;
    out.token = series.pair.pair.hex();
    out.label = series.label;

    const std::size_t swaps = series.swap_count();
    if (swaps <= cfg.entry_swap) return out;

    const PoolState& entry = series.pool_after_swap(cfg.entry_swap);
    out.entered = true;
    out.tokens_bought = quote_out(cfg.investment, entry.reserve_weth, entry.reserve_token, cfg.fee);

    // Injected mode shifts every later recorded state by the bot's own buy.
    const bool injected = cfg.impact_mode == ImpactMode::injected;
    const double weth_shift = injected ? cfg.investment : 0.0;
    const double token_shift = injected ? -out.tokens_bought : 0.0;
    const double r = cfg.fee.factor();
    const double cost = cfg.investment + 2.0 * cfg.gas;

    const std::size_t last = std::min(swaps, cfg.hard_cutoff - 1);
    for (std::size_t n = cfg.entry_swap + 1; n <= last; ++n) {
        const auto multiplier = cfg.multiplier_at(n);
        if (!multiplier) continue;
        const PoolState& pool = series.pool_after_swap(n);
        const double x = pool.reserve_weth + weth_shift;
        const double y = pool.reserve_token + token_shift;
        if (!(x > 0.0) || !(y > 0.0)) continue;

        const double weth_out = quote_out(out.tokens_bought, y, x, cfg.fee);
        const double revenue = cfg.strict_amm ? weth_out : weth_out * r;
        if (revenue > *multiplier * cost) {
            out.exit_swap = n;
            out.revenue = revenue;
            out.profit = revenue - cfg.investment - 2.0 * cfg.gas;
            out.tier_upper = tier_upper_at(cfg, n);
            out.exit_kind = out.tier_upper ? ExitKind::threshold : ExitKind::late_floor;
            return out;
        }
    }

    out.profit = -cfg.investment - cfg.gas;
    out.exit_kind = swaps >= cfg.hard_cutoff ? ExitKind::cutoff_loss : ExitKind::flow_ended_loss;
    return out;
}

AggregateReport run_corpus(const Corpus& corpus, const StrategyConfig& cfg, const HistogramRange& hist) {
    cfg.validate();
    AggregateReport rep;
    rep.config = cfg;
    rep.outcomes.resize(corpus.tokens.size());
    parallel_for(corpus.tokens.size(), [&](std::size_t i) { rep.outcomes[i] = run_token(corpus.tokens[i], cfg); });

    for (Label l : {Label::honeypot, Label::sellable, Label::unknown}) rep.by_label[l] = {};
    std::vector<double> profits;
    bool first_entered = true;
    for (const auto& o : rep.outcomes) {
        for (LabelAggregate* agg : {&rep.all, &rep.by_label[o.label]}) {
            ++agg->tokens;
            if (!o.entered) continue;
            ++agg->entered;
            agg->invested += cfg.investment;
            agg->profit += o.profit;
            if (o.profit > 0.0) ++agg->positive;
        }
        ++rep.exit_reasons[o.exit_reason()];
        if (o.entered) {
            profits.push_back(o.profit);
            if (first_entered || o.profit > rep.max_profit) rep.max_profit = o.profit;
            first_entered = false;
        }
    }
    if (!(hist.hi > hist.lo) || hist.bins == 0) throw ConfigError("invalid profit histogram range");
    std::vector<double> edges(hist.bins + 1);
    for (std::size_t i = 0; i <= hist.bins; ++i) {
        edges[i] = hist.lo + (hist.hi - hist.lo) * static_cast<double>(i) / static_cast<double>(hist.bins);
    }
    rep.profit_histogram = make_histogram(profits, std::move(edges));
    return rep;
}

std::vector<SweepPoint> sensitivity_sweep(const Corpus& corpus, const StrategyConfig& base, const SweepGrid& grid,
                                          const HistogramRange& hist) {
    const std::vector<std::size_t> entries = grid.entry_swaps.empty() ? std::vector{base.entry_swap} : grid.entry_swaps;
    const std::vector<double> gases = grid.gas.empty() ? std::vector{base.gas} : grid.gas;
    const std::vector<std::vector<Tier>> tiers =
        grid.tier_sets.empty() ? std::vector<std::vector<Tier>>{base.tiers} : grid.tier_sets;

    std::vector<SweepPoint> out;
    for (auto e : entries) {
        for (auto g : gases) {
            for (const auto& t : tiers) {
                StrategyConfig cfg = base;
                cfg.entry_swap = e;
                cfg.gas = g;
                cfg.tiers = t;
                out.push_back({cfg, run_corpus(corpus, cfg, hist)});
            }
        }
    }
    return out;
}

}  // namespace poolscope
