#include "poolscope/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "poolscope/error.hpp"
#include "poolscope/parallel.hpp"

namespace poolscope {

double ntv(const TokenSeries& series, std::size_t n_swaps) {
    if (n_swaps == 0) throw ConfigError("NTV needs at least one swap");
    if (series.swap_count() < n_swaps) {
        throw NotEnoughSwaps("series has " + std::to_string(series.swap_count()) + " swaps, need " +
                             std::to_string(n_swaps));
    }
    double flow = 0.0;
    for (std::size_t t = 1; t <= n_swaps; ++t) flow += series.swap(t).bought();
    return flow * series.price_after_swap(n_swaps);
}

std::vector<double> ntv_curve(const TokenSeries& series) {
    std::vector<double> out;
    out.reserve(series.swap_count());
    double flow = 0.0;  // sum_{t<n} v_t
    double value = 0.0;
    double prev_price = 0.0;
    for (std::size_t n = 1; n <= series.swap_count(); ++n) {
        const double v = series.swap(n).bought();
        const double p = series.price_after_swap(n);
        value += v * p + flow * (p - prev_price);
        flow += v;
        prev_price = p;
        out.push_back(value);
    }
    return out;
}

NtvTotal ntv_total(const Corpus& corpus, std::size_t n_swaps) {
    NtvTotal result;
    result.n_swaps = n_swaps;
    for (Label l : {Label::honeypot, Label::sellable, Label::unknown}) result.by_label[l] = {};

    std::vector<std::optional<double>> per_token(corpus.tokens.size());
    parallel_for(corpus.tokens.size(), [&](std::size_t i) {
        if (corpus.tokens[i].swap_count() >= n_swaps) per_token[i] = ntv(corpus.tokens[i], n_swaps);
    });

    for (std::size_t i = 0; i < per_token.size(); ++i) {
        if (!per_token[i]) {
            ++result.skipped;
            continue;
        }
        auto& slot = result.by_label[corpus.tokens[i].label];
        slot.value += *per_token[i];
        ++slot.tokens;
    }
    for (const auto& [label, slot] : result.by_label) result.total += slot.value;
    if (result.total != 0.0) {
        for (auto& [label, slot] : result.by_label) slot.share = slot.value / result.total;
    }
    return result;
}

MaxNtv max_ntv_with_liquidity(const TokenSeries& series) {
    if (series.swap_count() == 0) throw NotEnoughSwaps("series has no swaps");
    const auto curve = ntv_curve(series);
    MaxNtv m;
    m.value = curve.front();
    m.swap = 1;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve[i] > m.value) {
            m.value = curve[i];
            m.swap = i + 1;
        }
        if (curve[i] < 0.0) m.any_negative = true;
    }
    m.max_negative = m.value < 0.0;
    m.liquidity = liquidity(series.pool_after_swap(m.swap));
    return m;
}

double lagged_log_return(const TokenSeries& series, std::size_t n_swaps, std::size_t start_swap) {
    const std::size_t needed = std::max(n_swaps, start_swap);
    if (series.swap_count() < needed || series.swap_count() == 0) {
        throw NotEnoughSwaps("series has " + std::to_string(series.swap_count()) + " swaps, need " +
                             std::to_string(needed));
    }
    const double p_end = series.price_after_swap(n_swaps);
    const double p_start = series.price_after_swap(start_swap);
    if (!(p_end > 0.0) || !(p_start > 0.0)) throw NonPositivePrice("log return of a non-positive price");
    return std::log(p_end / p_start);
}

std::vector<ReturnStatPoint> return_statistics(const Corpus& corpus, std::size_t start_swap,
                                               std::span<const std::size_t> n_values) {
    std::vector<ReturnStatPoint> out;
    out.reserve(n_values.size());
    for (std::size_t n : n_values) {
        const std::size_t gate = std::max<std::size_t>({n, start_swap, 1});
        std::vector<std::optional<double>> r(corpus.tokens.size());
        parallel_for(corpus.tokens.size(), [&](std::size_t i) {
            if (corpus.tokens[i].swap_count() >= gate) r[i] = lagged_log_return(corpus.tokens[i], n, start_swap);
        });
        ReturnStatPoint p;
        p.n_swaps = n;
        double sum = 0.0;
        for (const auto& v : r) {
            if (v) {
                sum += *v;
                ++p.tokens;
            }
        }
        if (p.tokens > 0) {
            p.mean = sum / static_cast<double>(p.tokens);
            double ss = 0.0;
            for (const auto& v : r) {
                if (v) ss += (*v - p.mean) * (*v - p.mean);
            }
            p.stddev = std::sqrt(ss / static_cast<double>(p.tokens));
        }
        out.push_back(p);
    }
    return out;
}

std::size_t Histogram::total() const {
    std::size_t t = underflow + overflow;
    for (auto c : counts) t += c;
    return t;
}

std::optional<std::size_t> Histogram::bin_of(double v) const {
    if (edges.size() < 2 || v < edges.front() || !(v < edges.back())) return std::nullopt;
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return static_cast<std::size_t>(it - edges.begin()) - 1;
}

Histogram make_histogram(std::span<const double> values, std::vector<double> edges) {
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw ConfigError("histogram edges must be strictly increasing with at least two entries");
    }
    Histogram h;
    h.edges = std::move(edges);
    h.counts.assign(h.edges.size() - 1, 0);
    for (double v : values) {
        if (auto b = h.bin_of(v)) {
            ++h.counts[*b];
        } else if (v < h.edges.front()) {
            ++h.underflow;
        } else {
            ++h.overflow;
        }
    }
    return h;
}

std::vector<double> log_spaced_edges(int max_decade, int per_decade) {
    std::vector<double> edges;
    for (int i = 0; i <= max_decade * per_decade; ++i) {
        const double e = std::round(std::pow(10.0, static_cast<double>(i) / per_decade));
        if (edges.empty() || e > edges.back()) edges.push_back(e);
    }
    return edges;
}

std::vector<double> symmetric_edges(double half_width, std::size_t n_bins) {
    if (!(half_width > 0.0) || n_bins == 0) throw ConfigError("symmetric_edges needs a positive width and bin count");
    std::vector<double> edges(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i) {
        edges[i] = -half_width + 2.0 * half_width * static_cast<double>(i) / static_cast<double>(n_bins);
    }
    return edges;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

Distributions lifetime_and_size_distributions(const Corpus& corpus, const DistributionConfig& cfg) {
    Distributions d;
    std::map<Label, std::vector<double>> counts;
    std::vector<double> all_counts;
    std::vector<double> amounts;
    for (Label l : {Label::honeypot, Label::sellable, Label::unknown}) counts[l];

    for (const auto& s : corpus.tokens) {
        const double n = static_cast<double>(s.swap_count());
        counts[s.label].push_back(n);
        all_counts.push_back(n);
        for (std::size_t t = 1; t <= s.swap_count(); ++t) {
            const double w = s.swap(t).weth_delta;
            amounts.push_back(w);
            if (w > 0.0) {
                ++d.buys;
            } else {
                ++d.sells;
            }
        }
        const std::int64_t ts = s.pair.creation_timestamp;
        ++d.creations_per_day[ts - ((ts % 86400) + 86400) % 86400];
        ++d.creations_per_hour[ts - ((ts % 3600) + 3600) % 3600];
    }
    for (auto& [label, values] : counts) {
        d.swap_counts[label] = make_histogram(values, cfg.swap_count_edges);
        d.median_swaps[label] = median(values);
    }
    d.swap_counts_all = make_histogram(all_counts, cfg.swap_count_edges);
    d.weth_amounts = make_histogram(amounts, cfg.weth_edges);

    if (!d.creations_per_hour.empty()) {
        const std::int64_t first = d.creations_per_hour.begin()->first;
        const std::int64_t last = d.creations_per_hour.rbegin()->first;
        for (std::int64_t h = first; h <= last; h += 3600) d.creations_per_hour.try_emplace(h, 0);
        for (const auto& [hour, n] : d.creations_per_hour) ++d.hourly_creation_distribution[n];
    }
    return d;
}

std::vector<RugPull> rug_pull_scan(const TokenSeries& series, double drain_fraction) {
    if (!(drain_fraction > 0.0) || drain_fraction > 1.0) throw ConfigError("drain_fraction must lie in (0, 1]");
    std::vector<RugPull> out;
    for (std::size_t i = 1; i < series.events.size(); ++i) {
        const auto* liq = std::get_if<LiquidityEvent>(&series.events[i]);
        if (!liq || liq->kind != LiquidityKind::burn) continue;
        const PoolState& before = series.reserves_after[i - 1];
        if (!before.active()) continue;
        const PoolState& after = series.reserves_after[i];
        const double l_before = liquidity(before);
        const double l_after = after.active() ? liquidity(after) : 0.0;
        const double removed = 1.0 - l_after / l_before;
        if (removed < drain_fraction) continue;

        RugPull rp;
        rp.event_index = i;
        rp.key = liq->key;
        rp.before = before;
        rp.after = after;
        rp.removed_fraction = removed;
        rp.price_before = marginal_price(before);
        const auto next = std::upper_bound(series.swap_events.begin(), series.swap_events.end(), i);
        if (next != series.swap_events.end()) {
            rp.next_swap_price = series.prices[static_cast<std::size_t>(next - series.swap_events.begin())];
            rp.price_jump = *rp.next_swap_price / rp.price_before;
        }
        out.push_back(rp);
    }
    return out;
}

}  // namespace poolscope
