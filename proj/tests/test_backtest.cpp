#include <doctest.h>

#include <random>

#include "poolscope/backtest.hpp"
#include "poolscope/error.hpp"
#include "poolscope/synthetic.hpp"
#include "support/oracles.hpp"

using namespace poolscope;

namespace {

// Buys of the given WETH sizes through an integer pool seeded with 1 WETH / 1000 tokens.
TokenSeries buys(const std::vector<double>& sizes) {
    const auto pair = oracle::make_pair(0x60);
    IntegerPoolState pool{oracle::uraw("1"), oracle::uraw("1000"), Fee{}};
    std::vector<Event> ev{make_liquidity(LiquidityKind::mint, {1001, 0, 0}, 0, pool.reserve_weth, pool.reserve_token, 18)};
    std::uint64_t block = 1002;
    for (double w : sizes) {
        const uint256 in = uint256(static_cast<std::uint64_t>(w * 1e9)) * uint256(1'000'000'000);
        const auto q = apply_swap(pool, Direction::weth_in, in);
        pool = q.resulting_pool;
        ev.push_back(make_swap({block++, 0, 0}, 0, oracle::address_of(1), int256(in), -int256(q.amount_out), 18));
    }
    return build_series(pair, std::move(ev));
}

const SyntheticCorpus& synthetic() {
    static const SyntheticCorpus s = generate_synthetic_corpus();
    return s;
}

}  // namespace

TEST_SUITE("backtest") {

TEST_CASE("strategy config validation") {
    StrategyConfig c;
    CHECK_NOTHROW(c.validate());
    auto bad = [&](auto mutate) {
        StrategyConfig x;
        mutate(x);
        CHECK_THROWS_AS(x.validate(), ConfigError);
    };
    bad([](StrategyConfig& x) { x.tiers.clear(); });
    bad([](StrategyConfig& x) { x.tiers = {{300, 2.0}, {200, 1.5}}; });
    bad([](StrategyConfig& x) { x.tiers = {{200, 1.5}, {300, 2.0}}; });
    bad([](StrategyConfig& x) { x.entry_swap = 250; });
    bad([](StrategyConfig& x) { x.late_window_start = 350; });
    bad([](StrategyConfig& x) { x.hard_cutoff = 150; });
    bad([](StrategyConfig& x) { x.investment = 0.0; });
    bad([](StrategyConfig& x) { x.gas = -1e-3; });
    bad([](StrategyConfig& x) { x.fee = Fee{0, 1000}; });
}

TEST_CASE("threshold schedule") {
    const StrategyConfig c;
    CHECK(c.multiplier_at(61) == 2.0);
    CHECK(c.multiplier_at(199) == 2.0);
    CHECK(c.multiplier_at(200) == 1.5);
    CHECK(c.multiplier_at(399) == 1.2);
    CHECK_FALSE(c.multiplier_at(400).has_value());
    CHECK_FALSE(c.multiplier_at(799).has_value());
    CHECK(c.multiplier_at(800) == 1.0);
    CHECK(c.multiplier_at(5000) == 1.0);
}

TEST_CASE("too few swaps never enters") {
    const auto s = buys(std::vector<double>(60, 0.01));
    const auto o = run_token(s, StrategyConfig{});
    CHECK_FALSE(o.entered);
    CHECK(o.exit_reason() == "never_entered");
    CHECK(o.profit == 0.0);
}

TEST_CASE("first crossing of a tier sells and books revenue minus costs") {
    StrategyConfig c;
    c.entry_swap = 2;
    c.tiers = {{6, 2.0}};
    c.late_window_start = 6;
    c.hard_cutoff = 20;
    // Price doubles well past 2x at swap 5.
    const auto s = buys({0.001, 0.001, 0.001, 0.001, 1.0, 0.001, 0.001});
    const auto o = run_token(s, c);
    REQUIRE(o.exit_swap.has_value());
    CHECK(*o.exit_swap == 5);
    CHECK(o.exit_reason() == "threshold_6");
    const auto& e = s.pool_after_swap(2);
    const double bought = quote_out(c.investment, e.reserve_weth, e.reserve_token);
    CHECK(o.tokens_bought == doctest::Approx(bought).epsilon(1e-15));
    const auto& p = s.pool_after_swap(5);
    const double revenue = quote_out(bought, p.reserve_token, p.reserve_weth) * 0.997;
    CHECK(o.revenue == doctest::Approx(revenue).epsilon(1e-15));
    CHECK(o.profit == doctest::Approx(revenue - 0.016 - 0.004).epsilon(1e-15));
}

TEST_CASE("the hard cutoff is exclusive") {
    StrategyConfig c;
    c.entry_swap = 2;
    c.tiers = {{4, 100.0}};
    c.late_window_start = 4;
    c.late_multiplier = 1.0;
    std::vector<double> sizes(12, 0.001);
    sizes[9] = 5.0;  // swap 10 is the only crossing
    const auto s = buys(sizes);
    c.hard_cutoff = 10;
    auto o = run_token(s, c);
    CHECK(o.exit_reason() == "cutoff_loss");
    CHECK(o.profit == -c.investment - c.gas);
    c.hard_cutoff = 11;
    o = run_token(s, c);
    CHECK(o.exit_reason() == "late_floor");
    CHECK(o.exit_swap == std::optional<std::size_t>(10));
}

TEST_CASE("injected impact shifts the reserves by the bot's buy") {
    StrategyConfig c;
    c.entry_swap = 2;
    c.tiers = {{6, 2.0}};
    c.late_window_start = 6;
    c.hard_cutoff = 20;
    c.impact_mode = ImpactMode::injected;
    const auto s = buys({0.001, 0.001, 0.001, 0.001, 1.0, 0.001});
    const auto o = run_token(s, c);
    REQUIRE(o.exit_swap == std::optional<std::size_t>(5));
    const auto& p = s.pool_after_swap(5);
    const double revenue = quote_out(o.tokens_bought, p.reserve_token - o.tokens_bought, p.reserve_weth + c.investment) * 0.997;
    CHECK(o.revenue == doctest::Approx(revenue).epsilon(1e-15));
}

TEST_CASE("exits match the exhaustive scan on the synthetic corpus") {
    std::vector<StrategyConfig> configs(3);
    configs[1].strict_amm = true;
    configs[2].entry_swap = 20;
    configs[2].gas = 0.0005;
    configs[2].tiers = {{100, 3.0}, {250, 1.1}};
    configs[2].late_window_start = 400;
    configs[2].late_multiplier = 0.8;
    for (const auto& c : configs) {
        for (const auto& t : synthetic().corpus.tokens) {
            const auto got = run_token(t, c);
            const auto want = oracle::exhaustive_strategy(t, c);
            CHECK(got.exit_swap == want.exit_swap);
            if (got.entered) CHECK(got.profit == doctest::Approx(want.profit).epsilon(1e-12));
        }
    }
}

TEST_CASE("unsold tokens lose exactly investment plus one gas") {
    const StrategyConfig c;
    std::size_t losers = 0;
    for (const auto& t : synthetic().corpus.tokens) {
        const auto o = run_token(t, c);
        if (!o.entered || o.sold()) continue;
        ++losers;
        CHECK(o.profit == -c.investment - c.gas);
        CHECK(std::fabs(o.profit + 0.018) <= 1e-15);
    }
    CHECK(losers > 0);
}

TEST_CASE("profit is linear in gas") {
    const StrategyConfig base;
    for (const auto& t : synthetic().corpus.tokens) {
        const auto a = run_token(t, base);
        if (!a.entered) continue;
        StrategyConfig c = base;
        c.gas = base.gas + 1e-4;
        const auto b = run_token(t, c);
        if (a.exit_swap != b.exit_swap) continue;  // a higher bar can move the exit
        const double slope = (b.profit - a.profit) / 1e-4;
        CHECK(slope == doctest::Approx(a.sold() ? -2.0 : -1.0).epsilon(1e-9));
    }
}

TEST_CASE("corpus aggregation") {
    const StrategyConfig c;
    const auto rep = run_corpus(synthetic().corpus, c);
    REQUIRE(rep.outcomes.size() == synthetic().corpus.tokens.size());
    double profit = 0.0;
    std::size_t entered = 0, positive = 0;
    double best = -1e300;
    for (const auto& o : rep.outcomes) {
        if (!o.entered) continue;
        ++entered;
        profit += o.profit;
        positive += o.profit > 0.0;
        best = std::max(best, o.profit);
    }
    CHECK(rep.all.entered == entered);
    CHECK(rep.all.positive == positive);
    CHECK(rep.all.invested == doctest::Approx(entered * c.investment));
    CHECK(rep.all.profit == doctest::Approx(profit).epsilon(1e-12));
    CHECK(rep.max_profit == best);
    std::size_t reasons = 0;
    for (const auto& [k, v] : rep.exit_reasons) reasons += v;
    CHECK(reasons == rep.outcomes.size());
    CHECK(rep.profit_histogram.total() == entered);
    std::size_t by_label = 0;
    for (const auto& [l, a] : rep.by_label) by_label += a.tokens;
    CHECK(by_label == rep.outcomes.size());
}

TEST_CASE("sensitivity sweep covers the grid") {
    SweepGrid g;
    g.entry_swaps = {30, 60};
    g.gas = {0.001, 0.002, 0.004};
    const auto pts = sensitivity_sweep(synthetic().corpus, StrategyConfig{}, g);
    REQUIRE(pts.size() == 6);
    CHECK(pts[0].config.entry_swap == 30);
    CHECK(pts[5].config.gas == 0.004);
    CHECK(pts[5].config.tiers == StrategyConfig{}.tiers);
    for (const auto& p : pts) CHECK(p.report.config == p.config);
}

}
