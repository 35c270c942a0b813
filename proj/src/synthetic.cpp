#include "poolscope/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "poolscope/amm.hpp"

namespace poolscope {

namespace {

// Portable draws on top of mt19937_64 (the std distributions are
// implementation-defined, which would break the committed corpus).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    std::uint64_t bits() { return gen_(); }
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
    bool chance(double p) { return unit() < p; }
    double normal() {
        const double u1 = 1.0 - unit();
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
    double lognormal(double median, double sigma) { return median * std::exp(sigma * normal()); }
    Address address() {
        Address a;
        for (auto& b : a.bytes) b = static_cast<std::uint8_t>(gen_() & 0xff);
        return a;
    }

private:
    std::mt19937_64 gen_;
};

uint256 pow10(unsigned d) {
    uint256 v = 1;
    for (unsigned i = 0; i < d; ++i) v *= 10;
    return v;
}

// WETH amount in wei at gwei resolution.
uint256 wei(double weth) { return uint256(static_cast<std::uint64_t>(std::llround(weth * 1e9))) * pow10(9); }

enum class Flow { buy_heavy, two_sided };

struct TokenPlan {
    Label label = Label::unknown;
    Flow flow = Flow::two_sided;
    std::size_t swaps = 0;
    double p_buy = 0.5;
    bool rug_pull = false;
    std::size_t sandwiches = 0;
};

class PairBuilder {
public:
    PairBuilder(const PairRecord& pair, std::uint64_t first_block, std::int64_t first_ts)
        : pair_(pair), dec_(pair.new_token_decimals), first_block_(first_block), first_ts_(first_ts),
          block_(pair.creation_block) {}

    void next_block(std::uint64_t gap) {
        block_ += std::max<std::uint64_t>(gap, 1);
        tx_ = 0;
        log_ = 0;
    }
    std::uint64_t block() const { return block_; }
    const IntegerPoolState& pool() const { return pool_; }

    void mint(const uint256& w, const uint256& t) {
        begin_tx();
        pool_.reserve_weth += w;
        pool_.reserve_token += t;
        sync();
        events_.push_back(make_liquidity(LiquidityKind::mint, key(), ts(), w, t, dec_));
    }

    void burn(const uint256& w, const uint256& t) {
        begin_tx();
        pool_.reserve_weth -= w;
        pool_.reserve_token -= t;
        sync();
        events_.push_back(make_liquidity(LiquidityKind::burn, key(), ts(), w, t, dec_));
    }

    // Returns the token amount received.
    uint256 buy(const Address& trader, const uint256& weth_in) {
        begin_tx();
        const auto q = apply_swap(pool_, Direction::weth_in, weth_in);
        pool_ = q.resulting_pool;
        sync();
        events_.push_back(make_swap(key(), ts(), trader, int256(weth_in), -int256(q.amount_out), dec_));
        return q.amount_out;
    }

    uint256 sell(const Address& trader, const uint256& token_in) {
        begin_tx();
        const auto q = apply_swap(pool_, Direction::token_in, token_in);
        pool_ = q.resulting_pool;
        sync();
        events_.push_back(make_swap(key(), ts(), trader, -int256(q.amount_out), int256(token_in), dec_));
        return q.amount_out;
    }

    std::uint32_t last_log_index() const { return log_ - 1; }
    std::vector<Event> take() { return std::move(events_); }

private:
    void begin_tx() { ++tx_; }
    EventKey key() { return EventKey{block_, tx_, log_++}; }
    std::int64_t ts() const { return first_ts_ + static_cast<std::int64_t>(block_ - first_block_) * 12; }
    void sync() {
        events_.push_back(make_sync(key(), ts(), pool_.reserve_weth, pool_.reserve_token, dec_));
    }

    PairRecord pair_;
    unsigned dec_;
    std::uint64_t first_block_;
    std::int64_t first_ts_;
    std::uint64_t block_;
    std::uint32_t tx_ = 0;
    std::uint32_t log_ = 0;
    IntegerPoolState pool_{0, 0, Fee{}};
    std::vector<Event> events_;
};

std::vector<TokenPlan> plan_tokens(Rng& rng, std::size_t n) {
    std::vector<TokenPlan> plans(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = plans[i];
        // Roughly 56% honeypot, 36% sellable, 8% unknown.
        const std::size_t slot = i % 25;
        p.label = slot < 14 ? Label::honeypot : slot < 23 ? Label::sellable : Label::unknown;
        if (p.label == Label::honeypot) {
            p.flow = Flow::buy_heavy;
            p.p_buy = 0.9 + 0.08 * rng.unit();
            p.rug_pull = rng.chance(0.5);
        } else {
            p.flow = Flow::two_sided;
            p.p_buy = 0.42 + 0.16 * rng.unit();
            p.rug_pull = rng.chance(0.15);
        }
        p.swaps = static_cast<std::size_t>(std::clamp(rng.lognormal(220.0, 0.9), 12.0, 1450.0));
        p.sandwiches = rng.chance(0.3) ? 1 + rng.below(3) : 0;
    }
    // A few long-lived pools reach the strategy's hard cutoff.
    plans[0].swaps = 1620;
    plans[15].swaps = 1580;
    plans[21].swaps = 1710;
    plans[1].swaps = 35;  // below the entry swap
    // Fisher-Yates so labels and sizes are not tied to the index pattern.
    for (std::size_t i = n; i > 1; --i) std::swap(plans[i - 1], plans[rng.below(i)]);
    return plans;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticOptions& options) {
    Rng rng(options.seed);
    SyntheticCorpus out;
    const Address weth = Address::from_hex(mainnet_weth);
    const Address attacker = rng.address();
    auto plans = plan_tokens(rng, options.tokens);

    // Creations spread over three days.
    std::vector<std::uint64_t> creation(options.tokens);
    for (auto& c : creation) c = options.first_block + rng.below(3 * 7200);
    std::sort(creation.begin(), creation.end());

    std::uint64_t last_block = options.first_block;
    for (std::size_t i = 0; i < options.tokens; ++i) {
        const TokenPlan& plan = plans[i];
        PairRecord pair;
        pair.pair = rng.address();
        const Address token = rng.address();
        pair.weth_is_token0 = weth < token;
        pair.token0 = pair.weth_is_token0 ? weth : token;
        pair.token1 = pair.weth_is_token0 ? token : weth;
        pair.new_token_decimals = rng.chance(0.2) ? 9 : 18;
        pair.creation_block = creation[i];
        pair.creation_timestamp =
            options.first_timestamp + static_cast<std::int64_t>(creation[i] - options.first_block) * 12;

        const uint256 unit_token = pow10(pair.new_token_decimals);
        PairBuilder b(pair, options.first_block, options.first_timestamp);
        b.mint(wei(std::clamp(rng.lognormal(2.0, 0.5), 0.3, 12.0)),
               unit_token * static_cast<std::uint64_t>(rng.lognormal(5e8, 0.6)));

        std::set<std::size_t> sandwich_at;
        while (sandwich_at.size() < plan.sandwiches && plan.swaps > 10) sandwich_at.insert(5 + rng.below(plan.swaps - 8));

        std::size_t done = 0;
        bool last_buy = true;
        bool first = true;
        while (done < plan.swaps) {
            if (sandwich_at.count(done) && done + 3 <= plan.swaps) {
                b.next_block(1 + rng.below(4));
                PlantedSandwich ps;
                ps.pair = pair.pair.hex();
                ps.block = b.block();
                const uint256 bought = b.buy(attacker, wei(std::clamp(rng.lognormal(1.0, 0.6), 0.1, 8.0)));
                ps.front_log_index = b.last_log_index();
                b.buy(rng.address(), wei(std::clamp(rng.lognormal(0.08, 0.5), 0.005, 2.0)));
                ps.victim_log_index = b.last_log_index();
                b.sell(attacker, bought);
                ps.back_log_index = b.last_log_index();
                out.sandwiches.push_back(ps);
                done += 3;
                first = true;  // the next swap opens a fresh block
                continue;
            }

            // Same-block bursts keep one direction so they never look like a sandwich.
            const bool same_block = !first && rng.chance(0.15);
            if (!same_block) b.next_block(first ? 1 + rng.below(3) : 1 + static_cast<std::uint64_t>(rng.lognormal(4.0, 1.0)));
            const bool is_buy = same_block ? last_buy : rng.chance(plan.p_buy);
            const double size = std::clamp(rng.lognormal(0.05, 1.0), 0.001, 5.0);
            if (is_buy) {
                b.buy(rng.address(), wei(size));
            } else {
                const auto& pool = b.pool();
                uint256 tokens_in = wei(size) * pool.reserve_token / pool.reserve_weth;
                if (tokens_in == 0) tokens_in = 1;
                b.sell(rng.address(), tokens_in);
            }
            last_buy = is_buy;
            first = false;
            ++done;

            if (plan.flow == Flow::two_sided && rng.chance(0.004)) {
                b.next_block(1);
                const auto& pool = b.pool();
                const uint256 w = wei(std::clamp(rng.lognormal(0.5, 0.5), 0.05, 3.0));
                b.mint(w, w * pool.reserve_token / pool.reserve_weth);
            }
        }

        if (plan.rug_pull) {
            b.next_block(1 + rng.below(20));
            const auto pool = b.pool();
            b.burn(pool.reserve_weth - pool.reserve_weth / 1'000'000, pool.reserve_token - pool.reserve_token / 1'000'000);
            out.rug_pulls.push_back(pair.pair.hex());
            const std::size_t trailing = rng.below(3);
            for (std::size_t t = 0; t < trailing; ++t) {
                b.next_block(1 + rng.below(10));
                b.buy(rng.address(), wei(0.01));
            }
        }

        last_block = std::max(last_block, b.block());
        out.corpus.tokens.push_back(build_series(pair, b.take(), plan.label, "synthetic"));
    }
    out.meta.from_block = options.first_block;
    out.meta.to_block = last_block;
    return out;
}

}  // namespace poolscope
