#include "poolscope/amm.hpp"

#include <cmath>
#include <stdexcept>

#include "poolscope/error.hpp"

namespace poolscope {

namespace {

void require_active(double reserve_in, double reserve_out) {
    if (!(reserve_in > 0.0) || !(reserve_out > 0.0)) {
        throw InactivePool("pool has a non-positive reserve");
    }
}

}  // namespace

double quote_out(double amount_in, double reserve_in, double reserve_out, double r) {
    require_active(reserve_in, reserve_out);
    if (!(r > 0.0) || r > 1.0) throw ConfigError("fee factor must lie in (0, 1]");
    if (amount_in < 0.0) throw ConfigError("negative swap input");
    if (amount_in == 0.0) return 0.0;

    const double effective_in = r * amount_in;
    double out = effective_in * reserve_out / (reserve_in + effective_in);
    // Rounding can reach reserve_out for inputs many orders above the reserve.
    if (out >= reserve_out) out = std::nextafter(reserve_out, 0.0);
    return out;
}

double quote_out(double amount_in, double reserve_in, double reserve_out, Fee fee) {
    return quote_out(amount_in, reserve_in, reserve_out, fee.factor());
}

uint256 quote_out_integer(const uint256& amount_in, const uint256& reserve_in,
                          const uint256& reserve_out, Fee fee) {
    if (reserve_in == 0 || reserve_out == 0) {
        throw InactivePool("pool has a zero reserve");
    }
    try {
        const uint256 in_with_fee = amount_in * fee.numerator;
        const uint256 numerator = in_with_fee * reserve_out;
        const uint256 denominator = reserve_in * fee.denominator + in_with_fee;
        return numerator / denominator;
    } catch (const std::overflow_error& e) {
        throw ArithmeticOverflow(std::string("getAmountOut intermediate overflow: ") + e.what());
    }
}

SwapQuote apply_swap(const PoolState& pool, Direction direction, double amount_in) {
    if (!pool.active()) throw InactivePool("apply_swap on inactive pool");

    SwapQuote q;
    q.amount_in = amount_in;
    q.price_before = marginal_price(pool);
    q.resulting_pool = pool;
    if (direction == Direction::weth_in) {
        q.amount_out = quote_out(amount_in, pool.reserve_weth, pool.reserve_token, pool.fee);
        q.resulting_pool.reserve_weth += amount_in;
        q.resulting_pool.reserve_token -= q.amount_out;
    } else {
        q.amount_out = quote_out(amount_in, pool.reserve_token, pool.reserve_weth, pool.fee);
        q.resulting_pool.reserve_token += amount_in;
        q.resulting_pool.reserve_weth -= q.amount_out;
    }
    q.price_after = marginal_price(q.resulting_pool);
    return q;
}

IntegerSwapQuote apply_swap(const IntegerPoolState& pool, Direction direction,
                            const uint256& amount_in) {
    if (!pool.active()) throw InactivePool("apply_swap on inactive pool");

    IntegerSwapQuote q{amount_in, 0, pool};
    try {
        if (direction == Direction::weth_in) {
            q.amount_out = quote_out_integer(amount_in, pool.reserve_weth, pool.reserve_token, pool.fee);
            q.resulting_pool.reserve_weth += amount_in;
            q.resulting_pool.reserve_token -= q.amount_out;
        } else {
            q.amount_out = quote_out_integer(amount_in, pool.reserve_token, pool.reserve_weth, pool.fee);
            q.resulting_pool.reserve_token += amount_in;
            q.resulting_pool.reserve_weth -= q.amount_out;
        }
    } catch (const std::overflow_error& e) {
        throw ArithmeticOverflow(std::string("reserve update overflow: ") + e.what());
    }
    return q;
}

double marginal_price(const PoolState& pool) {
    if (!pool.active()) throw InactivePool("marginal_price of inactive pool");
    return pool.reserve_weth / pool.reserve_token;
}

double liquidity(const PoolState& pool) {
    if (!pool.active()) throw InactivePool("liquidity of inactive pool");
    const double k = pool.reserve_weth * pool.reserve_token;
    if (std::isfinite(k)) return std::sqrt(k);
    return std::sqrt(pool.reserve_weth) * std::sqrt(pool.reserve_token);
}

std::string to_string(Direction d) {
    return d == Direction::weth_in ? "weth_in" : "token_in";
}

}  // namespace poolscope
