#pragma once

// Constant-product (x * y = k) pool arithmetic.
//
// Two arithmetic modes live side by side and are never mixed: PoolState works
// in real-valued display units, IntegerPoolState in exact base units with
// Uniswap V2 getAmountOut rounding.

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace poolscope {

using uint256 = boost::multiprecision::checked_uint256_t;
using int256 = boost::multiprecision::checked_int256_t;

/// Rational fee factor r = numerator / denominator (the share of the input
/// that reaches the curve). Uniswap V2 charges 0.3%, i.e. r = 997/1000.
struct Fee {
    std::uint32_t numerator = 997;
    std::uint32_t denominator = 1000;

    double factor() const { return static_cast<double>(numerator) / denominator; }
    double fraction() const { return 1.0 - factor(); }
    bool valid() const { return denominator > 0 && numerator > 0 && numerator <= denominator; }

    static constexpr Fee none() { return Fee{1, 1}; }
    friend bool operator==(const Fee&, const Fee&) = default;
};

enum class Direction { weth_in, token_in };

struct PoolState {
    double reserve_weth = 0.0;
    double reserve_token = 0.0;
    Fee fee{};

    bool active() const { return reserve_weth > 0.0 && reserve_token > 0.0; }
    friend bool operator==(const PoolState&, const PoolState&) = default;
};

struct SwapQuote {
    double amount_in = 0.0;
    double amount_out = 0.0;
    double price_before = 0.0;  // WETH per token
    double price_after = 0.0;
    PoolState resulting_pool;
};

struct IntegerPoolState {
    uint256 reserve_weth;
    uint256 reserve_token;
    Fee fee{};

    bool active() const { return reserve_weth > 0 && reserve_token > 0; }
    friend bool operator==(const IntegerPoolState&, const IntegerPoolState&) = default;
};

struct IntegerSwapQuote {
    uint256 amount_in;
    uint256 amount_out;
    IntegerPoolState resulting_pool;
};

/// r * amount_in * reserve_out / (reserve_in + r * amount_in). The result is
/// always strictly below reserve_out.
double quote_out(double amount_in, double reserve_in, double reserve_out, double r);
double quote_out(double amount_in, double reserve_in, double reserve_out, Fee fee = {});

/// Bit-exact getAmountOut:
/// floor(amount_in * num * reserve_out / (reserve_in * den + amount_in * num)).
/// Throws ArithmeticOverflow if an intermediate exceeds 256 bits.
uint256 quote_out_integer(const uint256& amount_in, const uint256& reserve_in,
                          const uint256& reserve_out, Fee fee = {});

SwapQuote apply_swap(const PoolState& pool, Direction direction, double amount_in);
IntegerSwapQuote apply_swap(const IntegerPoolState& pool, Direction direction,
                            const uint256& amount_in);

/// reserve_weth / reserve_token.
double marginal_price(const PoolState& pool);

/// sqrt(reserve_weth * reserve_token), i.e. L in x * y = L^2.
double liquidity(const PoolState& pool);

std::string to_string(Direction d);

}  // namespace poolscope
