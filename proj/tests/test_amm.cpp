#include <doctest.h>

#include <random>

#include "poolscope/amm.hpp"
#include "poolscope/error.hpp"
#include "support/oracles.hpp"

using namespace poolscope;

TEST_SUITE("amm") {

TEST_CASE("real quote matches the constant-product formula") {
    // 0.997 * 1 * 100 / (10 + 0.997)
    CHECK(quote_out(1.0, 10.0, 100.0) == doctest::Approx(99.7 / 10.997).epsilon(1e-15));
    CHECK(quote_out(0.0, 10.0, 100.0) == 0.0);
    CHECK(quote_out(5.0, 10.0, 100.0, Fee::none()) == doctest::Approx(500.0 / 15.0));
    CHECK_THROWS_AS(quote_out(1.0, 0.0, 100.0), InactivePool);
    CHECK_THROWS_AS(quote_out(-1.0, 10.0, 100.0), ConfigError);
    CHECK_THROWS_AS(quote_out(1.0, 10.0, 100.0, 1.5), ConfigError);
}

TEST_CASE("swap properties on random pools") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lg(-6.0, 6.0);
    for (int i = 0; i < 2000; ++i) {
        const PoolState pool{std::pow(10.0, lg(rng)), std::pow(10.0, lg(rng)), Fee{}};
        const double a = std::pow(10.0, lg(rng));
        const auto dir = i % 2 ? Direction::weth_in : Direction::token_in;
        const auto q = apply_swap(pool, dir, a);
        const double reserve_out = dir == Direction::weth_in ? pool.reserve_token : pool.reserve_weth;
        CHECK(q.amount_out < reserve_out);
        CHECK(q.amount_out >= 0.0);
        // The fee stays in the pool, so k never shrinks.
        const double k0 = pool.reserve_weth * pool.reserve_token;
        const double k1 = q.resulting_pool.reserve_weth * q.resulting_pool.reserve_token;
        CHECK(k1 >= k0 * (1 - 1e-12));
        // Buying WETH-in raises the price, selling lowers it.
        if (dir == Direction::weth_in) CHECK(q.price_after >= q.price_before);
        else CHECK(q.price_after <= q.price_before);
        // Larger input, larger output.
        CHECK(quote_out(2 * a, pool.reserve_weth, pool.reserve_token) >= quote_out(a, pool.reserve_weth, pool.reserve_token));
    }
}

TEST_CASE("fee-free swap preserves k") {
    const PoolState pool{3.0, 7.0, Fee::none()};
    const auto q = apply_swap(pool, Direction::weth_in, 1.25);
    CHECK(q.resulting_pool.reserve_weth * q.resulting_pool.reserve_token == doctest::Approx(21.0).epsilon(1e-14));
}

TEST_CASE("marginal price and liquidity") {
    const PoolState pool{0.04965, 0.0001165, Fee{}};
    CHECK(marginal_price(pool) == doctest::Approx(426.18).epsilon(1e-4));
    CHECK(liquidity(PoolState{4.0, 9.0, Fee{}}) == doctest::Approx(6.0));
    CHECK_THROWS_AS(marginal_price(PoolState{0.0, 1.0, Fee{}}), InactivePool);
}

TEST_CASE("integer quote agrees with GMP") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 3000; ++i) {
        const unsigned bits_in = 1 + rng() % 128;
        const auto in = oracle::random_bits(rng, bits_in);
        const mpz_class r_in = oracle::random_bits(rng, 1 + rng() % 112) + 1;
        const mpz_class r_out = oracle::random_bits(rng, 1 + rng() % 112) + 1;
        const auto want = oracle::gmp_amount_out(in, r_in, r_out);
        if (want.overflow) {
            CHECK_THROWS_AS(quote_out_integer(oracle::from_mpz(in), oracle::from_mpz(r_in), oracle::from_mpz(r_out)),
                            ArithmeticOverflow);
        } else {
            CHECK(oracle::to_mpz(quote_out_integer(oracle::from_mpz(in), oracle::from_mpz(r_in), oracle::from_mpz(r_out))) ==
                  want.out);
        }
    }
}

TEST_CASE("integer quote at the uint112 reserve cap") {
    const mpz_class cap = (mpz_class(1) << 112) - 1;
    for (const mpz_class& in : std::vector<mpz_class>{1, cap, cap - 1, mpz_class(1) << 100}) {
        const auto want = oracle::gmp_amount_out(in, cap, cap);
        REQUIRE_FALSE(want.overflow);
        CHECK(oracle::to_mpz(quote_out_integer(oracle::from_mpz(in), oracle::from_mpz(cap), oracle::from_mpz(cap))) == want.out);
    }
    const uint256 huge = uint256(1) << 250;
    CHECK_THROWS_AS(quote_out_integer(huge, uint256(1), uint256(1) << 100), ArithmeticOverflow);
    CHECK_THROWS_AS(quote_out_integer(uint256(1), uint256(0), uint256(5)), InactivePool);
}

TEST_CASE("integer swap moves the full input into the pool") {
    const IntegerPoolState pool{uint256(1000000), uint256(5000000), Fee{}};
    const auto q = apply_swap(pool, Direction::weth_in, uint256(1000));
    CHECK(q.resulting_pool.reserve_weth == 1001000);
    CHECK(q.resulting_pool.reserve_token == 5000000 - q.amount_out);
    // floor(1000*997*5000000 / (1000000*1000 + 997000))
    CHECK(q.amount_out == 4980);
}

}
