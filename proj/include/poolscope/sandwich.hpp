#pragma once

// Sandwich attacks on a constant-product pool: same-block detection and the
// three-swap gain algebra (attacker buy, victim buy, attacker full sell).
//
// Symbols: x, y reserves before the attack, r fee factor (f = 1 - r),
// dx_a attacker WETH in, dx_eps victim WETH in, s attacker gain in WETH.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "poolscope/amm.hpp"
#include "poolscope/series.hpp"

namespace poolscope {

struct AttackScenario {
    double x = 0.0;
    double y = 0.0;
    double r = Fee{}.factor();
    double dx_victim = 0.0;
    double dx_attacker = 0.0;
    std::optional<double> eta;

    /// Throws ConfigError when reserves, fee or amounts are out of range.
    void validate() const;
};

struct DetectedSandwich {
    std::string pair;
    std::uint64_t block = 0;
    std::uint32_t front_log_index = 0;
    std::optional<std::uint32_t> victim_log_index;  // first same-direction swap between the legs
    std::uint32_t back_log_index = 0;
    std::size_t front_swap = 0;  // 1-based swap numbers
    std::size_t back_swap = 0;
    double front_tokens = 0.0;   // token_delta of each leg
    double back_tokens = 0.0;
    double mismatch = 0.0;
};

/// ||a| - |b|| / max(|a|, |b|); 0 when both are zero.
double relative_mismatch(double a, double b);

/// Greedy per-block matching in log order: each unused swap i takes the first
/// later unused swap j of the same block with opposite token-delta sign and
/// mismatch <= tol. Every swap joins at most one detection.
std::vector<DetectedSandwich> detect(const TokenSeries& series, double tol = 0.05);
std::vector<DetectedSandwich> detect_corpus(const Corpus& corpus, double tol = 0.05);

/// s(dx_a; dx_eps) from the closed-form expression.
double gain_closed_form(double dx_a, double dx_eps, double x, double r);

struct SandwichReplay {
    SwapQuote front;
    SwapQuote victim;
    SwapQuote back;
    double gain = 0.0;  // back.amount_out - dx_a
};

/// Runs the three swaps through the pool simulator. Throws InactivePool.
SandwichReplay replay_sandwich(double dx_a, double dx_eps, const PoolState& pool);
double gain_via_sim(double dx_a, double dx_eps, const PoolState& pool);

struct OptimalAttack {
    double dx_a_max = 0.0;  // dx_eps / f - x
    double s_max = 0.0;     // (dx_eps - f x)^2 / dx_eps
};

/// Leading-order optimum, valid while f * dx_a stays of the order of dx_eps.
/// nullopt means no profitable attack (dx_eps <= f * x).
std::optional<OptimalAttack> optimal_attack(double dx_eps, double x, double f);

struct GridOptimum {
    double dx_a = 0.0;
    double s = 0.0;
};

/// Numeric maximum of gain_closed_form over dx_a >= 0: a log-spaced grid on
/// [1e-9 x, 1e9 x] (plus dx_a = 0), then repeated linear refinement of the
/// best cell.
GridOptimum grid_optimize(double dx_eps, double x, double r, std::size_t resolution = 4000);

/// Victim effective price after a front-run of dx_a, over the price quoted on
/// the untouched pool. Independent of y.
double victim_price_ratio(double dx_a, double dx_eps, double x, double r);

/// Largest dx_a keeping victim_price_ratio <= 1 + eta, capped at dx_a_max.
/// Returns 0 when there is no profitable attack.
double slippage_constrained_optimum(double dx_eps, double x, double y, double f, double eta);

struct AsymptoticLoss {
    double exact = 0.0;        // (1 - 1/(1-f)^2) x
    double first_order = 0.0;  // -2 f x
};

AsymptoticLoss asymptotic_loss(double x, double f);

/// dx_a (r^2 - 1): the gain once x is much larger than dx_a.
double high_liquidity_limit(double dx_a, double r);

}  // namespace poolscope
