#include "poolscope/sandwich.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poolscope/error.hpp"
#include "poolscope/parallel.hpp"

namespace poolscope {

void AttackScenario::validate() const {
    if (!(x > 0.0) || !(y > 0.0)) throw ConfigError("attack scenario needs positive reserves");
    if (!(r > 0.0) || r > 1.0) throw ConfigError("fee factor must lie in (0, 1]");
    if (!(dx_victim >= 0.0) || !(dx_attacker >= 0.0)) throw ConfigError("swap amounts must be non-negative");
    if (eta && (!(*eta >= 0.0) || *eta > 1.0)) throw ConfigError("eta must lie in [0, 1]");
}

double relative_mismatch(double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    return m == 0.0 ? 0.0 : std::abs(std::abs(a) - std::abs(b)) / m;
}

std::vector<DetectedSandwich> detect(const TokenSeries& series, double tol) {
    if (!(tol > 0.0) || !(tol < 1.0)) throw ConfigError("detection tolerance must lie in (0, 1)");
    std::vector<DetectedSandwich> out;
    const std::size_t n = series.swap_count();
    std::vector<bool> used(n + 1, false);

    std::size_t block_begin = 1;
    while (block_begin <= n) {
        const std::uint64_t block = series.swap(block_begin).key.block;
        std::size_t block_end = block_begin;
        while (block_end + 1 <= n && series.swap(block_end + 1).key.block == block) ++block_end;

        for (std::size_t i = block_begin; i <= block_end; ++i) {
            if (used[i]) continue;
            const SwapEvent& front = series.swap(i);
            if (front.token_delta == 0.0) continue;
            for (std::size_t j = i + 1; j <= block_end; ++j) {
                if (used[j]) continue;
                const SwapEvent& back = series.swap(j);
                if (!((front.token_delta > 0.0 && back.token_delta < 0.0) ||
                      (front.token_delta < 0.0 && back.token_delta > 0.0))) {
                    continue;
                }
                const double mismatch = relative_mismatch(front.token_delta, back.token_delta);
                if (mismatch > tol) continue;

                used[i] = used[j] = true;
                DetectedSandwich d;
                d.pair = series.pair.pair.hex();
                d.block = block;
                d.front_log_index = front.key.log_index;
                d.back_log_index = back.key.log_index;
                d.front_swap = i;
                d.back_swap = j;
                d.front_tokens = front.token_delta;
                d.back_tokens = back.token_delta;
                d.mismatch = mismatch;
                for (std::size_t v = i + 1; v < j; ++v) {
                    const double t = series.swap(v).token_delta;
                    if ((t > 0.0) == (front.token_delta > 0.0) && t != 0.0) {
                        d.victim_log_index = series.swap(v).key.log_index;
                        break;
                    }
                }
                out.push_back(std::move(d));
                break;
            }
        }
        block_begin = block_end + 1;
    }
    return out;
}

std::vector<DetectedSandwich> detect_corpus(const Corpus& corpus, double tol) {
    std::vector<std::vector<DetectedSandwich>> per(corpus.tokens.size());
    parallel_for(corpus.tokens.size(), [&](std::size_t i) { per[i] = detect(corpus.tokens[i], tol); });
    std::vector<DetectedSandwich> out;
    for (auto& v : per) out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
    return out;
}

double gain_closed_form(double dx_a, double dx_eps, double x, double r) {
    const double a = dx_a;
    const double e = dx_eps;
    const double r2 = r * r;
    const double r3 = r2 * r;
    const double num = a * r2 * (x + a) * (x + e) + a * e * r3 * (x + e) - a * x * (x + a);
    const double den = (x + r2 * a) * (x + a) + r3 * a * e;
    return num / den;
}

SandwichReplay replay_sandwich(double dx_a, double dx_eps, const PoolState& pool) {
    SandwichReplay rep;
    rep.front = apply_swap(pool, Direction::weth_in, dx_a);
    rep.victim = apply_swap(rep.front.resulting_pool, Direction::weth_in, dx_eps);
    rep.back = apply_swap(rep.victim.resulting_pool, Direction::token_in, rep.front.amount_out);
    rep.gain = rep.back.amount_out - dx_a;
    return rep;
}

double gain_via_sim(double dx_a, double dx_eps, const PoolState& pool) {
    return replay_sandwich(dx_a, dx_eps, pool).gain;
}

std::optional<OptimalAttack> optimal_attack(double dx_eps, double x, double f) {
    if (!(x > 0.0) || !(f > 0.0) || !(f < 1.0) || !(dx_eps >= 0.0)) {
        throw ConfigError("optimal_attack needs x > 0, 0 < f < 1, dx_eps >= 0");
    }
    if (dx_eps <= f * x) return std::nullopt;
    const double d = dx_eps - f * x;
    return OptimalAttack{dx_eps / f - x, d * d / dx_eps};
}

GridOptimum grid_optimize(double dx_eps, double x, double r, std::size_t resolution) {
    if (resolution < 3) throw ConfigError("grid resolution must be at least 3");
    if (!(x > 0.0) || !(r > 0.0) || r > 1.0 || !(dx_eps >= 0.0)) {
        throw ConfigError("grid_optimize needs x > 0, 0 < r <= 1, dx_eps >= 0");
    }
    GridOptimum best{0.0, 0.0};  // dx_a = 0 is always feasible

    const double lo = std::log(1e-9 * x);
    const double hi = std::log(1e9 * x);
    std::vector<double> grid(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
        grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(resolution - 1));
    }

    for (int round = 0; round < 60; ++round) {
        std::size_t arg = grid.size();
        double s_arg = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double s = gain_closed_form(grid[i], dx_eps, x, r);
            if (s > s_arg) {
                s_arg = s;
                arg = i;
            }
        }
        if (s_arg > best.s) best = {grid[arg], s_arg};
        if (!(s_arg > 0.0)) break;  // nothing beats standing still

        const double a = grid[arg == 0 ? 0 : arg - 1];
        const double b = grid[std::min(arg + 1, grid.size() - 1)];
        if (b - a <= 1e-15 * b) break;
        for (std::size_t i = 0; i < resolution; ++i) {
            grid[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(resolution - 1);
        }
    }
    return best;
}

double victim_price_ratio(double dx_a, double dx_eps, double x, double r) {
    return (x + dx_a + r * dx_eps) * (x + r * dx_a) / (x * (x + r * dx_eps));
}

double slippage_constrained_optimum(double dx_eps, double x, double y, double f, double eta) {
    if (!(eta >= 0.0) || eta > 1.0) throw ConfigError("eta must lie in [0, 1]");
    if (!(y > 0.0)) throw ConfigError("token reserve must be positive");
    const auto opt = optimal_attack(dx_eps, x, f);
    if (!opt || eta == 0.0) return 0.0;

    // Positive root of r a^2 + B a - C = 0, written to avoid cancellation.
    const double r = 1.0 - f;
    const double b = x + r * x + r * r * dx_eps;
    const double c = eta * x * (x + r * dx_eps);
    const double bound = 2.0 * c / (b + std::sqrt(b * b + 4.0 * r * c));
    return std::min(bound, opt->dx_a_max);
}

AsymptoticLoss asymptotic_loss(double x, double f) {
    if (!(x > 0.0) || !(f >= 0.0) || !(f < 1.0)) throw ConfigError("asymptotic_loss needs x > 0, 0 <= f < 1");
    const double r = 1.0 - f;
    return {(1.0 - 1.0 / (r * r)) * x, -2.0 * f * x};
}

double high_liquidity_limit(double dx_a, double r) {
    if (!(dx_a >= 0.0) || !(r > 0.0) || r > 1.0) throw ConfigError("high_liquidity_limit needs dx_a >= 0, 0 < r <= 1");
    return dx_a * (r * r - 1.0);
}

}  // namespace poolscope
