// The arbitrage race: belief-gated entry on a spread draw, uniform winner
// selection, boundary correction by the winner, stale-state execution of the
// overrun entrants, and the overrun-ratio scaling law.
//
// The spread delta sizes entrant quantities (price units, ~N(0,v)); whether
// the winner actually has something to correct is read off the live pool
// state, so a race with an in-band pool produces a zero-size winner trade.
#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "arbitrage.hpp"
#include "math.hpp"
#include "pool.hpp"

namespace ammlab {

struct RaceConfig {
    int n_potential{4};            // candidate arbitrageur count, >= 1
    std::vector<double> beliefs;   // per-agent N_hat_i >= 1; empty = all n_potential
    double beta{0.75};             // depth elasticity
    double gamma{0.003};           // pool log-fee (used by expected ratios)
    double kappa_bel{1.0};         // belief scaling, fixed at 1 in the model
    double u_max{0.99};            // buy-side overrun clamp
};

struct RaceExecution {
    int agent{-1};
    bool is_winner{false};
    double delta_a{0.0};        // pool-reserve change actually executed
    double trader_b_flow{0.0};  // signed B flow of the trader, fee included
    double fee_paid_out{0.0};
    double pnl{0.0};            // marked against the CEX price, net of gas
};

struct RaceOutcome {
    std::vector<int> entered;
    int winner{-1};  // -1 = empty entry set
    Side side{Side::none};
    double winner_quantity{0.0};
    double overrun_volume{0.0};            // L_A: sum of losers' submitted quantities
    double overrun_ratio{0.0};             // u = executed overrun / boundary A-reserve
    std::vector<double> pnl;               // per agent, 0 for non-entrants
    std::vector<RaceExecution> executions; // winner first, then overruns in agent order
    PoolState post_pool;
    bool buy_clamped{false};
};

// E[U] = kappa_bel sqrt(2/pi) e^{-/+ gamma/2} K^{beta-1/2} sqrt(v) sqrt(p);
// the buy side is clamped to [0, u_max] to preserve reserve positivity.
inline double expected_overrun_ratio(double k, double v, double p, double beta, double gamma,
                                     Side side, double kappa_bel = 1.0, double u_max = 0.99) {
    if (!(k > 0.0) || !(p > 0.0) || v < 0.0)
        throw std::invalid_argument("expected_overrun_ratio: invalid inputs");
    const double half = (side == Side::buy) ? -0.5 * gamma : 0.5 * gamma;
    const double u = kappa_bel * std::sqrt(2.0 / pi) * std::exp(half)
                   * std::pow(k, beta - 0.5) * std::sqrt(v) * std::sqrt(p);
    if (side == Side::buy) return std::min(std::max(u, 0.0), u_max);
    return u;
}

// v enters only through the caller's spread draw delta ~ N(0, v); it is kept
// in the signature so race records can carry the conditioning state.
inline RaceOutcome run_race(double delta, [[maybe_unused]] double v, double gas,
                            const PoolState& pool, double p, const RaceConfig& cfg,
                            std::mt19937_64& rng) {
    check_pool(pool);
    if (gas < 0.0) throw std::invalid_argument("run_race: gas must be nonnegative");
    if (cfg.n_potential < 1) throw std::invalid_argument("run_race: n_potential >= 1 required");

    std::vector<double> beliefs = cfg.beliefs;
    if (beliefs.empty()) beliefs.assign(cfg.n_potential, static_cast<double>(cfg.n_potential));
    if (static_cast<int>(beliefs.size()) != cfg.n_potential)
        throw std::invalid_argument("run_race: beliefs size mismatch");
    for (double nh : beliefs)
        if (!(nh >= 1.0)) throw std::invalid_argument("run_race: beliefs must be >= 1");

    RaceOutcome out;
    out.pnl.assign(cfg.n_potential, 0.0);
    out.post_pool = pool;

    // Entry: |delta| >= sqrt(2 gas / K^beta) * N_hat_i; size K^beta |delta| / N_hat_i.
    const double depth = std::pow(pool.invariant(), cfg.beta);
    const double entry_base = std::sqrt(2.0 * gas / depth);
    std::vector<double> quantities(cfg.n_potential, 0.0);
    for (int i = 0; i < cfg.n_potential; ++i) {
        if (std::fabs(delta) >= entry_base * beliefs[i]) {
            out.entered.push_back(i);
            quantities[i] = depth * std::fabs(delta) / beliefs[i];
        }
    }
    if (out.entered.empty()) return out;

    std::uniform_int_distribution<size_t> pick(0, out.entered.size() - 1);
    out.winner = out.entered[pick(rng)];

    // Trade direction: the out-of-band side if there is one, else the sign of
    // the spread (delta > 0 reads as CEX above pool).
    const MispricingInfo mis = mispricing(pool, p);
    if (!mis.in_band) out.side = (mis.x > 0.0) ? Side::buy : Side::sell;
    else out.side = (delta >= 0.0) ? Side::buy : Side::sell;

    PoolState live = pool;

    // Winner: correct to the fee-adjusted boundary (zero-size when in band).
    RaceExecution wexec;
    wexec.agent = out.winner;
    wexec.is_winner = true;
    if (!mis.in_band) {
        const SwapResult corr = correct_to_boundary(live, p, out.side);
        live = corr.new_pool;
        wexec.delta_a = corr.delta_a;
        wexec.trader_b_flow = corr.trader_b_flow;
        wexec.fee_paid_out = corr.fee_paid_out;
        out.winner_quantity = std::fabs(corr.delta_a);
    }
    wexec.pnl = -wexec.delta_a * p + wexec.trader_b_flow - gas;
    out.pnl[out.winner] = wexec.pnl;
    out.executions.push_back(wexec);

    const double boundary_reserve_a = live.reserve_a;

    // Overruns fill sequentially against the stale-updating pool. Buy-side
    // volume is capped at u_max of the boundary reserve; clamp events are
    // surfaced via buy_clamped.
    double executed_a = 0.0;
    double capacity = (out.side == Side::buy) ? cfg.u_max * boundary_reserve_a
                                              : std::numeric_limits<double>::infinity();
    for (int i : out.entered) {
        if (i == out.winner) continue;
        out.overrun_volume += quantities[i];
        double qty = quantities[i];
        if (out.side == Side::buy && executed_a + qty > capacity) {
            qty = std::max(capacity - executed_a, 0.0);
            out.buy_clamped = true;
        }
        RaceExecution oexec;
        oexec.agent = i;
        if (qty > 0.0) {
            const double da = (out.side == Side::buy) ? -qty : qty;
            const SwapResult res = execute_swap(live, da);
            live = res.new_pool;
            oexec.delta_a = res.delta_a;
            oexec.trader_b_flow = res.trader_b_flow;
            oexec.fee_paid_out = res.fee_paid_out;
            executed_a += qty;
        }
        oexec.pnl = -oexec.delta_a * p + oexec.trader_b_flow - gas;
        out.pnl[i] = oexec.pnl;
        out.executions.push_back(oexec);
    }
    out.overrun_ratio = executed_a / boundary_reserve_a;
    out.post_pool = live;
    return out;
}

} // namespace ammlab
