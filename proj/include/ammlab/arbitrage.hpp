// The informed arbitrageur: closed-form optimal swap against the pool given
// the CEX price, profit marking, and the gas-gated entry rule of the
// extended model.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pool.hpp"

namespace ammlab {

struct ArbHoldings {
    double a{0.0};  // asset-A balance, >= 0
    double b{0.0};  // numeraire balance, >= 0
};

struct ArbDecision {
    double delta_a{0.0};          // signed pool-reserve change; 0 = abstain
    double expected_profit{0.0};  // numeraire, before gas
    Side side{Side::none};
};

// Numeraire profit of the swap delta_a marked against the CEX price p,
// before gas. pi(0) = 0.
inline double arb_profit(const PoolState& pool, double p, double delta_a) {
    if (delta_a == 0.0) return 0.0;
    const SwapResult res = execute_swap(pool, delta_a);
    // The trader's A leg settles at the CEX: what the pool loses, the trader
    // sells there (and vice versa).
    return -delta_a * p + res.trader_b_flow;
}

// Closed-form maximizer of the instantaneous profit, wealth-constrained.
//
// Both directions have a concave profit with an interior marginal condition
// P = e^{+/-gamma} k / (R_A + dA)^2, i.e. the unconstrained trade moves the
// pool exactly to the fee-adjusted boundary Q' = P e^{-/+gamma}.
// Buy side: dA* = max{ sqrt(e^{gamma} k / P) - R_A,
//                      -b R_A / (R_B e^{gamma} + b) }
// (both negative; the max takes whichever the budget permits).
// Sell side: dA* = min{ sqrt(e^{-gamma} k / P) - R_A, a }.
inline ArbDecision optimal_swap(const PoolState& pool, double p, const ArbHoldings& holdings) {
    check_pool(pool);
    if (!(p > 0.0)) throw std::invalid_argument("optimal_swap: p must be positive");
    if (holdings.a < 0.0 || holdings.b < 0.0)
        throw std::invalid_argument("optimal_swap: holdings must be nonnegative");

    const double q = pool.price();
    const double eg = std::exp(pool.gamma);

    ArbDecision d;
    if (p > q * eg) {
        const double da_match = std::sqrt(pool.invariant() * eg / p) - pool.reserve_a;
        const double da_aff = -holdings.b * pool.reserve_a / (pool.reserve_b * eg + holdings.b);
        d.delta_a = std::max(da_match, da_aff);
        d.side = Side::buy;
    } else if (p < q / eg) {
        const double da_match = std::sqrt(pool.invariant() / (eg * p)) - pool.reserve_a;
        d.delta_a = std::min(da_match, holdings.a);
        d.side = Side::sell;
    }
    if (d.delta_a == 0.0) {
        d.side = Side::none;
        return d;
    }
    d.expected_profit = arb_profit(pool, p, d.delta_a);
    return d;
}

// Gas is a fixed entry cost: enter iff expected profit strictly exceeds it;
// the conditional-on-entry size is unchanged. Ties abstain.
inline ArbDecision entry_decision(const ArbDecision& decision, double gas) {
    if (gas < 0.0) throw std::invalid_argument("entry_decision: gas must be nonnegative");
    if (decision.expected_profit - gas > 0.0) return decision;
    return ArbDecision{};
}

} // namespace ammlab
