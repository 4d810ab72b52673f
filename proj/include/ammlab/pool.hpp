// Constant-product pool with fee-extracted accounting: fees are paid out to
// the LP and never enter reserves, so the invariant k = R_A * R_B is
// preserved exactly by every swap.
//
// Sign convention: delta_a is the *pool reserve* change in A. A trader buying
// A from the pool makes delta_a < 0.
#pragma once

#include <cmath>
#include <stdexcept>

namespace ammlab {

enum class Side { buy, sell, none };

struct PoolState {
    double reserve_a{0.0};  // units of asset A, > 0
    double reserve_b{0.0};  // units of numeraire B, > 0
    double gamma{0.0};      // log-fee, >= 0

    double invariant() const { return reserve_a * reserve_b; }
    double price() const { return reserve_b / reserve_a; }  // Q = R_B / R_A
};

struct SwapResult {
    PoolState new_pool;
    double delta_a{0.0};        // signed pool-reserve change in A
    double delta_b_net{0.0};    // signed pool-reserve change in B
    double fee_paid_out{0.0};   // B units paid to the LP, outside the pool
    double trader_b_flow{0.0};  // B paid (-) / received (+) by the trader, fee included
};

inline void check_pool(const PoolState& pool) {
    if (!(pool.reserve_a > 0.0) || !(pool.reserve_b > 0.0))
        throw std::invalid_argument("pool reserves must be positive");
    if (pool.gamma < 0.0)
        throw std::invalid_argument("pool gamma must be nonnegative");
}

// Executes the reserve change (delta_a, delta_b_net) dictated by the
// constant product, with the log-fee wedge applied to the trader's B leg:
// buys pay e^{+gamma} * |dB|, sells receive e^{-gamma} * |dB|.
inline SwapResult execute_swap(const PoolState& pool, double delta_a) {
    check_pool(pool);
    if (!(pool.reserve_a + delta_a > 0.0))
        throw std::invalid_argument("execute_swap: reserve exhaustion (delta_a <= -reserve_a)");

    SwapResult res;
    res.delta_a = delta_a;
    const double new_a = pool.reserve_a + delta_a;
    const double new_b = pool.reserve_b * (pool.reserve_a / new_a);  // preserves k to rounding
    res.delta_b_net = new_b - pool.reserve_b;
    res.new_pool = PoolState{new_a, new_b, pool.gamma};

    if (delta_a < 0.0) {
        // Trader buys A: pool gains B, trader pays the gross amount.
        const double y_net = res.delta_b_net;  // > 0
        res.fee_paid_out = (std::exp(pool.gamma) - 1.0) * y_net;
        res.trader_b_flow = -std::exp(pool.gamma) * y_net;
    } else if (delta_a > 0.0) {
        // Trader sells A: pool pays y_tot, trader receives it net of fee.
        const double y_tot = -res.delta_b_net;  // > 0
        res.fee_paid_out = (1.0 - std::exp(-pool.gamma)) * y_tot;
        res.trader_b_flow = std::exp(-pool.gamma) * y_tot;
    }
    return res;
}

struct MispricingInfo {
    double m{1.0};       // ratio P / Q
    double x{0.0};       // log gap
    bool in_band{true};  // |x| <= gamma (closed band)
};

inline MispricingInfo mispricing(const PoolState& pool, double p) {
    check_pool(pool);
    if (!(p > 0.0)) throw std::invalid_argument("mispricing: p must be positive");
    MispricingInfo info;
    info.m = p / pool.price();
    info.x = std::log(info.m);
    // Closed band; the log-scale slack absorbs rounding at the boundary.
    info.in_band = std::fabs(info.x) <= pool.gamma + 1e-12;
    return info;
}

// Swaps the pool to the fee-adjusted boundary: Q' = P e^{-gamma} on the buy
// side, Q' = P e^{+gamma} on the sell side. The price exactly at the boundary
// is accepted and yields a zero-size correction.
inline SwapResult correct_to_boundary(const PoolState& pool, double p, Side side) {
    check_pool(pool);
    if (!(p > 0.0)) throw std::invalid_argument("correct_to_boundary: p must be positive");
    const double q = pool.price();
    const double k = pool.invariant();
    double target_q = 0.0;
    if (side == Side::buy) {
        if (p < q * std::exp(pool.gamma))
            throw std::invalid_argument("correct_to_boundary: buy side requires p >= Q e^{+gamma}");
        target_q = p * std::exp(-pool.gamma);
    } else if (side == Side::sell) {
        if (p > q * std::exp(-pool.gamma))
            throw std::invalid_argument("correct_to_boundary: sell side requires p <= Q e^{-gamma}");
        target_q = p * std::exp(pool.gamma);
    } else {
        throw std::invalid_argument("correct_to_boundary: side must be buy or sell");
    }
    const double target_a = std::sqrt(k / target_q);
    return execute_swap(pool, target_a - pool.reserve_a);
}

// Absolute pool-price change |Q' - Q| caused by trading q units of A.
// Buying always moves the price more than selling the same quantity.
inline double price_impact(const PoolState& pool, double q, Side side) {
    check_pool(pool);
    if (!(q > 0.0)) throw std::invalid_argument("price_impact: q must be positive");
    const double delta_a = (side == Side::buy) ? -q : q;
    if (side == Side::buy && !(q < pool.reserve_a))
        throw std::invalid_argument("price_impact: buy quantity exhausts reserve");
    const SwapResult res = execute_swap(pool, delta_a);
    return std::fabs(res.new_pool.price() - pool.price());
}

} // namespace ammlab
