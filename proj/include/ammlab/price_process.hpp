// CEX relative-price and variance dynamics: GBM in the baseline regime,
// CIR/Heston variance with uncorrelated price shocks in the extended regime,
// plus the two-asset change-of-numeraire reduction.
//
// All steppers are pure functions of (state, params, draws); callers own the
// RNG streams.
#pragma once

#include <cmath>
#include <stdexcept>

namespace ammlab {

struct GbmParams {
    double mu{0.0};     // drift per unit time
    double sigma{0.0};  // volatility per sqrt(unit time), sigma >= 0
};

struct HestonParams {
    double mu{0.0};
    double kappa{1.0};   // mean-reversion speed, > 0
    double v_bar{0.04};  // long-run variance, > 0
    double xi{0.5};      // vol-of-variance, > 0
    double v0{0.04};     // initial variance, >= 0
};

struct MarketState {
    double p{1.0};  // relative price, B units per A, > 0
    double v{0.0};  // instantaneous variance, >= 0
    double t{0.0};
};

// Ito quotient of two GBMs driven by the same Brownian motion, taking asset B
// as numeraire. The returned sigma keeps its sign; consumers use sigma^2.
inline GbmParams reduce_numeraire(double mu_a, double sigma_a, double mu_b, double sigma_b) {
    if (sigma_a < 0.0 || sigma_b < 0.0)
        throw std::invalid_argument("reduce_numeraire: volatilities must be nonnegative");
    GbmParams g;
    g.mu = mu_a - mu_b + sigma_b * (sigma_b - sigma_a);
    g.sigma = sigma_a - sigma_b;
    return g;
}

// Exact-in-distribution log-Euler step for constant coefficients.
inline MarketState step_gbm(const MarketState& state, const GbmParams& params, double dt, double z) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_gbm: dt must be positive");
    MarketState next = state;
    next.p = state.p * std::exp((params.mu - 0.5 * params.sigma * params.sigma) * dt
                                + params.sigma * std::sqrt(dt) * z);
    next.v = params.sigma * params.sigma;
    next.t = state.t + dt;
    return next;
}

// Full-truncation Euler for the CIR variance; the price step uses the
// truncated variance so p stays strictly positive.
inline MarketState step_heston(const MarketState& state, const HestonParams& params,
                               double dt, double z_p, double z_v) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_heston: dt must be positive");
    const double v_plus = std::max(state.v, 0.0);
    const double sq = std::sqrt(v_plus * dt);
    MarketState next;
    next.v = std::max(state.v + params.kappa * (params.v_bar - v_plus) * dt + params.xi * sq * z_v, 0.0);
    next.p = state.p * std::exp((params.mu - 0.5 * v_plus) * dt + sq * z_p);
    next.t = state.t + dt;
    return next;
}

} // namespace ammlab
