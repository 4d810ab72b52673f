// Monte Carlo of LP wealth under the reduced proportional dynamics
//   dW/W = (mu - r* theta + theta psi^N) dt + sqrt(v) dB
//          + theta J_ext^- dN^- + theta J_ext^+ dN^+,
// and the full agent-based market simulation (arb races, overrun flow, noise
// traders) that produces the trade stream for the empirical pipeline.
//
// One path/run is strictly sequential and deterministic given its seed; run
// independent paths concurrently with seeds derived from (master, index).
#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "arbitrage.hpp"
#include "lp_objective.hpp"
#include "noise_traders.hpp"
#include "pool.hpp"
#include "price_process.hpp"
#include "race_game.hpp"

namespace ammlab {

struct LPPosition {
    double theta{0.0};   // AMM allocation fraction
    double wealth{1.0};  // numeraire
    double a_out{0.0};   // outside A holding
    double debt{0.0};    // numeraire, accruing at r*
};

struct JumpEvent {
    double t{0.0};
    Side side{Side::none};
    double m{1.0};
    double u{0.0};
    double j{0.0};  // proportional return applied (before theta scaling)
};

struct WealthPath {
    std::vector<double> times;
    std::vector<double> wealth;
    std::vector<JumpEvent> jumps;
    double fee_income{0.0};  // cumulative noise-fee accrual in numeraire
};

inline double sample_mark_epsilon(const MarkDistribution& dist, double v, std::mt19937_64& rng) {
    switch (dist.family) {
        case MarkFamily::point_mass:
            return dist.param;
        case MarkFamily::half_normal: {
            std::normal_distribution<double> z(0.0, 1.0);
            return std::fabs(std::sqrt(dist.param * v) * z(rng));
        }
        case MarkFamily::exponential: {
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            return -dist.param * std::log1p(-u01(rng));
        }
    }
    return 0.0;
}

// Constant-control wealth path. Diffusion by exact log-normal stepping, jump
// arrivals by per-step Poisson thinning with lambda(theta, v), marks drawn
// from the overshoot law at the current variance.
inline WealthPath simulate_wealth_path(double theta, const ModelParams& mp, ObjectiveMode mode,
                                       const MarkDistribution& mark, double horizon, double dt,
                                       uint64_t seed, double w0 = 1.0) {
    validate_params(mp);
    if (!(horizon > 0.0) || !(dt > 0.0)) throw std::invalid_argument("simulate_wealth_path: bad time grid");
    if (std::max(mp.lambda_minus_bar, mp.lambda_plus_bar) * dt >= 0.1)
        throw std::invalid_argument("simulate_wealth_path: lambda * dt must stay below 0.1");
    if (mode == ObjectiveMode::extended && !(theta > 0.0))
        throw std::invalid_argument("simulate_wealth_path: extended mode requires theta > 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z01(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    const long n_steps = static_cast<long>(std::llround(horizon / dt));
    WealthPath path;
    path.times.reserve(n_steps + 1);
    path.wealth.reserve(n_steps + 1);

    double w = w0;
    double t = 0.0;
    double v = (mode == ObjectiveMode::baseline) ? mp.sigma * mp.sigma : mp.heston.v0;
    path.times.push_back(t);
    path.wealth.push_back(w);

    for (long i = 0; i < n_steps; ++i) {
        if (mode == ObjectiveMode::extended) {
            const double z_v = z01(rng);
            const double v_plus = std::max(v, 0.0);
            v = std::max(v + mp.heston.kappa * (mp.heston.v_bar - v_plus) * dt
                           + mp.heston.xi * std::sqrt(v_plus * dt) * z_v, 0.0);
        }
        const double psi = (mode == ObjectiveMode::extended)
                               ? psi_noise_yield(theta, v, mp.p_ref, mp.p_ref, mp)
                               : 0.0;
        const double drift = mp.mu - mp.r_star * theta + theta * psi;
        path.fee_income += w * theta * psi * dt;

        const double z = z01(rng);
        w *= std::exp((drift - 0.5 * v) * dt + std::sqrt(v * dt) * z);

        for (Side side : {Side::buy, Side::sell}) {
            const double lam = (mode == ObjectiveMode::baseline)
                                   ? ((side == Side::buy) ? mp.lambda_minus_bar : mp.lambda_plus_bar)
                                   : lambda_endogenous(theta, v, mp, side);
            if (u01(rng) < lam * dt) {
                const double eps = sample_mark_epsilon(mark, v, rng);
                const double m = (side == Side::buy) ? std::exp(mp.gamma + eps)
                                                     : std::exp(-mp.gamma - eps);
                const double u = (mode == ObjectiveMode::extended)
                                     ? expected_overrun_ratio(pool_scale(theta, mp), v, mp.p_ref,
                                                              mp.beta, mp.gamma, side, 1.0, mp.u_max)
                                     : 0.0;
                const double j = jump_return_ext(m, u, mp.gamma, side);
                const double mult = 1.0 + theta * j;
                if (!(mult > 0.0))
                    throw std::runtime_error("simulate_wealth_path: wealth driven nonpositive (inadmissible theta)");
                w *= mult;
                path.jumps.push_back(JumpEvent{t + dt, side, m, u, j});
            }
        }
        t += dt;
        path.times.push_back(t);
        path.wealth.push_back(w);
    }
    return path;
}

struct GrowthEstimate {
    double slope{0.0};
    double se{0.0};
};

// Slope of log E[W_t^{1-eta}] in t: OLS on the sampled time grid with a
// delta-method standard error from the endpoint cross-sectional moments.
inline GrowthEstimate estimate_growth_rate(const std::vector<WealthPath>& paths, double eta) {
    if (paths.size() < 100) throw std::invalid_argument("estimate_growth_rate: need >= 100 paths");
    const size_t n_t = paths[0].times.size();
    for (const auto& p : paths)
        if (p.times.size() != n_t || p.wealth.size() != n_t)
            throw std::invalid_argument("estimate_growth_rate: paths must share one time grid");
    if (n_t < 2 || paths[0].times.front() == paths[0].times.back())
        throw std::invalid_argument("estimate_growth_rate: degenerate time grid");

    const double q = 1.0 - eta;
    const size_t n_paths = paths.size();
    std::vector<double> y(n_t);
    double se_first = 0.0, se_last = 0.0;
    for (size_t k = 0; k < n_t; ++k) {
        double mean = 0.0, m2 = 0.0;
        for (const auto& p : paths) mean += std::pow(p.wealth[k], q);
        mean /= static_cast<double>(n_paths);
        for (const auto& p : paths) {
            const double d = std::pow(p.wealth[k], q) - mean;
            m2 += d * d;
        }
        const double sd = std::sqrt(m2 / std::max<size_t>(n_paths - 1, 1));
        const double se_mean = sd / std::sqrt(static_cast<double>(n_paths));
        if (k == 0) se_first = se_mean / mean;
        if (k == n_t - 1) se_last = se_mean / mean;
        y[k] = std::log(mean);
    }

    double tbar = 0.0, ybar = 0.0;
    for (size_t k = 0; k < n_t; ++k) { tbar += paths[0].times[k]; ybar += y[k]; }
    tbar /= n_t;
    ybar /= n_t;
    double sxx = 0.0, sxy = 0.0;
    for (size_t k = 0; k < n_t; ++k) {
        const double dt = paths[0].times[k] - tbar;
        sxx += dt * dt;
        sxy += dt * (y[k] - ybar);
    }
    GrowthEstimate g;
    g.slope = sxy / sxx;
    const double span = paths[0].times.back() - paths[0].times.front();
    g.se = std::sqrt(se_first * se_first + se_last * se_last) / span;
    return g;
}

enum class TraderKind { arb_winner, arb_overrun, noise };

struct TradeRecord {
    double t{0.0};
    TraderKind kind{TraderKind::noise};
    Side side{Side::none};   // buy = trader takes A out of the pool
    double delta_a{0.0};     // pool-reserve change in A
    double delta_b{0.0};     // trader's B flow, fee included (+ = received)
    double fee{0.0};         // B paid out to the LP
    double gas{0.0};
    double cex_price{0.0};
    double pnl{0.0};         // marked at the CEX price, net of gas
};

struct MarketSample {
    double t{0.0};
    double p{0.0};
    double v{0.0};
    double q_pool{0.0};
    double gas{0.0};
};

struct MarketSimConfig {
    ModelParams model;
    NoiseParams noise;
    RaceConfig race;  // n_potential = 1 means corrections without a race
    double horizon{1.0};
    double dt{1e-3};
    uint64_t seed{1};
};

struct MarketRun {
    std::vector<TradeRecord> trades;
    std::vector<MarketSample> market;
    std::vector<PoolState> pools;
    double lp_fee_income{0.0};
    long race_count{0};
    long clamp_events{0};
};

// Event loop: advance (P, v); gas g(v); when the pool sits outside the band,
// an arbitrage block arrives at the base intensity and resolves as a race
// (winner correction, then stale overrun fills); noise arrivals then trade
// against the post-race pool. Ordering within a step is fixed: winner,
// overruns, noise.
inline MarketRun simulate_market(const MarketSimConfig& cfg) {
    validate_params(cfg.model);
    const ModelParams& mp = cfg.model;
    if (!(cfg.horizon > 0.0) || !(cfg.dt > 0.0)) throw std::invalid_argument("simulate_market: bad time grid");
    if (!(cfg.noise.rate >= 0.0)) throw std::invalid_argument("simulate_market: noise rate must be nonnegative");

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> z01(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    const double k0 = pool_scale(mp.theta0, mp);
    PoolState pool{std::sqrt(k0 / mp.p_ref), std::sqrt(k0 * mp.p_ref), mp.gamma};
    MarketState ms{mp.p_ref, (mp.vol_regime == VolRegime::gbm) ? mp.sigma * mp.sigma : mp.heston.v0, 0.0};

    const long n_steps = static_cast<long>(std::llround(cfg.horizon / cfg.dt));
    MarketRun run;
    run.market.reserve(n_steps);
    run.pools.reserve(n_steps);

    for (long i = 0; i < n_steps; ++i) {
        if (mp.vol_regime == VolRegime::gbm) {
            ms = step_gbm(ms, GbmParams{mp.mu, mp.sigma}, cfg.dt, z01(rng));
        } else {
            const double zp = z01(rng);
            const double zv = z01(rng);
            ms = step_heston(ms, mp.heston, cfg.dt, zp, zv);
        }
        const double gas = gas_fee(ms.v, mp);

        // Arbitrage race block.
        {
            const MispricingInfo mis = mispricing(pool, ms.p);
            if (!mis.in_band) {
                const Side side = (mis.x > 0.0) ? Side::buy : Side::sell;
                const double lam_bar = (side == Side::buy) ? mp.lambda_minus_bar : mp.lambda_plus_bar;
                if (lam_bar > 0.0 && u01(rng) < lam_bar * cfg.dt) {
                    const double delta = std::sqrt(std::max(ms.v, 0.0)) * z01(rng);
                    const RaceOutcome race = run_race(delta, ms.v, gas, pool, ms.p, cfg.race, rng);
                    if (race.winner >= 0) {
                        ++run.race_count;
                        if (race.buy_clamped) ++run.clamp_events;
                        for (const RaceExecution& ex : race.executions) {
                            if (ex.delta_a == 0.0) continue;
                            TradeRecord rec;
                            rec.t = ms.t;
                            rec.kind = ex.is_winner ? TraderKind::arb_winner : TraderKind::arb_overrun;
                            rec.side = (ex.delta_a < 0.0) ? Side::buy : Side::sell;
                            rec.delta_a = ex.delta_a;
                            rec.delta_b = ex.trader_b_flow;
                            rec.fee = ex.fee_paid_out;
                            rec.gas = gas;
                            rec.cex_price = ms.p;
                            rec.pnl = ex.pnl;
                            run.trades.push_back(rec);
                            run.lp_fee_income += ex.fee_paid_out;
                        }
                        pool = race.post_pool;
                    }
                }
            }
        }

        // Noise arrivals.
        if (cfg.noise.rate > 0.0) {
            std::poisson_distribution<int> arrivals(cfg.noise.rate * cfg.dt);
            const int n_arr = arrivals(rng);
            for (int a = 0; a < n_arr; ++a) {
                const double xi = cfg.noise.sigma_n * z01(rng);
                const double q = optimal_noise_trade(xi, pool.invariant(), cfg.noise.beta, gas);
                if (q == 0.0) continue;
                const double delta_a = -q;  // q > 0 buys A from the pool
                if (pool.reserve_a + delta_a <= 0.0)
                    throw std::runtime_error("simulate_market: reserve exhaustion by noise trade at t=" +
                                             std::to_string(ms.t));
                const SwapResult res = execute_swap(pool, delta_a);
                pool = res.new_pool;
                TradeRecord rec;
                rec.t = ms.t;
                rec.kind = TraderKind::noise;
                rec.side = (delta_a < 0.0) ? Side::buy : Side::sell;
                rec.delta_a = delta_a;
                rec.delta_b = res.trader_b_flow;
                rec.fee = res.fee_paid_out;
                rec.gas = gas;
                rec.cex_price = ms.p;
                rec.pnl = -delta_a * ms.p + res.trader_b_flow - gas;
                run.trades.push_back(rec);
                run.lp_fee_income += res.fee_paid_out;
            }
        }

        run.market.push_back(MarketSample{ms.t, ms.p, ms.v, pool.price(), gas});
        run.pools.push_back(pool);
    }
    return run;
}

} // namespace ammlab
