#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "ammlab/verify.hpp"
#include "ammlab/wealth_sim.hpp"

using namespace ammlab;

TEST_CASE("pure GBM wealth matches closed-form log moments") {
    ModelParams mp;
    mp.mu = 0.06;
    mp.sigma = 0.3;
    mp.r_star = 0.02;
    mp.lambda_minus_bar = 0.0;
    mp.lambda_plus_bar = 0.0;
    const MarkDistribution mark{MarkFamily::point_mass, 0.01};
    const int n = 4000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const WealthPath p = simulate_wealth_path(0.0, mp, ObjectiveMode::baseline, mark,
                                                  1.0, 1e-3, 1000 + i);
        const double lw = std::log(p.wealth.back());
        sum += lw;
        sum2 += lw * lw;
        REQUIRE(p.jumps.empty());
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    // theta = 0: dW/W = mu dt + sigma dB, so log W_1 ~ N(mu - sigma^2/2, sigma^2).
    const double m_expect = mp.mu - 0.5 * mp.sigma * mp.sigma;
    const double v_expect = mp.sigma * mp.sigma;
    CHECK(std::fabs(mean - m_expect) < 4.0 * std::sqrt(var / n));
    CHECK(std::fabs(var - v_expect) < 4.0 * var * std::sqrt(2.0 / n));
}

TEST_CASE("baseline jump log carries only negative returns") {
    ModelParams mp;
    mp.mu = 0.05;
    mp.sigma = 0.2;
    mp.gamma = 0.003;
    mp.lambda_minus_bar = 40.0;
    mp.lambda_plus_bar = 40.0;
    const MarkDistribution mark{MarkFamily::half_normal, 0.5};
    const WealthPath p = simulate_wealth_path(0.5, mp, ObjectiveMode::baseline, mark,
                                              1.0, 1e-3, 77);
    REQUIRE(p.jumps.size() > 20);
    for (const auto& j : p.jumps) REQUIRE(j.j < 0.0);
    for (double w : p.wealth) REQUIRE(w > 0.0);
}

TEST_CASE("wealth moment identity holds at theta_min in the baseline") {
    ModelParams mp;
    mp.mu = 0.05;
    mp.r_star = 0.03;
    mp.eta = 2.0;
    mp.sigma = 0.2;
    mp.gamma = 0.003;
    mp.lambda_minus_bar = 25.0;
    mp.lambda_plus_bar = 15.0;
    const MarkDistribution mark{MarkFamily::point_mass, 0.015};
    const double theta = 0.4;
    const int n = 3000;
    const double q = 1.0 - mp.eta;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const WealthPath p = simulate_wealth_path(theta, mp, ObjectiveMode::baseline, mark,
                                                  1.0, 1e-3, 5000 + i);
        const double w = std::pow(p.wealth.back(), q);
        sum += w;
        sum2 += w * w;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    const double target = q * phi(theta, mp, ObjectiveMode::baseline, 0.0, mark);
    CHECK(std::fabs(std::log(mean) - target) <= 1.96 * se / mean);
}

TEST_CASE("growth-rate estimator on deterministic wealth") {
    // W_t = e^{g t} exactly: slope must be (1 - eta) g with zero noise.
    const double g = 0.07, eta = 3.0;
    std::vector<WealthPath> paths(120);
    for (auto& p : paths) {
        for (int k = 0; k <= 50; ++k) {
            const double t = 0.02 * k;
            p.times.push_back(t);
            p.wealth.push_back(std::exp(g * t));
        }
    }
    const GrowthEstimate est = estimate_growth_rate(paths, eta);
    CHECK_THAT(est.slope, Catch::Matchers::WithinRel((1.0 - eta) * g, 1e-12));
    CHECK(est.se <= 1e-12);

    // eta > 1 flips the moment ordering: slope sign matches (1 - eta) g.
    CHECK(est.slope < 0.0);
    const GrowthEstimate low = estimate_growth_rate(paths, 0.5);
    CHECK(low.slope > 0.0);
}

TEST_CASE("growth-rate estimator input validation") {
    std::vector<WealthPath> few(10);
    for (auto& p : few) {
        p.times = {0.0, 1.0};
        p.wealth = {1.0, 1.1};
    }
    CHECK_THROWS_AS(estimate_growth_rate(few, 2.0), std::invalid_argument);

    std::vector<WealthPath> degenerate(120);
    for (auto& p : degenerate) {
        p.times = {0.5, 0.5};
        p.wealth = {1.0, 1.0};
    }
    CHECK_THROWS_AS(estimate_growth_rate(degenerate, 2.0), std::invalid_argument);
}

TEST_CASE("growth-rate estimator recovers the baseline drift") {
    ModelParams mp;
    mp.mu = 0.05;
    mp.r_star = 0.03;
    mp.eta = 2.0;
    mp.sigma = 0.15;
    mp.gamma = 0.003;
    mp.lambda_minus_bar = 20.0;
    mp.lambda_plus_bar = 20.0;
    mp.theta_min = 0.2;
    const MarkDistribution mark{MarkFamily::point_mass, 0.01};
    std::vector<WealthPath> paths;
    for (int i = 0; i < 800; ++i)
        paths.push_back(simulate_wealth_path(mp.theta_min, mp, ObjectiveMode::baseline, mark,
                                             1.0, 1e-3, 9000 + i));
    const GrowthEstimate est = estimate_growth_rate(paths, mp.eta);
    const double target = (1.0 - mp.eta) * phi(mp.theta_min, mp, ObjectiveMode::baseline, 0.0, mark);
    CHECK(std::fabs(est.slope - target) <= 2.0 * est.se);
}

TEST_CASE("inadmissible configurations abort the path") {
    ModelParams mp;
    mp.mu = 0.0;
    mp.sigma = 0.1;
    mp.gamma = 0.0;
    mp.lambda_minus_bar = 60.0;
    mp.lambda_plus_bar = 0.0;
    mp.theta_max = 50.0;
    // Point mass deep in the tail: J ~ -0.9, theta = 5 turns 1 + tJ negative.
    const MarkDistribution mark{MarkFamily::point_mass, 4.0};
    CHECK_THROWS_AS(simulate_wealth_path(5.0, mp, ObjectiveMode::baseline, mark, 1.0, 1e-3, 1),
                    std::runtime_error);
}

TEST_CASE("lambda dt guard") {
    ModelParams mp;
    mp.lambda_minus_bar = 200.0;
    const MarkDistribution mark{MarkFamily::point_mass, 0.01};
    CHECK_THROWS_AS(simulate_wealth_path(0.1, mp, ObjectiveMode::baseline, mark, 1.0, 1e-3, 1),
                    std::invalid_argument);
}

TEST_CASE("empty market without arbitrage or noise") {
    MarketSimConfig cfg = comovement_config(true);
    cfg.model.lambda_minus_bar = 0.0;
    cfg.model.lambda_plus_bar = 0.0;
    cfg.noise.rate = 0.0;
    cfg.horizon = 0.002;
    const MarketRun run = simulate_market(cfg);
    CHECK(run.trades.empty());
    CHECK(run.market.size() == 100);
}

TEST_CASE("market runs are deterministic given the seed") {
    MarketSimConfig cfg = comovement_config(true);
    cfg.horizon = 0.01;
    const MarketRun a = simulate_market(cfg);
    const MarketRun b = simulate_market(cfg);
    REQUIRE(a.trades.size() == b.trades.size());
    for (size_t i = 0; i < a.trades.size(); ++i) {
        REQUIRE(a.trades[i].t == b.trades[i].t);
        REQUIRE(a.trades[i].delta_a == b.trades[i].delta_a);
        REQUIRE(a.trades[i].delta_b == b.trades[i].delta_b);
        REQUIRE(a.trades[i].pnl == b.trades[i].pnl);
    }
}

TEST_CASE("market conserves the pool invariant and the fee ledger") {
    MarketSimConfig cfg = comovement_config(true);
    cfg.horizon = 0.05;
    const MarketRun run = simulate_market(cfg);
    REQUIRE(run.trades.size() > 100);
    const double k0 = run.pools.front().invariant();
    for (const auto& pool : run.pools)
        REQUIRE(std::fabs(pool.invariant() - k0) / k0 <= 1e-9);

    double fee_sum = 0.0;
    for (const auto& rec : run.trades) fee_sum += rec.fee;
    REQUIRE_THAT(fee_sum, Catch::Matchers::WithinRel(run.lp_fee_income, 1e-9));
}

TEST_CASE("overrun trades lose to their winner within each race") {
    MarketSimConfig cfg = comovement_config(true);
    cfg.horizon = 0.05;
    const MarketRun run = simulate_market(cfg);
    // Group arbitrage records by timestamp: winner first, overruns follow.
    std::map<double, std::pair<double, std::vector<double>>> races;
    for (const auto& rec : run.trades) {
        if (rec.kind == TraderKind::arb_winner) races[rec.t].first = rec.pnl;
        else if (rec.kind == TraderKind::arb_overrun) races[rec.t].second.push_back(rec.pnl);
    }
    int checked = 0;
    for (const auto& [t, race] : races) {
        for (double pnl : race.second) {
            REQUIRE(pnl < race.first);
            ++checked;
        }
    }
    REQUIRE(checked > 100);
}

TEST_CASE("winners bank positive pnl in most races") {
    MarketSimConfig cfg = comovement_config(true);
    cfg.horizon = 0.05;
    const MarketRun run = simulate_market(cfg);
    long n_win = 0, n_win_prof = 0;
    for (const auto& rec : run.trades) {
        if (rec.kind != TraderKind::arb_winner) continue;
        ++n_win;
        if (rec.pnl > 0.0) ++n_win_prof;
    }
    REQUIRE(n_win > 50);
    CHECK(static_cast<double>(n_win_prof) / n_win > 0.5);
}

TEST_CASE("noise arrivals respect the gas gate") {
    MarketSimConfig cfg = comovement_config(true);
    cfg.horizon = 0.02;
    cfg.model.gas_g0 = 1e9;  // blocks everything
    cfg.model.gas_c = 0.0;
    cfg.model.gas_p = 1.0;
    const MarketRun run = simulate_market(cfg);
    for (const auto& rec : run.trades) REQUIRE(rec.kind != TraderKind::noise);
}
