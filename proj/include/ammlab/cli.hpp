// Command implementations behind the ammlab CLI. Kept in the library so the
// test suite can drive them directly.
#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"
#include "csv.hpp"
#include "verify.hpp"

namespace ammlab {

inline uint64_t path_seed(uint64_t master, int path_index) {
    return master ^ (0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(path_index + 1));
}

inline MarketSimConfig market_config_from_scenario(const ScenarioConfig& cfg) {
    MarketSimConfig mc;
    mc.model = cfg.model;
    mc.noise = cfg.noise;
    mc.race = cfg.race;
    if (!cfg.races_enabled) {
        // Race disabled: corrections still arrive, taken by a single
        // arbitrageur, so no overrun flow.
        mc.race.n_potential = 1;
        mc.race.beliefs.assign(1, 1.0);
    }
    mc.horizon = cfg.run.horizon;
    mc.dt = cfg.run.dt;
    mc.seed = cfg.run.seed;
    return mc;
}

inline int cmd_simulate(const ScenarioConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);
    const MarketSimConfig mc = market_config_from_scenario(cfg);
    const MarketRun run = simulate_market(mc);
    write_trades_csv(cfg.output_dir + "/trades.csv", run.trades);
    write_market_csv(cfg.output_dir + "/market.csv", run.market);

    std::vector<WealthPath> paths;
    paths.reserve(cfg.run.paths);
    const double theta = std::clamp(cfg.model.theta0, cfg.model.theta_min, cfg.model.theta_max);
    // Wealth paths honor the lambda dt < 0.1 thinning guard with a finer
    // internal step when the market-sim dt is too coarse for the intensity.
    const double lam_max = std::max(cfg.model.lambda_minus_bar, cfg.model.lambda_plus_bar);
    double dt_wealth = cfg.run.dt;
    if (lam_max > 0.0) dt_wealth = std::min(dt_wealth, 0.09 / lam_max);
    for (int i = 0; i < cfg.run.paths; ++i) {
        paths.push_back(simulate_wealth_path(theta, cfg.model, cfg.mode, cfg.mark,
                                             cfg.run.horizon, dt_wealth,
                                             path_seed(cfg.run.seed, i)));
    }
    const size_t n_steps = paths.empty() ? 0 : paths[0].times.size();
    const size_t stride = std::max<size_t>(1, n_steps / 1000);
    write_wealth_csv(cfg.output_dir + "/wealth.csv", paths, stride);

    std::cout << "simulate: " << run.trades.size() << " trades, " << run.market.size()
              << " market samples, " << cfg.run.paths << " wealth paths -> "
              << cfg.output_dir << "\n";
    if (run.clamp_events > 0)
        std::cout << "simulate: buy-side overrun clamp hit " << run.clamp_events << " times\n";
    return 0;
}

inline int cmd_theta_curve(const ScenarioConfig& cfg) {
    if (cfg.run.v_grid.empty()) {
        std::cerr << "theta-curve: config run.v_grid_per_year is empty\n";
        return 2;
    }
    std::filesystem::create_directories(cfg.output_dir);
    if (!gas_hump_condition_ok(cfg.model))
        std::cout << "theta-curve: note: gas_p = 1 with gas_g0 = 0, g(v)/v is not increasing "
                     "(hump assumption fails)\n";
    const ThetaCurve curve = theta_star_curve(cfg.run.v_grid, cfg.model, cfg.mark);
    std::ofstream out(cfg.output_dir + "/theta_curve.csv");
    if (!out) {
        std::cerr << "theta-curve: cannot write " << cfg.output_dir << "/theta_curve.csv\n";
        return 2;
    }
    out << "v,theta_star,phi_star,at_boundary,concavity_flag\n";
    for (const auto& pt : curve.points) {
        out << fmt17(pt.v) << ',' << fmt17(pt.theta_star) << ',' << fmt17(pt.phi_star) << ','
            << (pt.at_boundary ? 1 : 0) << ',' << (pt.concavity_holds ? 1 : 0) << '\n';
    }
    if (curve.points.size() > 1) {
        long clamped = 0;
        for (const auto& pt : curve.points)
            if (pt.buy_u_clamped) ++clamped;
        std::cout << "theta-curve: " << curve.points.size() << " grid points, argmax v*="
                  << fmt17(curve.v_argmax) << " theta*="
                  << fmt17(curve.points[curve.argmax_index].theta_star) << " segmentation="
                  << curve.segmentation << "\n";
        if (clamped > 0)
            std::cout << "theta-curve: buy-side overrun ratio clamped at u_max on " << clamped
                      << " grid point(s)\n";
    } else {
        std::cout << "theta-curve: single grid point, no segmentation claim\n";
    }
    return 0;
}

inline const std::map<std::string, std::vector<CheckResult> (*)()>& verify_registry() {
    static const std::map<std::string, std::vector<CheckResult> (*)()> reg = {
        {"jump-returns", +[] { return verify_jump_returns(); }},
        {"optimal-swap", +[] { return verify_optimal_swap(11); }},
        {"asymmetry", +[] { return verify_buy_sell_asymmetry(12); }},
        {"baseline-dominance", +[] { return verify_baseline_dominance(13); }},
        {"noise-fee", +[] { return verify_noise_fee(14); }},
        {"wealth-moment", +[] { return verify_wealth_moment(15); }},
        {"race-scaling", +[] { return verify_race_scaling(16); }},
        {"hump", +[] { return verify_hump_shape(); }},
        {"comovement", +[] { return verify_comovement(); }},
        {"f-test", +[] { return verify_f_test(); }},
    };
    return reg;
}

inline int report_checks(const std::vector<CheckResult>& checks) {
    int failures = 0;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << ": measured="
                  << fmt17(c.measured) << " expected=" << fmt17(c.expected);
        if (!c.detail.empty()) std::cout << "  [" << c.detail << "]";
        std::cout << "\n";
        if (!c.pass) ++failures;
    }
    return failures;
}

inline int cmd_verify(const std::string& suite) {
    const auto& reg = verify_registry();
    std::vector<CheckResult> checks;
    if (suite == "all") {
        for (const auto& [name, fn] : reg) {
            std::cout << "== suite " << name << "\n";
            const auto sub = fn();
            checks.insert(checks.end(), sub.begin(), sub.end());
            report_checks(sub);
        }
        int failures = 0;
        for (const auto& c : checks)
            if (!c.pass) ++failures;
        std::cout << (failures == 0 ? "verify: all suites passed\n"
                                    : "verify: " + std::to_string(failures) + " check(s) failed\n");
        return failures == 0 ? 0 : 1;
    }
    const auto it = reg.find(suite);
    if (it == reg.end()) {
        std::cerr << "verify: unknown suite '" << suite << "'. Available:";
        for (const auto& [name, fn] : reg) std::cerr << " " << name;
        std::cerr << " all\n";
        return 2;
    }
    const int failures = report_checks(it->second());
    return failures == 0 ? 0 : 1;
}

inline int cmd_classify(const ScenarioConfig& cfg, const std::string& trades_path,
                        const std::string& prices_path) {
    std::vector<TradeRecord> trades;
    std::vector<PricePoint> prices;
    try {
        trades = read_trades_csv(trades_path);
        prices = read_prices_csv(prices_path);
    } catch (const std::exception& e) {
        std::cerr << "classify: " << e.what() << "\n";
        return 2;
    }
    std::filesystem::create_directories(cfg.output_dir);

    std::vector<ClassifiedTrade> classified;
    classified.reserve(trades.size());
    for (const auto& rec : trades)
        classified.push_back(classify_trade(rec, rec.cex_price, cfg.classify.gamma_cex, rec.gas));

    {
        std::ofstream out(cfg.output_dir + "/classified.csv");
        out << "t,kind,side,delta_a,delta_b,fee,gas,cex_price,pnl,profitable,reference_price\n";
        for (const auto& ct : classified) {
            const auto& r = ct.rec;
            out << fmt17(r.t) << ',' << kind_name(r.kind) << ',' << side_name(r.side) << ','
                << fmt17(r.delta_a) << ',' << fmt17(r.delta_b) << ',' << fmt17(r.fee) << ','
                << fmt17(r.gas) << ',' << fmt17(r.cex_price) << ',' << fmt17(r.pnl) << ','
                << (ct.profitable ? 1 : 0) << ',' << fmt17(ct.reference_price) << '\n';
        }
    }

    const auto windows = aggregate_windows(classified, prices, cfg.classify.window);
    {
        std::ofstream out(cfg.output_dir + "/windows.csv");
        out << "t_start,t_end,realized_vol,total_volume,unprofitable_volume,n_buy,n_sell,"
               "n_profitable,n_unprofitable,n_buy_profitable,n_sell_profitable,mean_gas\n";
        for (const auto& w : windows) {
            out << fmt17(w.t_start) << ',' << fmt17(w.t_end) << ',' << fmt17(w.realized_vol) << ','
                << fmt17(w.total_volume) << ',' << fmt17(w.unprofitable_volume) << ','
                << w.n_buy << ',' << w.n_sell << ',' << w.n_profitable << ','
                << w.n_unprofitable << ',' << w.n_buy_profitable << ','
                << w.n_sell_profitable << ',' << fmt17(w.mean_gas) << '\n';
        }
    }

    {
        const auto rows = asymmetry_report(classified, windows, cfg.classify.vol_bucket_edges);
        std::ofstream out(cfg.output_dir + "/asymmetry.csv");
        out << "vol_lo,vol_hi,side,n,n_profitable,rate\n";
        for (const auto& r : rows) {
            out << fmt17(r.vol_lo) << ',' << fmt17(r.vol_hi) << ',' << side_name(r.side) << ','
                << r.n << ',' << r.n_profitable << ',' << fmt17(r.rate) << '\n';
        }
    }

    {
        std::ofstream out(cfg.output_dir + "/granger.csv");
        out << "driver,response,lag,F,p\n";
        std::vector<double> vol, unprof, gas;
        for (const auto& w : windows) {
            vol.push_back(w.realized_vol);
            unprof.push_back(w.unprofitable_volume);
            gas.push_back(w.mean_gas);
        }
        const std::vector<std::tuple<std::string, std::string, const std::vector<double>*,
                                     const std::vector<double>*>>
            pairs = {{"volatility", "unprofitable_volume", &vol, &unprof},
                     {"volatility", "mean_gas", &vol, &gas}};
        for (const auto& [dname, rname, xs, ys] : pairs) {
            try {
                for (const auto& g : granger_test(*xs, *ys, cfg.classify.max_lag)) {
                    out << dname << ',' << rname << ',' << g.lag << ',' << fmt17(g.f_stat) << ','
                        << fmt17(g.p_value) << '\n';
                }
            } catch (const std::exception& e) {
                std::cerr << "classify: granger " << dname << " -> " << rname << " skipped: "
                          << e.what() << "\n";
            }
        }
    }
    std::cout << "classify: " << classified.size() << " trades over " << windows.size()
              << " windows -> " << cfg.output_dir << "\n";
    return 0;
}

} // namespace ammlab
