// ammlab command-line front end: seeded scenario runs, the theta*(v) curve,
// oracle verification suites, and the trade-classification pipeline.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ammlab/cli.hpp"

using namespace ammlab;

int main(int argc, char** argv) {
    CLI::App app{"ammlab: constant-product AMM market laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir, suite = "all";
    std::string trades_path, prices_path;
    uint64_t seed_override = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* copt = sub->add_option("--config", config_path, "scenario config (JSON)");
        if (needs_config) copt->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed_override, "seed override")->each([&](const std::string&) {
            seed_given = true;
        });
    };

    auto* sim = app.add_subcommand("simulate", "run the market simulation, write trades/market/wealth CSVs");
    add_common(sim, true);
    auto* curve = app.add_subcommand("theta-curve", "compute theta*(v) over the config v-grid");
    add_common(curve, true);
    auto* verify = app.add_subcommand("verify", "run an oracle verification suite");
    verify->add_option("--suite", suite, "suite name (or 'all')");
    auto* classify = app.add_subcommand("classify", "classify a trade stream against CEX prices");
    add_common(classify, true);
    classify->add_option("--trades", trades_path, "trades CSV (default <out>/trades.csv)");
    classify->add_option("--prices", prices_path, "prices CSV (default <out>/market.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (verify->parsed()) return cmd_verify(suite);

        ScenarioConfig cfg = load_scenario(config_path);
        if (seed_given) cfg.run.seed = seed_override;
        if (!out_dir.empty()) cfg.output_dir = out_dir;

        if (sim->parsed()) return cmd_simulate(cfg);
        if (curve->parsed()) return cmd_theta_curve(cfg);
        if (classify->parsed()) {
            if (trades_path.empty()) trades_path = cfg.output_dir + "/trades.csv";
            if (prices_path.empty()) prices_path = cfg.output_dir + "/market.csv";
            return cmd_classify(cfg, trades_path, prices_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "ammlab: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
