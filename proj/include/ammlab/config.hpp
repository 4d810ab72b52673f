// Scenario configuration: a single JSON file holding every model, market,
// and run parameter. Keys carry units (rates per year-equivalent unit time).
// Loading validates the module invariants and names the offending field.
#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lp_objective.hpp"
#include "noise_traders.hpp"
#include "race_game.hpp"
#include "wealth_sim.hpp"

namespace ammlab {

struct RunControls {
    double horizon{1.0};
    double dt{1e-3};
    int paths{10};
    uint64_t seed{1};
    std::vector<double> v_grid;
};

struct ClassifyParams {
    double gamma_cex{0.0};
    double window{0.002};  // aggregation interval, years
    int max_lag{5};
    std::vector<double> vol_bucket_edges{0.0, 1e-3, 2e-3, 5e-3, 1.0};
};

struct ScenarioConfig {
    std::string name{"scenario"};
    ModelParams model;
    ObjectiveMode mode{ObjectiveMode::extended};
    MarkDistribution mark;
    NoiseParams noise;
    RaceConfig race;
    bool races_enabled{true};
    RunControls run;
    ClassifyParams classify;
    std::string output_dir{"out"};
};

namespace detail {

template <typename T>
T get_field(const nlohmann::json& j, const std::string& section, const std::string& key) {
    if (!j.contains(key))
        throw std::runtime_error("config: missing field " + section + "." + key);
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config: bad value for " + section + "." + key + ": " + e.what());
    }
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& section, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return get_field<T>(j, section, key);
}

} // namespace detail

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    using detail::get_field;
    using detail::get_or;
    ScenarioConfig cfg;
    cfg.name = get_or<std::string>(j, "", "name", "scenario");

    const auto& m = j.at("model");
    cfg.model.mu = get_field<double>(m, "model", "mu_per_year");
    cfg.model.r_star = get_field<double>(m, "model", "r_star_per_year");
    cfg.model.eta = get_field<double>(m, "model", "eta");
    cfg.model.rho = get_field<double>(m, "model", "rho_per_year");
    cfg.model.gamma = get_field<double>(m, "model", "gamma_log");
    cfg.model.lambda_minus_bar = get_field<double>(m, "model", "lambda_minus_bar_per_year");
    cfg.model.lambda_plus_bar = get_field<double>(m, "model", "lambda_plus_bar_per_year");
    cfg.model.theta_min = get_field<double>(m, "model", "theta_min");
    cfg.model.theta_max = get_field<double>(m, "model", "theta_max");
    cfg.model.beta = get_field<double>(m, "model", "beta");
    cfg.model.k_bar = get_field<double>(m, "model", "k_bar");
    cfg.model.sigma_n = get_field<double>(m, "model", "sigma_n_price");
    cfg.model.gas_g0 = get_field<double>(m, "model", "gas_g0_numeraire");
    cfg.model.gas_c = get_field<double>(m, "model", "gas_c_numeraire");
    cfg.model.gas_p = get_field<double>(m, "model", "gas_p_exponent");
    cfg.model.u_max = get_or<double>(m, "model", "u_max", 0.99);
    cfg.model.p_ref = get_or<double>(m, "model", "p_ref_numeraire", 1.0);
    cfg.model.theta0 = get_or<double>(m, "model", "theta0", 1.0);

    const auto& vol = j.at("volatility");
    const std::string regime = get_field<std::string>(vol, "volatility", "regime");
    if (regime == "gbm") {
        cfg.model.vol_regime = VolRegime::gbm;
        cfg.mode = ObjectiveMode::baseline;
    } else if (regime == "heston") {
        cfg.model.vol_regime = VolRegime::heston;
        cfg.mode = ObjectiveMode::extended;
    } else {
        throw std::runtime_error("config: volatility.regime must be gbm or heston");
    }
    cfg.model.sigma = get_or<double>(vol, "volatility", "sigma_per_sqrt_year", 0.2);
    cfg.model.heston.mu = cfg.model.mu;
    cfg.model.heston.kappa = get_or<double>(vol, "volatility", "kappa_per_year", 1.0);
    cfg.model.heston.v_bar = get_or<double>(vol, "volatility", "v_bar_per_year", 0.04);
    cfg.model.heston.xi = get_or<double>(vol, "volatility", "xi_per_year", 0.5);
    cfg.model.heston.v0 = get_or<double>(vol, "volatility", "v0_per_year", cfg.model.heston.v_bar);

    const auto& mk = j.at("mark");
    const std::string fam = get_field<std::string>(mk, "mark", "family");
    if (fam == "point") cfg.mark.family = MarkFamily::point_mass;
    else if (fam == "half_normal") cfg.mark.family = MarkFamily::half_normal;
    else if (fam == "exponential") cfg.mark.family = MarkFamily::exponential;
    else throw std::runtime_error("config: mark.family must be point, half_normal or exponential");
    cfg.mark.param = get_field<double>(mk, "mark", "param");

    const auto& nz = j.at("noise");
    cfg.noise.rate = get_field<double>(nz, "noise", "rate_per_year");
    cfg.noise.sigma_n = cfg.model.sigma_n;
    cfg.noise.beta = cfg.model.beta;

    const auto& rc = j.at("race");
    cfg.races_enabled = get_or<bool>(rc, "race", "enabled", true);
    cfg.race.n_potential = get_field<int>(rc, "race", "n_potential");
    if (rc.contains("beliefs")) {
        cfg.race.beliefs = get_field<std::vector<double>>(rc, "race", "beliefs");
    } else {
        const double belief = get_or<double>(rc, "race", "belief",
                                             static_cast<double>(cfg.race.n_potential));
        cfg.race.beliefs.assign(cfg.race.n_potential, belief);
    }
    cfg.race.kappa_bel = get_or<double>(rc, "race", "kappa_bel", 1.0);
    cfg.race.beta = cfg.model.beta;
    cfg.race.gamma = cfg.model.gamma;
    cfg.race.u_max = cfg.model.u_max;

    const auto& run = j.at("run");
    cfg.run.horizon = get_field<double>(run, "run", "horizon_years");
    cfg.run.dt = get_field<double>(run, "run", "dt_years");
    cfg.run.paths = get_or<int>(run, "run", "paths", 10);
    cfg.run.seed = get_or<uint64_t>(run, "run", "seed", 1);
    cfg.run.v_grid = get_or<std::vector<double>>(run, "run", "v_grid_per_year", {});

    if (j.contains("classify")) {
        const auto& cl = j.at("classify");
        cfg.classify.gamma_cex = get_or<double>(cl, "classify", "gamma_cex_log", 0.0);
        cfg.classify.window = get_or<double>(cl, "classify", "window_years", cfg.classify.window);
        cfg.classify.max_lag = get_or<int>(cl, "classify", "max_lag", 5);
        cfg.classify.vol_bucket_edges = get_or<std::vector<double>>(
            cl, "classify", "vol_bucket_edges", cfg.classify.vol_bucket_edges);
    }
    cfg.output_dir = get_or<std::string>(j, "", "output_dir", "out");

    try {
        validate_params(cfg.model);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("config: model: ") + e.what());
    }
    if (!(cfg.run.horizon > 0.0)) throw std::runtime_error("config: run.horizon_years must be positive");
    if (!(cfg.run.dt > 0.0)) throw std::runtime_error("config: run.dt_years must be positive");
    if (cfg.run.paths < 1) throw std::runtime_error("config: run.paths must be >= 1");
    if (cfg.race.n_potential < 1) throw std::runtime_error("config: race.n_potential must be >= 1");
    for (double b : cfg.race.beliefs)
        if (!(b >= 1.0)) throw std::runtime_error("config: race.beliefs entries must be >= 1");
    if (!(cfg.noise.rate >= 0.0)) throw std::runtime_error("config: noise.rate_per_year must be >= 0");
    if (!(cfg.noise.sigma_n > 0.0)) throw std::runtime_error("config: model.sigma_n_price must be > 0");
    return cfg;
}

inline nlohmann::json scenario_to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["name"] = cfg.name;
    auto& m = j["model"];
    m["mu_per_year"] = cfg.model.mu;
    m["r_star_per_year"] = cfg.model.r_star;
    m["eta"] = cfg.model.eta;
    m["rho_per_year"] = cfg.model.rho;
    m["gamma_log"] = cfg.model.gamma;
    m["lambda_minus_bar_per_year"] = cfg.model.lambda_minus_bar;
    m["lambda_plus_bar_per_year"] = cfg.model.lambda_plus_bar;
    m["theta_min"] = cfg.model.theta_min;
    m["theta_max"] = cfg.model.theta_max;
    m["beta"] = cfg.model.beta;
    m["k_bar"] = cfg.model.k_bar;
    m["sigma_n_price"] = cfg.model.sigma_n;
    m["gas_g0_numeraire"] = cfg.model.gas_g0;
    m["gas_c_numeraire"] = cfg.model.gas_c;
    m["gas_p_exponent"] = cfg.model.gas_p;
    m["u_max"] = cfg.model.u_max;
    m["p_ref_numeraire"] = cfg.model.p_ref;
    m["theta0"] = cfg.model.theta0;
    auto& vol = j["volatility"];
    vol["regime"] = (cfg.model.vol_regime == VolRegime::gbm) ? "gbm" : "heston";
    vol["sigma_per_sqrt_year"] = cfg.model.sigma;
    vol["kappa_per_year"] = cfg.model.heston.kappa;
    vol["v_bar_per_year"] = cfg.model.heston.v_bar;
    vol["xi_per_year"] = cfg.model.heston.xi;
    vol["v0_per_year"] = cfg.model.heston.v0;
    auto& mk = j["mark"];
    mk["family"] = (cfg.mark.family == MarkFamily::point_mass)
                       ? "point"
                       : (cfg.mark.family == MarkFamily::half_normal ? "half_normal" : "exponential");
    mk["param"] = cfg.mark.param;
    auto& nz = j["noise"];
    nz["rate_per_year"] = cfg.noise.rate;
    auto& rc = j["race"];
    rc["enabled"] = cfg.races_enabled;
    rc["n_potential"] = cfg.race.n_potential;
    rc["beliefs"] = cfg.race.beliefs;
    rc["kappa_bel"] = cfg.race.kappa_bel;
    auto& run = j["run"];
    run["horizon_years"] = cfg.run.horizon;
    run["dt_years"] = cfg.run.dt;
    run["paths"] = cfg.run.paths;
    run["seed"] = cfg.run.seed;
    run["v_grid_per_year"] = cfg.run.v_grid;
    auto& cl = j["classify"];
    cl["gamma_cex_log"] = cfg.classify.gamma_cex;
    cl["window_years"] = cfg.classify.window;
    cl["max_lag"] = cfg.classify.max_lag;
    cl["vol_bucket_edges"] = cfg.classify.vol_bucket_edges;
    j["output_dir"] = cfg.output_dir;
    return j;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("config: " + path + ": " + e.what());
    }
    return scenario_from_json(j);
}

inline void save_scenario(const ScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("config: cannot write " + path);
    out << scenario_to_json(cfg).dump(2) << "\n";
}

} // namespace ammlab
