#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ammlab/lp_objective.hpp"
#include "ammlab/verify.hpp"

using namespace ammlab;

namespace {

ModelParams baseline_params() {
    ModelParams mp;
    mp.mu = 0.05;
    mp.r_star = 0.03;
    mp.eta = 2.0;
    mp.rho = 0.2;
    mp.gamma = 0.003;
    mp.sigma = 0.2;
    mp.theta_min = 0.0;
    mp.theta_max = 0.9;
    return mp;
}

} // namespace

TEST_CASE("gas fee form and hump diagnostic") {
    ModelParams mp;
    mp.gas_g0 = 0.01;
    mp.gas_c = 1.0;
    mp.gas_p = 2.0;
    CHECK(gas_fee(0.0, mp) == 0.01);
    CHECK_THAT(gas_fee(0.2, mp), Catch::Matchers::WithinRel(0.05, 1e-15));
    CHECK(gas_hump_condition_ok(mp));

    // g(v)/v increasing on a grid (beyond the g0/v-dominated origin, here
    // v > sqrt(g0/c) = 0.1, the convex term takes over).
    double prev = gas_fee(0.2, mp) / 0.2;
    for (int i = 2; i <= 100; ++i) {
        const double v = 0.2 + 0.1 * i;
        const double cur = gas_fee(v, mp) / v;
        REQUIRE(cur >= prev);
        prev = cur;
    }

    mp.gas_g0 = 0.0;
    mp.gas_p = 1.0;
    CHECK_FALSE(gas_hump_condition_ok(mp));
    CHECK_THROWS_AS(gas_fee(-1.0, mp), std::invalid_argument);
}

TEST_CASE("endogenous intensity closed form and limits") {
    ModelParams mp;
    mp.lambda_minus_bar = 10.0;
    mp.lambda_plus_bar = 10.0;
    mp.k_bar = 1.0;
    mp.beta = 1.0;
    mp.gas_g0 = 0.02;
    mp.gas_c = 0.0;
    mp.gas_p = 1.0;
    CHECK_THAT(lambda_endogenous(1.0, 1.0, mp, Side::buy),
               Catch::Matchers::WithinRel(20.0 * (1.0 - normal_cdf(0.2)), 1e-13));

    // Zero gas: the threshold vanishes and lambda = lambda_bar.
    ModelParams free = mp;
    free.gas_g0 = 0.0;
    CHECK_THAT(lambda_endogenous(1.0, 1.0, free, Side::buy),
               Catch::Matchers::WithinRel(10.0, 1e-13));

    // Convex gas kills the intensity at large v.
    ModelParams convex = mp;
    convex.gas_c = 1.0;
    convex.gas_p = 2.0;
    CHECK(lambda_endogenous(1.0, 1e4, convex, Side::buy) < 1e-12);

    // v = 0 limits.
    CHECK(lambda_endogenous(1.0, 0.0, mp, Side::buy) == 0.0);
    CHECK(lambda_endogenous(1.0, 0.0, free, Side::buy) == 10.0);
}

TEST_CASE("endogenous intensity matches the Monte Carlo entry frequency") {
    ModelParams mp;
    mp.lambda_minus_bar = 10.0;
    mp.k_bar = 2.0;
    mp.beta = 0.75;
    mp.gas_g0 = 0.01;
    mp.gas_c = 0.02;
    mp.gas_p = 2.0;
    const double theta = 0.8, v = 0.5;
    const double threshold = std::sqrt(2.0 * gas_fee(v, mp) /
                                       std::pow(pool_scale(theta, mp), mp.beta));
    std::mt19937_64 rng(71);
    std::normal_distribution<double> z01(0.0, 1.0);
    const long n = 1000000;
    long hits = 0;
    for (long i = 0; i < n; ++i)
        if (std::fabs(std::sqrt(v) * z01(rng)) >= threshold) ++hits;
    const double freq = static_cast<double>(hits) / n;
    const double se = std::sqrt(freq * (1.0 - freq) / n);
    const double lam = lambda_endogenous(theta, v, mp, Side::buy);
    CHECK(std::fabs(lam - mp.lambda_minus_bar * freq) <= 3.0 * mp.lambda_minus_bar * se);
}

TEST_CASE("noise yield value and power law") {
    ModelParams mp;
    mp.gamma = 0.003;
    mp.k_bar = 1.0;
    mp.beta = 1.0;
    mp.sigma_n = 1.0;
    mp.gas_g0 = 0.0;
    mp.gas_c = 0.0;
    CHECK_THAT(psi_noise_yield(1.0, 0.5, 1.0, 1.0, mp),
               Catch::Matchers::WithinRel(
                   (std::exp(0.003) - std::exp(-0.003)) * normal_pdf(0.0) / 2.0, 1e-13));
    ModelParams nofee = mp;
    nofee.gamma = 0.0;
    CHECK(psi_noise_yield(1.0, 0.5, 1.0, 1.0, nofee) == 0.0);

    // Zero-gas power law: doubling theta multiplies psi by 2^{2 beta - 1}.
    mp.beta = 0.75;
    const double p1 = psi_noise_yield(0.7, 0.5, 1.0, 1.0, mp);
    const double p2 = psi_noise_yield(1.4, 0.5, 1.0, 1.0, mp);
    CHECK_THAT(p2 / p1, Catch::Matchers::WithinRel(std::pow(2.0, 2.0 * mp.beta - 1.0), 1e-12));

    // Log-log fit of the exponent across a theta grid.
    double sxx = 0.0, sxy = 0.0, mx = 0.0, my = 0.0;
    std::vector<double> ths, psis;
    for (int i = 0; i < 12; ++i) {
        const double th = 0.2 * std::pow(2.0, i * 0.25);
        ths.push_back(std::log(th));
        psis.push_back(std::log(psi_noise_yield(th, 0.5, 1.0, 1.0, mp)));
    }
    for (size_t i = 0; i < ths.size(); ++i) { mx += ths[i]; my += psis[i]; }
    mx /= ths.size();
    my /= psis.size();
    for (size_t i = 0; i < ths.size(); ++i) {
        sxx += (ths[i] - mx) * (ths[i] - mx);
        sxy += (ths[i] - mx) * (psis[i] - my);
    }
    CHECK_THAT(sxy / sxx, Catch::Matchers::WithinAbs(2.0 * mp.beta - 1.0, 1e-6));
}

TEST_CASE("phi reduces exactly without jumps") {
    ModelParams mp = baseline_params();
    mp.lambda_minus_bar = 0.0;
    mp.lambda_plus_bar = 0.0;
    const MarkDistribution mark{MarkFamily::point_mass, 0.05};
    for (double th : {0.0, 0.2, 0.5, 0.9}) {
        const double expect = mp.mu - mp.r_star * th - 0.5 * mp.eta * mp.sigma * mp.sigma;
        REQUIRE_THAT(phi(th, mp, ObjectiveMode::baseline, 0.0, mark),
                     Catch::Matchers::WithinAbs(expect, 1e-15));
    }
}

TEST_CASE("point-mass marks collapse to a single closed-form evaluation") {
    ModelParams mp = baseline_params();
    mp.lambda_minus_bar = 12.0;
    mp.lambda_plus_bar = 5.0;
    const double eps = 0.04, theta = 0.6;
    const MarkDistribution mark{MarkFamily::point_mass, eps};
    const double jm = jump_return(std::exp(mp.gamma + eps), mp.gamma, Side::buy);
    const double jp = jump_return(std::exp(-mp.gamma - eps), mp.gamma, Side::sell);
    const double expect = mp.mu - mp.r_star * theta - 0.5 * mp.eta * mp.sigma * mp.sigma
        + mp.lambda_minus_bar / (1.0 - mp.eta) * (std::pow(1.0 + theta * jm, 1.0 - mp.eta) - 1.0)
        + mp.lambda_plus_bar / (1.0 - mp.eta) * (std::pow(1.0 + theta * jp, 1.0 - mp.eta) - 1.0);
    CHECK_THAT(phi(theta, mp, ObjectiveMode::baseline, 0.0, mark),
               Catch::Matchers::WithinRel(expect, 1e-14));
}

TEST_CASE("quadrature expectation agrees with Monte Carlo") {
    ModelParams mp = baseline_params();
    mp.lambda_minus_bar = 20.0;
    mp.lambda_plus_bar = 10.0;
    const MarkDistribution mark{MarkFamily::half_normal, 0.8};
    const double theta = 0.5;
    const double v_eff = mp.sigma * mp.sigma;
    const double s = std::sqrt(mark.param * v_eff);
    std::mt19937_64 rng(72);
    std::normal_distribution<double> z01(0.0, 1.0);
    const long n = 1000000;
    double acc2_m = 0.0, acc2_p = 0.0, sum_m = 0.0, sum_p = 0.0;
    for (long i = 0; i < n; ++i) {
        const double eps = std::fabs(s * z01(rng));
        const double gm = std::pow(1.0 + theta * jump_return(std::exp(mp.gamma + eps), mp.gamma, Side::buy),
                                   1.0 - mp.eta) - 1.0;
        const double gp = std::pow(1.0 + theta * jump_return(std::exp(-mp.gamma - eps), mp.gamma, Side::sell),
                                   1.0 - mp.eta) - 1.0;
        sum_m += gm;
        sum_p += gp;
        acc2_m += gm * gm;
        acc2_p += gp * gp;
    }
    const double mean_m = sum_m / n, mean_p = sum_p / n;
    const double se_m = std::sqrt((acc2_m / n - mean_m * mean_m) / n);
    const double se_p = std::sqrt((acc2_p / n - mean_p * mean_p) / n);
    const double cm = mp.lambda_minus_bar / (1.0 - mp.eta);
    const double cp = mp.lambda_plus_bar / (1.0 - mp.eta);
    const double mc_phi = mp.mu - mp.r_star * theta - 0.5 * mp.eta * v_eff
                        + cm * mean_m + cp * mean_p;
    const double se = std::sqrt(cm * cm * se_m * se_m + cp * cp * se_p * se_p);
    const double quad_phi = phi(theta, mp, ObjectiveMode::baseline, 0.0, mark);
    CHECK(std::fabs(quad_phi - mc_phi) <= 3.0 * se);
}

TEST_CASE("baseline derivative is below -r* and matches finite differences") {
    ModelParams mp = baseline_params();
    mp.lambda_minus_bar = 15.0;
    mp.lambda_plus_bar = 8.0;
    const MarkDistribution mark{MarkFamily::exponential, 0.03};
    for (double th : {0.05, 0.3, 0.6, 0.85}) {
        const double d = phi_prime(th, mp, ObjectiveMode::baseline, 0.0, mark);
        REQUIRE(d < -mp.r_star);
        const double h = 1e-5;
        const double fd = (phi(th + h, mp, ObjectiveMode::baseline, 0.0, mark) -
                           phi(th - h, mp, ObjectiveMode::baseline, 0.0, mark)) / (2.0 * h);
        REQUIRE(std::fabs(d - fd) <= 1e-6);
    }
    // Without jumps or noise yield the derivative is exactly -r*.
    mp.lambda_minus_bar = 0.0;
    mp.lambda_plus_bar = 0.0;
    CHECK_THAT(phi_prime(0.4, mp, ObjectiveMode::baseline, 0.0, mark),
               Catch::Matchers::WithinAbs(-mp.r_star, 1e-15));
}

TEST_CASE("extended derivative matches finite differences on a grid") {
    const ModelParams mp = hump_scenario_params();
    const MarkDistribution mark = hump_scenario_mark();
    for (double v : {0.05, 0.2, 0.8, 3.0}) {
        for (double th : {0.3, 1.0, 2.5, 5.0}) {
            const double d = phi_prime(th, mp, ObjectiveMode::extended, v, mark);
            const double h = 1e-5;
            const double fd = (phi(th + h, mp, ObjectiveMode::extended, v, mark) -
                               phi(th - h, mp, ObjectiveMode::extended, v, mark)) / (2.0 * h);
            INFO("v=" << v << " theta=" << th);
            REQUIRE(std::fabs(d - fd) <= 1e-6);
        }
    }
}

TEST_CASE("baseline curvature is strictly negative with active jumps") {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const MarkDistribution mark{MarkFamily::half_normal, 0.5};
    for (int i = 0; i < 30; ++i) {
        ModelParams mp = baseline_params();
        mp.eta = (i % 2 == 0) ? 0.5 + 0.4 * u01(rng) : 1.2 + 2.0 * u01(rng);
        mp.lambda_minus_bar = 1.0 + 30.0 * u01(rng);
        mp.lambda_plus_bar = 1.0 + 30.0 * u01(rng);
        const double h = 1e-4;
        for (double th : {0.1, 0.4, 0.8}) {
            const double fd2 = (phi(th + h, mp, ObjectiveMode::baseline, 0.0, mark)
                                - 2.0 * phi(th, mp, ObjectiveMode::baseline, 0.0, mark)
                                + phi(th - h, mp, ObjectiveMode::baseline, 0.0, mark)) / (h * h);
            REQUIRE(fd2 < 0.0);
        }
    }
}

TEST_CASE("maximizer: baseline dominance and solver agreement") {
    ModelParams mp = baseline_params();
    mp.lambda_minus_bar = 25.0;
    mp.lambda_plus_bar = 25.0;
    mp.theta_min = 0.05;
    const MarkDistribution mark{MarkFamily::point_mass, 0.02};
    const MaximizeResult r = maximize_theta(mp, ObjectiveMode::baseline, 0.0, mark);
    CHECK(r.theta_star == mp.theta_min);
    CHECK(r.at_boundary);

    const MaximizeResult g = maximize_theta_golden(mp, ObjectiveMode::baseline, 0.0, mark);
    CHECK(std::fabs(g.theta_star - r.theta_star) <= 1e-8);
}

TEST_CASE("maximizer: interior optimum satisfies the FOC") {
    const ModelParams mp = hump_scenario_params();
    const MarkDistribution mark = hump_scenario_mark();
    const double v = hump_scenario_v_argmax;
    const MaximizeResult r = maximize_theta(mp, ObjectiveMode::extended, v, mark);
    REQUIRE_FALSE(r.at_boundary);
    CHECK(std::fabs(phi_prime(r.theta_star, mp, ObjectiveMode::extended, v, mark)) <= 1e-8);

    // Golden section localizes a flat top only to ~sqrt(eps) in theta; the
    // two solvers must agree to 1e-8 in objective value.
    const MaximizeResult g = maximize_theta_golden(mp, ObjectiveMode::extended, v, mark);
    CHECK(std::fabs(g.theta_star - r.theta_star) <= 1e-6);
    CHECK(std::fabs(g.phi_star - r.phi_star) <= 1e-8 * (1.0 + std::fabs(r.phi_star)));
}

TEST_CASE("value constant and transversality") {
    ModelParams mp;
    mp.rho = 0.05;
    mp.eta = 2.0;
    CHECK_THAT(value_constant(0.0, 0.03, mp), Catch::Matchers::WithinRel(12.5, 1e-14));
    CHECK_THROWS_AS(value_constant(0.0, -0.05, mp), std::domain_error);

    // Finite on both sides of eta = 1 under transversality.
    for (double eta : {0.3, 0.7, 1.5, 3.0}) {
        mp.eta = eta;
        mp.rho = 0.2;
        const double c = value_constant(0.0, 0.05, mp);
        REQUIRE(std::isfinite(c));
        REQUIRE(c > 0.0);
    }
}

TEST_CASE("eta = 1 is rejected") {
    ModelParams mp = baseline_params();
    mp.eta = 1.0;
    const MarkDistribution mark{MarkFamily::point_mass, 0.02};
    CHECK_THROWS_AS(phi(0.3, mp, ObjectiveMode::baseline, 0.0, mark), std::invalid_argument);
}

TEST_CASE("inadmissible theta is reported") {
    ModelParams mp = baseline_params();
    mp.lambda_minus_bar = 5.0;
    mp.theta_max = 40.0;
    // A violent point mass drives J close to -1; large theta breaks 1 + tJ > 0.
    const MarkDistribution mark{MarkFamily::point_mass, 3.0};
    CHECK_THROWS_AS(phi(30.0, mp, ObjectiveMode::baseline, 0.0, mark), std::domain_error);
    CHECK(!phi_opt(30.0, mp, ObjectiveMode::baseline, 0.0, mark).has_value());
}

TEST_CASE("mark node weights sum to one") {
    for (auto fam : {MarkFamily::point_mass, MarkFamily::half_normal, MarkFamily::exponential}) {
        const MarkDistribution mark{fam, 0.1};
        const MarkNodes nodes = mark_nodes(mark, 0.2);
        double w = 0.0;
        for (double wi : nodes.w) w += wi;
        REQUIRE_THAT(w, Catch::Matchers::WithinAbs(1.0, 1e-12));
        for (double e : nodes.eps) REQUIRE(e >= 0.0);
    }
    CHECK(mark_nodes(MarkDistribution{MarkFamily::point_mass, 0.07}, 1.0).eps.size() == 1);
}

TEST_CASE("flat curve without jump or noise channels") {
    ModelParams mp = hump_scenario_params();
    mp.lambda_minus_bar = 0.0;
    mp.lambda_plus_bar = 0.0;
    mp.gamma = 0.0;  // kills the noise-fee wedge, psi = 0
    const MarkDistribution mark{MarkFamily::point_mass, 0.01};
    const std::vector<double> grid{0.05, 0.1, 0.5, 1.0, 4.0};
    const ThetaCurve curve = theta_star_curve(grid, mp, mark);
    for (const auto& pt : curve.points) REQUIRE(pt.theta_star == mp.theta_min);
    CHECK(curve.segmentation == "flat");
}

TEST_CASE("single-point curve makes no segmentation claim") {
    const ModelParams mp = hump_scenario_params();
    const ThetaCurve curve = theta_star_curve({0.5}, mp, hump_scenario_mark());
    CHECK(curve.points.size() == 1);
    CHECK(curve.segmentation.empty());
}

TEST_CASE("curve grid validation") {
    const ModelParams mp = hump_scenario_params();
    const MarkDistribution mark = hump_scenario_mark();
    CHECK_THROWS_AS(theta_star_curve({}, mp, mark), std::invalid_argument);
    CHECK_THROWS_AS(theta_star_curve({0.5, 0.2}, mp, mark), std::invalid_argument);
    CHECK_THROWS_AS(theta_star_curve({0.0, 0.2}, mp, mark), std::invalid_argument);
}

TEST_CASE("concavity check: degenerate case holds with both sides zero") {
    ModelParams mp = hump_scenario_params();
    mp.lambda_minus_bar = 0.0;
    mp.lambda_plus_bar = 0.0;
    mp.beta = 0.5;  // psi linear in theta
    mp.gas_g0 = 0.0;
    mp.gas_c = 0.0;
    mp.gas_p = 1.0;
    const MarkDistribution mark{MarkFamily::point_mass, 0.01};
    const ConcavityReport rep = concavity_check(1.0, 0.5, mp, mark);
    CHECK(rep.holds);
    CHECK_THAT(rep.lhs, Catch::Matchers::WithinAbs(0.0, 1e-14));
    CHECK_THAT(rep.rhs, Catch::Matchers::WithinAbs(0.0, 1e-14));
    // Phi is affine there; FD second derivative vanishes.
    const double h = 1e-4;
    const double fd2 = (phi(1.0 + h, mp, ObjectiveMode::extended, 0.5, mark)
                        - 2.0 * phi(1.0, mp, ObjectiveMode::extended, 0.5, mark)
                        + phi(1.0 - h, mp, ObjectiveMode::extended, 0.5, mark)) / (h * h);
    CHECK(std::fabs(fd2) < 1e-7);
}

TEST_CASE("concavity check holds at the hump peak") {
    const ModelParams mp = hump_scenario_params();
    const MarkDistribution mark = hump_scenario_mark();
    const double v = hump_scenario_v_argmax;
    const MaximizeResult r = maximize_theta(mp, ObjectiveMode::extended, v, mark);
    const ConcavityReport rep = concavity_check(r.theta_star, v, mp, mark);
    CHECK(rep.holds);
    const double h = 1e-4;
    const double fd2 = (phi(r.theta_star + h, mp, ObjectiveMode::extended, v, mark)
                        - 2.0 * phi(r.theta_star, mp, ObjectiveMode::extended, v, mark)
                        + phi(r.theta_star - h, mp, ObjectiveMode::extended, v, mark)) / (h * h);
    CHECK(fd2 < 0.0);
}

TEST_CASE("lambda curvature changes sign at the active-region bound") {
    // z^2 = 1 + 1/beta is the root of the beta z^2 - (beta + 1) factor; the
    // second theta-derivative of lambda vanishes there.
    ModelParams mp;
    mp.lambda_minus_bar = 5.0;
    mp.beta = 0.75;
    mp.k_bar = 1.0;
    mp.gas_c = 0.0;
    mp.gas_p = 1.0;
    const double theta = 1.0, v = 1.0;
    const double z2_target = 1.0 + 1.0 / mp.beta;
    // Solve gas_g0 so that z(theta, v)^2 hits the bound exactly.
    mp.gas_g0 = 0.5 * z2_target * v * std::pow(pool_scale(theta, mp), mp.beta);
    const double h = 1e-4;
    const double fd2 = (lambda_endogenous(theta + h, v, mp, Side::buy)
                        - 2.0 * lambda_endogenous(theta, v, mp, Side::buy)
                        + lambda_endogenous(theta - h, v, mp, Side::buy)) / (h * h);
    CHECK(std::fabs(fd2) < 1e-4);
    const ConcavityReport rep = concavity_check(theta, v, mp, hump_scenario_mark());
    CHECK_THAT(rep.z2, Catch::Matchers::WithinRel(z2_target, 1e-12));
    CHECK(rep.active_region_ok);
}

TEST_CASE("implicit-function slope sign matches the curve") {
    const ModelParams mp = hump_scenario_params();
    const MarkDistribution mark = hump_scenario_mark();
    // Left of the peak the curve rises, right of it falls.
    const double v_lo = 0.2, v_hi = 0.8;
    const MaximizeResult lo = maximize_theta(mp, ObjectiveMode::extended, v_lo, mark);
    const MaximizeResult hi = maximize_theta(mp, ObjectiveMode::extended, v_hi, mark);
    REQUIRE_FALSE(lo.at_boundary);
    REQUIRE_FALSE(hi.at_boundary);
    CHECK(implicit_theta_slope(lo.theta_star, v_lo, mp, mark) > 0.0);
    CHECK(implicit_theta_slope(hi.theta_star, v_hi, mp, mark) < 0.0);
}
