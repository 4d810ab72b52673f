// Real noise traders: trade size from an idiosyncratic preference shock with
// gas-gated entry, and the closed-form expected paid-out fee rate.
#pragma once

#include <cmath>
#include <stdexcept>

#include "math.hpp"

namespace ammlab {

struct NoiseParams {
    double sigma_n{1.0};  // preference-shock standard deviation, > 0
    double beta{0.75};    // pool-depth elasticity, > 0
    double rate{1.0};     // arrivals per unit time (simulation-only), > 0
};

// Signed A quantity: K^beta * xi when the quadratic surplus covers gas,
// otherwise no trade.
inline double optimal_noise_trade(double xi, double k, double beta, double gas) {
    if (!(k > 0.0)) throw std::invalid_argument("optimal_noise_trade: k must be positive");
    if (gas < 0.0) throw std::invalid_argument("optimal_noise_trade: gas must be nonnegative");
    const double depth = std::pow(k, beta);
    if (0.5 * depth * xi * xi >= gas) return depth * xi;
    return 0.0;
}

// Expected instantaneous paid-out fee in B units:
//   Q (e^{+gamma} - e^{-gamma}) K^beta sigma_N phi(sqrt(2 gas / K^beta) / sigma_N).
inline double expected_noise_fee_rate(double q_price, double k, double beta,
                                      double sigma_n, double gas, double gamma) {
    if (!(q_price > 0.0) || !(k > 0.0) || !(sigma_n > 0.0))
        throw std::invalid_argument("expected_noise_fee_rate: positive inputs required");
    if (gas < 0.0) throw std::invalid_argument("expected_noise_fee_rate: gas must be nonnegative");
    const double depth = std::pow(k, beta);
    const double threshold = std::sqrt(2.0 * gas / depth) / sigma_n;
    return q_price * (std::exp(gamma) - std::exp(-gamma)) * depth * sigma_n * normal_pdf(threshold);
}

} // namespace ammlab
