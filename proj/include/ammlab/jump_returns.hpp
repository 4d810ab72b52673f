// Closed-form per-event proportional LP wealth returns for fee-extracted
// boundary corrections, with and without overrun flow.
//
// m is the pre-correction mispricing ratio P/Q_-; a buy-side correction
// requires m >= e^{+gamma}, a sell-side one m <= e^{-gamma} (boundary values
// are accepted and give the pure overrun term). u is the overrun ratio:
// fraction of the boundary A-reserve removed (buy, u < 1) or added (sell).
#pragma once

#include <cmath>
#include <stdexcept>

#include "pool.hpp"

namespace ammlab {

namespace detail {

inline void check_jump_domain(double m, double gamma, Side side) {
    if (!(m > 0.0)) throw std::invalid_argument("jump_return: m must be positive");
    if (gamma < 0.0) throw std::invalid_argument("jump_return: gamma must be nonnegative");
    constexpr double slack = 1e-12;  // admit boundary values up to rounding
    if (side == Side::buy) {
        if (m < std::exp(gamma) * (1.0 - slack))
            throw std::invalid_argument("jump_return: buy side requires m >= e^{+gamma}");
    } else if (side == Side::sell) {
        if (m > std::exp(-gamma) * (1.0 + slack))
            throw std::invalid_argument("jump_return: sell side requires m <= e^{-gamma}");
    } else {
        throw std::invalid_argument("jump_return: side must be buy or sell");
    }
}

} // namespace detail

// J^-(m) = -(sqrt(m) - e^{+gamma/2})^2 / (m+1),
// J^+(m) = -(sqrt(m) - e^{-gamma/2})^2 / (m+1); both <= 0, zero exactly at
// the band boundary.
inline double jump_return(double m, double gamma, Side side) {
    detail::check_jump_domain(m, gamma, side);
    const double half = (side == Side::buy) ? 0.5 * gamma : -0.5 * gamma;
    const double r = std::sqrt(m) - std::exp(half);
    return -r * r / (m + 1.0);
}

// Overrun-extended jump return; reduces to jump_return at u = 0.
inline double jump_return_ext(double m, double u, double gamma, Side side) {
    detail::check_jump_domain(m, gamma, side);
    if (u < 0.0) throw std::invalid_argument("jump_return_ext: u must be nonnegative");
    const double sm = std::sqrt(m);
    if (side == Side::buy) {
        if (u >= 1.0) throw std::invalid_argument("jump_return_ext: buy side requires u < 1");
        const double e = std::exp(0.5 * gamma);
        return (e * sm * u * u / (1.0 - u) - (e - sm) * (e - sm)) / (m + 1.0);
    }
    const double e = std::exp(-0.5 * gamma);
    return (e * sm * u * u / (1.0 + u) - (e - sm) * (e - sm)) / (m + 1.0);
}

struct JumpReturnDerivs {
    double first{0.0};
    double second{0.0};
};

// Closed-form u-derivatives of jump_return_ext. On the buy side
//   d/du   = e^{gamma/2} sqrt(m)/(m+1) * u(2-u)/(1-u)^2,
//   d2/du2 = 2 e^{gamma/2} sqrt(m)/(m+1) / (1-u)^3,
// both strictly positive for u in (0,1). The sell side is the analogue with
// 1+u in place of 1-u.
inline JumpReturnDerivs jump_return_ext_derivs(double m, double u, double gamma, Side side) {
    detail::check_jump_domain(m, gamma, side);
    if (u < 0.0) throw std::invalid_argument("jump_return_ext_derivs: u must be nonnegative");
    JumpReturnDerivs d;
    const double sm = std::sqrt(m);
    if (side == Side::buy) {
        if (u >= 1.0) throw std::invalid_argument("jump_return_ext_derivs: buy side requires u < 1");
        const double c = std::exp(0.5 * gamma) * sm / (m + 1.0);
        const double omu = 1.0 - u;
        d.first = c * u * (2.0 - u) / (omu * omu);
        d.second = 2.0 * c / (omu * omu * omu);
    } else {
        const double c = std::exp(-0.5 * gamma) * sm / (m + 1.0);
        const double opu = 1.0 + u;
        d.first = c * u * (2.0 + u) / (opu * opu);
        d.second = 2.0 * c / (opu * opu * opu);
    }
    return d;
}

} // namespace ammlab
