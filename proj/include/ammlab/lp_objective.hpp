// The LP's reduced CRRA drift objective Phi(theta) and everything hanging off
// it: volatility-driven gas fees, endogenous correction intensities, the
// proportional noise-fee yield, closed-form first derivative, scalar
// maximization, the value constant, the theta*(v) curve, and the sufficient
// concavity check.
//
// Baseline mode: constant diffusion sigma, exogenous intensities
// lambda_bar^{+/-}, plain correction returns J(m). Extended mode: variance
// state v, gas g(v), lambda(theta, v), noise yield psi^N, and overrun-
// extended returns J_ext(m, U(theta, v)).
//
// Pool scale is K(theta) = k_bar * theta^2; the extended objective is
// conditional on the current price level, evaluated at Q = P = p_ref.
// Expectations over the mark law run on fixed 64-node quadrature.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jump_returns.hpp"
#include "math.hpp"
#include "noise_traders.hpp"
#include "pool.hpp"
#include "price_process.hpp"
#include "race_game.hpp"

namespace ammlab {

enum class ObjectiveMode { baseline, extended };
enum class VolRegime { gbm, heston };
enum class MarkFamily { point_mass, half_normal, exponential };

// Law of the log-overshoot eps >= 0, with log M^- = gamma + eps and
// log M^+ = -gamma - eps. Only the support is pinned down by the model, so
// the family is a modeling input:
//   point_mass:  eps == param
//   half_normal: eps ~ |N(0, param * v)|   (param = c_m)
//   exponential: eps ~ Exp with mean param
struct MarkDistribution {
    MarkFamily family{MarkFamily::half_normal};
    double param{1.0};
};

struct ModelParams {
    double mu{0.0};
    double r_star{0.02};
    double eta{2.0};               // relative risk aversion, > 0 and != 1
    double rho{0.2};               // discount, > 0
    double gamma{0.003};           // pool log-fee
    double lambda_minus_bar{0.0};  // base buy-side correction intensity
    double lambda_plus_bar{0.0};   // base sell-side correction intensity
    double theta_min{0.0};
    double theta_max{1.0};
    double beta{0.75};             // depth elasticity
    double k_bar{100.0};           // pool scale, K(theta) = k_bar theta^2
    double sigma_n{1.0};           // noise preference-shock sd
    double gas_g0{0.0};            // g(v) = gas_g0 + gas_c v^{gas_p}
    double gas_c{0.0};
    double gas_p{1.0};             // >= 1
    double sigma{0.2};             // baseline diffusion
    HestonParams heston{};         // extended variance dynamics (simulation)
    VolRegime vol_regime{VolRegime::gbm};
    double u_max{0.99};            // buy-side overrun clamp
    double p_ref{1.0};             // conditioning CEX price level
    double theta0{1.0};            // LP allocation used by the market simulation
};

inline void validate_params(const ModelParams& mp) {
    if (!(mp.eta > 0.0)) throw std::invalid_argument("params: eta must be positive");
    if (mp.eta == 1.0) throw std::invalid_argument("params: eta = 1 (log utility) is not supported");
    if (!(mp.rho > 0.0)) throw std::invalid_argument("params: rho must be positive");
    if (mp.gamma < 0.0) throw std::invalid_argument("params: gamma must be nonnegative");
    if (mp.lambda_minus_bar < 0.0 || mp.lambda_plus_bar < 0.0)
        throw std::invalid_argument("params: lambda bars must be nonnegative");
    if (!(mp.theta_min <= mp.theta_max)) throw std::invalid_argument("params: theta_min <= theta_max required");
    if (!(mp.beta > 0.0)) throw std::invalid_argument("params: beta must be positive");
    if (!(mp.k_bar > 0.0)) throw std::invalid_argument("params: k_bar must be positive");
    if (!(mp.sigma_n > 0.0)) throw std::invalid_argument("params: sigma_n must be positive");
    if (mp.gas_g0 < 0.0 || mp.gas_c < 0.0) throw std::invalid_argument("params: gas coefficients must be nonnegative");
    if (!(mp.gas_p >= 1.0)) throw std::invalid_argument("params: gas_p >= 1 required");
    if (mp.sigma < 0.0) throw std::invalid_argument("params: sigma must be nonnegative");
    if (!(mp.u_max > 0.0 && mp.u_max < 1.0)) throw std::invalid_argument("params: u_max in (0,1) required");
    if (!(mp.p_ref > 0.0)) throw std::invalid_argument("params: p_ref must be positive");
}

inline double gas_fee(double v, const ModelParams& mp) {
    if (v < 0.0) throw std::invalid_argument("gas_fee: v must be nonnegative");
    return mp.gas_g0 + mp.gas_c * std::pow(v, mp.gas_p);
}

// The hump result needs g(v)/v increasing at scale; with the power form that
// fails only in the linear zero-intercept case.
inline bool gas_hump_condition_ok(const ModelParams& mp) {
    return !(mp.gas_p == 1.0 && mp.gas_g0 == 0.0);
}

inline double pool_scale(double theta, const ModelParams& mp) {
    return mp.k_bar * theta * theta;
}

// lambda^{+/-}(theta, v) = 2 lambda_bar (1 - Phi(z)), z = sqrt(2 g(v) / (v K^beta)).
// At v = 0 the tail limit applies: 0 when g(0) > 0, lambda_bar when g(0) = 0.
inline double lambda_endogenous(double theta, double v, const ModelParams& mp, Side side) {
    if (!(theta > 0.0)) throw std::invalid_argument("lambda_endogenous: theta must be positive");
    if (v < 0.0) throw std::invalid_argument("lambda_endogenous: v must be nonnegative");
    const double lb = (side == Side::buy) ? mp.lambda_minus_bar : mp.lambda_plus_bar;
    if (v == 0.0) return (gas_fee(0.0, mp) > 0.0) ? 0.0 : lb;
    const double depth = std::pow(pool_scale(theta, mp), mp.beta);
    const double z = std::sqrt(2.0 * gas_fee(v, mp) / (v * depth));
    return 2.0 * lb * (1.0 - normal_cdf(z));
}

inline double amm_position_value(double k, double p, double q) {
    const double ra = std::sqrt(k / q);
    const double rb = std::sqrt(k * q);
    return p * ra + rb;
}

// Proportional noise-fee yield on AMM inventory at pool scale K(theta).
inline double psi_noise_yield(double theta, double v, double p, double q_price,
                              const ModelParams& mp) {
    if (!(theta > 0.0)) throw std::invalid_argument("psi_noise_yield: theta must be positive");
    const double k = pool_scale(theta, mp);
    const double fee = expected_noise_fee_rate(q_price, k, mp.beta, mp.sigma_n,
                                               gas_fee(v, mp), mp.gamma);
    return fee / amm_position_value(k, p, q_price);
}

struct MarkNodes {
    std::vector<double> eps;
    std::vector<double> w;  // sums to 1
};

inline MarkNodes mark_nodes(const MarkDistribution& dist, double v) {
    MarkNodes n;
    switch (dist.family) {
        case MarkFamily::point_mass:
            if (dist.param < 0.0) throw std::invalid_argument("mark: point mass requires eps >= 0");
            n.eps = {dist.param};
            n.w = {1.0};
            break;
        case MarkFamily::half_normal: {
            if (dist.param < 0.0 || v < 0.0) throw std::invalid_argument("mark: half_normal scale invalid");
            const double s = std::sqrt(dist.param * v);
            const QuadratureRule& h = hermite64();
            const double norm = 1.0 / std::sqrt(pi);
            n.eps.reserve(h.x.size());
            n.w.reserve(h.x.size());
            for (size_t i = 0; i < h.x.size(); ++i) {
                n.eps.push_back(s * std::sqrt(2.0) * std::fabs(h.x[i]));
                n.w.push_back(h.w[i] * norm);
            }
            break;
        }
        case MarkFamily::exponential: {
            if (!(dist.param > 0.0)) throw std::invalid_argument("mark: exponential mean must be positive");
            const QuadratureRule& l = laguerre64();
            n.eps.reserve(l.x.size());
            n.w.reserve(l.x.size());
            for (size_t i = 0; i < l.x.size(); ++i) {
                n.eps.push_back(dist.param * l.x[i]);
                n.w.push_back(l.w[i]);
            }
            break;
        }
    }
    return n;
}

namespace detail {

// Everything the jump block of one side contributes, up to the requested
// derivative order (0: Phi, 1: Phi', 2: concavity pieces).
struct SideTerms {
    double lambda{0.0};
    double lambda_th{0.0};
    double lambda_thth{0.0};
    double G{0.0};   // E[(1+tJ)^{1-eta} - 1]
    double H{0.0};   // E[(J + t J_t)(1+tJ)^{-eta}]
    double Kf{0.0};  // E[(2J_t + t J_tt)(1+tJ)^{-eta} - eta (J + t J_t)^2 (1+tJ)^{-eta-1}]
    double A{0.0};   // E[(J + t J_t)^2 (1+tJ)^{-eta-1}]
    double Babs{0.0};  // E[|2J_t + t J_tt| (1+tJ)^{-eta}]
    double Cabs{0.0};  // E[|J + t J_t| (1+tJ)^{-eta}]
    bool admissible{true};
};

inline double effective_v(const ModelParams& mp, ObjectiveMode mode, double v) {
    return (mode == ObjectiveMode::baseline) ? mp.sigma * mp.sigma : v;
}

inline SideTerms side_terms(double theta, const ModelParams& mp, ObjectiveMode mode,
                            double v, const MarkDistribution& mark, Side side, int order) {
    SideTerms st;
    const double ev = effective_v(mp, mode, v);

    double u = 0.0, u_th = 0.0, u_thth = 0.0;
    if (mode == ObjectiveMode::extended) {
        st.lambda = lambda_endogenous(theta, v, mp, side);
        u = expected_overrun_ratio(pool_scale(theta, mp), v, mp.p_ref, mp.beta, mp.gamma,
                                   side, 1.0, mp.u_max);
        const bool clamped = (side == Side::buy) && u >= mp.u_max;
        if (!clamped && theta > 0.0) {
            u_th = (2.0 * mp.beta - 1.0) * u / theta;
            u_thth = (2.0 * mp.beta - 1.0) * (2.0 * mp.beta - 2.0) * u / (theta * theta);
        }
        if (order >= 1 && v > 0.0 && st.lambda > 0.0) {
            const double lb = (side == Side::buy) ? mp.lambda_minus_bar : mp.lambda_plus_bar;
            const double depth = std::pow(pool_scale(theta, mp), mp.beta);
            const double z = std::sqrt(2.0 * gas_fee(v, mp) / (v * depth));
            if (z < 40.0) {
                const double pz = normal_pdf(z);
                st.lambda_th = 2.0 * mp.beta * lb * pz * z / theta;
                st.lambda_thth = 2.0 * mp.beta * lb * pz * (z / (theta * theta))
                               * (mp.beta * z * z - (mp.beta + 1.0));
            }
        }
    } else {
        st.lambda = (side == Side::buy) ? mp.lambda_minus_bar : mp.lambda_plus_bar;
    }

    const MarkNodes nodes = mark_nodes(mark, ev);
    const double one_minus_eta = 1.0 - mp.eta;
    for (size_t i = 0; i < nodes.eps.size(); ++i) {
        const double m = (side == Side::buy) ? std::exp(mp.gamma + nodes.eps[i])
                                             : std::exp(-mp.gamma - nodes.eps[i]);
        const double j = jump_return_ext(m, u, mp.gamma, side);
        const double base = 1.0 + theta * j;
        if (!(base > 1e-14)) {
            st.admissible = false;
            return st;
        }
        const double w = nodes.w[i];
        st.G += w * (std::pow(base, one_minus_eta) - 1.0);
        if (order >= 1) {
            const JumpReturnDerivs du = jump_return_ext_derivs(m, u, mp.gamma, side);
            const double j_th = du.first * u_th;
            const double pm_eta = std::pow(base, -mp.eta);
            st.H += w * (j + theta * j_th) * pm_eta;
            if (order >= 2) {
                const double j_thth = du.second * u_th * u_th + du.first * u_thth;
                const double s1 = j + theta * j_th;
                const double pm_eta1 = pm_eta / base;
                st.Kf += w * ((2.0 * j_th + theta * j_thth) * pm_eta
                              - mp.eta * s1 * s1 * pm_eta1);
                st.A += w * s1 * s1 * pm_eta1;
                st.Babs += w * std::fabs(2.0 * j_th + theta * j_thth) * pm_eta;
                st.Cabs += w * std::fabs(s1) * pm_eta;
            }
        }
    }
    return st;
}

// psi and its theta-derivatives at Q = P = p_ref. With h = (2b-1) + b z^2,
// z = sqrt(2g/K^b)/sigma_N:
//   psi_t  = psi h / theta,
//   psi_tt = psi (h^2 - h - 2 b^2 z^2) / theta^2.
struct PsiTerms {
    double psi{0.0}, psi_th{0.0}, psi_thth{0.0};
};

inline PsiTerms psi_terms(double theta, double v, const ModelParams& mp) {
    PsiTerms pt;
    pt.psi = psi_noise_yield(theta, v, mp.p_ref, mp.p_ref, mp);
    const double depth = std::pow(pool_scale(theta, mp), mp.beta);
    const double z2 = 2.0 * gas_fee(v, mp) / (depth * mp.sigma_n * mp.sigma_n);
    const double h = (2.0 * mp.beta - 1.0) + mp.beta * z2;
    pt.psi_th = pt.psi * h / theta;
    pt.psi_thth = pt.psi * (h * h - h - 2.0 * mp.beta * mp.beta * z2) / (theta * theta);
    return pt;
}

} // namespace detail

// Drift objective; nullopt when theta is inadmissible (a quadrature node
// violates 1 + theta J > 0).
inline std::optional<double> phi_opt(double theta, const ModelParams& mp, ObjectiveMode mode,
                                     double v, const MarkDistribution& mark) {
    validate_params(mp);
    if (mode == ObjectiveMode::extended && !(theta > 0.0))
        throw std::invalid_argument("phi: extended mode requires theta > 0");

    const double ev = detail::effective_v(mp, mode, v);
    double value = mp.mu - mp.r_star * theta - 0.5 * mp.eta * ev;
    if (mode == ObjectiveMode::extended)
        value += theta * psi_noise_yield(theta, v, mp.p_ref, mp.p_ref, mp);

    for (Side side : {Side::buy, Side::sell}) {
        const detail::SideTerms st = detail::side_terms(theta, mp, mode, v, mark, side, 0);
        if (!st.admissible) return std::nullopt;
        if (st.lambda > 0.0) value += st.lambda / (1.0 - mp.eta) * st.G;
    }
    return value;
}

inline double phi(double theta, const ModelParams& mp, ObjectiveMode mode,
                  double v, const MarkDistribution& mark) {
    const auto val = phi_opt(theta, mp, mode, v, mark);
    if (!val) throw std::domain_error("phi: theta is inadmissible (1 + theta J <= 0 at a node)");
    return *val;
}

// Closed-form derivative Phi'(theta), assembled from lambda_theta, U_theta
// and the u-derivatives of J_ext.
inline std::optional<double> phi_prime_opt(double theta, const ModelParams& mp, ObjectiveMode mode,
                                           double v, const MarkDistribution& mark) {
    validate_params(mp);
    if (mode == ObjectiveMode::extended && !(theta > 0.0))
        throw std::invalid_argument("phi_prime: extended mode requires theta > 0");

    double value = -mp.r_star;
    if (mode == ObjectiveMode::extended) {
        const detail::PsiTerms pt = detail::psi_terms(theta, v, mp);
        value += pt.psi + theta * pt.psi_th;
    }
    for (Side side : {Side::buy, Side::sell}) {
        const detail::SideTerms st = detail::side_terms(theta, mp, mode, v, mark, side, 1);
        if (!st.admissible) return std::nullopt;
        if (st.lambda > 0.0) value += st.lambda * st.H;
        if (st.lambda_th != 0.0) value += st.lambda_th / (1.0 - mp.eta) * st.G;
    }
    return value;
}

inline double phi_prime(double theta, const ModelParams& mp, ObjectiveMode mode,
                        double v, const MarkDistribution& mark) {
    const auto val = phi_prime_opt(theta, mp, mode, v, mark);
    if (!val) throw std::domain_error("phi_prime: theta is inadmissible");
    return *val;
}

struct MaximizeResult {
    double theta_star{0.0};
    double phi_star{0.0};
    bool at_boundary{false};
};

namespace detail {

inline double golden_section_max(const std::function<double(double)>& f, double a, double b,
                                 double tol) {
    const double invphi = 0.6180339887498948482;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

} // namespace detail

// Scalar maximization of Phi over [theta_min, theta_max] restricted to the
// admissible set. Derivative bisection on the FOC where the usual concave
// sign pattern holds, with a grid + golden-section safeguard so boundary and
// non-concave cases resolve to the true maximum. Tolerance 1e-10 in theta.
inline MaximizeResult maximize_theta(const ModelParams& mp, ObjectiveMode mode,
                                     double v, const MarkDistribution& mark) {
    validate_params(mp);
    double lo = mp.theta_min;
    const double hi_req = mp.theta_max;
    if (mode == ObjectiveMode::extended && lo <= 0.0)
        throw std::invalid_argument("maximize_theta: extended mode requires theta_min > 0");

    auto admissible = [&](double th) { return phi_opt(th, mp, mode, v, mark).has_value(); };
    if (!admissible(lo)) throw std::runtime_error("maximize_theta: empty admissible set");

    // Upper admissible edge: scan, then bisect the transition.
    double hi = hi_req;
    if (!admissible(hi)) {
        const int n_scan = 256;
        double good = lo, bad = hi;
        for (int i = 1; i <= n_scan; ++i) {
            const double th = lo + (hi_req - lo) * static_cast<double>(i) / n_scan;
            if (admissible(th)) good = th;
            else { bad = th; break; }
        }
        for (int it = 0; it < 80 && bad - good > 1e-12 * std::max(1.0, bad); ++it) {
            const double mid = 0.5 * (good + bad);
            if (admissible(mid)) good = mid;
            else bad = mid;
        }
        hi = good;
    }

    auto f = [&](double th) {
        const auto val = phi_opt(th, mp, mode, v, mark);
        return val ? *val : -std::numeric_limits<double>::infinity();
    };

    MaximizeResult res;
    const double tol = 1e-10;
    if (hi - lo <= tol) {
        res.theta_star = lo;
        res.phi_star = f(lo);
        res.at_boundary = true;
        return res;
    }

    const double dlo = phi_prime_opt(lo, mp, mode, v, mark).value_or(0.0);
    const double dhi = phi_prime_opt(hi, mp, mode, v, mark).value_or(0.0);
    double cand;
    bool cand_boundary;
    if (dlo > 0.0 && dhi < 0.0) {
        double a = lo, b = hi;
        while (b - a > tol) {
            const double mid = 0.5 * (a + b);
            const double dm = phi_prime_opt(mid, mp, mode, v, mark).value_or(-1.0);
            if (dm > 0.0) a = mid;
            else b = mid;
        }
        cand = 0.5 * (a + b);
        cand_boundary = false;
    } else if (dlo <= 0.0 && dhi <= 0.0) {
        cand = lo;
        cand_boundary = true;
    } else if (dlo >= 0.0 && dhi >= 0.0) {
        cand = hi;
        cand_boundary = true;
    } else {
        // Phi' < 0 at lo and > 0 at hi: not concave, best endpoint wins.
        cand = (f(lo) >= f(hi)) ? lo : hi;
        cand_boundary = true;
    }

    // Safeguard scan against shapes the FOC logic cannot certify. The margin
    // keeps flat-top noise from displacing a bisection-localized optimum.
    double cand_val = f(cand);
    const double margin = 1e-10 * (1.0 + std::fabs(cand_val));
    const int n_grid = 128;
    int best_i = -1;
    double best_grid = cand_val;
    for (int i = 0; i <= n_grid; ++i) {
        const double th = lo + (hi - lo) * static_cast<double>(i) / n_grid;
        const double val = f(th);
        if (val > best_grid + margin) {
            best_grid = val;
            best_i = i;
        }
    }
    if (best_i >= 0) {
        const double a = lo + (hi - lo) * std::max(best_i - 1, 0) / static_cast<double>(n_grid);
        const double b = lo + (hi - lo) * std::min(best_i + 1, n_grid) / static_cast<double>(n_grid);
        double refined = detail::golden_section_max(f, a, b, tol);
        // Golden section localizes a flat top only to ~sqrt(eps); when the
        // bracket straddles the FOC sign change, polish with bisection.
        const auto da = phi_prime_opt(a, mp, mode, v, mark);
        const auto db = phi_prime_opt(b, mp, mode, v, mark);
        if (da && db && *da > 0.0 && *db < 0.0) {
            double aa = a, bb = b;
            while (bb - aa > tol) {
                const double mid = 0.5 * (aa + bb);
                const double dm = phi_prime_opt(mid, mp, mode, v, mark).value_or(-1.0);
                if (dm > 0.0) aa = mid;
                else bb = mid;
            }
            refined = 0.5 * (aa + bb);
        }
        if (f(refined) > cand_val + margin) {
            cand = refined;
            cand_val = f(refined);
            cand_boundary = false;
        }
    }

    if (std::fabs(cand - lo) <= 10.0 * tol) { cand = lo; cand_boundary = true; }
    if (std::fabs(cand - hi) <= 10.0 * tol) { cand = hi; cand_boundary = true; }
    res.theta_star = cand;
    res.phi_star = f(cand);
    res.at_boundary = cand_boundary;
    return res;
}

// Golden-section-only maximizer; kept separate so tests can cross-check the
// derivative-bisection path.
inline MaximizeResult maximize_theta_golden(const ModelParams& mp, ObjectiveMode mode,
                                            double v, const MarkDistribution& mark) {
    validate_params(mp);
    auto f = [&](double th) {
        const auto val = phi_opt(th, mp, mode, v, mark);
        return val ? *val : -std::numeric_limits<double>::infinity();
    };
    const double lo = mp.theta_min, hi = mp.theta_max;
    if (!phi_opt(lo, mp, mode, v, mark))
        throw std::runtime_error("maximize_theta_golden: empty admissible set");
    double cand = detail::golden_section_max(f, lo, hi, 1e-12);
    MaximizeResult res;
    res.theta_star = cand;
    if (f(lo) >= f(cand)) { res.theta_star = lo; }
    if (f(hi) > f(res.theta_star)) { res.theta_star = hi; }
    res.phi_star = f(res.theta_star);
    res.at_boundary = (res.theta_star == lo || res.theta_star == hi);
    return res;
}

// C = 1 / (rho - (1-eta) Phi*) under the transversality condition.
inline double value_constant(double /*theta_star*/, double phi_star, const ModelParams& mp) {
    const double denom = mp.rho - (1.0 - mp.eta) * phi_star;
    if (!(denom > 0.0))
        throw std::domain_error("value_constant: transversality rho > (1-eta) Phi* violated");
    return 1.0 / denom;
}

struct ConcavityReport {
    bool holds{false};
    double lhs{0.0};
    double rhs{0.0};
    double z2{0.0};        // z(theta, v)^2 for the lambda_thth sign
    double z2_bound{0.0};  // 1 + 1/beta
    bool active_region_ok{false};
};

// Sufficient condition for strict concavity of the extended objective:
// eta * sum lambda A  >  B + N. Ties at zero count as holding (the
// degenerate no-jump, linear-psi case).
inline ConcavityReport concavity_check(double theta, double v, const ModelParams& mp,
                                       const MarkDistribution& mark) {
    validate_params(mp);
    if (!(theta > 0.0)) throw std::invalid_argument("concavity_check: theta must be positive");
    ConcavityReport rep;
    const detail::PsiTerms pt = detail::psi_terms(theta, v, mp);
    double lhs = 0.0;
    double bterm = 0.0;
    double nterm = std::fabs(2.0 * pt.psi_th + theta * pt.psi_thth);
    for (Side side : {Side::buy, Side::sell}) {
        const detail::SideTerms st =
            detail::side_terms(theta, mp, ObjectiveMode::extended, v, mark, side, 2);
        if (!st.admissible) throw std::domain_error("concavity_check: theta is inadmissible");
        lhs += mp.eta * st.lambda * st.A;
        bterm += st.lambda * st.Babs;
        nterm += 2.0 * std::fabs(st.lambda_th) * st.Cabs;
        nterm += std::fabs(st.lambda_thth / (1.0 - mp.eta)) * std::fabs(st.G);
    }
    rep.lhs = lhs;
    rep.rhs = bterm + nterm;
    rep.holds = lhs >= rep.rhs;
    const double depth = std::pow(pool_scale(theta, mp), mp.beta);
    rep.z2 = (v > 0.0) ? 2.0 * gas_fee(v, mp) / (v * depth) : std::numeric_limits<double>::infinity();
    rep.z2_bound = 1.0 + 1.0 / mp.beta;
    rep.active_region_ok = rep.z2 <= rep.z2_bound;
    return rep;
}

struct ThetaCurvePoint {
    double v{0.0};
    double theta_star{0.0};
    double phi_star{0.0};
    bool at_boundary{false};
    bool concavity_holds{false};
    bool buy_u_clamped{false};  // buy-side overrun ratio sits at u_max here
};

struct ThetaCurve {
    std::vector<ThetaCurvePoint> points;
    size_t argmax_index{0};
    double v_argmax{0.0};
    std::string segmentation;  // e.g. "rise,fall"; "flat" when nothing moves
};

// theta*(v) over a sorted positive grid, extended mode. Segmentation labels
// the sequence of strict moves (flat stretches do not break a run).
inline ThetaCurve theta_star_curve(const std::vector<double>& v_grid, const ModelParams& mp,
                                   const MarkDistribution& mark) {
    if (v_grid.empty()) throw std::invalid_argument("theta_star_curve: empty grid");
    for (size_t i = 0; i < v_grid.size(); ++i) {
        if (!(v_grid[i] > 0.0)) throw std::invalid_argument("theta_star_curve: grid must be positive");
        if (i > 0 && !(v_grid[i] > v_grid[i - 1]))
            throw std::invalid_argument("theta_star_curve: grid must be sorted ascending");
    }
    ThetaCurve curve;
    curve.points.reserve(v_grid.size());
    for (double v : v_grid) {
        const MaximizeResult r = maximize_theta(mp, ObjectiveMode::extended, v, mark);
        ThetaCurvePoint pt;
        pt.v = v;
        pt.theta_star = r.theta_star;
        pt.phi_star = r.phi_star;
        pt.at_boundary = r.at_boundary;
        pt.concavity_holds = concavity_check(r.theta_star, v, mp, mark).holds;
        pt.buy_u_clamped = expected_overrun_ratio(pool_scale(r.theta_star, mp), v, mp.p_ref,
                                                  mp.beta, mp.gamma, Side::buy, 1.0,
                                                  mp.u_max) >= mp.u_max;
        curve.points.push_back(pt);
    }
    double best = curve.points[0].theta_star;
    for (size_t i = 1; i < curve.points.size(); ++i) {
        if (curve.points[i].theta_star > best) {
            best = curve.points[i].theta_star;
            curve.argmax_index = i;
        }
    }
    curve.v_argmax = curve.points[curve.argmax_index].v;

    const double move_tol = 1e-9;
    int last = 0;
    for (size_t i = 1; i < curve.points.size(); ++i) {
        const double d = curve.points[i].theta_star - curve.points[i - 1].theta_star;
        const int dir = (d > move_tol) ? 1 : (d < -move_tol ? -1 : 0);
        if (dir == 0 || dir == last) continue;
        if (!curve.segmentation.empty()) curve.segmentation += ",";
        curve.segmentation += (dir > 0) ? "rise" : "fall";
        last = dir;
    }
    if (curve.segmentation.empty() && curve.points.size() > 1) curve.segmentation = "flat";
    return curve;
}

// Implicit-function slope of the interior FOC: d theta*/dv = -F_v / F_theta,
// F = Phi', with central differences on the closed-form derivative.
inline double implicit_theta_slope(double theta_star, double v, const ModelParams& mp,
                                   const MarkDistribution& mark) {
    const double hv = std::max(1e-6, 1e-4 * v);
    const double ht = std::max(1e-7, 1e-5 * theta_star);
    const double f_v = (phi_prime(theta_star, mp, ObjectiveMode::extended, v + hv, mark)
                      - phi_prime(theta_star, mp, ObjectiveMode::extended, v - hv, mark)) / (2.0 * hv);
    const double f_t = (phi_prime(theta_star + ht, mp, ObjectiveMode::extended, v, mark)
                      - phi_prime(theta_star - ht, mp, ObjectiveMode::extended, v, mark)) / (2.0 * ht);
    return -f_v / f_t;
}

} // namespace ammlab
