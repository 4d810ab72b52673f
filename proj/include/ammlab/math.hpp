// Scalar special functions and fixed-node quadrature rules used across the
// library: standard-normal pdf/cdf, the regularized incomplete beta function
// (for F-test p-values), and Gauss-Hermite / Gauss-Laguerre node tables.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ammlab {

inline constexpr double pi = 3.14159265358979323846;

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace detail {

// Continued-fraction kernel for the incomplete beta function (modified
// Lentz), converges for x < (a+1)/(a+b+2).
inline double betacf(double a, double b, double x) {
    constexpr int max_it = 300;
    constexpr double eps = 1e-16;
    constexpr double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_it; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("betacf: continued fraction did not converge");
}

} // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ibeta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b)
                       + a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * detail::betacf(a, b, x) / a;
    return 1.0 - bt * detail::betacf(b, a, 1.0 - x) / b;
}

// Upper tail P(F > f) for an F(d1, d2) variate.
inline double f_distribution_sf(double f, double d1, double d2) {
    if (f <= 0.0) return 1.0;
    return regularized_incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

struct QuadratureRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Hermite rule: integrates exp(-x^2) f(x) over R exactly for
// polynomials up to degree 2n-1. Newton refinement on the orthonormal
// recurrence; nodes come out in decreasing |x| pairs.
inline QuadratureRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n >= 1 required");
    QuadratureRule q;
    q.x.assign(n, 0.0);
    q.w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * q.x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * q.x[1];
        } else {
            z = 2.0 * z - q.x[i - 2];
        }
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = std::pow(pi, -0.25);
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) <= 1e-15 * std::max(1.0, std::fabs(z))) break;
        }
        q.x[i] = z;
        q.x[n - 1 - i] = -z;
        q.w[i] = 2.0 / (pp * pp);
        q.w[n - 1 - i] = q.w[i];
    }
    return q;
}

// Gauss-Laguerre rule (weight exp(-x) on [0, inf)).
inline QuadratureRule gauss_laguerre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_laguerre: n >= 1 required");
    QuadratureRule q;
    q.x.assign(n, 0.0);
    q.w.assign(n, 0.0);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            z = 3.0 / (1.0 + 2.4 * n);
        } else if (i == 1) {
            z += 15.0 / (1.0 + 2.5 * n);
        } else {
            const double ai = i - 1;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - q.x[i - 2]);
        }
        double p1 = 1.0, p2 = 0.0, pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            p1 = 1.0;
            p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (p1 - p2) / z;
            const double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) <= 1e-15 * std::max(1.0, std::fabs(z))) break;
        }
        q.x[i] = z;
        q.w[i] = -1.0 / (pp * n * p2);
    }
    return q;
}

// Shared 64-node tables; built once.
inline const QuadratureRule& hermite64() {
    static const QuadratureRule q = gauss_hermite(64);
    return q;
}

inline const QuadratureRule& laguerre64() {
    static const QuadratureRule q = gauss_laguerre(64);
    return q;
}

} // namespace ammlab
