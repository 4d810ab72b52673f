// Empirical pipeline over trade streams: profitability classification
// against fee-adjusted CEX prices, rolling volatility, window aggregation,
// buy/sell asymmetry rates, and Granger-causality F-tests.
//
// OLS is done in-module by normal equations with an explicit rank check;
// p-values come from the regularized incomplete beta.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "math.hpp"
#include "wealth_sim.hpp"

namespace ammlab {

struct ClassifiedTrade {
    TradeRecord rec;
    bool profitable{false};
    double reference_price{0.0};  // fee-adjusted CEX price used
};

// Sell-to-AMM (delta_a > 0): profitable iff dA (Q - P e^{+gamma_cex}) > gas.
// Buy-from-AMM (delta_a < 0): profitable iff |dA| (P e^{-gamma_cex} - Q) > gas,
// with Q = |delta_b / delta_a| the fee-inclusive execution price.
inline ClassifiedTrade classify_trade(const TradeRecord& rec, double p_ref,
                                      double gamma_cex, double gas) {
    if (rec.delta_a == 0.0) throw std::invalid_argument("classify_trade: zero-size trade");
    if (!(p_ref > 0.0)) throw std::invalid_argument("classify_trade: p_ref must be positive");
    ClassifiedTrade ct;
    ct.rec = rec;
    const double q = std::fabs(rec.delta_b / rec.delta_a);
    if (rec.delta_a > 0.0) {
        ct.reference_price = p_ref * std::exp(gamma_cex);
        ct.profitable = rec.delta_a * (q - ct.reference_price) - gas > 0.0;
    } else {
        ct.reference_price = p_ref * std::exp(-gamma_cex);
        ct.profitable = -rec.delta_a * (ct.reference_price - q) - gas > 0.0;
    }
    return ct;
}

// Rolling standard deviation of log returns over a trailing window of
// `window` returns, population convention. Output element i belongs to
// prices[i + window].
inline std::vector<double> realized_volatility(const std::vector<double>& prices, size_t window) {
    if (window < 2) throw std::invalid_argument("realized_volatility: window >= 2 required");
    if (prices.size() < window + 1)
        throw std::invalid_argument("realized_volatility: insufficient data");
    std::vector<double> rets(prices.size() - 1);
    for (size_t i = 0; i + 1 < prices.size(); ++i) {
        if (!(prices[i] > 0.0) || !(prices[i + 1] > 0.0))
            throw std::invalid_argument("realized_volatility: prices must be positive");
        rets[i] = std::log(prices[i + 1] / prices[i]);
    }
    std::vector<double> out;
    out.reserve(rets.size() - window + 1);
    for (size_t i = window; i <= rets.size(); ++i) {
        double mean = 0.0;
        for (size_t j = i - window; j < i; ++j) mean += rets[j];
        mean /= static_cast<double>(window);
        double var = 0.0;
        for (size_t j = i - window; j < i; ++j) {
            const double d = rets[j] - mean;
            var += d * d;
        }
        out.push_back(std::sqrt(var / static_cast<double>(window)));
    }
    return out;
}

struct WindowAggregate {
    double t_start{0.0};
    double t_end{0.0};
    double realized_vol{0.0};
    double total_volume{0.0};        // |delta_b| summed, B units
    double unprofitable_volume{0.0};
    long n_buy{0}, n_sell{0};
    long n_profitable{0}, n_unprofitable{0};
    long n_buy_profitable{0}, n_sell_profitable{0};
    double mean_gas{0.0};
};

struct PricePoint {
    double t{0.0};
    double p{0.0};
};

// Fixed-length windows anchored at t = 0; intervals without trades are still
// emitted (zero volumes) so the series is gap-free for the causality tests.
inline std::vector<WindowAggregate> aggregate_windows(const std::vector<ClassifiedTrade>& trades,
                                                      const std::vector<PricePoint>& prices,
                                                      double interval) {
    if (!(interval > 0.0)) throw std::invalid_argument("aggregate_windows: interval must be positive");
    for (size_t i = 1; i < trades.size(); ++i)
        if (trades[i].rec.t < trades[i - 1].rec.t)
            throw std::invalid_argument("aggregate_windows: trades must be sorted by time");
    for (size_t i = 1; i < prices.size(); ++i)
        if (prices[i].t < prices[i - 1].t)
            throw std::invalid_argument("aggregate_windows: prices must be sorted by time");

    double t_max = 0.0;
    if (!trades.empty()) t_max = std::max(t_max, trades.back().rec.t);
    if (!prices.empty()) t_max = std::max(t_max, prices.back().t);
    const size_t n_win = static_cast<size_t>(std::floor(t_max / interval)) + 1;

    std::vector<WindowAggregate> out(n_win);
    std::vector<long> gas_counts(n_win, 0);
    for (size_t w = 0; w < n_win; ++w) {
        out[w].t_start = static_cast<double>(w) * interval;
        out[w].t_end = out[w].t_start + interval;
    }
    for (const auto& ct : trades) {
        const size_t w = std::min(static_cast<size_t>(ct.rec.t / interval), n_win - 1);
        auto& agg = out[w];
        const double vol = std::fabs(ct.rec.delta_b);
        agg.total_volume += vol;
        if (!ct.profitable) {
            agg.unprofitable_volume += vol;
            ++agg.n_unprofitable;
        } else {
            ++agg.n_profitable;
        }
        if (ct.rec.side == Side::buy) {
            ++agg.n_buy;
            if (ct.profitable) ++agg.n_buy_profitable;
        } else {
            ++agg.n_sell;
            if (ct.profitable) ++agg.n_sell_profitable;
        }
        agg.mean_gas += ct.rec.gas;
        ++gas_counts[w];
    }
    for (size_t w = 0; w < n_win; ++w)
        if (gas_counts[w] > 0) out[w].mean_gas /= static_cast<double>(gas_counts[w]);

    // Per-window realized volatility from the price samples inside it.
    size_t idx = 0;
    for (size_t w = 0; w < n_win; ++w) {
        std::vector<double> ps;
        while (idx < prices.size() && prices[idx].t < out[w].t_end) {
            ps.push_back(prices[idx].p);
            ++idx;
        }
        if (ps.size() >= 3) {
            const auto vols = realized_volatility(ps, ps.size() - 1);
            out[w].realized_vol = vols.back();
        }
    }
    return out;
}

struct AsymmetryRow {
    double vol_lo{0.0};
    double vol_hi{0.0};
    Side side{Side::none};
    long n{0};
    long n_profitable{0};
    double rate{0.0};
};

// Per-(volatility bucket, side) profitability rates; each trade inherits the
// realized volatility of its aggregation window.
inline std::vector<AsymmetryRow> asymmetry_report(const std::vector<ClassifiedTrade>& trades,
                                                  const std::vector<WindowAggregate>& windows,
                                                  const std::vector<double>& bucket_edges) {
    if (bucket_edges.size() < 2) throw std::invalid_argument("asymmetry_report: need >= 2 bucket edges");
    for (size_t i = 1; i < bucket_edges.size(); ++i)
        if (!(bucket_edges[i] > bucket_edges[i - 1]))
            throw std::invalid_argument("asymmetry_report: bucket edges must be increasing");
    if (windows.empty()) throw std::invalid_argument("asymmetry_report: empty windows");

    const size_t n_buckets = bucket_edges.size() - 1;
    std::vector<AsymmetryRow> rows(2 * n_buckets);
    for (size_t b = 0; b < n_buckets; ++b) {
        for (int s = 0; s < 2; ++s) {
            auto& r = rows[2 * b + s];
            r.vol_lo = bucket_edges[b];
            r.vol_hi = bucket_edges[b + 1];
            r.side = (s == 0) ? Side::buy : Side::sell;
        }
    }
    const double interval = windows[0].t_end - windows[0].t_start;
    for (const auto& ct : trades) {
        const size_t w = std::min(static_cast<size_t>(ct.rec.t / interval), windows.size() - 1);
        const double vol = windows[w].realized_vol;
        if (vol < bucket_edges.front() || vol >= bucket_edges.back()) continue;
        const size_t b = static_cast<size_t>(
            std::upper_bound(bucket_edges.begin(), bucket_edges.end(), vol) - bucket_edges.begin() - 1);
        auto& r = rows[2 * b + ((ct.rec.side == Side::buy) ? 0 : 1)];
        ++r.n;
        if (ct.profitable) ++r.n_profitable;
    }
    for (auto& r : rows)
        if (r.n > 0) r.rate = static_cast<double>(r.n_profitable) / static_cast<double>(r.n);
    return rows;
}

namespace detail {

// Gaussian elimination with partial pivoting; throws on rank deficiency.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
    const size_t n = a.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-12)
            throw std::runtime_error("ols: rank-deficient design matrix");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

// Residual sum of squares of y on the given regressor rows (normal equations).
inline double ols_rss(const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
    const size_t n = rows.size();
    const size_t k = rows[0].size();
    std::vector<std::vector<double>> xtx(k, std::vector<double>(k, 0.0));
    std::vector<double> xty(k, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t a = 0; a < k; ++a) {
            xty[a] += rows[i][a] * y[i];
            for (size_t b = a; b < k; ++b) xtx[a][b] += rows[i][a] * rows[i][b];
        }
    }
    for (size_t a = 0; a < k; ++a)
        for (size_t b = 0; b < a; ++b) xtx[a][b] = xtx[b][a];
    const std::vector<double> beta = solve_linear(xtx, xty);
    double rss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (size_t a = 0; a < k; ++a) fit += rows[i][a] * beta[a];
        const double e = y[i] - fit;
        rss += e * e;
    }
    return rss;
}

} // namespace detail

struct GrangerResult {
    int lag{0};
    double f_stat{0.0};
    double p_value{1.0};
};

// For each lag L: restricted OLS of y on its own L lags vs unrestricted
// adding L lags of x; F = ((RSS_r - RSS_u)/L) / (RSS_u / (n - 2L - 1)).
inline std::vector<GrangerResult> granger_test(const std::vector<double>& x,
                                               const std::vector<double>& y, int max_lag) {
    if (x.size() != y.size()) throw std::invalid_argument("granger_test: series length mismatch");
    if (max_lag < 1) throw std::invalid_argument("granger_test: max_lag >= 1 required");
    const long t_len = static_cast<long>(y.size());
    if (t_len <= 3 * max_lag + 3) throw std::invalid_argument("granger_test: series too short");

    std::vector<GrangerResult> out;
    out.reserve(max_lag);
    for (int lag = 1; lag <= max_lag; ++lag) {
        const long n = t_len - lag;
        std::vector<std::vector<double>> rows_r(n), rows_u(n);
        std::vector<double> target(n);
        for (long i = 0; i < n; ++i) {
            const long t = lag + i;
            rows_r[i].reserve(1 + lag);
            rows_u[i].reserve(1 + 2 * lag);
            rows_r[i].push_back(1.0);
            rows_u[i].push_back(1.0);
            for (int l = 1; l <= lag; ++l) {
                rows_r[i].push_back(y[t - l]);
                rows_u[i].push_back(y[t - l]);
            }
            for (int l = 1; l <= lag; ++l) rows_u[i].push_back(x[t - l]);
            target[i] = y[t];
        }
        const double rss_r = detail::ols_rss(rows_r, target);
        const double rss_u = detail::ols_rss(rows_u, target);
        const double df2 = static_cast<double>(n - 2 * lag - 1);
        GrangerResult res;
        res.lag = lag;
        res.f_stat = ((rss_r - rss_u) / lag) / (rss_u / df2);
        res.p_value = f_distribution_sf(res.f_stat, lag, df2);
        out.push_back(res);
    }
    return out;
}

} // namespace ammlab
