// CSV emission and ingestion for the documented schemas:
//   trades.csv  (t, kind, side, delta_a, delta_b, fee, gas, cex_price, pnl)
//   market.csv  (t, p, v, q_pool, gas)
//   wealth.csv  (t, path_id, wealth)
// Floats print at 17 significant digits so fixed seeds give byte-identical
// files. Readers locate columns by header name and report row numbers on
// malformed input.
#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stats.hpp"
#include "wealth_sim.hpp"

namespace ammlab {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string kind_name(TraderKind k) {
    switch (k) {
        case TraderKind::arb_winner: return "arb_winner";
        case TraderKind::arb_overrun: return "arb_overrun";
        case TraderKind::noise: return "noise";
    }
    return "noise";
}

inline std::string side_name(Side s) {
    switch (s) {
        case Side::buy: return "buy";
        case Side::sell: return "sell";
        case Side::none: return "none";
    }
    return "none";
}

inline TraderKind parse_kind(const std::string& s, size_t row) {
    if (s == "arb_winner") return TraderKind::arb_winner;
    if (s == "arb_overrun") return TraderKind::arb_overrun;
    if (s == "noise") return TraderKind::noise;
    throw std::runtime_error("csv: row " + std::to_string(row) + ": unknown trader kind '" + s + "'");
}

inline Side parse_side(const std::string& s, size_t row) {
    if (s == "buy") return Side::buy;
    if (s == "sell") return Side::sell;
    if (s == "none") return Side::none;
    throw std::runtime_error("csv: row " + std::to_string(row) + ": unknown side '" + s + "'");
}

inline void write_trades_csv(const std::string& path, const std::vector<TradeRecord>& trades) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write " + path);
    out << "t,kind,side,delta_a,delta_b,fee,gas,cex_price,pnl\n";
    for (const auto& r : trades) {
        out << fmt17(r.t) << ',' << kind_name(r.kind) << ',' << side_name(r.side) << ','
            << fmt17(r.delta_a) << ',' << fmt17(r.delta_b) << ',' << fmt17(r.fee) << ','
            << fmt17(r.gas) << ',' << fmt17(r.cex_price) << ',' << fmt17(r.pnl) << '\n';
    }
}

inline void write_market_csv(const std::string& path, const std::vector<MarketSample>& samples) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write " + path);
    out << "t,p,v,q_pool,gas\n";
    for (const auto& s : samples) {
        out << fmt17(s.t) << ',' << fmt17(s.p) << ',' << fmt17(s.v) << ','
            << fmt17(s.q_pool) << ',' << fmt17(s.gas) << '\n';
    }
}

inline void write_wealth_csv(const std::string& path, const std::vector<WealthPath>& paths,
                             size_t stride = 1) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write " + path);
    out << "t,path_id,wealth\n";
    for (size_t id = 0; id < paths.size(); ++id) {
        const auto& p = paths[id];
        for (size_t k = 0; k < p.times.size(); k += stride) {
            out << fmt17(p.times[k]) << ',' << id << ',' << fmt17(p.wealth[k]) << '\n';
        }
        if ((p.times.size() - 1) % stride != 0)
            out << fmt17(p.times.back()) << ',' << id << ',' << fmt17(p.wealth.back()) << '\n';
    }
}

namespace detail {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // raw cells
    std::map<std::string, size_t> col;

    size_t column(const std::string& name, const std::string& path) const {
        auto it = col.find(name);
        if (it == col.end())
            throw std::runtime_error("csv: " + path + ": missing required column '" + name + "'");
        return it->second;
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    CsvTable t;
    std::string line;
    size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");
        if (row == 1) {
            t.header = cells;
            for (size_t i = 0; i < cells.size(); ++i) t.col[cells[i]] = i;
        } else {
            if (cells.size() != t.header.size())
                throw std::runtime_error("csv: " + path + ": row " + std::to_string(row) +
                                         ": expected " + std::to_string(t.header.size()) +
                                         " cells, got " + std::to_string(cells.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    if (t.header.empty()) throw std::runtime_error("csv: " + path + ": empty file");
    return t;
}

inline double cell_double(const std::string& s, size_t row, const std::string& path) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("csv: " + path + ": row " + std::to_string(row) +
                                 ": cannot parse number '" + s + "'");
    }
}

} // namespace detail

inline std::vector<TradeRecord> read_trades_csv(const std::string& path) {
    const auto t = detail::read_csv(path);
    const size_t ct = t.column("t", path), ck = t.column("kind", path), cs = t.column("side", path),
                 ca = t.column("delta_a", path), cb = t.column("delta_b", path),
                 cf = t.column("fee", path), cg = t.column("gas", path),
                 cp = t.column("cex_price", path), cn = t.column("pnl", path);
    std::vector<TradeRecord> out;
    out.reserve(t.rows.size());
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        const size_t row = i + 2;
        TradeRecord rec;
        rec.t = detail::cell_double(r[ct], row, path);
        rec.kind = parse_kind(r[ck], row);
        rec.side = parse_side(r[cs], row);
        rec.delta_a = detail::cell_double(r[ca], row, path);
        rec.delta_b = detail::cell_double(r[cb], row, path);
        rec.fee = detail::cell_double(r[cf], row, path);
        rec.gas = detail::cell_double(r[cg], row, path);
        rec.cex_price = detail::cell_double(r[cp], row, path);
        rec.pnl = detail::cell_double(r[cn], row, path);
        out.push_back(rec);
    }
    return out;
}

// Accepts any CSV with t and p columns (market.csv works as-is).
inline std::vector<PricePoint> read_prices_csv(const std::string& path) {
    const auto t = detail::read_csv(path);
    const size_t ct = t.column("t", path), cp = t.column("p", path);
    std::vector<PricePoint> out;
    out.reserve(t.rows.size());
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const size_t row = i + 2;
        out.push_back(PricePoint{detail::cell_double(t.rows[i][ct], row, path),
                                 detail::cell_double(t.rows[i][cp], row, path)});
    }
    return out;
}

} // namespace ammlab
