#include "statarb/data.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "statarb/errors.hpp"

namespace statarb {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

std::ifstream open_csv(const std::string& path, const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw DataFormatError("cannot open file: " + path);
    std::string header;
    if (!std::getline(in, header)) throw DataFormatError("empty file: " + path);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != expected_header)
        throw DataFormatError(path + ": header mismatch, expected '" + expected_header + "' got '" +
                              header + "'");
    return in;
}

void check_monotone(const std::string& path, Timestamp prev, Timestamp cur) {
    if (cur <= prev)
        throw DataFormatError(path + ": non-monotone timestamp at " + format_timestamp(cur));
}

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

ParseResult<PriceBar> parse_bar_csv(const std::string& path, const ContractSpec& spec) {
    auto in = open_csv(path, "timestamp,symbol,close,volume");
    ParseResult<PriceBar> result;
    Timestamp prev{INT64_MIN};
    bool have_prev = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() != 4 || f[1] != spec.symbol) {
            if (f.size() != 4) ++result.skipped;
            continue;
        }
        Timestamp ts;
        try {
            ts = parse_timestamp(f[0]);
        } catch (const DataFormatError&) {
            ++result.skipped;
            continue;
        }
        double close = 0.0, volume = 0.0;
        if (!parse_double(f[2], close) || !parse_double(f[3], volume) || close <= 0.0 ||
            volume < 0.0) {
            ++result.skipped;
            continue;
        }
        if (have_prev) check_monotone(path, prev, ts);
        prev = ts;
        have_prev = true;
        result.rows.push_back(PriceBar{ts, spec.symbol, close, volume});
    }
    return result;
}

ParseResult<QuoteTick> parse_quote_csv(const std::string& path, const ContractSpec& spec) {
    auto in = open_csv(path, "timestamp,symbol,bid_price,bid_size,ask_price,ask_size");
    ParseResult<QuoteTick> result;
    Timestamp prev{INT64_MIN};
    bool have_prev = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() != 6 || f[1] != spec.symbol) {
            if (f.size() != 6) ++result.skipped;
            continue;
        }
        Timestamp ts;
        try {
            ts = parse_timestamp(f[0]);
        } catch (const DataFormatError&) {
            ++result.skipped;
            continue;
        }
        QuoteTick q;
        q.ts = ts;
        q.symbol = spec.symbol;
        if (!parse_double(f[2], q.bid_price) || !parse_double(f[3], q.bid_size) ||
            !parse_double(f[4], q.ask_price) || !parse_double(f[5], q.ask_size)) {
            ++result.skipped;
            continue;
        }
        if (q.bid_price <= 0.0 || q.ask_price <= 0.0 || q.bid_size < 0.0 || q.ask_size < 0.0 ||
            q.bid_price > q.ask_price || !spec.on_tick_grid(q.bid_price) ||
            !spec.on_tick_grid(q.ask_price)) {
            ++result.skipped;
            continue;
        }
        if (have_prev) check_monotone(path, prev, ts);
        prev = ts;
        have_prev = true;
        result.rows.push_back(q);
    }
    return result;
}

ParseResult<TradeTick> parse_trade_csv(const std::string& path, const ContractSpec& spec) {
    auto in = open_csv(path, "timestamp,symbol,price,size");
    ParseResult<TradeTick> result;
    Timestamp prev{INT64_MIN};
    bool have_prev = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() != 4 || f[1] != spec.symbol) {
            if (f.size() != 4) ++result.skipped;
            continue;
        }
        Timestamp ts;
        try {
            ts = parse_timestamp(f[0]);
        } catch (const DataFormatError&) {
            ++result.skipped;
            continue;
        }
        TradeTick t;
        t.ts = ts;
        t.symbol = spec.symbol;
        if (!parse_double(f[2], t.price) || !parse_double(f[3], t.size) || t.price <= 0.0 ||
            t.size <= 0.0 || !spec.on_tick_grid(t.price)) {
            ++result.skipped;
            continue;
        }
        // Trades are minute binned; multiple prints within a minute share the
        // timestamp, so only require non-decreasing order here.
        if (have_prev && ts < prev)
            throw DataFormatError(path + ": non-monotone timestamp at " + format_timestamp(ts));
        prev = ts;
        have_prev = true;
        result.rows.push_back(t);
    }
    return result;
}

namespace {

// Shared walk for the grouped readers: hands each well-formed (ts, fields)
// row for a known symbol to `row_fn`, which returns false to skip it.
template <typename RowFn>
void scan_grouped(const std::string& path, const std::string& header, std::size_t n_fields,
                  const std::map<SymbolId, ContractSpec>& specs, std::size_t* skipped,
                  bool strict_monotone, RowFn&& row_fn) {
    auto in = open_csv(path, header);
    std::map<SymbolId, Timestamp> prev;
    std::size_t skip_count = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() != n_fields) {
            ++skip_count;
            continue;
        }
        auto spec_it = specs.find(f[1]);
        if (spec_it == specs.end()) continue;
        Timestamp ts;
        try {
            ts = parse_timestamp(f[0]);
        } catch (const DataFormatError&) {
            ++skip_count;
            continue;
        }
        if (!row_fn(spec_it->second, ts, f)) {
            ++skip_count;
            continue;
        }
        auto prev_it = prev.find(f[1]);
        if (prev_it != prev.end()) {
            if (strict_monotone ? ts <= prev_it->second : ts < prev_it->second)
                throw DataFormatError(path + ": non-monotone timestamp at " + format_timestamp(ts) +
                                      " for " + f[1]);
            prev_it->second = ts;
        } else {
            prev.emplace(f[1], ts);
        }
    }
    if (skipped != nullptr) *skipped = skip_count;
}

}  // namespace

std::map<SymbolId, std::vector<PriceBar>> parse_bars_grouped(
    const std::string& path, const std::map<SymbolId, ContractSpec>& specs, std::size_t* skipped) {
    std::map<SymbolId, std::vector<PriceBar>> out;
    scan_grouped(path, "timestamp,symbol,close,volume", 4, specs, skipped, true,
                 [&](const ContractSpec& spec, Timestamp ts, const std::vector<std::string>& f) {
                     double close = 0.0, volume = 0.0;
                     if (!parse_double(f[2], close) || !parse_double(f[3], volume) || close <= 0.0 ||
                         volume < 0.0)
                         return false;
                     out[spec.symbol].push_back(PriceBar{ts, spec.symbol, close, volume});
                     return true;
                 });
    return out;
}

std::map<SymbolId, std::vector<QuoteTick>> parse_quotes_grouped(
    const std::string& path, const std::map<SymbolId, ContractSpec>& specs, std::size_t* skipped) {
    std::map<SymbolId, std::vector<QuoteTick>> out;
    scan_grouped(path, "timestamp,symbol,bid_price,bid_size,ask_price,ask_size", 6, specs, skipped,
                 true,
                 [&](const ContractSpec& spec, Timestamp ts, const std::vector<std::string>& f) {
                     QuoteTick q;
                     q.ts = ts;
                     q.symbol = spec.symbol;
                     if (!parse_double(f[2], q.bid_price) || !parse_double(f[3], q.bid_size) ||
                         !parse_double(f[4], q.ask_price) || !parse_double(f[5], q.ask_size))
                         return false;
                     if (q.bid_price <= 0.0 || q.ask_price <= 0.0 || q.bid_size < 0.0 ||
                         q.ask_size < 0.0 || q.bid_price > q.ask_price ||
                         !spec.on_tick_grid(q.bid_price) || !spec.on_tick_grid(q.ask_price))
                         return false;
                     out[spec.symbol].push_back(q);
                     return true;
                 });
    return out;
}

std::map<SymbolId, std::vector<TradeTick>> parse_trades_grouped(
    const std::string& path, const std::map<SymbolId, ContractSpec>& specs, std::size_t* skipped) {
    std::map<SymbolId, std::vector<TradeTick>> out;
    scan_grouped(path, "timestamp,symbol,price,size", 4, specs, skipped, false,
                 [&](const ContractSpec& spec, Timestamp ts, const std::vector<std::string>& f) {
                     TradeTick t;
                     t.ts = ts;
                     t.symbol = spec.symbol;
                     if (!parse_double(f[2], t.price) || !parse_double(f[3], t.size) ||
                         t.price <= 0.0 || t.size <= 0.0 || !spec.on_tick_grid(t.price))
                         return false;
                     out[spec.symbol].push_back(t);
                     return true;
                 });
    return out;
}

void write_bar_csv(const std::string& path, const std::vector<PriceBar>& bars) {
    std::ofstream out(path);
    if (!out) throw DataFormatError("cannot write file: " + path);
    out << "timestamp,symbol,close,volume\n";
    for (const auto& b : bars)
        out << format_timestamp(b.ts) << ',' << b.symbol << ',' << fmt_num(b.close) << ','
            << fmt_num(b.volume) << '\n';
}

void write_quote_csv(const std::string& path, const std::vector<QuoteTick>& quotes) {
    std::ofstream out(path);
    if (!out) throw DataFormatError("cannot write file: " + path);
    out << "timestamp,symbol,bid_price,bid_size,ask_price,ask_size\n";
    for (const auto& q : quotes)
        out << format_timestamp(q.ts) << ',' << q.symbol << ',' << fmt_num(q.bid_price) << ','
            << fmt_num(q.bid_size) << ',' << fmt_num(q.ask_price) << ',' << fmt_num(q.ask_size)
            << '\n';
}

void write_trade_csv(const std::string& path, const std::vector<TradeTick>& trades) {
    std::ofstream out(path);
    if (!out) throw DataFormatError("cannot write file: " + path);
    out << "timestamp,symbol,price,size\n";
    for (const auto& t : trades)
        out << format_timestamp(t.ts) << ',' << t.symbol << ',' << fmt_num(t.price) << ','
            << fmt_num(t.size) << '\n';
}

}  // namespace statarb
