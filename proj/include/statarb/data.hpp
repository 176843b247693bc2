#pragma once

#include <map>
#include <string>
#include <vector>

#include "statarb/contracts.hpp"
#include "statarb/time.hpp"

namespace statarb {

struct PriceBar {
    Timestamp ts;
    SymbolId symbol;
    double close = 0.0;   // quote units
    double volume = 0.0;
};

struct QuoteTick {
    Timestamp ts;
    SymbolId symbol;
    double bid_price = 0.0;
    double bid_size = 0.0;
    double ask_price = 0.0;
    double ask_size = 0.0;

    double mid() const { return 0.5 * (bid_price + ask_price); }
};

struct TradeTick {
    Timestamp ts;
    SymbolId symbol;
    double price = 0.0;
    double size = 0.0;
};

template <typename Row>
struct ParseResult {
    std::vector<Row> rows;
    std::size_t skipped = 0;  // malformed rows dropped (counted, not fatal)
};

// CSV readers for the documented schemas. Rows for other symbols are
// ignored; rows violating per-row invariants are skipped and counted.
// Missing file, wrong header, or non-monotone timestamps are hard errors.
//
//   bars:   timestamp,symbol,close,volume
//   quotes: timestamp,symbol,bid_price,bid_size,ask_price,ask_size
//   trades: timestamp,symbol,price,size
ParseResult<PriceBar> parse_bar_csv(const std::string& path, const ContractSpec& spec);
ParseResult<QuoteTick> parse_quote_csv(const std::string& path, const ContractSpec& spec);
ParseResult<TradeTick> parse_trade_csv(const std::string& path, const ContractSpec& spec);

// Single-pass variants splitting a mixed-symbol file across every spec in
// the map. Per-symbol row rules match the single-symbol readers.
std::map<SymbolId, std::vector<PriceBar>> parse_bars_grouped(
    const std::string& path, const std::map<SymbolId, ContractSpec>& specs,
    std::size_t* skipped = nullptr);
std::map<SymbolId, std::vector<QuoteTick>> parse_quotes_grouped(
    const std::string& path, const std::map<SymbolId, ContractSpec>& specs,
    std::size_t* skipped = nullptr);
std::map<SymbolId, std::vector<TradeTick>> parse_trades_grouped(
    const std::string& path, const std::map<SymbolId, ContractSpec>& specs,
    std::size_t* skipped = nullptr);

// Writers for the same schemas (used by the synth fixture generator).
void write_bar_csv(const std::string& path, const std::vector<PriceBar>& bars);
void write_quote_csv(const std::string& path, const std::vector<QuoteTick>& quotes);
void write_trade_csv(const std::string& path, const std::vector<TradeTick>& trades);

// Full per-symbol market data for one backtest run.
struct MarketData {
    std::map<SymbolId, ContractSpec> specs;
    std::map<SymbolId, std::vector<PriceBar>> bars;
    std::map<SymbolId, std::vector<QuoteTick>> quotes;
    std::map<SymbolId, std::vector<TradeTick>> trades;

    std::vector<SymbolId> symbols() const {
        std::vector<SymbolId> out;
        out.reserve(specs.size());
        for (const auto& [sym, spec] : specs) out.push_back(sym);
        return out;
    }
};

}  // namespace statarb
