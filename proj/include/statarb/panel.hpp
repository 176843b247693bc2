#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "statarb/contracts.hpp"
#include "statarb/data.hpp"
#include "statarb/time.hpp"

namespace statarb {

// Minute-grid matrix of XBT-denominated close prices. Columns are ordered
// by symbol name so identical inputs always produce identical layouts.
class AlignedPanel {
public:
    AlignedPanel() = default;
    AlignedPanel(Timestamp start, std::size_t length, std::vector<SymbolId> symbols);

    Timestamp start() const { return start_; }
    Timestamp end() const { return start_ + static_cast<std::int64_t>(length_ - 1); }
    std::size_t length() const { return length_; }
    Timestamp ts_at(std::size_t row) const { return start_ + static_cast<std::int64_t>(row); }

    // Row index of ts; throws if off the grid.
    std::size_t row_of(Timestamp ts) const;

    const std::vector<SymbolId>& symbols() const { return symbols_; }
    std::size_t n_symbols() const { return symbols_.size(); }
    std::size_t column_of(const SymbolId& sym) const;
    bool has_symbol(const SymbolId& sym) const;

    const std::vector<double>& column(std::size_t c) const { return values_[c]; }
    const std::vector<double>& column(const SymbolId& sym) const {
        return values_[column_of(sym)];
    }
    double value(std::size_t row, std::size_t col) const { return values_[col][row]; }

    bool observed(std::size_t row, std::size_t col) const { return observed_[col][row] != 0; }
    // Fraction of cells carried forward rather than observed.
    double fill_fraction() const;

    void set(std::size_t row, std::size_t col, double value, bool is_observed);

    // View over rows [first, last] as a new panel (copies data).
    AlignedPanel slice(std::size_t first_row, std::size_t last_row) const;

private:
    Timestamp start_{};
    std::size_t length_ = 0;
    std::vector<SymbolId> symbols_;
    std::vector<std::vector<double>> values_;         // [col][row]
    std::vector<std::vector<std::uint8_t>> observed_;  // [col][row], 1 = observed
};

// XBT denomination of a close-price series per the contract payout kind:
// linear unchanged, quanto scaled by the multiplier, inverse mapped to the
// XBT value of one USD (reciprocal).
std::vector<double> denominate_to_xbt(const std::vector<PriceBar>& bars, const ContractSpec& spec);

// Builds the uniform minute grid [start, end], forward-filling missing
// minutes from the last observation. A symbol with no observation at or
// before `start` is a hard error.
AlignedPanel align_panel(const std::map<SymbolId, std::vector<PriceBar>>& bars,
                         const std::map<SymbolId, ContractSpec>& specs, Timestamp start,
                         Timestamp end);

struct WalkForwardWindow {
    Timestamp formation_start;
    Timestamp formation_end;  // == trading_start
    Timestamp trading_start;
    Timestamp trading_end;
};

// Rolling formation/trading windows: the first formation starts at
// range_start, each window advances by the trading length, and the last
// trading_end does not pass range_end.
std::vector<WalkForwardWindow> walk_forward_windows(Timestamp range_start, Timestamp range_end,
                                                    int formation_days, int trading_days);

}  // namespace statarb
