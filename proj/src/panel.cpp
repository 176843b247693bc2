#include "statarb/panel.hpp"

#include <algorithm>

#include "statarb/errors.hpp"

namespace statarb {

AlignedPanel::AlignedPanel(Timestamp start, std::size_t length, std::vector<SymbolId> symbols)
    : start_(start), length_(length), symbols_(std::move(symbols)) {
    std::sort(symbols_.begin(), symbols_.end());
    values_.assign(symbols_.size(), std::vector<double>(length_, 0.0));
    observed_.assign(symbols_.size(), std::vector<std::uint8_t>(length_, 0));
}

std::size_t AlignedPanel::row_of(Timestamp ts) const {
    const std::int64_t off = ts - start_;
    if (off < 0 || off >= static_cast<std::int64_t>(length_))
        throw DegenerateInputError("timestamp off the panel grid: " + format_timestamp(ts));
    return static_cast<std::size_t>(off);
}

std::size_t AlignedPanel::column_of(const SymbolId& sym) const {
    auto it = std::lower_bound(symbols_.begin(), symbols_.end(), sym);
    if (it == symbols_.end() || *it != sym)
        throw DegenerateInputError("symbol not in panel: " + sym);
    return static_cast<std::size_t>(it - symbols_.begin());
}

bool AlignedPanel::has_symbol(const SymbolId& sym) const {
    return std::binary_search(symbols_.begin(), symbols_.end(), sym);
}

double AlignedPanel::fill_fraction() const {
    if (length_ == 0 || symbols_.empty()) return 0.0;
    std::size_t filled = 0;
    for (const auto& col : observed_)
        for (std::uint8_t o : col)
            if (!o) ++filled;
    return static_cast<double>(filled) / static_cast<double>(length_ * symbols_.size());
}

void AlignedPanel::set(std::size_t row, std::size_t col, double value, bool is_observed) {
    values_[col][row] = value;
    observed_[col][row] = is_observed ? 1 : 0;
}

AlignedPanel AlignedPanel::slice(std::size_t first_row, std::size_t last_row) const {
    if (first_row > last_row || last_row >= length_)
        throw DegenerateInputError("panel slice out of range");
    AlignedPanel out(ts_at(first_row), last_row - first_row + 1, symbols_);
    for (std::size_t c = 0; c < symbols_.size(); ++c)
        for (std::size_t r = first_row; r <= last_row; ++r)
            out.set(r - first_row, c, values_[c][r], observed_[c][r] != 0);
    return out;
}

std::vector<double> denominate_to_xbt(const std::vector<PriceBar>& bars,
                                      const ContractSpec& spec) {
    std::vector<double> out;
    out.reserve(bars.size());
    for (const auto& b : bars) out.push_back(spec.denominate_close(b.close));
    return out;
}

AlignedPanel align_panel(const std::map<SymbolId, std::vector<PriceBar>>& bars,
                         const std::map<SymbolId, ContractSpec>& specs, Timestamp start,
                         Timestamp end) {
    if (end < start) throw DegenerateInputError("align_panel: end before start");
    const std::size_t length = static_cast<std::size_t>(end - start) + 1;

    std::vector<SymbolId> symbols;
    for (const auto& [sym, series] : bars) symbols.push_back(sym);
    AlignedPanel panel(start, length, symbols);

    for (const auto& [sym, series] : bars) {
        auto spec_it = specs.find(sym);
        if (spec_it == specs.end()) throw ConfigError("no contract spec for symbol " + sym);
        const ContractSpec& spec = spec_it->second;
        const std::size_t col = panel.column_of(sym);

        // Last observation at or before `start` seeds the fill value.
        double last = 0.0;
        bool have_last = false;
        std::size_t i = 0;
        while (i < series.size() && series[i].ts <= start) {
            last = spec.denominate_close(series[i].close);
            have_last = true;
            ++i;
        }
        if (!have_last)
            throw DegenerateInputError("symbol " + sym + " has no data at or before " +
                                       format_timestamp(start));

        // i sits just past the bar used for row 0; walk the grid forward.
        bool row0_observed = (i > 0 && series[i - 1].ts == start);
        panel.set(0, col, last, row0_observed);
        for (std::size_t row = 1; row < length; ++row) {
            const Timestamp ts = start + static_cast<std::int64_t>(row);
            bool observed = false;
            while (i < series.size() && series[i].ts <= ts) {
                if (series[i].ts == ts) observed = true;
                last = spec.denominate_close(series[i].close);
                ++i;
            }
            panel.set(row, col, last, observed);
        }
    }
    return panel;
}

std::vector<WalkForwardWindow> walk_forward_windows(Timestamp range_start, Timestamp range_end,
                                                    int formation_days, int trading_days) {
    if (formation_days < 1 || trading_days < 1)
        throw ConfigError("walk_forward_windows: window lengths must be >= 1 day");
    const std::int64_t formation = static_cast<std::int64_t>(formation_days) * kMinutesPerDay;
    const std::int64_t trading = static_cast<std::int64_t>(trading_days) * kMinutesPerDay;

    std::vector<WalkForwardWindow> windows;
    for (Timestamp fs = range_start;; fs = fs + trading) {
        WalkForwardWindow w;
        w.formation_start = fs;
        w.formation_end = fs + formation;
        w.trading_start = w.formation_end;
        w.trading_end = w.trading_start + trading;
        if (w.trading_end > range_end) break;
        windows.push_back(w);
    }
    if (windows.empty())
        throw DegenerateInputError("range too short for one formation+trading window");
    return windows;
}

}  // namespace statarb
