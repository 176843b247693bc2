#pragma once

#include <optional>
#include <vector>

#include "statarb/panel.hpp"
#include "statarb/time.hpp"

namespace statarb {

struct EquityCurve {
    std::vector<Timestamp> ts;
    std::vector<double> equity;
    double initial_capital = 0.0;

    void validate() const;
};

struct Drawdown {
    double xbt = 0.0;
    double fraction = 0.0;  // relative to the peak it fell from
};

// Largest running-peak-to-trough decline. One forward pass; the O(n^2)
// pairwise definition is kept in the tests as the oracle.
Drawdown max_drawdown(const EquityCurve& curve);

// (mean - rf per period) / sample std, scaled by sqrt(periods_per_year).
// Zero variance leaves it undefined.
std::optional<double> sharpe(const std::vector<double>& period_returns, int periods_per_year,
                             double risk_free_per_period = 0.0);

// Total return over max drawdown, both as fractions; undefined without a
// drawdown.
std::optional<double> romad(const EquityCurve& curve);

struct MonthlyReturn {
    int year = 0;
    int month = 0;
    double ret = 0.0;
    bool partial = false;  // month not fully covered by the curve
};

std::vector<MonthlyReturn> monthly_returns(const EquityCurve& curve);

// Equal split of `capital` across the symbols, bought at the first panel
// value and marked every minute; taker fees charged on the way in and out.
EquityCurve buy_and_hold_baseline(const AlignedPanel& panel, const std::vector<SymbolId>& symbols,
                                  double capital, double taker_fee_rate = 0.00075);

struct MetricsReport {
    double total_return = 0.0;  // fraction of initial capital
    double annualized_return = 0.0;
    double return_std = 0.0;  // per-period sample std of the returns basis
    std::optional<double> sharpe_annualized;
    std::optional<double> sharpe_raw;
    Drawdown max_dd;
    std::optional<double> romad;
    std::vector<MonthlyReturn> monthly;
    std::optional<double> commission_share;  // fee P&L / total P&L
    int n_periods = 0;
};

// period_returns is the per-window (weekly) return basis for the Sharpe
// figures; fee_pnl is the cumulative signed fee cash flow (negative = cost).
MetricsReport compute_metrics(const EquityCurve& curve, const std::vector<double>& period_returns,
                              int periods_per_year, double fee_pnl);

}  // namespace statarb
