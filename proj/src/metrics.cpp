#include "statarb/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "statarb/errors.hpp"

namespace statarb {

void EquityCurve::validate() const {
    if (ts.empty() || ts.size() != equity.size())
        throw DegenerateInputError("equity curve: empty or ragged");
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (ts[i].minutes <= ts[i - 1].minutes)
            throw DegenerateInputError("equity curve: timestamps must strictly increase");
}

Drawdown max_drawdown(const EquityCurve& curve) {
    curve.validate();
    Drawdown dd;
    double peak = curve.equity.front();
    for (double eq : curve.equity) {
        peak = std::max(peak, eq);
        const double drop = peak - eq;
        if (drop > dd.xbt) {
            dd.xbt = drop;
            dd.fraction = peak > 0.0 ? drop / peak : 0.0;
        }
    }
    return dd;
}

std::optional<double> sharpe(const std::vector<double>& period_returns, int periods_per_year,
                             double risk_free_per_period) {
    if (period_returns.size() < 2) return std::nullopt;
    const double n = static_cast<double>(period_returns.size());
    double mean = 0.0;
    for (double r : period_returns) mean += r;
    mean /= n;
    double m2 = 0.0;
    for (double r : period_returns) m2 += (r - mean) * (r - mean);
    const double sd = std::sqrt(m2 / (n - 1.0));
    if (!(sd > 0.0)) return std::nullopt;
    return (mean - risk_free_per_period) / sd * std::sqrt(static_cast<double>(periods_per_year));
}

std::optional<double> romad(const EquityCurve& curve) {
    const Drawdown dd = max_drawdown(curve);
    if (!(dd.fraction > 0.0)) return std::nullopt;
    const double total = curve.equity.back() / curve.initial_capital - 1.0;
    return total / dd.fraction;
}

std::vector<MonthlyReturn> monthly_returns(const EquityCurve& curve) {
    curve.validate();
    std::vector<MonthlyReturn> out;
    CivilDateTime first = civil_from_timestamp(curve.ts.front());
    int year = first.year, month = first.month;
    // The opening month is partial unless the curve starts at its first minute.
    bool partial = !(first.day == 1 && first.hour == 0 && first.minute == 0);
    double month_start_eq = curve.equity.front();

    for (std::size_t i = 1; i < curve.ts.size(); ++i) {
        CivilDateTime c = civil_from_timestamp(curve.ts[i]);
        if (c.year != year || c.month != month) {
            out.push_back({year, month, curve.equity[i - 1] / month_start_eq - 1.0, partial});
            year = c.year;
            month = c.month;
            partial = false;
            month_start_eq = curve.equity[i - 1];
        }
    }
    // The closing month is partial unless the curve reaches the last minute.
    CivilDateTime last = civil_from_timestamp(curve.ts.back());
    Timestamp next_month = timestamp_from_civil(last.month == 12 ? last.year + 1 : last.year,
                                                last.month == 12 ? 1 : last.month + 1, 1);
    const bool closing_partial = partial || curve.ts.back().minutes != next_month.minutes - 1;
    out.push_back({year, month, curve.equity.back() / month_start_eq - 1.0, closing_partial});
    return out;
}

EquityCurve buy_and_hold_baseline(const AlignedPanel& panel, const std::vector<SymbolId>& symbols,
                                  double capital, double taker_fee_rate) {
    if (symbols.empty()) throw ConfigError("buy_and_hold_baseline: no symbols");
    const int len = panel.length();
    if (len < 2) throw DegenerateInputError("buy_and_hold_baseline: panel too short");

    // Units of each denominated series bought with an equal capital split.
    const double per_leg = capital / static_cast<double>(symbols.size());
    std::vector<const std::vector<double>*> cols;
    std::vector<double> units;
    for (const auto& sym : symbols) {
        cols.push_back(&panel.column(sym));
        const double p0 = cols.back()->front();
        if (!(p0 > 0.0)) throw DegenerateInputError("buy_and_hold_baseline: nonpositive start price");
        units.push_back(per_leg / p0);
    }

    const double entry_fee = capital * taker_fee_rate;
    EquityCurve curve;
    curve.initial_capital = capital;
    curve.ts.reserve(static_cast<std::size_t>(len));
    curve.equity.reserve(static_cast<std::size_t>(len));
    for (int r = 0; r < len; ++r) {
        double value = 0.0;
        for (std::size_t k = 0; k < units.size(); ++k)
            value += units[k] * (*cols[k])[static_cast<std::size_t>(r)];
        double eq = capital + (value - capital) - entry_fee;
        if (r == len - 1) eq -= value * taker_fee_rate;  // liquidation
        curve.ts.push_back(Timestamp{panel.start().minutes + r});
        curve.equity.push_back(eq);
    }
    return curve;
}

MetricsReport compute_metrics(const EquityCurve& curve, const std::vector<double>& period_returns,
                              int periods_per_year, double fee_pnl) {
    curve.validate();
    MetricsReport rep;
    rep.total_return = curve.equity.back() / curve.initial_capital - 1.0;
    rep.max_dd = max_drawdown(curve);
    rep.romad = romad(curve);
    rep.monthly = monthly_returns(curve);
    rep.n_periods = static_cast<int>(period_returns.size());

    const double horizon_minutes =
        static_cast<double>(curve.ts.back().minutes - curve.ts.front().minutes);
    const double years = horizon_minutes / (365.0 * kMinutesPerDay);
    if (years > 0.0 && curve.equity.back() > 0.0)
        rep.annualized_return = std::pow(1.0 + rep.total_return, 1.0 / years) - 1.0;

    if (period_returns.size() >= 2) {
        double mean = 0.0;
        for (double r : period_returns) mean += r;
        mean /= static_cast<double>(period_returns.size());
        double m2 = 0.0;
        for (double r : period_returns) m2 += (r - mean) * (r - mean);
        rep.return_std = std::sqrt(m2 / (static_cast<double>(period_returns.size()) - 1.0));
        rep.sharpe_annualized = sharpe(period_returns, periods_per_year);
        rep.sharpe_raw = sharpe(period_returns, 1);
    }

    const double total_pnl = curve.equity.back() - curve.initial_capital;
    if (std::abs(total_pnl) > 1e-12) rep.commission_share = fee_pnl / total_pnl;
    return rep;
}

}  // namespace statarb
