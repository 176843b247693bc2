#include "statarb/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "statarb/errors.hpp"

namespace statarb {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

// Fixed two-decimal pixel coordinates keep the SVGs byte-stable.
std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write report file: " + path);
    return out;
}

std::string spread_text(const SpreadDef& def) {
    std::vector<SpreadLeg> legs = def.legs;
    std::sort(legs.begin(), legs.end(),
              [](const SpreadLeg& a, const SpreadLeg& b) { return a.symbol < b.symbol; });
    std::string out;
    for (const auto& leg : legs) {
        if (!out.empty()) out += ' ';
        out += leg.symbol + ":" + fmt(leg.weight);
    }
    return out;
}

nlohmann::json metrics_json(const MetricsReport& m) {
    nlohmann::json j;
    j["total_return"] = m.total_return;
    j["annualized_return"] = m.annualized_return;
    j["return_std"] = m.return_std;
    j["sharpe_annualized"] = m.sharpe_annualized ? nlohmann::json(*m.sharpe_annualized)
                                                 : nlohmann::json(nullptr);
    j["sharpe_raw"] = m.sharpe_raw ? nlohmann::json(*m.sharpe_raw) : nlohmann::json(nullptr);
    j["max_drawdown_xbt"] = m.max_dd.xbt;
    j["max_drawdown_fraction"] = m.max_dd.fraction;
    j["romad"] = m.romad ? nlohmann::json(*m.romad) : nlohmann::json(nullptr);
    j["commission_share"] =
        m.commission_share ? nlohmann::json(*m.commission_share) : nlohmann::json(nullptr);
    j["n_periods"] = m.n_periods;
    j["monthly"] = nlohmann::json::array();
    for (const auto& mr : m.monthly)
        j["monthly"].push_back({{"year", mr.year},
                                {"month", mr.month},
                                {"return", mr.ret},
                                {"partial", mr.partial}});
    return j;
}

struct Frame {
    double w = 900, h = 420;
    double left = 64, right = 16, top = 18, bottom = 34;

    double plot_w() const { return w - left - right; }
    double plot_h() const { return h - top - bottom; }
};

void svg_open(std::ofstream& out, const Frame& f, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.w << "\" height=\"" << f.h
        << "\" viewBox=\"0 0 " << f.w << " " << f.h << "\">\n";
    out << "<rect width=\"" << f.w << "\" height=\"" << f.h << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << px(f.left) << "\" y=\"14\" font-family=\"monospace\" font-size=\"12\">"
        << title << "</text>\n";
    out << "<rect x=\"" << px(f.left) << "\" y=\"" << px(f.top) << "\" width=\"" << px(f.plot_w())
        << "\" height=\"" << px(f.plot_h())
        << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
}

void svg_ylabel(std::ofstream& out, const Frame& f, double y_px, double value) {
    out << "<text x=\"4\" y=\"" << px(y_px + 4)
        << "\" font-family=\"monospace\" font-size=\"10\">" << fmt(value) << "</text>\n";
    out << "<line x1=\"" << px(f.left - 4) << "\" y1=\"" << px(y_px) << "\" x2=\"" << px(f.left)
        << "\" y2=\"" << px(y_px) << "\" stroke=\"#888\"/>\n";
}

void plot_equity_svg(const std::string& path, const EquityCurve& curve,
                     const EquityCurve& baseline) {
    Frame f;
    auto out = open_out(path);
    svg_open(out, f, "equity (XBT), strategy vs buy-and-hold");
    if (curve.ts.size() >= 2) {
        double lo = curve.equity.front(), hi = lo;
        for (double e : curve.equity) { lo = std::min(lo, e); hi = std::max(hi, e); }
        for (double e : baseline.equity) { lo = std::min(lo, e); hi = std::max(hi, e); }
        if (hi - lo < 1e-12) { hi += 1.0; lo -= 1.0; }
        const double t0 = static_cast<double>(curve.ts.front().minutes);
        double t1 = static_cast<double>(curve.ts.back().minutes);
        if (!baseline.ts.empty())
            t1 = std::max(t1, static_cast<double>(baseline.ts.back().minutes));
        if (t1 - t0 < 1.0) t1 = t0 + 1.0;
        auto X = [&](Timestamp ts) {
            return f.left + (static_cast<double>(ts.minutes) - t0) / (t1 - t0) * f.plot_w();
        };
        auto Y = [&](double e) { return f.top + (hi - e) / (hi - lo) * f.plot_h(); };

        // Thin to at most ~2000 polyline points per series.
        auto emit_line = [&](const EquityCurve& c, const char* color, const char* dash) {
            if (c.ts.size() < 2) return;
            const std::size_t step = std::max<std::size_t>(1, c.ts.size() / 2000);
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\"" << dash
                << " points=\"";
            for (std::size_t i = 0; i < c.ts.size(); i += step)
                out << px(X(c.ts[i])) << "," << px(Y(c.equity[i])) << " ";
            out << px(X(c.ts.back())) << "," << px(Y(c.equity.back()));
            out << "\"/>\n";
        };
        emit_line(baseline, "#c44", " stroke-dasharray=\"4 3\"");
        emit_line(curve, "#246", "");
        svg_ylabel(out, f, Y(hi), hi);
        svg_ylabel(out, f, Y(lo), lo);
        svg_ylabel(out, f, Y(curve.initial_capital), curve.initial_capital);
        out << "<text x=\"" << px(f.left) << "\" y=\"" << px(f.h - 8)
            << "\" font-family=\"monospace\" font-size=\"10\">" << format_timestamp(curve.ts.front())
            << "</text>\n";
        out << "<text x=\"" << px(f.w - 170) << "\" y=\"" << px(f.h - 8)
            << "\" font-family=\"monospace\" font-size=\"10\">"
            << format_timestamp(Timestamp{static_cast<std::int64_t>(t1)}) << "</text>\n";
    } else {
        out << "<text x=\"" << px(f.w / 2 - 30) << "\" y=\"" << px(f.h / 2)
            << "\" font-family=\"monospace\" font-size=\"12\">no data</text>\n";
    }
    out << "</svg>\n";
}

void plot_monthly_svg(const std::string& path, const std::vector<MonthlyReturn>& monthly) {
    Frame f;
    auto out = open_out(path);
    svg_open(out, f, "monthly returns (fraction of initial capital)");
    if (!monthly.empty()) {
        double lo = 0.0, hi = 0.0;
        for (const auto& m : monthly) { lo = std::min(lo, m.ret); hi = std::max(hi, m.ret); }
        if (hi - lo < 1e-12) { hi += 0.01; lo -= 0.01; }
        auto Y = [&](double r) { return f.top + (hi - r) / (hi - lo) * f.plot_h(); };
        const double band = f.plot_w() / static_cast<double>(monthly.size());
        const double y0 = Y(0.0);
        out << "<line x1=\"" << px(f.left) << "\" y1=\"" << px(y0) << "\" x2=\""
            << px(f.left + f.plot_w()) << "\" y2=\"" << px(y0) << "\" stroke=\"#888\"/>\n";
        for (std::size_t i = 0; i < monthly.size(); ++i) {
            const auto& m = monthly[i];
            const double x = f.left + band * static_cast<double>(i) + band * 0.15;
            const double yv = Y(m.ret);
            const double top = std::min(yv, y0), h = std::fabs(yv - y0);
            out << "<rect x=\"" << px(x) << "\" y=\"" << px(top) << "\" width=\"" << px(band * 0.7)
                << "\" height=\"" << px(std::max(h, 0.5)) << "\" fill=\""
                << (m.ret >= 0.0 ? "#2a7" : "#c44") << "\""
                << (m.partial ? " fill-opacity=\"0.45\"" : "") << "/>\n";
            char label[16];
            std::snprintf(label, sizeof(label), "%04d-%02d", m.year, m.month);
            out << "<text x=\"" << px(x) << "\" y=\"" << px(f.h - 8)
                << "\" font-family=\"monospace\" font-size=\"9\">" << label << "</text>\n";
        }
        svg_ylabel(out, f, Y(hi), hi);
        svg_ylabel(out, f, Y(lo), lo);
    } else {
        out << "<text x=\"" << px(f.w / 2 - 30) << "\" y=\"" << px(f.h / 2)
            << "\" font-family=\"monospace\" font-size=\"12\">no data</text>\n";
    }
    out << "</svg>\n";
}

void plot_pnl_by_symbol_svg(const std::string& path,
                            const std::map<SymbolId, double>& realized) {
    Frame f;
    auto out = open_out(path);
    svg_open(out, f, "realized P&L by symbol (XBT)");
    if (!realized.empty()) {
        double lo = 0.0, hi = 0.0;
        for (const auto& [sym, v] : realized) { lo = std::min(lo, v); hi = std::max(hi, v); }
        if (hi - lo < 1e-12) { hi += 0.01; lo -= 0.01; }
        auto X = [&](double v) { return f.left + (v - lo) / (hi - lo) * f.plot_w(); };
        const double band = f.plot_h() / static_cast<double>(realized.size());
        const double x0 = X(0.0);
        out << "<line x1=\"" << px(x0) << "\" y1=\"" << px(f.top) << "\" x2=\"" << px(x0)
            << "\" y2=\"" << px(f.top + f.plot_h()) << "\" stroke=\"#888\"/>\n";
        std::size_t i = 0;
        for (const auto& [sym, v] : realized) {
            const double y = f.top + band * static_cast<double>(i) + band * 0.2;
            const double xv = X(v);
            const double left = std::min(xv, x0), w = std::fabs(xv - x0);
            out << "<rect x=\"" << px(left) << "\" y=\"" << px(y) << "\" width=\""
                << px(std::max(w, 0.5)) << "\" height=\"" << px(band * 0.6) << "\" fill=\""
                << (v >= 0.0 ? "#2a7" : "#c44") << "\"/>\n";
            out << "<text x=\"4\" y=\"" << px(y + band * 0.45)
                << "\" font-family=\"monospace\" font-size=\"10\">" << sym << " " << fmt(v)
                << "</text>\n";
            ++i;
        }
    } else {
        out << "<text x=\"" << px(f.w / 2 - 30) << "\" y=\"" << px(f.h / 2)
            << "\" font-family=\"monospace\" font-size=\"12\">no fills</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace

std::vector<std::string> emit_report(const RunResult& result, const std::string& out_dir,
                                     const ReportFormats& formats) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + out_dir);

    std::vector<std::string> written;
    auto path = [&](const char* name) { return (std::filesystem::path(out_dir) / name).string(); };

    if (formats.csv) {
        {
            auto out = open_out(path("equity.csv"));
            out << "timestamp,equity,realized,unrealized,fees,funding\n";
            for (const auto& pt : result.ledger.equity_curve())
                out << format_timestamp(pt.ts) << ',' << fmt(pt.equity) << ',' << fmt(pt.realized)
                    << ',' << fmt(pt.unrealized) << ',' << fmt(pt.fees) << ',' << fmt(pt.funding)
                    << '\n';
            written.push_back(path("equity.csv"));
        }
        {
            auto out = open_out(path("fills.csv"));
            out << "timestamp,order_id,symbol,side,liquidity,price,size,fee_xbt\n";
            for (const auto& fill : result.ledger.fills())
                out << format_timestamp(fill.ts) << ',' << fill.order_id << ',' << fill.symbol
                    << ',' << to_string(fill.side) << ',' << to_string(fill.liquidity) << ','
                    << fmt(fill.price) << ',' << fmt(fill.size) << ',' << fmt(fill.fee_xbt) << '\n';
            written.push_back(path("fills.csv"));
        }
        {
            auto out = open_out(path("signals.csv"));
            out << "timestamp,kind,z_tminus1,z_tminus2\n";
            for (const auto& ev : result.signals)
                out << format_timestamp(ev.ts) << ',' << to_string(ev.kind) << ',' << fmt(ev.z_tm1)
                    << ',' << fmt(ev.z_tm2) << '\n';
            written.push_back(path("signals.csv"));
        }
        {
            auto out = open_out(path("selections.csv"));
            out << "window,formation_start,trading_start,trading_end,status,spread,intercept,"
                   "lot,statistic,pvalue,half_life_minutes,lookback_minutes,unit_value_xbt,"
                   "n_signals,window_return\n";
            for (const auto& rec : result.windows) {
                out << rec.index << ',' << format_timestamp(rec.window.formation_start) << ','
                    << format_timestamp(rec.window.trading_start) << ','
                    << format_timestamp(rec.window.trading_end) << ',' << rec.status << ',';
                if (rec.selection) {
                    const auto& sel = *rec.selection;
                    out << spread_text(sel.spread) << ',' << fmt(sel.spread.intercept) << ','
                        << fmt(rec.lot) << ',' << fmt(sel.statistic) << ',' << fmt(sel.pvalue)
                        << ',' << fmt(sel.half_life) << ',' << sel.lookback.n_minutes << ','
                        << fmt(sel.unit_value);
                } else {
                    out << ",,,,,,,";
                }
                out << ',' << rec.n_signals << ',' << fmt(rec.window_return) << '\n';
            }
            written.push_back(path("selections.csv"));
        }
        {
            auto out = open_out(path("funding.csv"));
            out << "timestamp,symbol,amount_xbt\n";
            for (const auto& ev : result.ledger.funding_events())
                out << format_timestamp(ev.ts) << ',' << ev.symbol << ',' << fmt(ev.amount_xbt)
                    << '\n';
            written.push_back(path("funding.csv"));
        }
        {
            auto out = open_out(path("pnl_by_symbol.csv"));
            out << "symbol,realized_xbt\n";
            for (const auto& [sym, v] : result.ledger.realized_by_symbol())
                out << sym << ',' << fmt(v) << '\n';
            written.push_back(path("pnl_by_symbol.csv"));
        }
        {
            auto out = open_out(path("monthly.csv"));
            out << "year,month,return,partial\n";
            for (const auto& m : result.metrics.monthly)
                out << m.year << ',' << m.month << ',' << fmt(m.ret) << ','
                    << (m.partial ? 1 : 0) << '\n';
            written.push_back(path("monthly.csv"));
        }
        {
            auto out = open_out(path("baseline_equity.csv"));
            out << "timestamp,equity\n";
            // Thin to one point per hour; the full curve is minute-level.
            for (std::size_t i = 0; i < result.baseline.ts.size();
                 i += static_cast<std::size_t>(kMinutesPerHour))
                out << format_timestamp(result.baseline.ts[i]) << ','
                    << fmt(result.baseline.equity[i]) << '\n';
            if (!result.baseline.ts.empty() &&
                (result.baseline.ts.size() - 1) % static_cast<std::size_t>(kMinutesPerHour) != 0)
                out << format_timestamp(result.baseline.ts.back()) << ','
                    << fmt(result.baseline.equity.back()) << '\n';
            written.push_back(path("baseline_equity.csv"));
        }
        {
            auto out = open_out(path("metrics.csv"));
            out << "label,total_return,annualized_return,return_std,sharpe_annualized,sharpe_raw,"
                   "max_drawdown_xbt,max_drawdown_fraction,romad,commission_share,n_periods,"
                   "baseline_total_return,baseline_sharpe_annualized\n";
            const auto& m = result.metrics;
            out << result.label << ',' << fmt(m.total_return) << ',' << fmt(m.annualized_return)
                << ',' << fmt(m.return_std) << ',' << fmt_opt(m.sharpe_annualized) << ','
                << fmt_opt(m.sharpe_raw) << ',' << fmt(m.max_dd.xbt) << ','
                << fmt(m.max_dd.fraction) << ',' << fmt_opt(m.romad) << ','
                << fmt_opt(m.commission_share) << ',' << m.n_periods << ','
                << fmt(result.baseline_metrics.total_return) << ','
                << fmt_opt(result.baseline_metrics.sharpe_annualized) << '\n';
            written.push_back(path("metrics.csv"));
        }
    }

    if (formats.structured) {
        nlohmann::json j;
        j["label"] = result.label;
        j["windows_total"] = result.windows.size();
        std::size_t traded = 0;
        for (const auto& rec : result.windows) traded += rec.traded ? 1 : 0;
        j["windows_traded"] = traded;
        j["signals"] = result.signals.size();
        j["fills"] = result.ledger.fills().size();
        j["initial_capital_xbt"] = result.ledger.initial_capital();
        j["final_equity_xbt"] = result.ledger.equity_curve().empty()
                                    ? result.ledger.initial_capital()
                                    : result.ledger.equity_curve().back().equity;
        j["realized_xbt"] = result.ledger.realized();
        j["fees_xbt"] = result.ledger.fees();
        j["funding_xbt"] = result.ledger.funding();
        j["metrics"] = metrics_json(result.metrics);
        j["baseline_metrics"] = metrics_json(result.baseline_metrics);
        auto out = open_out(path("metrics.json"));
        out << j.dump(1) << '\n';
        written.push_back(path("metrics.json"));
    }

    if (formats.plots) {
        EquityCurve curve = result.curve;
        plot_equity_svg(path("plot_equity.svg"), curve, result.baseline);
        plot_monthly_svg(path("plot_monthly.svg"), result.metrics.monthly);
        plot_pnl_by_symbol_svg(path("plot_pnl_by_symbol.svg"),
                               result.ledger.realized_by_symbol());
        written.push_back(path("plot_equity.svg"));
        written.push_back(path("plot_monthly.svg"));
        written.push_back(path("plot_pnl_by_symbol.svg"));
    }
    return written;
}

std::string write_run_table(const std::vector<RunResult>& results, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + out_dir);
    const std::string p = (std::filesystem::path(out_dir) / "pair_table.csv").string();
    auto out = open_out(p);
    out << "label,total_return,annualized_return,sharpe_annualized,max_drawdown_fraction,romad,"
           "fees_xbt,funding_xbt,n_fills\n";
    std::vector<const RunResult*> ordered;
    ordered.reserve(results.size());
    for (const auto& r : results) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(),
              [](const RunResult* a, const RunResult* b) { return a->label < b->label; });
    for (const RunResult* r : ordered) {
        const auto& m = r->metrics;
        out << r->label << ',' << fmt(m.total_return) << ',' << fmt(m.annualized_return) << ','
            << fmt_opt(m.sharpe_annualized) << ',' << fmt(m.max_dd.fraction) << ','
            << fmt_opt(m.romad) << ',' << fmt(r->ledger.fees()) << ',' << fmt(r->ledger.funding())
            << ',' << r->ledger.fills().size() << '\n';
    }
    return p;
}

}  // namespace statarb
