#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "statarb/critical_values.hpp"
#include "statarb/data.hpp"
#include "statarb/errors.hpp"
#include "statarb/johansen.hpp"
#include "statarb/ou.hpp"
#include "statarb/panel.hpp"
#include "statarb/report.hpp"
#include "statarb/scenario.hpp"
#include "statarb/spread.hpp"
#include "statarb/synth.hpp"
#include "statarb/unit_root.hpp"

namespace {

using namespace statarb;

struct CommonArgs {
    std::string config_path;
    std::string pair;
    std::string start, end;
    std::string out_dir;
};

ScenarioConfig load_cfg(const CommonArgs& args) {
    if (args.config_path.empty()) throw ConfigError("--config FILE is required");
    return load_config(args.config_path);
}

void apply_pair(ScenarioConfig& cfg, const std::string& pair) {
    if (pair.empty()) return;
    if (pair == "all") {
        cfg.all_pairs = true;
        cfg.pair_a.clear();
        cfg.pair_b.clear();
        return;
    }
    const auto comma = pair.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == pair.size())
        throw ConfigError("--pair wants A,B or all");
    cfg.all_pairs = false;
    cfg.pair_a = pair.substr(0, comma);
    cfg.pair_b = pair.substr(comma + 1);
}

// Panel over [start, end] (defaults: the span common to the loaded bars).
AlignedPanel panel_for_range(const MarketData& market, const std::vector<SymbolId>& symbols,
                             const std::string& start, const std::string& end) {
    std::map<SymbolId, std::vector<PriceBar>> bars;
    Timestamp lo{std::numeric_limits<std::int64_t>::min()};
    Timestamp hi{std::numeric_limits<std::int64_t>::max()};
    for (const auto& sym : symbols) {
        auto it = market.bars.find(sym);
        if (it == market.bars.end() || it->second.empty())
            throw ConfigError("no bars loaded for symbol: " + sym);
        bars[sym] = it->second;
        lo = std::max(lo, it->second.front().ts);
        hi = std::min(hi, it->second.back().ts);
    }
    const Timestamp s = start.empty() ? lo : parse_timestamp(start);
    const Timestamp e = end.empty() ? hi : parse_timestamp(end);
    if (e <= s) throw ConfigError("empty evaluation range");
    return align_panel(bars, market.specs, s, e);
}

std::vector<SymbolId> pair_symbols(const ScenarioConfig& cfg) {
    if (cfg.pair_a.empty() || cfg.pair_b.empty())
        throw ConfigError("this command needs --pair A,B");
    return {cfg.pair_a, cfg.pair_b};
}

int cmd_ingest(const CommonArgs& args) {
    ScenarioConfig cfg = load_cfg(args);
    MarketData market = load_market_data(cfg);
    nlohmann::json j;
    for (const auto& [sym, spec] : market.specs) {
        nlohmann::json row;
        row["kind"] = to_string(spec.kind);
        auto bit = market.bars.find(sym);
        if (bit != market.bars.end() && !bit->second.empty()) {
            row["bars"] = bit->second.size();
            row["first"] = format_timestamp(bit->second.front().ts);
            row["last"] = format_timestamp(bit->second.back().ts);
        } else {
            row["bars"] = 0;
        }
        auto qit = market.quotes.find(sym);
        row["quotes"] = qit == market.quotes.end() ? 0 : qit->second.size();
        auto tit = market.trades.find(sym);
        row["trades"] = tit == market.trades.end() ? 0 : tit->second.size();
        j[sym] = row;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_test(const CommonArgs& args, const std::string& which) {
    ScenarioConfig cfg = load_cfg(args);
    apply_pair(cfg, args.pair);
    MarketData market = load_market_data(cfg);
    CriticalValueStore store(cfg.cv_cache_dir);
    nlohmann::json j;

    if (which == "johansen") {
        std::vector<SymbolId> symbols = cfg.universe;
        if (symbols.empty())
            for (const auto& [sym, bars] : market.bars)
                if (!bars.empty()) symbols.push_back(sym);
        AlignedPanel panel = panel_for_range(market, symbols, args.start, args.end);
        JohansenResult res = johansen_test(panel, cfg.johansen_lag, cfg.johansen_alpha, store);
        j["test"] = "johansen";
        j["symbols"] = symbols;
        j["rank"] = res.rank;
        j["effective_obs"] = res.effective_obs;
        j["eigenvalues"] = res.eigenvalues;
        j["trace_stats"] = res.trace_stats;
        j["trace_pvalues"] = res.trace_pvalues;
        for (const auto& v : res.vectors) {
            nlohmann::json vec;
            for (Eigen::Index i = 0; i < v.weights.size(); ++i)
                vec["weights"].push_back(v.weights[i]);
            vec["intercept"] = v.intercept;
            vec["pvalue"] = v.pvalue;
            j["vectors"].push_back(vec);
        }
    } else {
        AlignedPanel panel = panel_for_range(market, pair_symbols(cfg), args.start, args.end);
        PairSpreadFit fit = pair_spread(panel, cfg.pair_a, cfg.pair_b);
        UnitRootOptions opts;
        opts.max_lag = cfg.max_lag;
        opts.lag_rule = cfg.lag_rule;
        UnitRootResult res = which == "kss" ? kss_test(fit.residuals, opts, store)
                                            : adf_test(fit.residuals, opts, store);
        j["test"] = which;
        j["pair"] = {cfg.pair_a, cfg.pair_b};
        j["beta"] = fit.beta;
        j["observations"] = fit.residuals.size();
        j["statistic"] = res.statistic;
        j["lag_order"] = res.lag_order;
        j["p_value"] = res.p_value;
        for (const auto& [level, rej] : res.reject_at) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%g", level);
            j["reject_at"][buf] = rej;
        }
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_calibrate(const CommonArgs& args) {
    ScenarioConfig cfg = load_cfg(args);
    apply_pair(cfg, args.pair);
    MarketData market = load_market_data(cfg);
    AlignedPanel panel = panel_for_range(market, pair_symbols(cfg), args.start, args.end);
    PairSpreadFit fit = pair_spread(panel, cfg.pair_a, cfg.pair_b);
    OuParams ou = calibrate_ou(fit.residuals);
    LookbackWindow look = lookback_window(ou);
    nlohmann::json j;
    j["pair"] = {cfg.pair_a, cfg.pair_b};
    j["beta"] = fit.beta;
    j["theta_per_minute"] = ou.theta;
    j["mu"] = ou.mu;
    j["sigma"] = ou.sigma;
    j["half_life_minutes"] = half_life_minutes(ou);
    j["lookback_minutes"] = look.n_minutes;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_backtest(const CommonArgs& args, int scenario, const std::string& test,
                 std::uint64_t seed, bool seed_set, const ReportFormats& formats) {
    ScenarioConfig cfg = load_cfg(args);
    if (scenario > 0) cfg.scenario = scenario;
    if (!test.empty()) {
        if (test == "adf") cfg.test = PairTestChoice::Adf;
        else if (test == "kss") cfg.test = PairTestChoice::Kss;
        else throw ConfigError("--test must be adf or kss");
    }
    apply_pair(cfg, args.pair);
    if (seed_set) cfg.seed = seed;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (cfg.out_dir.empty()) throw ConfigError("--out DIR (or config out_dir) is required");
    cfg.validate();

    MarketData market = load_market_data(cfg);
    CriticalValueStore store(cfg.cv_cache_dir);

    if (cfg.scenario == 3 && cfg.all_pairs) {
        std::vector<RunResult> results = run_all_pairs(cfg, market, store);
        for (const auto& res : results)
            emit_report(res, (std::filesystem::path(cfg.out_dir) / res.label).string(), formats);
        const std::string table = write_run_table(results, cfg.out_dir);
        std::cout << "wrote " << results.size() << " pair runs under " << cfg.out_dir << "\n"
                  << "pair table: " << table << "\n";
        return 0;
    }

    RunResult result = run_scenario(cfg, market, store);
    auto written = emit_report(result, cfg.out_dir, formats);
    std::cout << "run " << result.label << ": " << result.windows.size() << " windows, "
              << result.signals.size() << " signals, " << result.ledger.fills().size()
              << " fills\n";
    std::cout << "total return " << result.metrics.total_return << ", max drawdown "
              << result.metrics.max_dd.fraction << "\n";
    for (const auto& p : written) std::cout << "  " << p << "\n";
    return 0;
}

int cmd_synth(const std::string& out_dir, int n_symbols, std::size_t length, double theta,
              double sigma_spread, double sigma_trend, std::uint64_t seed,
              const std::vector<double>& weights, double base_level, const std::string& start,
              double tick_size, double quote_size, double trade_size) {
    SynthSpec spec;
    spec.n_symbols = n_symbols;
    if (weights.empty() && n_symbols >= 2) {
        spec.true_weights.assign(static_cast<std::size_t>(n_symbols), -1.0);
        spec.true_weights[0] = 1.0;
    }
    spec.length = length;
    spec.theta = theta;
    spec.sigma_spread = sigma_spread;
    spec.sigma_trend = sigma_trend;
    spec.seed = seed;
    if (!weights.empty()) spec.true_weights = weights;
    spec.base_level = base_level;
    if (!start.empty()) spec.start = parse_timestamp(start);

    AlignedPanel panel = synth_cointegrated(spec);
    MarketData market = make_synth_market(panel, tick_size, quote_size, trade_size);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + out_dir);
    auto path = [&](const char* name) { return (std::filesystem::path(out_dir) / name).string(); };

    std::vector<PriceBar> bars;
    std::vector<QuoteTick> quotes;
    std::vector<TradeTick> trades;
    for (const auto& sym : panel.symbols()) {
        const auto& b = market.bars.at(sym);
        bars.insert(bars.end(), b.begin(), b.end());
        const auto& q = market.quotes.at(sym);
        quotes.insert(quotes.end(), q.begin(), q.end());
        const auto& t = market.trades.at(sym);
        trades.insert(trades.end(), t.begin(), t.end());
    }
    write_bar_csv(path("bars.csv"), bars);
    write_quote_csv(path("quotes.csv"), quotes);
    write_trade_csv(path("trades.csv"), trades);

    nlohmann::json contracts;
    for (const auto& [sym, cspec] : market.specs) {
        contracts["contracts"].push_back({{"symbol", cspec.symbol},
                                          {"kind", to_string(cspec.kind)},
                                          {"multiplier", cspec.multiplier},
                                          {"tick_size", cspec.tick_size},
                                          {"maker_fee_rate", cspec.maker_fee_rate},
                                          {"taker_fee_rate", cspec.taker_fee_rate},
                                          {"funding_rate", cspec.funding_rate},
                                          {"funding_interval_hours", cspec.funding_interval_hours}});
    }
    std::ofstream out(path("contracts.json"), std::ios::binary);
    if (!out) throw ConfigError("cannot write contracts.json");
    out << contracts.dump(1) << "\n";

    std::cout << "synthetic market: " << panel.n_symbols() << " symbols x " << panel.length()
              << " minutes in " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cointegration pairs/basket trading research engine"};
    app.require_subcommand(1);

    CommonArgs args;
    int scenario = 0;
    std::string test;
    std::uint64_t seed = 0;
    bool no_plots = false, no_csv = false, no_json = false;

    auto add_common = [&](CLI::App* sub, bool with_range) {
        sub->add_option("--config", args.config_path, "JSON config file");
        if (with_range) {
            sub->add_option("--start", args.start, "range start (YYYY-MM-DDTHH:MM)");
            sub->add_option("--end", args.end, "range end");
        }
    };

    auto* ingest = app.add_subcommand("ingest", "load and summarize the configured data files");
    add_common(ingest, false);

    auto* testc = app.add_subcommand("test", "run a cointegration test on a pair or the universe");
    add_common(testc, true);
    std::string which_test = "adf";
    testc->add_option("--test", which_test, "adf, kss or johansen")
        ->check(CLI::IsMember({"adf", "kss", "johansen"}));
    testc->add_option("--pair", args.pair, "pair A,B (adf/kss)");

    auto* calib = app.add_subcommand("calibrate", "mean-reversion calibration for a pair spread");
    add_common(calib, true);
    calib->add_option("--pair", args.pair, "pair A,B")->required();

    auto* backtest = app.add_subcommand("backtest", "walk-forward scenario backtest");
    add_common(backtest, false);
    backtest->add_option("--scenario", scenario, "1: best pair, 2: Johansen basket, 3: fixed pair")
        ->check(CLI::Range(1, 3));
    backtest->add_option("--test", test, "scenario 1 residual test: adf or kss");
    backtest->add_option("--pair", args.pair, "scenario 3 pair A,B (or all)");
    auto* seed_opt = backtest->add_option("--seed", seed, "recorded run seed");
    backtest->add_option("--out", args.out_dir, "output directory");

    auto* report = app.add_subcommand("report", "rerun the configured backtest, emit chosen formats");
    add_common(report, false);
    report->add_option("--scenario", scenario, "scenario override")->check(CLI::Range(1, 3));
    report->add_option("--test", test, "scenario 1 residual test");
    report->add_option("--pair", args.pair, "scenario 3 pair");
    report->add_option("--out", args.out_dir, "output directory");
    report->add_flag("--no-plots", no_plots, "skip SVG plots");
    report->add_flag("--no-csv", no_csv, "skip CSV files");
    report->add_flag("--no-structured", no_json, "skip metrics.json");

    auto* synth = app.add_subcommand("synth", "generate a synthetic cointegrated market fixture");
    std::string synth_out = "synth_out", synth_start = "2019-01-01T00:00";
    int n_symbols = 2;
    std::size_t length = 200000;
    double theta = 0.005, sigma_spread = 5e-4, sigma_trend = 1e-4, base_level = 1.0;
    double tick_size = 1e-6, quote_size = 1e9, trade_size = 1e8;
    std::uint64_t synth_seed = 1;
    std::vector<double> weights;
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--symbols", n_symbols, "number of legs");
    synth->add_option("--length", length, "minutes");
    synth->add_option("--theta", theta, "OU mean-reversion rate per minute");
    synth->add_option("--sigma-spread", sigma_spread, "OU volatility per sqrt-minute");
    synth->add_option("--sigma-trend", sigma_trend, "trend/idiosyncratic walk step std");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--weights", weights, "true spread weights, one per symbol");
    synth->add_option("--base-level", base_level, "price level of the legs");
    synth->add_option("--start", synth_start, "first bar timestamp");
    synth->add_option("--tick-size", tick_size, "quote grid");
    synth->add_option("--quote-size", quote_size, "contracts at best bid/ask");
    synth->add_option("--trade-size", trade_size, "contracts printed per minute and side");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(args);
        if (testc->parsed()) return cmd_test(args, which_test);
        if (calib->parsed()) return cmd_calibrate(args);
        if (backtest->parsed())
            return cmd_backtest(args, scenario, test, seed, seed_opt->count() > 0, ReportFormats{});
        if (report->parsed()) {
            ReportFormats formats;
            formats.csv = !no_csv;
            formats.plots = !no_plots;
            formats.structured = !no_json;
            return cmd_backtest(args, scenario, test, seed, false, formats);
        }
        if (synth->parsed())
            return cmd_synth(synth_out, n_symbols, length, theta, sigma_spread, sigma_trend,
                             synth_seed, weights, base_level, synth_start, tick_size, quote_size,
                             trade_size);
    } catch (const statarb::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
