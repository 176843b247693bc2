#include "statarb/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "statarb/errors.hpp"

namespace statarb {

namespace {

double current_equity(const Ledger& ledger) {
    if (!ledger.equity_curve().empty()) return ledger.equity_curve().back().equity;
    return ledger.initial_capital();
}

double lot_for(const ScenarioConfig& cfg, const CandidateScore& sel) {
    return std::max(1.0, std::round(cfg.capital_xbt / sel.unit_value));
}

// Per-symbol cursors over the quote and trade streams, advanced one minute
// at a time by the trading loop.
struct StreamCursor {
    const std::vector<QuoteTick>* quotes = nullptr;
    const std::vector<TradeTick>* trades = nullptr;
    std::size_t qi = 0, ti = 0;
};

struct TradeContext {
    const MarketData& market;
    const std::map<SymbolId, ContractSpec>& specs;
    const ScenarioConfig& cfg;
    Ledger& ledger;
    std::int64_t& next_order_id;
    std::vector<SignalEvent>& signal_log;
};

// Runs the execution loop for one trading window: funding, fills, signal
// order placement, and a terminal force-close (market orders staged one
// minute before the last so the one-minute fill gap still holds).
void trade_window(TradeContext& ctx, WindowRecord& rec, const AlignedPanel& full_panel,
                  const CandidateScore& sel, int lookback_override) {
    const SpreadDef& spread = sel.spread;
    const int n_look = lookback_override > 0 ? lookback_override : sel.lookback.n_minutes;
    const double lot = lot_for(ctx.cfg, sel);
    rec.lot = lot;

    const auto series = evaluate_spread(spread, full_panel);
    auto z = rolling_zscore(series, n_look, full_panel.start());

    const std::int64_t t_first = rec.window.trading_start.minutes;
    const std::int64_t t_last = rec.window.trading_end.minutes - 1;
    const std::size_t first_row = full_panel.row_of(rec.window.trading_start);

    // Start the signal state machine flat at the window open: feed it the two
    // bars of history it needs and nothing older.
    const std::size_t z_from = first_row >= 2 ? first_row - 2 : 0;
    std::vector<ZScorePoint> z_window(z.begin() + static_cast<std::ptrdiff_t>(z_from), z.end());
    auto events = gen_signals(z_window, ctx.cfg.thresholds, ctx.cfg.first_touch);

    std::map<std::int64_t, std::vector<SignalEvent>> events_by_minute;
    for (const auto& ev : events) {
        if (ev.ts.minutes < t_first || ev.ts.minutes > t_last - 2) continue;
        events_by_minute[ev.ts.minutes].push_back(ev);
    }

    std::map<SymbolId, StreamCursor> cursors;
    for (const auto& leg : spread.legs) {
        StreamCursor c;
        auto qit = ctx.market.quotes.find(leg.symbol);
        if (qit != ctx.market.quotes.end()) c.quotes = &qit->second;
        auto tit = ctx.market.trades.find(leg.symbol);
        if (tit != ctx.market.trades.end()) c.trades = &tit->second;
        cursors[leg.symbol] = c;
    }
    // Skip ticks before the window; StaleQuote handling wants the latest
    // quote at or before the first minute, so track it while skipping.
    std::map<SymbolId, QuoteTick> latest_quotes;
    for (auto& [sym, cur] : cursors) {
        if (cur.quotes != nullptr) {
            while (cur.qi < cur.quotes->size() && (*cur.quotes)[cur.qi].ts.minutes < t_first) {
                latest_quotes[sym] = (*cur.quotes)[cur.qi];
                ++cur.qi;
            }
        }
        if (cur.trades != nullptr) {
            while (cur.ti < cur.trades->size() && (*cur.trades)[cur.ti].ts.minutes < t_first)
                ++cur.ti;
        }
    }

    FillEngine engine(ctx.specs, ctx.cfg.fill_policy);

    for (std::int64_t t = t_first; t <= t_last; ++t) {
        const Timestamp now{t};
        std::map<SymbolId, QuoteTick> minute_quotes;
        std::map<SymbolId, std::vector<TradeTick>> minute_trades;
        for (auto& [sym, cur] : cursors) {
            if (cur.quotes != nullptr && cur.qi < cur.quotes->size() &&
                (*cur.quotes)[cur.qi].ts.minutes == t) {
                minute_quotes[sym] = (*cur.quotes)[cur.qi];
                latest_quotes[sym] = (*cur.quotes)[cur.qi];
                ++cur.qi;
            }
            if (cur.trades != nullptr) {
                auto& tv = *cur.trades;
                while (cur.ti < tv.size() && tv[cur.ti].ts.minutes == t) {
                    minute_trades[sym].push_back(tv[cur.ti]);
                    ++cur.ti;
                }
            }
        }

        ctx.ledger.accrue_funding(now, ctx.specs);

        for (const auto& fill : engine.step(now, minute_quotes, minute_trades))
            ctx.ledger.apply_fill(fill, ctx.specs.at(fill.symbol));

        if (t == t_last - 1) {
            engine.cancel_all();
            for (auto& o : close_orders(ctx.ledger.positions(), now, ctx.next_order_id))
                engine.place(std::move(o));
        } else if (t < t_last - 1) {
            auto ev_it = events_by_minute.find(t);
            if (ev_it != events_by_minute.end()) {
                engine.cancel_all();
                for (const auto& ev : ev_it->second) {
                    ctx.signal_log.push_back(ev);
                    ++rec.n_signals;
                    try {
                        std::vector<Order> orders;
                        switch (ev.kind) {
                            case SignalKind::EnterLong:
                                orders = entry_orders(spread, 1, lot, latest_quotes, ctx.specs, now,
                                                      ctx.cfg.fill_policy, ctx.next_order_id);
                                break;
                            case SignalKind::EnterShort:
                                orders = entry_orders(spread, -1, lot, latest_quotes, ctx.specs, now,
                                                      ctx.cfg.fill_policy, ctx.next_order_id);
                                break;
                            case SignalKind::ExitLong:
                            case SignalKind::ExitShort:
                                orders = exit_orders(ctx.ledger.positions(), latest_quotes,
                                                     ctx.specs, now, ctx.cfg.fill_policy,
                                                     ctx.next_order_id);
                                break;
                        }
                        for (auto& o : orders) engine.place(std::move(o));
                    } catch (const StaleQuoteError&) {
                        rec.status = "some signals skipped on stale quotes";
                    }
                }
            }
        }

        for (const auto& [sym, q] : minute_quotes) ctx.ledger.set_mark(sym, q.mid());
        ctx.ledger.mark_to_market(now, ctx.specs);
    }

    if (!ctx.ledger.flat())
        throw DataGapError(
            "positions not flat after window force-close (missing or thin quotes at the close)");
}

std::map<SymbolId, std::vector<PriceBar>> bars_available_from(const MarketData& market,
                                                              const std::vector<SymbolId>& universe,
                                                              Timestamp start) {
    std::map<SymbolId, std::vector<PriceBar>> out;
    for (const auto& sym : universe) {
        auto it = market.bars.find(sym);
        if (it == market.bars.end() || it->second.empty()) continue;
        if (it->second.front().ts > start) continue;
        out[sym] = it->second;
    }
    return out;
}

std::vector<double> chunk_returns(const EquityCurve& curve, std::int64_t chunk_minutes,
                                  double capital) {
    std::vector<double> out;
    if (curve.ts.empty() || chunk_minutes <= 0) return out;
    std::size_t start_idx = 0;
    std::int64_t chunk_end = curve.ts.front().minutes + chunk_minutes;
    for (std::size_t i = 1; i < curve.ts.size(); ++i) {
        if (curve.ts[i].minutes >= chunk_end) {
            out.push_back((curve.equity[i - 1] - curve.equity[start_idx]) / capital);
            start_idx = i - 1;
            chunk_end += chunk_minutes;
        }
    }
    if (curve.ts.back().minutes > curve.ts[start_idx].minutes)
        out.push_back((curve.equity.back() - curve.equity[start_idx]) / capital);
    return out;
}

CandidateScore fixed_pair_candidate(const AlignedPanel& formation, const SymbolId& a,
                                    const SymbolId& b) {
    PairSpreadFit fit = pair_spread(formation, a, b);
    auto score = score_candidate(fit.def, formation);
    if (!score)
        throw UntradableError("fixed pair " + a + "," + b + " is not tradable on the formation window");
    score->test = CandidateTest::None;
    score->statistic = 0.0;
    score->pvalue = 1.0;
    return *score;
}

}  // namespace

void ScenarioConfig::validate() const {
    if (scenario < 1 || scenario > 3) throw ConfigError("scenario must be 1, 2 or 3");
    if (scenario == 3 && !all_pairs && (pair_a.empty() || pair_b.empty()))
        throw ConfigError("scenario 3 needs --pair A,B or --pair all");
    if (range_end.minutes <= range_start.minutes) throw ConfigError("empty date range");
    if (formation_days < 1 || trading_days < 1) throw ConfigError("window lengths must be positive");
    if (!(capital_xbt > 0.0)) throw ConfigError("capital must be positive");
    if (!(soft_cap_xbt > 0.0) || hard_cap_xbt < soft_cap_xbt)
        throw ConfigError("unit value caps must satisfy 0 < soft <= hard");
    if (!(pair_alpha > 0.0 && pair_alpha < 1.0) || !(johansen_alpha > 0.0 && johansen_alpha < 1.0))
        throw ConfigError("test levels must lie in (0,1)");
    if (johansen_lag < 1) throw ConfigError("johansen lag must be >= 1");
    if (scenario3_lookback < 2) throw ConfigError("scenario 3 look-back must be >= 2");
    thresholds.validate();
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    ScenarioConfig cfg;
    try {
        cfg.scenario = j.value("scenario", 1);
        const std::string test = j.value("test", "adf");
        if (test == "adf") cfg.test = PairTestChoice::Adf;
        else if (test == "kss") cfg.test = PairTestChoice::Kss;
        else throw ConfigError("test must be adf or kss");
        if (j.contains("universe")) cfg.universe = j["universe"].get<std::vector<std::string>>();
        if (j.contains("pair")) {
            if (j["pair"].is_string() && j["pair"].get<std::string>() == "all") {
                cfg.all_pairs = true;
            } else {
                auto pr = j["pair"].get<std::vector<std::string>>();
                if (pr.size() != 2) throw ConfigError("pair must name exactly two symbols");
                cfg.pair_a = pr[0];
                cfg.pair_b = pr[1];
            }
        }
        cfg.range_start = parse_timestamp(j.at("range_start").get<std::string>());
        cfg.range_end = parse_timestamp(j.at("range_end").get<std::string>());
        cfg.formation_days = j.value("formation_days", 90);
        cfg.trading_days = j.value("trading_days", 7);
        cfg.thresholds.enter = j.value("enter_threshold", 2.0);
        cfg.thresholds.exit = j.value("exit_threshold", 1.0);
        cfg.first_touch = j.value("first_touch", false);
        cfg.fill_policy.repeg_each_minute = j.value("repeg_each_minute", true);
        cfg.fill_policy.limit_timeout_minutes = j.value("limit_timeout_minutes", 30);
        cfg.fill_policy.quote_stale_minutes = j.value("quote_stale_minutes", 1);
        cfg.capital_xbt = j.value("capital_xbt", 1.0);
        cfg.soft_cap_xbt = j.value("soft_cap_xbt", 1.0);
        cfg.hard_cap_xbt = j.value("hard_cap_xbt", 3.0);
        cfg.pair_alpha = j.value("pair_alpha", 0.01);
        cfg.johansen_alpha = j.value("johansen_alpha", 0.10);
        cfg.johansen_lag = j.value("johansen_lag", 2);
        cfg.scenario3_lookback = j.value("scenario3_lookback", 1440);
        cfg.max_lag = j.value("max_lag", -1);
        const std::string rule = j.value("lag_rule", "aic");
        if (rule == "aic") cfg.lag_rule = LagRule::Aic;
        else if (rule == "fixed") cfg.lag_rule = LagRule::Fixed;
        else throw ConfigError("lag_rule must be aic or fixed");
        if (j.contains("funding_rate")) cfg.funding_rate_override = j["funding_rate"].get<double>();
        cfg.seed = j.value("seed", 1ULL);
        cfg.cv_cache_dir = j.value("cv_cache_dir", "");
        cfg.out_dir = j.value("out_dir", "");
        cfg.bars_path = j.value("bars", "");
        cfg.quotes_path = j.value("quotes", "");
        cfg.trades_path = j.value("trades", "");
        cfg.contracts_path = j.value("contracts", "");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

MarketData load_market_data(const ScenarioConfig& cfg) {
    if (cfg.contracts_path.empty()) throw ConfigError("config: contracts path required");
    std::ifstream in(cfg.contracts_path);
    if (!in) throw ConfigError("cannot open contracts file: " + cfg.contracts_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("contracts parse error: ") + e.what());
    }

    MarketData market;
    try {
        for (const auto& c : j.at("contracts")) {
            ContractSpec spec;
            spec.symbol = c.at("symbol").get<std::string>();
            spec.kind = contract_kind_from_string(c.at("kind").get<std::string>());
            spec.multiplier = c.value("multiplier", 1.0);
            spec.tick_size = c.value("tick_size", 1e-8);
            spec.maker_fee_rate = c.value("maker_fee_rate", -0.00025);
            spec.taker_fee_rate = c.value("taker_fee_rate", 0.00075);
            spec.funding_rate = c.value("funding_rate", 0.0001);
            spec.funding_interval_hours = c.value("funding_interval_hours", 8);
            spec.validate();
            market.specs[spec.symbol] = spec;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("contracts field error: ") + e.what());
    }
    if (market.specs.empty()) throw ConfigError("contracts file lists no contracts");

    if (cfg.bars_path.empty()) throw ConfigError("config: bars path required");
    market.bars = parse_bars_grouped(cfg.bars_path, market.specs);
    if (!cfg.quotes_path.empty()) market.quotes = parse_quotes_grouped(cfg.quotes_path, market.specs);
    if (!cfg.trades_path.empty()) market.trades = parse_trades_grouped(cfg.trades_path, market.specs);
    return market;
}

RunResult run_scenario(const ScenarioConfig& cfg, const MarketData& market,
                       const CriticalValueStore& store) {
    cfg.validate();
    if (cfg.scenario == 3 && cfg.all_pairs)
        throw ConfigError("pair sweep runs through run_all_pairs, not run_scenario");

    std::map<SymbolId, ContractSpec> specs = market.specs;
    if (cfg.funding_rate_override)
        for (auto& [sym, spec] : specs) spec.funding_rate = *cfg.funding_rate_override;

    std::vector<SymbolId> universe = cfg.universe;
    if (cfg.scenario == 3) {
        universe = {cfg.pair_a, cfg.pair_b};
        std::sort(universe.begin(), universe.end());
    } else if (universe.empty()) {
        for (const auto& [sym, bars] : market.bars)
            if (!bars.empty()) universe.push_back(sym);
    }
    for (const auto& sym : universe)
        if (specs.find(sym) == specs.end())
            throw ConfigError("universe symbol without contract spec: " + sym);
    if (universe.size() < 2) throw ConfigError("need at least two symbols");

    std::vector<WalkForwardWindow> windows;
    if (cfg.scenario == 3) {
        // One long window: formation, then trade the rest of the horizon.
        WalkForwardWindow w;
        w.formation_start = cfg.range_start;
        w.formation_end = cfg.range_start + cfg.formation_days * kMinutesPerDay;
        w.trading_start = w.formation_end;
        w.trading_end = cfg.range_end;
        if (w.trading_end.minutes - w.trading_start.minutes < 10)
            throw ConfigError("scenario 3 range leaves no room to trade after formation");
        windows.push_back(w);
    } else {
        windows = walk_forward_windows(cfg.range_start, cfg.range_end, cfg.formation_days,
                                       cfg.trading_days);
    }

    RunResult result;
    switch (cfg.scenario) {
        case 1:
            result.label = cfg.test == PairTestChoice::Adf ? "scenario1_adf" : "scenario1_kss";
            break;
        case 2: result.label = "scenario2_johansen"; break;
        case 3: result.label = "scenario3_" + cfg.pair_a + "_" + cfg.pair_b; break;
    }

    result.ledger = Ledger(cfg.capital_xbt);
    std::int64_t next_order_id = 1;
    UnitRootOptions ur_opts;
    ur_opts.max_lag = cfg.max_lag;
    ur_opts.lag_rule = cfg.lag_rule;

    TradeContext ctx{market, specs, cfg, result.ledger, next_order_id, result.signals};

    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
        const auto& w = windows[wi];
        WindowRecord rec;
        rec.index = static_cast<int>(wi);
        rec.window = w;
        const double eq_before = current_equity(result.ledger);

        try {
            auto bars = bars_available_from(market, universe, w.formation_start);
            AlignedPanel full_panel =
                align_panel(bars, specs, w.formation_start, Timestamp{w.trading_end.minutes - 1});
            const std::size_t formation_len =
                static_cast<std::size_t>(w.trading_start.minutes - w.formation_start.minutes);
            AlignedPanel formation = full_panel.slice(0, formation_len - 1);

            CandidateScore sel;
            int lookback_override = -1;
            if (cfg.scenario == 1) {
                SelectionPolicy policy{cfg.pair_alpha, cfg.soft_cap_xbt, cfg.hard_cap_xbt, true};
                auto cands = pair_candidates(
                    formation, cfg.test == PairTestChoice::Adf ? CandidateTest::Adf : CandidateTest::Kss,
                    ur_opts, store);
                sel = select_spread(cands, policy);
            } else if (cfg.scenario == 2) {
                SelectionPolicy policy{cfg.johansen_alpha, cfg.soft_cap_xbt, cfg.hard_cap_xbt, true};
                auto cands = basket_candidates(formation, cfg.johansen_lag, cfg.johansen_alpha, store);
                sel = select_spread(cands, policy);
            } else {
                sel = fixed_pair_candidate(formation, cfg.pair_a, cfg.pair_b);
                lookback_override = cfg.scenario3_lookback;
            }

            rec.selection = sel;
            rec.traded = true;
            rec.status = "traded";
            trade_window(ctx, rec, full_panel, sel, lookback_override);
        } catch (const NoTradeThisWindow&) {
            rec.status = "no_candidate";
        } catch (const UntradableError& e) {
            rec.status = e.what();
        } catch (const DegenerateInputError& e) {
            rec.status = e.what();
        } catch (const SingularMatrixError& e) {
            rec.status = e.what();
        }

        if (!rec.traded) {
            // Flat week: keep the equity grid continuous for the metrics.
            for (std::int64_t t = w.trading_start.minutes; t < w.trading_end.minutes; ++t)
                result.ledger.mark_to_market(Timestamp{t}, specs);
        }

        rec.window_return = (current_equity(result.ledger) - eq_before) / cfg.capital_xbt;
        result.window_returns.push_back(rec.window_return);
        result.windows.push_back(std::move(rec));
    }

    result.curve.initial_capital = cfg.capital_xbt;
    for (const auto& pt : result.ledger.equity_curve()) {
        result.curve.ts.push_back(pt.ts);
        result.curve.equity.push_back(pt.equity);
    }
    // Sharpe basis: one return per trading window, weekly by default. The
    // single scenario-3 window is chunked into weeks for the same basis.
    const std::int64_t period_minutes =
        cfg.scenario == 3 ? 7 * kMinutesPerDay : cfg.trading_days * kMinutesPerDay;
    const int ppy = static_cast<int>(525600 / period_minutes);
    const std::vector<double> period_returns =
        cfg.scenario == 3 ? chunk_returns(result.curve, period_minutes, cfg.capital_xbt)
                          : result.window_returns;
    result.metrics = compute_metrics(result.curve, period_returns, ppy, -result.ledger.fees());

    // Buy-and-hold yardstick: equal-weight long of the universe across the
    // traded horizon, entered at the first trading minute.
    const Timestamp horizon_start = windows.front().trading_start;
    const Timestamp horizon_end{windows.back().trading_end.minutes - 1};
    auto bh_bars = bars_available_from(market, universe, horizon_start);
    std::vector<SymbolId> bh_syms;
    for (const auto& [sym, _] : bh_bars) bh_syms.push_back(sym);
    if (bh_syms.size() >= 2) {
        AlignedPanel bh_panel = align_panel(bh_bars, specs, horizon_start, horizon_end);
        result.baseline = buy_and_hold_baseline(bh_panel, bh_syms, cfg.capital_xbt);
        double final_value = 0.0;
        for (const auto& sym : bh_syms) {
            const auto& col = bh_panel.column(sym);
            final_value += (cfg.capital_xbt / static_cast<double>(bh_syms.size())) / col.front() *
                           col.back();
        }
        const double bh_fees = (cfg.capital_xbt + final_value) * 0.00075;
        result.baseline_metrics =
            compute_metrics(result.baseline,
                            chunk_returns(result.baseline, period_minutes, cfg.capital_xbt), ppy,
                            -bh_fees);
    }
    return result;
}

std::vector<RunResult> run_all_pairs(const ScenarioConfig& cfg, const MarketData& market,
                                     const CriticalValueStore& store) {
    if (cfg.scenario != 3) throw ConfigError("pair sweep only applies to scenario 3");
    std::vector<SymbolId> universe = cfg.universe;
    if (universe.empty())
        for (const auto& [sym, bars] : market.bars)
            if (!bars.empty()) universe.push_back(sym);
    std::sort(universe.begin(), universe.end());
    if (universe.size() < 2) throw ConfigError("need at least two symbols");

    std::vector<std::pair<SymbolId, SymbolId>> pairs;
    for (std::size_t i = 0; i < universe.size(); ++i)
        for (std::size_t j = i + 1; j < universe.size(); ++j)
            pairs.emplace_back(universe[i], universe[j]);

    std::vector<RunResult> results(pairs.size());
    std::vector<std::string> failures(pairs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(pairs.size()); ++k) {
        ScenarioConfig c = cfg;
        c.all_pairs = false;
        c.pair_a = pairs[static_cast<std::size_t>(k)].first;
        c.pair_b = pairs[static_cast<std::size_t>(k)].second;
        try {
            results[static_cast<std::size_t>(k)] = run_scenario(c, market, store);
        } catch (const Error& e) {
            failures[static_cast<std::size_t>(k)] = e.what();
            results[static_cast<std::size_t>(k)].label =
                "scenario3_" + c.pair_a + "_" + c.pair_b + "_failed";
        }
    }
    for (std::size_t k = 0; k < pairs.size(); ++k)
        if (!failures[k].empty() && !results[k].windows.empty())
            results[k].windows.front().status = failures[k];
    return results;
}

}  // namespace statarb
