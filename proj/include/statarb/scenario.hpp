#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "statarb/critical_values.hpp"
#include "statarb/data.hpp"
#include "statarb/exec.hpp"
#include "statarb/metrics.hpp"
#include "statarb/panel.hpp"
#include "statarb/signals.hpp"
#include "statarb/spread.hpp"

namespace statarb {

enum class PairTestChoice { Adf, Kss };

struct ScenarioConfig {
    int scenario = 1;
    PairTestChoice test = PairTestChoice::Adf;  // scenario 1
    std::vector<SymbolId> universe;             // empty: every symbol in the data
    SymbolId pair_a, pair_b;                    // scenario 3; empty + all_pairs for the sweep
    bool all_pairs = false;

    Timestamp range_start{0};
    Timestamp range_end{0};  // exclusive
    int formation_days = 90;
    int trading_days = 7;

    Thresholds thresholds;
    bool first_touch = false;
    FillPolicy fill_policy;

    double capital_xbt = 1.0;
    double soft_cap_xbt = 1.0;
    double hard_cap_xbt = 3.0;
    double pair_alpha = 0.01;
    double johansen_alpha = 0.10;
    int johansen_lag = 2;
    int scenario3_lookback = 1440;
    int max_lag = -1;  // negative: standard cap
    LagRule lag_rule = LagRule::Aic;
    std::optional<double> funding_rate_override;

    std::uint64_t seed = 1;
    std::string cv_cache_dir;
    std::string out_dir;

    // data file paths (used by the CLI loader; in-memory runs ignore them)
    std::string bars_path, quotes_path, trades_path, contracts_path;

    void validate() const;
};

ScenarioConfig load_config(const std::string& path);

struct WindowRecord {
    int index = 0;
    WalkForwardWindow window;
    bool traded = false;
    std::string status;  // "traded", "no_candidate", or an error note
    std::optional<CandidateScore> selection;
    double lot = 0.0;
    int n_signals = 0;
    double window_return = 0.0;  // P&L over the window / configured capital
};

struct RunResult {
    std::string label;
    std::vector<WindowRecord> windows;
    std::vector<SignalEvent> signals;
    Ledger ledger{0.0};
    EquityCurve curve;
    std::vector<double> window_returns;
    MetricsReport metrics;
    EquityCurve baseline;
    MetricsReport baseline_metrics;
};

MarketData load_market_data(const ScenarioConfig& cfg);

RunResult run_scenario(const ScenarioConfig& cfg, const MarketData& market,
                       const CriticalValueStore& store);

// Scenario 3 with --pair all: one result per unordered pair in the universe.
std::vector<RunResult> run_all_pairs(const ScenarioConfig& cfg, const MarketData& market,
                                     const CriticalValueStore& store);

}  // namespace statarb
