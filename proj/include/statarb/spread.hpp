#pragma once

#include <optional>
#include <string>
#include <vector>

#include "statarb/contracts.hpp"
#include "statarb/ou.hpp"
#include "statarb/panel.hpp"
#include "statarb/unit_root.hpp"

namespace statarb {

class CriticalValueStore;

struct SpreadLeg {
    SymbolId symbol;
    double weight = 0.0;
};

// spread_t = sum_i weight_i * price_i(t) + intercept, prices XBT-denominated.
struct SpreadDef {
    std::vector<SpreadLeg> legs;
    double intercept = 0.0;
    bool integerized = false;

    // Stable identity for sorting and tie-breaks: legs sorted by symbol.
    std::string key() const;
};

struct PairSpreadFit {
    SpreadDef def;  // raw: first leg weight +1, second leg -beta
    double beta = 0.0;
    double alpha = 0.0;
    std::vector<double> residuals;
};

// OLS of the first symbol's prices on the second's with intercept.
PairSpreadFit pair_spread(const AlignedPanel& panel, const SymbolId& y_sym, const SymbolId& x_sym);
PairSpreadFit pair_spread(const SymbolId& y_sym, const std::vector<double>& y,
                          const SymbolId& x_sym, const std::vector<double>& x);

struct IntegerizeResult {
    SpreadDef def;
    std::vector<SymbolId> dropped;  // legs that rounded to zero contracts
};

// Scales weights so the smallest surviving magnitude becomes 1, rounds half
// away from zero, and rescales the intercept without rounding. Signs of
// retained legs are preserved. Throws UntradableError when the rounded legs
// all share one sign (nothing to long against the shorts).
IntegerizeResult integerize_weights(const SpreadDef& raw);

// Flips every weight (and the intercept) when the first leg with meaningful
// magnitude is negative, giving eigenvector-derived spreads a deterministic
// orientation.
SpreadDef canonicalize_orientation(SpreadDef def);

std::vector<double> evaluate_spread(const SpreadDef& def, const AlignedPanel& panel);

// Cost in XBT of buying one unit of every leg (long and short alike) at the
// prices in the given panel row.
double unit_value_xbt(const SpreadDef& def, const AlignedPanel& panel, std::size_t row);

enum class CandidateTest { Adf, Kss, Johansen, None };

struct CandidateScore {
    SpreadDef spread;  // integerized
    CandidateTest test = CandidateTest::None;
    double statistic = 0.0;
    double pvalue = 1.0;
    OuParams ou;
    double half_life = 0.0;  // minutes
    LookbackWindow lookback;
    double unit_value = 0.0;  // XBT at the end of the formation window
};

struct SelectionPolicy {
    double test_alpha = 0.01;
    double soft_cap_xbt = 1.0;
    double hard_cap_xbt = 3.0;
    bool require_test = true;
};

// Scores one raw relation end to end: orient, integerize, evaluate over the
// formation panel, calibrate the mean reversion, price the unit. Returns
// nullopt when the relation is untradable or not mean reverting.
std::optional<CandidateScore> score_candidate(const SpreadDef& raw, const AlignedPanel& formation);

// Every unordered symbol pair, alphabetical orientation, tested with the
// chosen residual test. Pairs whose fit degenerates are skipped.
std::vector<CandidateScore> pair_candidates(const AlignedPanel& formation, CandidateTest test,
                                            const UnitRootOptions& opts,
                                            const CriticalValueStore& store);

std::vector<CandidateScore> basket_candidates(const AlignedPanel& formation, int lag_p,
                                              double alpha, const CriticalValueStore& store);

// Filters on significance and unit value, prefers the affordable tier
// (<= soft cap) over the stretch tier (<= hard cap), then takes the shortest
// half-life with a lexicographic key tie-break. Throws NoTradeThisWindow
// when nothing survives.
CandidateScore select_spread(const std::vector<CandidateScore>& candidates,
                             const SelectionPolicy& policy);

}  // namespace statarb
