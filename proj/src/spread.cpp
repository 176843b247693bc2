#include "statarb/spread.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "statarb/critical_values.hpp"
#include "statarb/errors.hpp"
#include "statarb/johansen.hpp"
#include "statarb/ols.hpp"

namespace statarb {

namespace {

// Relative floor below which an eigenvector entry counts as numerically zero
// and must not drive the scaling.
constexpr double kWeightTolerance = 1e-9;

double min_meaningful_abs(const SpreadDef& def) {
    double max_abs = 0.0;
    for (const auto& leg : def.legs) max_abs = std::max(max_abs, std::abs(leg.weight));
    if (max_abs == 0.0) throw UntradableError("integerize: all weights are zero");
    double min_abs = max_abs;
    for (const auto& leg : def.legs) {
        const double a = std::abs(leg.weight);
        if (a > kWeightTolerance * max_abs) min_abs = std::min(min_abs, a);
    }
    return min_abs;
}

}  // namespace

std::string SpreadDef::key() const {
    std::vector<const SpreadLeg*> sorted;
    sorted.reserve(legs.size());
    for (const auto& leg : legs) sorted.push_back(&leg);
    std::sort(sorted.begin(), sorted.end(),
              [](const SpreadLeg* a, const SpreadLeg* b) { return a->symbol < b->symbol; });
    std::string out;
    char buf[64];
    for (const auto* leg : sorted) {
        std::snprintf(buf, sizeof(buf), "%s:%.12g,", leg->symbol.c_str(), leg->weight);
        out += buf;
    }
    return out;
}

PairSpreadFit pair_spread(const SymbolId& y_sym, const std::vector<double>& y,
                          const SymbolId& x_sym, const std::vector<double>& x) {
    if (y_sym == x_sym) throw ConfigError("pair_spread: both legs are " + y_sym);
    if (y.size() != x.size()) throw DegenerateInputError("pair_spread: leg lengths differ");
    if (y.size() < 100) throw DegenerateInputError("pair_spread: need at least 100 observations");

    OlsFit fit = ols_fit(y, x, true);
    PairSpreadFit out;
    out.beta = fit.beta(0);
    out.alpha = fit.alpha;
    out.residuals = std::move(fit.residuals);
    out.def.legs = {{y_sym, 1.0}, {x_sym, -out.beta}};
    out.def.intercept = -out.alpha;
    return out;
}

PairSpreadFit pair_spread(const AlignedPanel& panel, const SymbolId& y_sym, const SymbolId& x_sym) {
    return pair_spread(y_sym, panel.column(y_sym), x_sym, panel.column(x_sym));
}

SpreadDef canonicalize_orientation(SpreadDef def) {
    double max_abs = 0.0;
    for (const auto& leg : def.legs) max_abs = std::max(max_abs, std::abs(leg.weight));
    for (const auto& leg : def.legs) {
        if (std::abs(leg.weight) <= kWeightTolerance * max_abs) continue;
        if (leg.weight < 0.0) {
            for (auto& l : def.legs) l.weight = -l.weight;
            def.intercept = -def.intercept;
        }
        break;
    }
    return def;
}

IntegerizeResult integerize_weights(const SpreadDef& raw) {
    if (raw.legs.size() < 2) throw UntradableError("integerize: need at least two legs");
    const double min_abs = min_meaningful_abs(raw);
    const double scale = 1.0 / min_abs;

    IntegerizeResult out;
    out.def.intercept = raw.intercept * scale;
    out.def.integerized = true;
    bool any_pos = false, any_neg = false;
    for (const auto& leg : raw.legs) {
        const double w = std::round(leg.weight * scale);
        if (w == 0.0) {
            out.dropped.push_back(leg.symbol);
            continue;
        }
        any_pos = any_pos || w > 0.0;
        any_neg = any_neg || w < 0.0;
        out.def.legs.push_back({leg.symbol, w});
    }
    if (out.def.legs.size() < 2 || !any_pos || !any_neg)
        throw UntradableError("integerize: weights do not form a long/short combination");
    return out;
}

std::vector<double> evaluate_spread(const SpreadDef& def, const AlignedPanel& panel) {
    std::vector<double> out(panel.length(), def.intercept);
    for (const auto& leg : def.legs) {
        const auto& col = panel.column(leg.symbol);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += leg.weight * col[i];
    }
    return out;
}

double unit_value_xbt(const SpreadDef& def, const AlignedPanel& panel, std::size_t row) {
    double v = 0.0;
    for (const auto& leg : def.legs)
        v += std::abs(leg.weight) * panel.value(row, panel.column_of(leg.symbol));
    return v;
}

std::optional<CandidateScore> score_candidate(const SpreadDef& raw, const AlignedPanel& formation) {
    try {
        CandidateScore score;
        score.spread = integerize_weights(canonicalize_orientation(raw)).def;
        const auto series = evaluate_spread(score.spread, formation);
        score.ou = calibrate_ou(series);
        score.half_life = half_life_minutes(score.ou);
        score.lookback = lookback_window(score.ou);
        score.unit_value = unit_value_xbt(score.spread, formation, formation.length() - 1);
        return score;
    } catch (const UntradableError&) {
    } catch (const NonMeanRevertingError&) {
    } catch (const ConfigError&) {
        // lookback out of range: the relation decays too slowly to trade
    }
    return std::nullopt;
}

std::vector<CandidateScore> pair_candidates(const AlignedPanel& formation, CandidateTest test,
                                            const UnitRootOptions& opts,
                                            const CriticalValueStore& store) {
    if (test != CandidateTest::Adf && test != CandidateTest::Kss)
        throw ConfigError("pair_candidates: test must be Adf or Kss");
    const auto& syms = formation.symbols();
    std::vector<std::pair<SymbolId, SymbolId>> pairs;
    for (std::size_t i = 0; i < syms.size(); ++i)
        for (std::size_t j = i + 1; j < syms.size(); ++j) pairs.emplace_back(syms[i], syms[j]);

    // Touch the table before the parallel region so lazy generation cannot
    // serialize the loop behind the store lock.
    store.table(test == CandidateTest::Adf ? TestKind::AdfNoConstant : TestKind::KssRaw, 1);

    std::vector<std::optional<CandidateScore>> slots(pairs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(pairs.size()); ++k) {
        const auto& pr = pairs[static_cast<std::size_t>(k)];
        try {
            PairSpreadFit fit = pair_spread(formation, pr.first, pr.second);
            UnitRootResult ur = test == CandidateTest::Adf ? adf_test(fit.residuals, opts, store)
                                                           : kss_test(fit.residuals, opts, store);
            auto score = score_candidate(fit.def, formation);
            if (!score) continue;
            score->test = test;
            score->statistic = ur.statistic;
            score->pvalue = ur.p_value;
            slots[static_cast<std::size_t>(k)] = std::move(score);
        } catch (const Error&) {
            // this pair is unusable; the others are unaffected
        }
    }

    std::vector<CandidateScore> out;
    for (auto& s : slots)
        if (s) out.push_back(std::move(*s));
    return out;
}

std::vector<CandidateScore> basket_candidates(const AlignedPanel& formation, int lag_p,
                                              double alpha, const CriticalValueStore& store) {
    const auto& syms = formation.symbols();
    JohansenResult jr = johansen_test(formation, lag_p, alpha, store);

    std::vector<CandidateScore> out;
    for (const auto& vec : jr.vectors) {
        SpreadDef raw;
        for (std::size_t i = 0; i < syms.size(); ++i)
            raw.legs.push_back({syms[i], vec.weights(static_cast<Eigen::Index>(i))});
        raw.intercept = vec.intercept;
        auto score = score_candidate(raw, formation);
        if (!score) continue;
        score->test = CandidateTest::Johansen;
        score->pvalue = vec.pvalue;
        out.push_back(std::move(*score));
    }
    return out;
}

CandidateScore select_spread(const std::vector<CandidateScore>& candidates,
                             const SelectionPolicy& policy) {
    const CandidateScore* best = nullptr;
    int best_tier = 3;
    for (const auto& c : candidates) {
        if (policy.require_test && !(c.pvalue < policy.test_alpha)) continue;
        if (c.unit_value > policy.hard_cap_xbt) continue;
        const int tier = c.unit_value <= policy.soft_cap_xbt ? 1 : 2;
        if (tier > best_tier) continue;
        if (best == nullptr || tier < best_tier || c.half_life < best->half_life ||
            (c.half_life == best->half_life && c.spread.key() < best->spread.key())) {
            best = &c;
            best_tier = tier;
        }
    }
    if (best == nullptr) throw NoTradeThisWindow("no candidate passed the selection filters");
    return *best;
}

}  // namespace statarb
