#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "statarb/critical_values.hpp"
#include "statarb/errors.hpp"
#include "statarb/rng.hpp"
#include "statarb/spread.hpp"
#include "statarb/synth.hpp"

using namespace statarb;

namespace {

SpreadDef raw_pair(double w0, double w1, double intercept = 0.0) {
    SpreadDef def;
    def.legs = {SpreadLeg{"A", w0}, SpreadLeg{"B", w1}};
    def.intercept = intercept;
    return def;
}

AlignedPanel panel_from_columns(const std::vector<std::vector<double>>& cols,
                                std::vector<SymbolId> symbols) {
    AlignedPanel panel(Timestamp{0}, cols[0].size(), symbols);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const std::size_t c = panel.column_of(symbols[i]);
        for (std::size_t t = 0; t < cols[i].size(); ++t) panel.set(t, c, cols[i][t], true);
    }
    return panel;
}

double leg_weight(const SpreadDef& def, const SymbolId& sym) {
    for (const auto& leg : def.legs)
        if (leg.symbol == sym) return leg.weight;
    FAIL("missing leg ", sym);
    return 0.0;
}

}  // namespace

TEST_CASE("integerize scales the smallest leg to one and rounds half away from zero") {
    auto r = integerize_weights(raw_pair(1.0, -0.5, 0.2));
    CHECK(leg_weight(r.def, "A") == 2.0);
    CHECK(leg_weight(r.def, "B") == -1.0);
    CHECK(r.def.intercept == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(r.def.integerized);
    CHECK(r.dropped.empty());

    // 1/0.4 = 2.5 contracts: the boundary rounds away from zero.
    auto r2 = integerize_weights(raw_pair(1.0, -0.4));
    CHECK(leg_weight(r2.def, "A") == 3.0);
    CHECK(leg_weight(r2.def, "B") == -1.0);

    SpreadDef basket;
    basket.legs = {SpreadLeg{"A", 0.31}, SpreadLeg{"B", -1.55}, SpreadLeg{"C", 0.62}};
    auto r3 = integerize_weights(basket);
    CHECK(leg_weight(r3.def, "A") == 1.0);
    CHECK(leg_weight(r3.def, "B") == -5.0);
    CHECK(leg_weight(r3.def, "C") == 2.0);
}

TEST_CASE("integerize preserves signs and drops negligible legs") {
    SpreadDef raw;
    raw.legs = {SpreadLeg{"A", 1.0}, SpreadLeg{"B", -0.5}, SpreadLeg{"C", 1e-9}};
    auto r = integerize_weights(raw);
    CHECK(r.dropped == std::vector<SymbolId>{"C"});
    CHECK(r.def.legs.size() == 2);
    for (const auto& leg : r.def.legs) {
        CHECK(leg.weight == std::round(leg.weight));
        CHECK(leg.weight != 0.0);
    }

    // All-long rounded legs leave nothing to short against.
    CHECK_THROWS_AS(integerize_weights(raw_pair(1.0, 0.5)), UntradableError);
    SpreadDef empty;
    CHECK_THROWS_AS(integerize_weights(empty), UntradableError);
}

TEST_CASE("integerize properties over random weights") {
    Rng rng(7);
    int tradable = 0;
    for (int trial = 0; trial < 200; ++trial) {
        SpreadDef raw;
        raw.legs = {SpreadLeg{"A", rng.normal()}, SpreadLeg{"B", rng.normal()},
                    SpreadLeg{"C", rng.normal()}};
        raw.intercept = rng.normal();
        IntegerizeResult r;
        try {
            r = integerize_weights(raw);
        } catch (const UntradableError&) {
            continue;
        }
        ++tradable;

        double min_raw = 1e300;
        for (const auto& leg : raw.legs) min_raw = std::min(min_raw, std::abs(leg.weight));
        const double scale = 1.0 / min_raw;
        CHECK(r.def.intercept == doctest::Approx(raw.intercept * scale).epsilon(1e-12));

        double min_mag = 1e300;
        for (const auto& leg : r.def.legs) {
            const double original = leg_weight(raw, leg.symbol);
            CHECK(leg.weight == std::round(leg.weight));           // whole contracts
            CHECK(leg.weight * original > 0.0);                    // sign preserved
            CHECK(leg.weight == std::round(original * scale));     // nearest count
            min_mag = std::min(min_mag, std::abs(leg.weight));
        }
        // The smallest meaningful leg always survives as exactly one contract.
        CHECK(min_mag == 1.0);
    }
    CHECK(tradable > 100);
}

TEST_CASE("canonical orientation flips a leading short") {
    SpreadDef def = raw_pair(-1.0, 2.0, 3.0);
    SpreadDef flipped = canonicalize_orientation(def);
    CHECK(leg_weight(flipped, "A") == 1.0);
    CHECK(leg_weight(flipped, "B") == -2.0);
    CHECK(flipped.intercept == -3.0);

    // Already positive stays put.
    SpreadDef same = canonicalize_orientation(raw_pair(1.0, -2.0, 3.0));
    CHECK(leg_weight(same, "A") == 1.0);
    CHECK(same.intercept == 3.0);
}

TEST_CASE("spread key is stable under leg order") {
    SpreadDef ab = raw_pair(2.0, -1.0);
    SpreadDef ba;
    ba.legs = {SpreadLeg{"B", -1.0}, SpreadLeg{"A", 2.0}};
    CHECK(ab.key() == ba.key());
    CHECK(ab.key() != raw_pair(1.0, -2.0).key());
}

TEST_CASE("pair regression with an exact linear relation") {
    std::vector<double> p2(120);
    std::vector<double> p1(p2.size());
    for (std::size_t i = 0; i < p2.size(); ++i) {
        p2[i] = 1.0 + static_cast<double>(i) + ((i % 3) == 0 ? 0.25 : -0.1);
        p1[i] = 2.0 * p2[i] + 5.0;
    }

    PairSpreadFit fit = pair_spread("P1", p1, "P2", p2);
    CHECK(fit.beta == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(fit.alpha == doctest::Approx(5.0).epsilon(1e-12));
    for (double r : fit.residuals) CHECK(std::abs(r) < 1e-10);

    // def encodes p1 - beta p2 - alpha.
    CHECK(leg_weight(fit.def, "P1") == 1.0);
    CHECK(leg_weight(fit.def, "P2") == doctest::Approx(-2.0).epsilon(1e-13));
    CHECK(fit.def.intercept == doctest::Approx(-5.0).epsilon(1e-12));

    auto panel = panel_from_columns({p1, p2}, {"P1", "P2"});
    auto values = evaluate_spread(fit.def, panel);
    REQUIRE(values.size() == p1.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        CHECK(values[i] == doctest::Approx(fit.residuals[i]).epsilon(1e-12));
}

TEST_CASE("unit value sums absolute leg cost at a row") {
    auto panel = panel_from_columns({{0.1, 0.2}, {0.05, 0.01}}, {"A", "B"});
    SpreadDef def = raw_pair(2.0, -3.0);
    CHECK(unit_value_xbt(def, panel, 0) == doctest::Approx(2 * 0.1 + 3 * 0.05).epsilon(1e-15));
    CHECK(unit_value_xbt(def, panel, 1) == doctest::Approx(2 * 0.2 + 3 * 0.01).epsilon(1e-15));
}

TEST_CASE("score_candidate calibrates a planted mean-reverting pair") {
    SynthSpec spec;
    spec.theta = 0.01;
    spec.sigma_spread = 1e-4;
    spec.sigma_trend = 1e-5;
    spec.length = 20000;
    spec.seed = 3;
    spec.true_weights = {1.0, -1.0};
    AlignedPanel panel = synth_cointegrated(spec);

    PairSpreadFit fit = pair_spread(panel, "SYN0", "SYN1");
    auto score = score_candidate(fit.def, panel);
    REQUIRE(score.has_value());
    CHECK(score->spread.integerized);
    CHECK(score->half_life == doctest::Approx(std::log(2.0) / 0.01).epsilon(0.5));
    CHECK(score->lookback.n_minutes >= 2);
    CHECK(score->unit_value > 0.0);
    CHECK(score->test == CandidateTest::None);
    CHECK(score->pvalue == 1.0);

    // A pure random walk spread fails calibration and returns nothing.
    SynthSpec walk = spec;
    walk.theta = 0.0;
    walk.seed = 8;
    AlignedPanel wpanel = synth_cointegrated(walk);
    PairSpreadFit wfit = pair_spread(wpanel, "SYN0", "SYN1");
    auto none = score_candidate(wfit.def, wpanel);
    // Either the slope came out non-negative (no score) or it reverts so
    // slowly the window rule rejects it; both mean "do not trade".
    if (none.has_value()) CHECK(none->half_life > 1000.0);
}

TEST_CASE("selection prefers the shortest half-life in the affordable tier") {
    auto mk = [](const std::string& a, double half_life, double unit_value, double pvalue) {
        CandidateScore c;
        c.spread.legs = {SpreadLeg{a, 1.0}, SpreadLeg{"Z", -1.0}};
        c.half_life = half_life;
        c.unit_value = unit_value;
        c.pvalue = pvalue;
        c.test = CandidateTest::Adf;
        return c;
    };
    SelectionPolicy policy;
    policy.test_alpha = 0.01;
    policy.soft_cap_xbt = 1.0;
    policy.hard_cap_xbt = 3.0;

    // Spec walk-through: two significant candidates, the shorter half-life wins.
    auto picked = select_spread({mk("A", 900.0, 0.5, 0.001), mk("B", 400.0, 0.7, 0.002)}, policy);
    CHECK(picked.spread.legs[0].symbol == "B");

    // A single candidate failing the test threshold leaves nothing.
    CHECK_THROWS_AS(select_spread({mk("A", 400.0, 0.5, 0.02)}, policy), NoTradeThisWindow);

    // Soft tier beats hard tier even at a longer half-life.
    picked = select_spread({mk("A", 300.0, 2.5, 0.001), mk("B", 800.0, 0.9, 0.001)}, policy);
    CHECK(picked.spread.legs[0].symbol == "B");

    // With no affordable candidate the stretch tier is used.
    picked = select_spread({mk("A", 300.0, 2.5, 0.001), mk("B", 200.0, 2.9, 0.001)}, policy);
    CHECK(picked.spread.legs[0].symbol == "B");

    // Beyond the hard cap nothing trades.
    CHECK_THROWS_AS(select_spread({mk("A", 300.0, 3.5, 0.001)}, policy), NoTradeThisWindow);
    CHECK_THROWS_AS(select_spread({}, policy), NoTradeThisWindow);

    // Equal half-lives break the tie on the lexicographic key.
    picked = select_spread({mk("N", 400.0, 0.5, 0.001), mk("C", 400.0, 0.5, 0.001)}, policy);
    CHECK(picked.spread.legs[0].symbol == "C");

    // Without a required test, insignificant candidates survive.
    SelectionPolicy lax = policy;
    lax.require_test = false;
    picked = select_spread({mk("A", 400.0, 0.5, 0.9)}, lax);
    CHECK(picked.spread.legs[0].symbol == "A");
}

TEST_CASE("pair candidates enumerate alphabetical pairs and carry test results") {
    SynthSpec spec;
    spec.n_symbols = 3;
    spec.theta = 0.02;
    spec.sigma_spread = 5e-4;
    spec.sigma_trend = 1e-4;
    spec.length = 4000;
    spec.seed = 9;
    spec.true_weights = {1.0, -1.0, 0.0};
    AlignedPanel panel = synth_cointegrated(spec);

    CriticalValueStore store("", ExecutionMode::Serial);
    GenerationProfile p;
    p.sample_sizes = {400};
    p.reps = {2000};
    p.seed = 4;
    store.set_profile(TestKind::AdfNoConstant, 1, p);
    store.set_profile(TestKind::KssRaw, 1, p);

    UnitRootOptions opts;
    opts.max_lag = 4;
    auto cands = pair_candidates(panel, CandidateTest::Adf, opts, store);
    CHECK(!cands.empty());
    for (const auto& c : cands) {
        CHECK(c.test == CandidateTest::Adf);
        CHECK(c.spread.legs.size() == 2);
        CHECK(c.spread.integerized);
        CHECK(c.pvalue >= 0.0);
        CHECK(c.pvalue <= 1.0);
    }
    // The planted pair is among the candidates and strongly significant.
    bool found = false;
    for (const auto& c : cands) {
        bool has0 = false, has1 = false;
        for (const auto& leg : c.spread.legs) {
            has0 = has0 || leg.symbol == "SYN0";
            has1 = has1 || leg.symbol == "SYN1";
        }
        if (has0 && has1) {
            found = true;
            CHECK(c.pvalue < 0.01);
        }
    }
    CHECK(found);

    CHECK_THROWS_AS(pair_candidates(panel, CandidateTest::Johansen, opts, store), ConfigError);
}
