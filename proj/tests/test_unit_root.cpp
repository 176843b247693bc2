#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "statarb/critical_values.hpp"
#include "statarb/errors.hpp"
#include "statarb/synth.hpp"
#include "statarb/unit_root.hpp"

using namespace statarb;

namespace {

// Fixed evaluation series. The expected statistics below were computed with
// an independent implementation (cross-checked against a reference package)
// and are frozen here.
std::vector<double> series_rw() { return simulate_random_walk(400, 77); }
std::vector<double> series_ar1() { return simulate_ar1(300, 0.6, 11); }

void use_small_profile(CriticalValueStore& store) {
    GenerationProfile p;
    p.sample_sizes = {250, 450};
    p.reps = {4000, 4000};
    p.seed = 42;
    store.set_profile(TestKind::AdfNoConstant, 1, p);
    store.set_profile(TestKind::KssRaw, 1, p);
}

}  // namespace

TEST_CASE("adf statistic matches frozen reference values") {
    auto rw = series_rw();
    auto ar = series_ar1();
    CHECK(adf_statistic(rw, 0) == doctest::Approx(-0.823023039118).epsilon(1e-10));
    CHECK(adf_statistic(rw, 3) == doctest::Approx(-0.732356609817).epsilon(1e-10));
    CHECK(adf_statistic(ar, 0) == doctest::Approx(-9.69126054162).epsilon(1e-10));
    CHECK(adf_statistic(ar, 2) == doctest::Approx(-7.40485089589).epsilon(1e-10));
}

TEST_CASE("kss statistic matches frozen reference values") {
    auto rw = series_rw();
    auto ar = series_ar1();
    CHECK(kss_statistic(rw, 0) == doctest::Approx(-1.32318462864).epsilon(1e-10));
    CHECK(kss_statistic(rw, 2) == doctest::Approx(-1.25558128663).epsilon(1e-10));
    CHECK(kss_statistic(ar, 0) == doctest::Approx(-7.88262236219).epsilon(1e-10));
}

TEST_CASE("statistics are invariant to rescaling the series") {
    auto rw = series_rw();
    std::vector<double> scaled(rw.size());
    for (std::size_t i = 0; i < rw.size(); ++i) scaled[i] = 1e-4 * rw[i];
    CHECK(adf_statistic(scaled, 2) == doctest::Approx(adf_statistic(rw, 2)).epsilon(1e-9));
    CHECK(kss_statistic(scaled, 2) == doctest::Approx(kss_statistic(rw, 2)).epsilon(1e-9));
}

TEST_CASE("default lag cap follows the T^(1/4) rule") {
    CHECK(default_max_lag(100) == 12);
    CHECK(default_max_lag(400) == 16);
    CHECK(default_max_lag(50) == 10);
}

TEST_CASE("aic lag selection picks order zero on these series") {
    // Matches the reference package's automatic selection at maxlag 12.
    CriticalValueStore store("", ExecutionMode::Serial);
    use_small_profile(store);
    UnitRootOptions opts;
    opts.max_lag = 12;

    for (const auto& s : {series_rw(), series_ar1()}) {
        AdfResult r = adf_test(s, opts, store);
        CHECK(r.lag_order == 0);
        CHECK(r.statistic == doctest::Approx(adf_statistic(s, 0)).epsilon(1e-12));
    }

    KssResult k = kss_test(series_rw(), opts, store);
    CHECK(k.statistic == doctest::Approx(kss_statistic(series_rw(), k.lag_order)).epsilon(1e-12));
}

TEST_CASE("fixed lag rule uses exactly the requested order") {
    CriticalValueStore store("", ExecutionMode::Serial);
    use_small_profile(store);
    UnitRootOptions opts;
    opts.max_lag = 3;
    opts.lag_rule = LagRule::Fixed;

    AdfResult r = adf_test(series_rw(), opts, store);
    CHECK(r.lag_order == 3);
    CHECK(r.statistic == doctest::Approx(adf_statistic(series_rw(), 3)).epsilon(1e-12));

    KssResult k = kss_test(series_rw(), opts, store);
    CHECK(k.lag_order == 3);
    CHECK(k.statistic == doctest::Approx(kss_statistic(series_rw(), 3)).epsilon(1e-12));
}

TEST_CASE("stationary series reject and random walks do not") {
    CriticalValueStore store("", ExecutionMode::Serial);
    use_small_profile(store);
    UnitRootOptions opts;
    opts.max_lag = 4;

    AdfResult stationary = adf_test(series_ar1(), opts, store);
    CHECK(stationary.p_value < 0.01);
    CHECK(stationary.gamma < 0.0);
    for (double level : opts.levels) CHECK(stationary.reject_at.at(level));

    AdfResult walk = adf_test(series_rw(), opts, store);
    CHECK(walk.p_value > 0.10);
    for (double level : opts.levels) CHECK_FALSE(walk.reject_at.at(level));

    KssResult kss_stationary = kss_test(series_ar1(), opts, store);
    CHECK(kss_stationary.p_value < 0.01);
    CHECK(kss_stationary.reject_at.at(0.01));

    KssResult kss_walk = kss_test(series_rw(), opts, store);
    CHECK(kss_walk.p_value > 0.10);
    CHECK_FALSE(kss_walk.reject_at.at(0.10));
}

TEST_CASE("rejection flags agree with the table quantiles") {
    CriticalValueStore store("", ExecutionMode::Serial);
    use_small_profile(store);
    UnitRootOptions opts;
    opts.max_lag = 2;
    const auto& table = store.table(TestKind::AdfNoConstant);

    auto s = series_ar1();
    AdfResult r = adf_test(s, opts, store);
    const int T = static_cast<int>(s.size());
    for (double level : opts.levels)
        CHECK(r.reject_at.at(level) == (r.statistic < table.quantile(level, T)));
}

TEST_CASE("degenerate series are rejected") {
    CriticalValueStore store("", ExecutionMode::Serial);
    use_small_profile(store);
    UnitRootOptions opts;

    std::vector<double> constant(100, 2.5);
    CHECK_THROWS_AS(adf_statistic(constant, 0), DegenerateInputError);
    CHECK_THROWS_AS(kss_statistic(constant, 0), DegenerateInputError);
    CHECK_THROWS_AS(adf_test(constant, opts, store), DegenerateInputError);

    std::vector<double> tiny{1.0, 2.0, 1.5};
    CHECK_THROWS_AS(adf_statistic(tiny, 0), DegenerateInputError);

    // An oversized lag order is clamped, not rejected.
    auto rw = series_rw();
    CHECK(adf_statistic(rw, 395) == doctest::Approx(adf_statistic(rw, 196)).epsilon(1e-14));
}
