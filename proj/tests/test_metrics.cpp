#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "statarb/errors.hpp"
#include "statarb/metrics.hpp"
#include "statarb/rng.hpp"

using namespace statarb;

namespace {

EquityCurve curve_of(std::vector<double> equity, double initial, std::int64_t t0 = 0) {
    EquityCurve c;
    c.initial_capital = initial;
    for (std::size_t i = 0; i < equity.size(); ++i)
        c.ts.push_back(Timestamp{t0 + static_cast<std::int64_t>(i)});
    c.equity = std::move(equity);
    return c;
}

// Pairwise definition kept as the oracle for the single-pass implementation:
// largest prefix-peak-to-point decline, fraction taken from that same peak.
Drawdown drawdown_oracle(const std::vector<double>& eq) {
    Drawdown dd;
    for (std::size_t j = 0; j < eq.size(); ++j) {
        double peak = eq[0];
        for (std::size_t i = 1; i <= j; ++i) peak = std::max(peak, eq[i]);
        const double drop = peak - eq[j];
        if (drop > dd.xbt) {
            dd.xbt = drop;
            dd.fraction = peak > 0.0 ? drop / peak : 0.0;
        }
    }
    return dd;
}

}  // namespace

TEST_CASE("drawdown pin") {
    const auto dd = max_drawdown(curve_of({1.0, 1.2, 0.9, 1.5}, 1.0));
    CHECK(dd.xbt == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(dd.fraction == doctest::Approx(0.25).epsilon(1e-15));

    const auto flat = max_drawdown(curve_of({1.0, 1.1, 1.2, 1.3}, 1.0));
    CHECK(flat.xbt == 0.0);
    CHECK(flat.fraction == 0.0);
}

TEST_CASE("drawdown matches the quadratic oracle on random walks") {
    Rng rng(303);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> eq{10.0};
        for (int i = 1; i < 300; ++i) eq.push_back(eq.back() + 0.2 * rng.normal());
        const auto got = max_drawdown(curve_of(eq, 10.0));
        const auto want = drawdown_oracle(eq);
        CHECK(got.xbt == doctest::Approx(want.xbt).epsilon(1e-12));
        CHECK(got.fraction == doctest::Approx(want.fraction).epsilon(1e-12));
    }
}

TEST_CASE("equity curve validation") {
    EquityCurve empty;
    CHECK_THROWS_AS(empty.validate(), DegenerateInputError);

    auto ragged = curve_of({1.0, 1.1}, 1.0);
    ragged.equity.push_back(1.2);
    CHECK_THROWS_AS(ragged.validate(), DegenerateInputError);

    auto unordered = curve_of({1.0, 1.1, 1.2}, 1.0);
    unordered.ts[2] = unordered.ts[1];
    CHECK_THROWS_AS(max_drawdown(unordered), DegenerateInputError);
}

TEST_CASE("sharpe pin and degenerate cases") {
    // Two points with mean 0.03 and sample std exactly 0.05.
    const double d = 0.05 / std::sqrt(2.0);
    const std::vector<double> rets{0.03 - d, 0.03 + d};
    const auto s = sharpe(rets, 52);
    REQUIRE(s.has_value());
    CHECK(*s == doctest::Approx(0.6 * std::sqrt(52.0)).epsilon(1e-12));
    CHECK(*s == doctest::Approx(4.3267).epsilon(1e-4));

    // Risk-free subtracts from the mean per period.
    CHECK(*sharpe(rets, 52, 0.03) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK(!sharpe({0.01}, 52).has_value());
    CHECK(!sharpe({0.01, 0.01, 0.01}, 52).has_value());
    CHECK(!sharpe({}, 52).has_value());
}

TEST_CASE("romad pins") {
    // +50% total over a 25% max drawdown.
    const auto r = romad(curve_of({1.0, 1.2, 0.9, 1.5}, 1.0));
    REQUIRE(r.has_value());
    CHECK(*r == doctest::Approx(2.0).epsilon(1e-12));

    // +10.17% over a 40.41% drawdown sits near one quarter.
    const double peak = 1.2;
    const double trough = peak * (1.0 - 0.4041);
    const auto deep = romad(curve_of({1.0, peak, trough, 1.1017}, 1.0));
    REQUIRE(deep.has_value());
    CHECK(*deep == doctest::Approx(0.1017 / 0.4041).epsilon(1e-12));
    CHECK(*deep == doctest::Approx(0.2517).epsilon(1e-3));

    // Monotone curves have no drawdown to divide by.
    CHECK(!romad(curve_of({1.0, 1.1, 1.2}, 1.0)).has_value());
}

TEST_CASE("monthly returns compound across full months") {
    EquityCurve c;
    c.initial_capital = 1.0;
    c.ts = {timestamp_from_civil(2019, 1, 1), timestamp_from_civil(2019, 1, 31, 23, 59),
            timestamp_from_civil(2019, 2, 1), timestamp_from_civil(2019, 2, 28, 23, 59)};
    c.equity = {1.0, 1.1, 1.1, 1.1 * 0.95};

    const auto months = monthly_returns(c);
    REQUIRE(months.size() == 2);
    CHECK(months[0].year == 2019);
    CHECK(months[0].month == 1);
    CHECK(months[0].ret == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(!months[0].partial);
    CHECK(months[1].month == 2);
    CHECK(months[1].ret == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(!months[1].partial);

    double compounded = 1.0;
    for (const auto& m : months) compounded *= 1.0 + m.ret;
    CHECK(compounded - 1.0 == doctest::Approx(0.045).epsilon(1e-10));
}

TEST_CASE("months cut short are flagged partial") {
    EquityCurve c;
    c.initial_capital = 1.0;
    c.ts = {timestamp_from_civil(2019, 1, 15), timestamp_from_civil(2019, 1, 31, 23, 59),
            timestamp_from_civil(2019, 2, 10)};
    c.equity = {1.0, 1.05, 1.02};
    const auto months = monthly_returns(c);
    REQUIRE(months.size() == 2);
    CHECK(months[0].partial);   // started mid-January
    CHECK(months[1].partial);   // ends before February does
    CHECK(months[0].ret == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(months[1].ret == doctest::Approx(1.02 / 1.05 - 1.0).epsilon(1e-12));
}

TEST_CASE("buy and hold baseline charges taker fees both ways") {
    const Timestamp t0 = timestamp_from_civil(2019, 3, 1);
    AlignedPanel panel(t0, 10, {"A", "B"});
    for (std::size_t r = 0; r < 10; ++r) {
        panel.set(r, 0, 0.01, true);
        panel.set(r, 1, 0.02, true);
    }

    SUBCASE("flat prices leave only the round-trip fee") {
        const auto curve = buy_and_hold_baseline(panel, {"A", "B"}, 1.0);
        REQUIRE(curve.equity.size() == 10);
        // Constant at capital minus the entry fee until liquidation.
        for (std::size_t i = 0; i + 1 < 10; ++i)
            CHECK(curve.equity[i] == doctest::Approx(1.0 - 0.00075).epsilon(1e-12));
        CHECK(curve.equity.back() == doctest::Approx(1.0 - 2.0 * 0.00075).epsilon(1e-12));
        CHECK(curve.ts.front() == t0);
    }

    SUBCASE("doubling prices roughly double the stake") {
        AlignedPanel up(t0, 10, {"A", "B"});
        for (std::size_t r = 0; r < 10; ++r) {
            const double ramp = 1.0 + static_cast<double>(r) / 9.0;  // ends at 2x
            up.set(r, 0, 0.01 * ramp, true);
            up.set(r, 1, 0.02 * ramp, true);
        }
        const auto curve = buy_and_hold_baseline(up, {"A", "B"}, 1.0);
        CHECK(curve.equity.back() ==
              doctest::Approx(2.0 - 0.00075 - 2.0 * 0.00075).epsilon(1e-12));
        CHECK(curve.equity.back() == doctest::Approx(2.0).epsilon(0.002));
    }

    SUBCASE("a single symbol takes the whole stake") {
        const auto curve = buy_and_hold_baseline(panel, {"B"}, 2.0);
        CHECK(curve.equity.front() == doctest::Approx(2.0 - 2.0 * 0.00075).epsilon(1e-12));
    }

    CHECK_THROWS_AS(buy_and_hold_baseline(panel, {}, 1.0), ConfigError);
    AlignedPanel tiny(t0, 1, {"A"});
    tiny.set(0, 0, 0.01, true);
    CHECK_THROWS_AS(buy_and_hold_baseline(tiny, {"A"}, 1.0), DegenerateInputError);
}

TEST_CASE("metrics report ties the pieces together") {
    EquityCurve c;
    c.initial_capital = 1.0;
    // One year minus a minute, so annualized == total return.
    c.ts = {timestamp_from_civil(2019, 1, 1), timestamp_from_civil(2019, 6, 1),
            timestamp_from_civil(2019, 12, 31, 23, 59)};
    c.equity = {1.0, 0.9, 1.2};

    const std::vector<double> weekly{0.01, -0.02, 0.03, 0.00};
    const auto rep = compute_metrics(c, weekly, 52, -0.004);

    CHECK(rep.total_return == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(rep.max_dd.xbt == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(rep.max_dd.fraction == doctest::Approx(0.1).epsilon(1e-12));
    REQUIRE(rep.romad.has_value());
    CHECK(*rep.romad == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.n_periods == 4);
    REQUIRE(rep.sharpe_annualized.has_value());
    CHECK(*rep.sharpe_annualized == doctest::Approx(*sharpe(weekly, 52)).epsilon(1e-12));
    REQUIRE(rep.sharpe_raw.has_value());
    CHECK(*rep.sharpe_raw == doctest::Approx(*sharpe(weekly, 1)).epsilon(1e-12));
    CHECK(*rep.sharpe_annualized ==
          doctest::Approx(*rep.sharpe_raw * std::sqrt(52.0)).epsilon(1e-12));

    // 525599 of 525600 minutes: the exponent is within rounding of one year.
    CHECK(rep.annualized_return == doctest::Approx(0.2).epsilon(1e-5));

    // Fee share of the total P&L, sign preserved (fees were a cost).
    REQUIRE(rep.commission_share.has_value());
    CHECK(*rep.commission_share == doctest::Approx(-0.004 / 0.2).epsilon(1e-12));

    // Return std matches the sample std of the weekly basis.
    double mean = 0.0;
    for (double r : weekly) mean += r;
    mean /= 4.0;
    double m2 = 0.0;
    for (double r : weekly) m2 += (r - mean) * (r - mean);
    CHECK(rep.return_std == doctest::Approx(std::sqrt(m2 / 3.0)).epsilon(1e-12));

    // Flat P&L leaves the commission share undefined.
    EquityCurve flat = curve_of({1.0, 1.0 + 1e-13}, 1.0);
    const auto rep2 = compute_metrics(flat, {}, 52, -0.004);
    CHECK(!rep2.commission_share.has_value());
    CHECK(rep2.n_periods == 0);
    CHECK(!rep2.sharpe_annualized.has_value());
}
