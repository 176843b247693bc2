#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "statarb/errors.hpp"
#include "statarb/rng.hpp"
#include "statarb/synth.hpp"

using namespace statarb;

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Slope of a regression of (s_t - s_{t-1}) on demeaned s_{t-1}: the
// one-step mean-reversion rate, ~ -(1 - exp(-theta)) for an OU path.
double reversion_slope(const std::vector<double>& s) {
    const double m = mean_of(s);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 1; t < s.size(); ++t) {
        num += (s[t - 1] - m) * (s[t] - s[t - 1]);
        den += (s[t - 1] - m) * (s[t - 1] - m);
    }
    return num / den;
}

std::vector<double> planted_spread(const AlignedPanel& panel, const std::vector<double>& w) {
    std::vector<double> s(panel.length(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto& col = panel.column(i);
        for (std::size_t t = 0; t < s.size(); ++t) s[t] += w[i] * col[t];
    }
    return s;
}

}  // namespace

TEST_CASE("simulators are deterministic in the seed") {
    CHECK(simulate_random_walk(500, 9) == simulate_random_walk(500, 9));
    CHECK(simulate_random_walk(500, 9) != simulate_random_walk(500, 10));
    CHECK(simulate_ar1(500, 0.5, 3) == simulate_ar1(500, 0.5, 3));
    CHECK(simulate_estar(500, -0.2, 0.1, 3) == simulate_estar(500, -0.2, 0.1, 3));
    CHECK(simulate_ou_exact(500, 0.05, 0.0, 1.0, 1.0, 7, 0.0) ==
          simulate_ou_exact(500, 0.05, 0.0, 1.0, 1.0, 7, 0.0));
}

TEST_CASE("ou simulator with theta zero is exactly a random walk") {
    const double sigma = 0.3;
    CHECK(simulate_ou_exact(1000, 0.0, 5.0, sigma, 1.0, 42, 1.5) ==
          simulate_random_walk(1000, 42, sigma, 1.5));
    // dt != 1 scales the step by sqrt(dt).
    CHECK(simulate_ou_exact(1000, 0.0, 0.0, sigma, 4.0, 42, 0.0) ==
          simulate_random_walk(1000, 42, sigma * 2.0, 0.0));
}

TEST_CASE("ou simulator matches its stationary moments") {
    const double theta = 0.2;
    const double mu = 3.0;
    const double sigma = 0.5;
    auto s = simulate_ou_exact(200000, theta, mu, sigma, 1.0, 17, mu);
    CHECK(mean_of(s) == doctest::Approx(mu).epsilon(0.02));
    CHECK(std_of(s) == doctest::Approx(sigma / std::sqrt(2.0 * theta)).epsilon(0.05));
    CHECK(reversion_slope(s) == doctest::Approx(std::exp(-theta) - 1.0).epsilon(0.05));
}

TEST_CASE("ar1 simulator matches its stationary moments") {
    const double phi = 0.6;
    auto s = simulate_ar1(200000, phi, 23);
    CHECK(std::abs(mean_of(s)) < 0.05);
    CHECK(std_of(s) == doctest::Approx(1.0 / std::sqrt(1.0 - phi * phi)).epsilon(0.05));
    CHECK(reversion_slope(s) == doctest::Approx(phi - 1.0).epsilon(0.05));
}

TEST_CASE("simulator guards") {
    CHECK_THROWS_AS(simulate_ou_exact(100, -0.1, 0.0, 1.0, 1.0, 1, 0.0), ConfigError);
    CHECK_THROWS_AS(simulate_ou_exact(100, 0.1, 0.0, 1.0, 0.0, 1, 0.0), ConfigError);
}

TEST_CASE("cointegrated panel plants an exact ou spread") {
    SynthSpec spec;
    spec.n_symbols = 3;
    spec.theta = 0.01;
    spec.sigma_spread = 2e-4;
    spec.sigma_trend = 1e-4;
    spec.length = 20000;
    spec.seed = 5;
    spec.true_weights = {1.0, -2.0, 0.5};
    spec.start = Timestamp{1000};

    AlignedPanel panel = synth_cointegrated(spec);
    CHECK(panel.length() == spec.length);
    CHECK(panel.start() == spec.start);
    CHECK(panel.symbols() == std::vector<SymbolId>{"SYN0", "SYN1", "SYN2"});
    for (std::size_t c = 0; c < panel.n_symbols(); ++c) {
        for (std::size_t t = 0; t < panel.length(); ++t) {
            CHECK(panel.value(t, c) > 0.0);
            CHECK(panel.observed(t, c));
        }
    }

    // The weighted combination must be the seeded OU path up to a constant.
    auto spread = planted_spread(panel, spec.true_weights);
    auto x = simulate_ou_exact(spec.length, spec.theta, 0.0, spec.sigma_spread, 1.0,
                               derive_seed(spec.seed, 0), 0.0);
    const double offset = spread[0] - x[0];
    double worst = 0.0;
    for (std::size_t t = 0; t < spread.size(); ++t)
        worst = std::max(worst, std::abs(spread[t] - x[t] - offset));
    CHECK(worst < 1e-12);

    CHECK(reversion_slope(spread) ==
          doctest::Approx(std::exp(-spec.theta) - 1.0).epsilon(0.35));
}

TEST_CASE("cointegrated panel is deterministic and seed sensitive") {
    SynthSpec spec;
    spec.true_weights = {1.0, -1.0};
    spec.length = 3000;
    AlignedPanel a = synth_cointegrated(spec);
    AlignedPanel b = synth_cointegrated(spec);
    REQUIRE(a.length() == b.length());
    for (std::size_t t = 0; t < a.length(); ++t)
        for (std::size_t c = 0; c < a.n_symbols(); ++c) REQUIRE(a.value(t, c) == b.value(t, c));

    spec.seed = 2;
    AlignedPanel other = synth_cointegrated(spec);
    bool differs = false;
    for (std::size_t t = 0; t < a.length() && !differs; ++t)
        differs = a.value(t, 0) != other.value(t, 0);
    CHECK(differs);
}

TEST_CASE("cointegrated panel with theta zero has a non-reverting spread") {
    SynthSpec spec;
    spec.theta = 0.0;
    spec.length = 20000;
    spec.true_weights = {1.0, -1.0};
    auto spread = planted_spread(synth_cointegrated(spec), spec.true_weights);
    CHECK(std::abs(reversion_slope(spread)) < 0.003);
}

TEST_CASE("cointegrated panel guards") {
    SynthSpec spec;
    spec.true_weights = {1.0};
    CHECK_THROWS_AS(synth_cointegrated(spec), ConfigError);  // size mismatch
    spec.true_weights = {0.0, 1.0};
    CHECK_THROWS_AS(synth_cointegrated(spec), ConfigError);  // zero lead weight
    spec.true_weights = {1.0, -1.0};
    spec.theta = -0.5;
    CHECK_THROWS_AS(synth_cointegrated(spec), ConfigError);
    spec.theta = 0.01;
    spec.n_symbols = 1;
    spec.true_weights = {1.0};
    CHECK_THROWS_AS(synth_cointegrated(spec), ConfigError);
}

TEST_CASE("synthetic market mirrors the panel minute by minute") {
    SynthSpec spec;
    spec.true_weights = {1.0, -1.0};
    spec.length = 500;
    spec.base_level = 1.0;
    AlignedPanel panel = synth_cointegrated(spec);

    const double tick = 1e-6;
    const double qsize = 5e8;
    const double tsize = 1e7;
    MarketData md = make_synth_market(panel, tick, qsize, tsize);

    for (const auto& sym : panel.symbols()) {
        REQUIRE(md.specs.count(sym) == 1);
        CHECK(md.specs.at(sym).kind == ContractKind::Linear);
        CHECK(md.specs.at(sym).tick_size == tick);

        const auto& bars = md.bars.at(sym);
        const auto& quotes = md.quotes.at(sym);
        const auto& trades = md.trades.at(sym);
        REQUIRE(bars.size() == panel.length());
        REQUIRE(quotes.size() == panel.length());
        REQUIRE(trades.size() == 2 * panel.length());

        const std::size_t col = panel.column_of(sym);
        for (std::size_t t = 0; t < panel.length(); ++t) {
            const double px = panel.value(t, col);
            CHECK(bars[t].ts == panel.ts_at(t));
            CHECK(bars[t].close == px);
            CHECK(bars[t].volume == tsize);

            const auto& q = quotes[t];
            CHECK(q.ts == panel.ts_at(t));
            CHECK(q.ask_price - q.bid_price == doctest::Approx(tick).epsilon(1e-9));
            CHECK(q.bid_price <= px + 1e-15);
            CHECK(px <= q.ask_price + 1e-15);
            CHECK(q.bid_size == qsize);
            CHECK(q.ask_size == qsize);

            CHECK(trades[2 * t].ts == panel.ts_at(t));
            CHECK(trades[2 * t].price == q.bid_price);
            CHECK(trades[2 * t].size == tsize);
            CHECK(trades[2 * t + 1].price == q.ask_price);
        }
    }
}
