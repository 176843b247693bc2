#include "statarb/synth.hpp"

#include <cmath>
#include <string>

#include "statarb/errors.hpp"
#include "statarb/rng.hpp"

namespace statarb {

std::vector<double> simulate_random_walk(std::size_t length, std::uint64_t seed, double sigma,
                                         double x0) {
    Rng rng(seed);
    std::vector<double> s(length);
    double x = x0;
    for (std::size_t t = 0; t < length; ++t) {
        s[t] = x;
        x += sigma * rng.normal();
    }
    return s;
}

std::vector<double> simulate_ar1(std::size_t length, double phi, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> s(length);
    double x = 0.0;
    for (std::size_t t = 0; t < length; ++t) {
        x = phi * x + rng.normal();
        s[t] = x;
    }
    return s;
}

std::vector<double> simulate_estar(std::size_t length, double gamma1, double theta,
                                   std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> s(length);
    double x = 0.0;
    for (std::size_t t = 0; t < length; ++t) {
        x += gamma1 * (1.0 - std::exp(-theta * x * x)) * x + rng.normal();
        s[t] = x;
    }
    return s;
}

std::vector<double> simulate_ou_exact(std::size_t length, double theta, double mu, double sigma,
                                      double dt, std::uint64_t seed, double x0) {
    if (theta < 0.0 || dt <= 0.0) throw ConfigError("simulate_ou_exact: bad theta or dt");
    Rng rng(seed);
    std::vector<double> s(length);
    double x = x0;
    if (theta == 0.0) {
        const double step = sigma * std::sqrt(dt);
        for (std::size_t t = 0; t < length; ++t) {
            s[t] = x;
            x += step * rng.normal();
        }
        return s;
    }
    const double decay = std::exp(-theta * dt);
    const double shock = sigma * std::sqrt((1.0 - decay * decay) / (2.0 * theta));
    for (std::size_t t = 0; t < length; ++t) {
        s[t] = x;
        x = mu + (x - mu) * decay + shock * rng.normal();
    }
    return s;
}

AlignedPanel synth_cointegrated(const SynthSpec& spec) {
    const int n = spec.n_symbols;
    if (n < 2 || spec.length < 2) throw ConfigError("synth_cointegrated: invalid dimensions");
    if (spec.true_weights.size() != static_cast<std::size_t>(n))
        throw ConfigError("synth_cointegrated: true_weights size != n_symbols");
    if (spec.true_weights[0] == 0.0)
        throw ConfigError("synth_cointegrated: first weight must be nonzero");
    if (spec.theta < 0.0) throw ConfigError("synth_cointegrated: theta must be >= 0");

    // Fixed draw order: spread path, shared trend, then idiosyncratic walks.
    const std::vector<double> x =
        simulate_ou_exact(spec.length, spec.theta, 0.0, spec.sigma_spread, 1.0,
                          derive_seed(spec.seed, 0), 0.0);
    const std::vector<double> trend =
        simulate_random_walk(spec.length, derive_seed(spec.seed, 1), spec.sigma_trend);

    std::vector<SymbolId> symbols;
    symbols.reserve(n);
    for (int i = 0; i < n; ++i) symbols.push_back("SYN" + std::to_string(i));
    AlignedPanel panel(spec.start, spec.length, symbols);

    std::vector<std::vector<double>> legs(n, std::vector<double>(spec.length));
    double weighted_base = 0.0;
    for (int i = 0; i < n; ++i) {
        const double base = spec.base_level * (1.0 + 0.1 * i);
        weighted_base += spec.true_weights[i] * base;
        if (i == 0) continue;
        const std::vector<double> idio =
            simulate_random_walk(spec.length, derive_seed(spec.seed, 1 + i), spec.sigma_trend);
        for (std::size_t t = 0; t < spec.length; ++t)
            legs[i][t] = base + trend[t] + idio[t];
    }
    for (std::size_t t = 0; t < spec.length; ++t) {
        double others = 0.0;
        for (int i = 1; i < n; ++i) others += spec.true_weights[i] * legs[i][t];
        legs[0][t] = (x[t] + weighted_base - others) / spec.true_weights[0];
    }

    for (int i = 0; i < n; ++i) {
        const std::size_t col = panel.column_of(symbols[i]);
        for (std::size_t t = 0; t < spec.length; ++t) {
            if (legs[i][t] <= 0.0)
                throw DegenerateInputError(
                    "synth_cointegrated: non-positive price; raise base_level or lower noise");
            panel.set(t, col, legs[i][t], true);
        }
    }
    return panel;
}

MarketData make_synth_market(const AlignedPanel& panel, double tick_size, double quote_size,
                             double trade_size) {
    MarketData md;
    for (const auto& sym : panel.symbols()) {
        ContractSpec spec;
        spec.symbol = sym;
        spec.kind = ContractKind::Linear;
        spec.tick_size = tick_size;
        md.specs[sym] = spec;

        auto& bars = md.bars[sym];
        auto& quotes = md.quotes[sym];
        auto& trades = md.trades[sym];
        const auto& prices = panel.column(sym);
        bars.reserve(prices.size());
        quotes.reserve(prices.size());
        trades.reserve(prices.size() * 2);
        for (std::size_t t = 0; t < prices.size(); ++t) {
            const Timestamp ts = panel.ts_at(t);
            double bid = spec.snap_down(prices[t]);
            if (bid < tick_size) bid = tick_size;
            const double ask = bid + tick_size;
            bars.push_back(PriceBar{ts, sym, prices[t], trade_size});
            quotes.push_back(QuoteTick{ts, sym, bid, quote_size, ask, quote_size});
            trades.push_back(TradeTick{ts, sym, bid, trade_size});
            trades.push_back(TradeTick{ts, sym, ask, trade_size});
        }
    }
    return md;
}

}  // namespace statarb
