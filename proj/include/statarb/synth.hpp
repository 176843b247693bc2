#pragma once

#include <cstdint>
#include <vector>

#include "statarb/data.hpp"
#include "statarb/panel.hpp"

namespace statarb {

// Driftless random walk with per-step standard deviation sigma; s[0] = x0.
std::vector<double> simulate_random_walk(std::size_t length, std::uint64_t seed,
                                         double sigma = 1.0, double x0 = 0.0);

// Stationary AR(1): s_t = phi * s_{t-1} + e_t with unit-variance shocks.
std::vector<double> simulate_ar1(std::size_t length, double phi, std::uint64_t seed);

// Exponential smooth-transition AR(1):
//   ds_t = gamma1 * (1 - exp(-theta * s_{t-1}^2)) * s_{t-1} + e_t
std::vector<double> simulate_estar(std::size_t length, double gamma1, double theta,
                                   std::uint64_t seed);

// Exact discretization of dS = theta (mu - S) dt + sigma dW at step dt.
// theta == 0 degenerates to a driftless random walk with std sigma*sqrt(dt).
std::vector<double> simulate_ou_exact(std::size_t length, double theta, double mu, double sigma,
                                      double dt, std::uint64_t seed, double x0);

struct SynthSpec {
    int n_symbols = 2;
    double theta = 0.01;        // OU rate per minute; 0 = pure random walks
    double sigma_spread = 1e-4; // OU instantaneous volatility (per sqrt-minute)
    double sigma_trend = 1e-4;  // per-step std of shared trend and idiosyncratic walks
    std::size_t length = 10000; // minutes
    std::uint64_t seed = 1;
    std::vector<double> true_weights;  // one per symbol, first entry nonzero
    double base_level = 1.0;           // price level the legs fluctuate around
    Timestamp start{0};
};

// Panel of synthetic prices whose true_weights combination is an exact
// discretized OU path around a shared stochastic trend. Deterministic for
// a fixed seed. Symbols are named SYN0..SYNk.
AlignedPanel synth_cointegrated(const SynthSpec& spec);

// Per-minute bars, top-of-book quotes and prints consistent with a price
// panel, for driving the execution simulator on synthetic data. Quotes
// are one tick wide around each close; every minute prints one trade at
// the bid and one at the ask of size trade_size.
MarketData make_synth_market(const AlignedPanel& panel, double tick_size, double quote_size,
                             double trade_size);

}  // namespace statarb
