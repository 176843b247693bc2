#pragma once

#include <map>
#include <vector>

namespace statarb {

class CriticalValueStore;

enum class LagRule { Aic, Fixed };

struct UnitRootOptions {
    // Negative means "use the standard cap" floor(12 * (T/100)^0.25).
    int max_lag = -1;
    LagRule lag_rule = LagRule::Aic;
    std::vector<double> levels = {0.01, 0.05, 0.10};
};

struct UnitRootResult {
    double statistic = 0.0;
    double gamma = 0.0;  // coefficient on the level (or cubed level) term
    int lag_order = 0;
    double p_value = 1.0;
    std::map<double, bool> reject_at;
};

using AdfResult = UnitRootResult;
using KssResult = UnitRootResult;

int default_max_lag(int n_obs);

// t-ratio on gamma in  ds_t = gamma * s_{t-1} + sum_i phi_i ds_{t-i} + e_t
// (no constant, no trend), with the lag order fixed at `lags`.
double adf_statistic(const std::vector<double>& s, int lags);

// t-ratio on delta in  ds_t = delta * s_{t-1}^3 + sum_i phi_i ds_{t-i} + e_t
// (raw series, no demeaning or detrending).
double kss_statistic(const std::vector<double>& s, int lags);

// Full tests: choose the lag order (AIC over 0..max_lag on a common sample,
// then refit at the winner on its maximal sample), compute the statistic and
// map it to a p-value through the store's simulated null tables.
AdfResult adf_test(const std::vector<double>& s, const UnitRootOptions& opts,
                   const CriticalValueStore& store);
KssResult kss_test(const std::vector<double>& s, const UnitRootOptions& opts,
                   const CriticalValueStore& store);

}  // namespace statarb
