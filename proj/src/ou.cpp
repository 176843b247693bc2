#include "statarb/ou.hpp"

#include <algorithm>
#include <cmath>

#include "statarb/errors.hpp"
#include "statarb/ols.hpp"

namespace statarb {

OuParams calibrate_ou(const std::vector<double>& spread, double dt) {
    if (spread.size() < 100) throw DegenerateInputError("calibrate_ou: need at least 100 observations");
    if (!(dt > 0.0)) throw ConfigError("calibrate_ou: dt must be positive");

    const std::size_t n = spread.size() - 1;
    std::vector<double> dy(n), lag(n);
    bool constant = true;
    for (std::size_t i = 0; i < n; ++i) {
        dy[i] = spread[i + 1] - spread[i];
        lag[i] = spread[i];
        if (dy[i] != 0.0) constant = false;
    }
    if (constant) throw DegenerateInputError("calibrate_ou: spread is constant");

    OlsFit fit = ols_fit(dy, lag, true);
    const double b = fit.beta(0);
    if (b >= 0.0) throw NonMeanRevertingError("calibrate_ou: spread shows no mean reversion");

    OuParams p;
    p.dt = dt;
    p.theta = -b / dt;
    p.mu = fit.alpha / (p.theta * dt);
    p.sigma = fit.residual_std / std::sqrt(dt);
    return p;
}

double half_life_minutes(const OuParams& params) {
    if (!(params.theta > 0.0)) throw NonMeanRevertingError("half_life: theta must be positive");
    return std::log(2.0) / params.theta;
}

LookbackWindow lookback_window(const OuParams& params) {
    if (!(params.theta > 0.0) || params.theta > 1.0)
        throw ConfigError("lookback_window: theta must lie in (0, 1]");
    LookbackWindow w;
    w.lambda = params.theta;
    const double raw = 2.0 / w.lambda - 1.0;
    if (raw > 1e9) throw ConfigError("lookback_window: theta implies an absurdly long window");
    w.n_minutes = static_cast<int>(std::max(2.0, std::round(raw)));
    return w;
}

}  // namespace statarb
