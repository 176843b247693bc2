#pragma once

#include <vector>

namespace statarb {

// dX = theta * (mu - X) dt + sigma dW, time measured in minutes.
struct OuParams {
    double theta = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    double dt = 1.0;
};

struct LookbackWindow {
    int n_minutes = 2;
    double lambda = 0.0;
};

// Discrete-regression calibration: dS_t on S_{t-1} with intercept, slope b
// maps to theta = -b/dt. Throws NonMeanRevertingError when b >= 0 and
// DegenerateInputError on constant or too-short input.
OuParams calibrate_ou(const std::vector<double>& spread, double dt = 1.0);

// Minutes until the expected deviation from mu halves: ln(2)/theta.
double half_life_minutes(const OuParams& params);

// Moving-average window matched to the estimated decay: lambda = theta,
// N = round(2/lambda - 1) half away from zero, floored at 2. theta must lie
// in (0, 1] for the equivalence to make sense.
LookbackWindow lookback_window(const OuParams& params);

}  // namespace statarb
