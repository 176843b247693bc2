#pragma once

#include <string>
#include <vector>

#include "statarb/time.hpp"

namespace statarb {

struct ZScorePoint {
    Timestamp ts{0};
    double z = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    bool defined = false;
};

// Trailing window of n points including the current one; sample standard
// deviation (n-1 divisor). The first n-1 points and any window with zero
// dispersion are flagged undefined rather than raising.
std::vector<ZScorePoint> rolling_zscore(const std::vector<double>& spread, int n,
                                        Timestamp start);

struct Thresholds {
    double enter = 2.0;
    double exit = 1.0;

    void validate() const;
};

enum class SignalKind { EnterLong, ExitLong, EnterShort, ExitShort };

std::string to_string(SignalKind kind);

struct SignalEvent {
    Timestamp ts{0};
    SignalKind kind = SignalKind::EnterLong;
    double z_tm1 = 0.0;
    double z_tm2 = 0.0;
};

// Crossing events decided at t from the two fully formed bars before it.
// Default semantics arm on divergence beyond the entry band and fire when the
// z returns through it; first_touch instead fires on the divergence itself.
// Exits fire when z comes back through the exit band toward zero. A position
// state machine keeps only events that are actionable from flat/long/short,
// with exits processed before entries at the same stamp.
std::vector<SignalEvent> gen_signals(const std::vector<ZScorePoint>& z, const Thresholds& th,
                                     bool first_touch = false);

}  // namespace statarb
