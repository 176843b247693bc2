#include "statarb/signals.hpp"

#include <algorithm>
#include <cmath>

#include "statarb/errors.hpp"

namespace statarb {

namespace {

// Refresh cadence for the exact window recompute that stops the incremental
// sums from drifting.
constexpr int kResyncEvery = 8192;

struct WindowStats {
    double mean = 0.0;
    double m2 = 0.0;  // centered sum of squares
};

WindowStats exact_stats(const std::vector<double>& x, std::size_t end, int n) {
    WindowStats s;
    const std::size_t begin = end + 1 - static_cast<std::size_t>(n);
    double sum = 0.0;
    for (std::size_t i = begin; i <= end; ++i) sum += x[i];
    s.mean = sum / n;
    for (std::size_t i = begin; i <= end; ++i) {
        const double d = x[i] - s.mean;
        s.m2 += d * d;
    }
    return s;
}

}  // namespace

std::vector<ZScorePoint> rolling_zscore(const std::vector<double>& spread, int n, Timestamp start) {
    if (n < 2) throw ConfigError("rolling_zscore: window must be at least 2");
    std::vector<ZScorePoint> out(spread.size());

    double sum = 0.0, sumsq = 0.0;
    std::size_t run_len = 0;  // trailing stretch of equal values, including current
    int since_resync = 0;

    for (std::size_t t = 0; t < spread.size(); ++t) {
        const double x = spread[t];
        if (!std::isfinite(x)) throw DegenerateInputError("rolling_zscore: non-finite spread value");
        sum += x;
        sumsq += x * x;
        if (t >= static_cast<std::size_t>(n)) {
            const double old = spread[t - static_cast<std::size_t>(n)];
            sum -= old;
            sumsq -= old * old;
        }
        run_len = (t > 0 && x == spread[t - 1]) ? run_len + 1 : 1;

        auto& pt = out[t];
        pt.ts = Timestamp{start.minutes + static_cast<std::int64_t>(t)};
        if (t + 1 < static_cast<std::size_t>(n)) continue;

        if (run_len >= static_cast<std::size_t>(n)) {
            // Identical window: dispersion is exactly zero, z undefined.
            pt.mean = x;
            continue;
        }

        double mean = sum / n;
        double m2 = std::max(0.0, sumsq - sum * sum / n);
        if (++since_resync >= kResyncEvery || m2 <= 1e-10 * std::abs(sumsq)) {
            WindowStats ws = exact_stats(spread, t, n);
            mean = ws.mean;
            m2 = ws.m2;
            sum = mean * n;
            sumsq = m2 + sum * mean;
            since_resync = 0;
        }
        const double var = m2 / (n - 1);
        const double sd = std::sqrt(var);
        pt.mean = mean;
        pt.stddev = sd;
        if (sd > 0.0) {
            pt.z = (x - mean) / sd;
            pt.defined = true;
        }
    }
    return out;
}

void Thresholds::validate() const {
    if (!(enter > exit) || !(exit > 0.0))
        throw ConfigError("thresholds: need enter > exit > 0");
}

std::string to_string(SignalKind kind) {
    switch (kind) {
        case SignalKind::EnterLong: return "enter_long";
        case SignalKind::ExitLong: return "exit_long";
        case SignalKind::EnterShort: return "enter_short";
        case SignalKind::ExitShort: return "exit_short";
    }
    return "unknown";
}

std::vector<SignalEvent> gen_signals(const std::vector<ZScorePoint>& z, const Thresholds& th,
                                     bool first_touch) {
    th.validate();
    std::vector<SignalEvent> out;
    int pos = 0;  // -1 short, 0 flat, +1 long

    for (std::size_t t = 2; t < z.size(); ++t) {
        const auto& a = z[t - 2];
        const auto& b = z[t - 1];
        if (!a.defined || !b.defined) continue;
        const double za = a.z, zb = b.z;
        const double E = th.enter, X = th.exit;

        bool exit_long, exit_short, enter_long, enter_short;
        if (first_touch) {
            enter_long = za > -E && zb < -E;
            enter_short = za < E && zb > E;
            exit_long = za < -X && zb > -X;
            exit_short = za > X && zb < X;
        } else {
            enter_long = za < -E && zb > -E;
            enter_short = za > E && zb < E;
            exit_long = za > -X && zb < -X;
            exit_short = za < X && zb > X;
        }

        const auto emit = [&](SignalKind kind) {
            out.push_back({z[t].ts, kind, zb, za});
        };
        if (pos == 1 && exit_long) {
            emit(SignalKind::ExitLong);
            pos = 0;
        } else if (pos == -1 && exit_short) {
            emit(SignalKind::ExitShort);
            pos = 0;
        }
        if (pos == 0) {
            if (enter_long && !enter_short) {
                emit(SignalKind::EnterLong);
                pos = 1;
            } else if (enter_short && !enter_long) {
                emit(SignalKind::EnterShort);
                pos = -1;
            }
        }
    }
    return out;
}

}  // namespace statarb
