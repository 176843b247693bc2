#include "statarb/unit_root.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "statarb/critical_values.hpp"
#include "statarb/errors.hpp"

namespace statarb {

namespace {

constexpr int kMinObs = 20;

// Regression design for  ds_t = gamma * f(s_{t-1}) + sum phi_i ds_{t-i} + e_t
// on the sample t = k_max+1 .. T-1. Columns are scaled to unit RMS so the
// Gram solves stay well conditioned with price-level inputs; t-ratios are
// invariant to that scaling.
struct Design {
    Eigen::MatrixXd Z;
    Eigen::VectorXd y;
    Eigen::VectorXd scale;
    int n = 0;
};

Design build_design(const std::vector<double>& s, int kmax, bool cubed) {
    const int T = static_cast<int>(s.size());
    if (T < kMinObs) throw DegenerateInputError("unit root test: series too short");
    const int n = T - 1 - kmax;
    if (n < kmax + 6) throw DegenerateInputError("unit root test: too few observations for lag order");

    std::vector<double> d(static_cast<std::size_t>(T - 1));
    double max_abs_d = 0.0;
    for (int t = 1; t < T; ++t) {
        d[static_cast<std::size_t>(t - 1)] = s[static_cast<std::size_t>(t)] - s[static_cast<std::size_t>(t - 1)];
        max_abs_d = std::max(max_abs_d, std::abs(d[static_cast<std::size_t>(t - 1)]));
    }
    if (max_abs_d == 0.0) throw DegenerateInputError("unit root test: series is constant");

    Design ds;
    ds.n = n;
    ds.Z.resize(n, 1 + kmax);
    ds.y.resize(n);
    for (int i = 0; i < n; ++i) {
        const int t = kmax + 1 + i;  // response index into d is t-1
        ds.y(i) = d[static_cast<std::size_t>(t - 1)];
        const double lvl = s[static_cast<std::size_t>(t - 1)];
        ds.Z(i, 0) = cubed ? lvl * lvl * lvl : lvl;
        for (int j = 1; j <= kmax; ++j) ds.Z(i, j) = d[static_cast<std::size_t>(t - 1 - j)];
    }
    ds.scale.resize(1 + kmax);
    for (int c = 0; c <= kmax; ++c) {
        double rms = std::sqrt(ds.Z.col(c).squaredNorm() / n);
        ds.scale(c) = rms > 0.0 ? rms : 1.0;
        ds.Z.col(c) /= ds.scale(c);
    }
    return ds;
}

// Cross products computed once at the largest lag order; candidate orders
// reuse leading sub-blocks so the AIC sweep costs one matrix product total.
struct GramLS {
    Eigen::MatrixXd G;
    Eigen::VectorXd g;
    double yy = 0.0;
    int n = 0;

    explicit GramLS(const Design& d)
        : G(d.Z.transpose() * d.Z), g(d.Z.transpose() * d.y), yy(d.y.squaredNorm()), n(d.n) {}

    struct Sol {
        Eigen::VectorXd theta;
        double ssr = 0.0;
        double inv00 = 0.0;
    };

    Sol solve(int m) const {
        Eigen::MatrixXd A = G.topLeftCorner(m, m);
        Eigen::VectorXd b = g.head(m);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        if (ldlt.info() != Eigen::Success)
            throw SingularMatrixError("unit root test: regressor cross-product not factorizable");
        Sol sol;
        sol.theta = ldlt.solve(b);
        const double bnorm = std::max(1.0, b.norm());
        if ((A * sol.theta - b).norm() > 1e-6 * bnorm)
            throw SingularMatrixError("unit root test: regressors are collinear");
        sol.ssr = std::max(0.0, yy - b.dot(sol.theta));
        Eigen::VectorXd e0 = Eigen::VectorXd::Zero(m);
        e0(0) = 1.0;
        sol.inv00 = ldlt.solve(e0)(0);
        return sol;
    }
};

struct TRatio {
    double stat = 0.0;
    double gamma = 0.0;
};

TRatio t_ratio_at(const std::vector<double>& s, int k, bool cubed) {
    Design d = build_design(s, k, cubed);
    GramLS ls(d);
    const int m = 1 + k;
    auto sol = ls.solve(m);
    const int dof = ls.n - m;
    if (dof < 1) throw DegenerateInputError("unit root test: no residual degrees of freedom");
    const double sigma2 = sol.ssr / dof;
    const double se = std::sqrt(std::max(0.0, sigma2 * sol.inv00));
    if (!(se > 0.0) || !std::isfinite(se))
        throw DegenerateInputError("unit root test: zero residual variance");
    TRatio r;
    r.stat = sol.theta(0) / se;
    r.gamma = sol.theta(0) / d.scale(0);
    return r;
}

int clamp_max_lag(int T, int kmax) {
    // Keep a healthy common sample: n = T-1-kmax must exceed the widest model.
    const int hard = (T - 8) / 2;
    return std::clamp(kmax, 0, std::max(0, hard));
}

int aic_select(const std::vector<double>& s, int kmax, bool cubed) {
    Design d = build_design(s, kmax, cubed);
    GramLS ls(d);
    int best_k = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kmax; ++k) {
        auto sol = ls.solve(1 + k);
        if (sol.ssr <= 0.0) throw DegenerateInputError("unit root test: exact fit in lag search");
        const double aic = ls.n * std::log(sol.ssr / ls.n) + 2.0 * (1 + k);
        if (aic < best_aic) {
            best_aic = aic;
            best_k = k;
        }
    }
    return best_k;
}

UnitRootResult run_test(const std::vector<double>& s, const UnitRootOptions& opts,
                        const CriticalValueStore& store, bool cubed) {
    const int T = static_cast<int>(s.size());
    int kmax = opts.max_lag >= 0 ? opts.max_lag : default_max_lag(T);
    kmax = clamp_max_lag(T, kmax);

    UnitRootResult res;
    res.lag_order = opts.lag_rule == LagRule::Fixed ? kmax : aic_select(s, kmax, cubed);
    TRatio r = t_ratio_at(s, res.lag_order, cubed);
    res.statistic = r.stat;
    res.gamma = r.gamma;

    const auto& table = store.table(cubed ? TestKind::KssRaw : TestKind::AdfNoConstant, 1);
    res.p_value = table.p_value(res.statistic, T);
    for (double level : opts.levels) res.reject_at[level] = res.p_value < level;
    return res;
}

}  // namespace

int default_max_lag(int n_obs) {
    return static_cast<int>(std::floor(12.0 * std::pow(n_obs / 100.0, 0.25)));
}

double adf_statistic(const std::vector<double>& s, int lags) {
    return t_ratio_at(s, clamp_max_lag(static_cast<int>(s.size()), lags), false).stat;
}

double kss_statistic(const std::vector<double>& s, int lags) {
    return t_ratio_at(s, clamp_max_lag(static_cast<int>(s.size()), lags), true).stat;
}

AdfResult adf_test(const std::vector<double>& s, const UnitRootOptions& opts,
                   const CriticalValueStore& store) {
    return run_test(s, opts, store, false);
}

KssResult kss_test(const std::vector<double>& s, const UnitRootOptions& opts,
                   const CriticalValueStore& store) {
    return run_test(s, opts, store, true);
}

}  // namespace statarb
