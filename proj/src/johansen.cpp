#include "statarb/johansen.hpp"

#include <algorithm>
#include <cmath>

#include "statarb/critical_values.hpp"
#include "statarb/errors.hpp"

namespace statarb {

namespace {

constexpr double kConditionLimit = 1e12;

void check_conditioning(const Eigen::MatrixXd& M, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double lo = ev(0);
    const double hi = ev(ev.size() - 1);
    if (!(lo > 0.0) || hi / lo > kConditionLimit)
        throw SingularMatrixError(std::string("johansen: ") + what +
                                  " moment matrix is near singular");
}

// Residualize Y on X column-by-column via normal equations. X is small
// (n*(p-1) columns), so LDLT on the Gram matrix is fine.
Eigen::MatrixXd residualize(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X) {
    if (X.cols() == 0) return Y;
    Eigen::MatrixXd G = X.transpose() * X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    if (ldlt.info() != Eigen::Success)
        throw SingularMatrixError("johansen: lagged-difference block not factorizable");
    return Y - X * ldlt.solve(X.transpose() * Y);
}

}  // namespace

TraceStats johansen_trace(const Eigen::MatrixXd& levels, int lag_p) {
    const int T = static_cast<int>(levels.rows());
    const int n = static_cast<int>(levels.cols());
    // n = 1 is legal here: the null simulation tests rank r in an n-dim
    // system by running this kernel on n-r independent walks.
    if (n < 1) throw DegenerateInputError("johansen: need at least one series");
    if (lag_p < 1) throw ConfigError("johansen: lag order must be >= 1");
    const int N = T - lag_p;
    if (N < std::max(30, 10 * n)) throw DegenerateInputError("johansen: too few observations");

    // Z0 = current differences, Z1 = lagged levels plus a restricted constant,
    // Z2 = lagged differences 1..p-1.
    Eigen::MatrixXd dz = levels.bottomRows(T - 1) - levels.topRows(T - 1);
    Eigen::MatrixXd Z0 = dz.bottomRows(N);
    Eigen::MatrixXd Z1(N, n + 1);
    Z1.leftCols(n) = levels.middleRows(lag_p - 1, N);
    Z1.col(n).setOnes();
    Eigen::MatrixXd Z2(N, n * (lag_p - 1));
    for (int j = 1; j < lag_p; ++j)
        Z2.middleCols(n * (j - 1), n) = dz.middleRows(lag_p - 1 - j, N);

    Eigen::MatrixXd R0 = residualize(Z0, Z2);
    Eigen::MatrixXd R1 = residualize(Z1, Z2);

    Eigen::MatrixXd S00 = R0.transpose() * R0 / N;
    Eigen::MatrixXd S11 = R1.transpose() * R1 / N;
    Eigen::MatrixXd S01 = R0.transpose() * R1 / N;

    check_conditioning(S00, "difference");
    check_conditioning(S11, "level");

    Eigen::LLT<Eigen::MatrixXd> llt(S00);
    if (llt.info() != Eigen::Success)
        throw SingularMatrixError("johansen: difference moment matrix not positive definite");
    Eigen::MatrixXd A = S01.transpose() * llt.solve(S01);  // S10 S00^-1 S01, symmetric PSD

    // Solves A v = lambda S11 v; eigenvalues come back ascending.
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, S11);
    if (ges.info() != Eigen::Success)
        throw SingularMatrixError("johansen: eigenproblem failed to converge");

    TraceStats out;
    out.effective_obs = N;
    out.eigenvalues.resize(static_cast<std::size_t>(n));
    out.vectors.resize(n + 1, n);
    const int total = n + 1;
    for (int i = 0; i < n; ++i) {
        const int src = total - 1 - i;  // descending order
        double lam = ges.eigenvalues()(src);
        lam = std::clamp(lam, 0.0, 1.0 - 1e-15);
        out.eigenvalues[static_cast<std::size_t>(i)] = lam;
        out.vectors.col(i) = ges.eigenvectors().col(src);
    }
    out.trace_stats.resize(static_cast<std::size_t>(n));
    double tail = 0.0;
    for (int r = n - 1; r >= 0; --r) {
        tail += -static_cast<double>(N) *
                std::log1p(-out.eigenvalues[static_cast<std::size_t>(r)]);
        out.trace_stats[static_cast<std::size_t>(r)] = tail;
    }
    return out;
}

JohansenResult johansen_test(const Eigen::MatrixXd& levels, int lag_p, double alpha,
                             const CriticalValueStore& store) {
    const int n = static_cast<int>(levels.cols());
    if (n < 2) throw DegenerateInputError("johansen: need at least two series");
    TraceStats ts = johansen_trace(levels, lag_p);

    JohansenResult res;
    res.eigenvalues = ts.eigenvalues;
    res.trace_stats = ts.trace_stats;
    res.effective_obs = ts.effective_obs;
    res.trace_pvalues.resize(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        const auto& table = store.table(TestKind::JohansenTrace, n - r);
        res.trace_pvalues[static_cast<std::size_t>(r)] =
            table.p_value(ts.trace_stats[static_cast<std::size_t>(r)], ts.effective_obs);
    }

    res.rank = n - 1;  // every step rejected: cap at the largest usable rank
    for (int r = 0; r < n; ++r) {
        if (res.trace_pvalues[static_cast<std::size_t>(r)] >= alpha) {
            res.rank = r;
            break;
        }
    }

    for (int i = 0; i < res.rank; ++i) {
        CointVector v;
        v.weights = ts.vectors.col(i).head(n);
        v.intercept = ts.vectors(n, i);
        v.pvalue = res.trace_pvalues[static_cast<std::size_t>(i)];
        res.vectors.push_back(std::move(v));
    }
    return res;
}

JohansenResult johansen_test(const AlignedPanel& panel, int lag_p, double alpha,
                             const CriticalValueStore& store) {
    const auto& syms = panel.symbols();
    const auto len = static_cast<Eigen::Index>(panel.length());
    Eigen::MatrixXd levels(len, static_cast<Eigen::Index>(syms.size()));
    for (std::size_t c = 0; c < syms.size(); ++c) {
        const auto& col = panel.column(syms[c]);
        for (Eigen::Index r = 0; r < len; ++r)
            levels(r, static_cast<Eigen::Index>(c)) = col[static_cast<std::size_t>(r)];
    }
    return johansen_test(levels, lag_p, alpha, store);
}

}  // namespace statarb
