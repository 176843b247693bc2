#include "statarb/ols.hpp"

#include <cmath>
#include <cstddef>

#include "statarb/errors.hpp"

namespace statarb {

namespace {

double normal_two_sided_pvalue(double t) {
    if (!std::isfinite(t)) return 0.0;
    return std::erfc(std::abs(t) / std::sqrt(2.0));
}

}  // namespace

double OlsFit::residual_mean() const {
    if (residuals.empty()) return 0.0;
    double s = 0.0;
    for (double r : residuals) s += r;
    return s / static_cast<double>(residuals.size());
}

OlsFit ols_fit(const std::vector<double>& y, const Eigen::MatrixXd& X, bool with_intercept) {
    const auto n = static_cast<Eigen::Index>(y.size());
    const Eigen::Index k_slopes = X.cols();
    if (X.rows() != n) throw DegenerateInputError("ols_fit: y and X row counts differ");
    const Eigen::Index k = k_slopes + (with_intercept ? 1 : 0);
    if (k == 0) throw DegenerateInputError("ols_fit: no regressors");
    if (n <= k) throw DegenerateInputError("ols_fit: need more observations than parameters");

    Eigen::MatrixXd Z(n, k);
    if (with_intercept) Z.col(0).setOnes();
    if (k_slopes > 0) Z.rightCols(k_slopes) = X;
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    // ColPivHouseholderQR's default threshold is too permissive for the
    // near-collinear regressor panels we feed it; pin a relative cutoff.
    qr.setThreshold(1e-10);
    if (qr.rank() < k) throw SingularMatrixError("ols_fit: regressor matrix is rank deficient");

    Eigen::VectorXd coef = qr.solve(yv);
    Eigen::VectorXd resid = yv - Z * coef;

    OlsFit fit;
    fit.ssr = resid.squaredNorm();
    const double dof = static_cast<double>(n - k);
    const double sigma2 = fit.ssr / dof;
    fit.residual_std = std::sqrt(sigma2);

    // (Z'Z)^-1 via the QR factors: R^-1 R^-T with the column permutation undone.
    Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
    Eigen::MatrixXd Rinv = R.inverse();
    Eigen::MatrixXd ZtZinv = qr.colsPermutation() * (Rinv * Rinv.transpose()) *
                             qr.colsPermutation().transpose();

    Eigen::VectorXd se = (sigma2 * ZtZinv.diagonal()).cwiseMax(0.0).cwiseSqrt();

    const Eigen::Index off = with_intercept ? 1 : 0;
    if (with_intercept) {
        fit.alpha = coef(0);
        fit.alpha_stderr = se(0);
    }
    fit.beta = coef.segment(off, k_slopes);
    fit.coef_stderr = se.segment(off, k_slopes);
    fit.coef_tstat.resize(k_slopes);
    fit.coef_pvalue.resize(k_slopes);
    for (Eigen::Index i = 0; i < k_slopes; ++i) {
        const double s = fit.coef_stderr(i);
        fit.coef_tstat(i) = s > 0.0 ? fit.beta(i) / s : 0.0;
        fit.coef_pvalue(i) = normal_two_sided_pvalue(fit.coef_tstat(i));
    }
    fit.residuals.assign(resid.data(), resid.data() + n);
    return fit;
}

OlsFit ols_fit(const std::vector<double>& y, const std::vector<double>& x, bool with_intercept) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(x.size()), 1);
    for (std::size_t i = 0; i < x.size(); ++i) X(static_cast<Eigen::Index>(i), 0) = x[i];
    return ols_fit(y, X, with_intercept);
}

}  // namespace statarb
