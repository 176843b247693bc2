#pragma once

#include <Eigen/Dense>
#include <vector>

namespace statarb {

// Classical least-squares fit. `beta` and the coef_* vectors are parallel
// and cover the slope coefficients; the intercept (when requested) is
// reported separately as alpha.
struct OlsFit {
    double alpha = 0.0;
    double alpha_stderr = 0.0;
    Eigen::VectorXd beta;
    Eigen::VectorXd coef_stderr;
    Eigen::VectorXd coef_tstat;
    Eigen::VectorXd coef_pvalue;  // two-sided, normal approximation
    std::vector<double> residuals;
    double residual_std = 0.0;  // sqrt(SSR / (n - k))
    double ssr = 0.0;

    double residual_mean() const;
};

// Minimizes ||y - X b (- a)||^2. Throws SingularMatrixError when X is rank
// deficient and DegenerateInputError when there are too few observations.
OlsFit ols_fit(const std::vector<double>& y, const Eigen::MatrixXd& X, bool with_intercept);

// Single-regressor convenience used by the spread and OU modules.
OlsFit ols_fit(const std::vector<double>& y, const std::vector<double>& x, bool with_intercept);

}  // namespace statarb
