#pragma once

#include <Eigen/Dense>
#include <vector>

#include "statarb/panel.hpp"

namespace statarb {

class CriticalValueStore;

// One candidate cointegrating relation: spread = weights . prices + intercept.
// The intercept comes from restricting the constant to the cointegrating
// space, so simulated null spreads carry no drift.
struct CointVector {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    double pvalue = 1.0;  // trace p-value at the rank step that admitted it
};

struct JohansenResult {
    std::vector<double> eigenvalues;   // descending, the n largest of the n+1 problem
    std::vector<double> trace_stats;   // indexed by hypothesized rank r = 0..n-1
    std::vector<double> trace_pvalues;
    int rank = 0;                      // smallest r whose trace test is not rejected
    std::vector<CointVector> vectors;  // one per admitted rank step, rank of them
    int effective_obs = 0;
};

// Reduced-rank regression statistics without p-values; this is the kernel the
// null simulation reuses. `levels` has one column per series, rows in time
// order. lag_p is the VAR order in levels (>= 1).
struct TraceStats {
    std::vector<double> eigenvalues;
    std::vector<double> trace_stats;
    Eigen::MatrixXd vectors;  // (n+1) x n, column i pairs with eigenvalue i; last row is the constant
    int effective_obs = 0;
};

TraceStats johansen_trace(const Eigen::MatrixXd& levels, int lag_p);

JohansenResult johansen_test(const AlignedPanel& panel, int lag_p, double alpha,
                             const CriticalValueStore& store);
JohansenResult johansen_test(const Eigen::MatrixXd& levels, int lag_p, double alpha,
                             const CriticalValueStore& store);

}  // namespace statarb
