#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hetreg/error.hpp"

namespace hetreg {

/// One group's observations: response = design * coefficients + noise,
/// with its own noise variance. The design must have full column rank and
/// strictly more rows than columns.
struct RegressionGroup {
  Eigen::MatrixXd design;    // n x p
  Eigen::VectorXd response;  // n
};

/// Least-squares summary of one group.
struct GroupEstimate {
  Eigen::VectorXd beta_hat;   // p
  double s2 = 0.0;            // unbiased residual variance, > 0
  Eigen::MatrixXd gram;       // X'X, p x p symmetric positive definite
  Eigen::MatrixXd gram_sqrt;  // symmetric square root of the Gram matrix
  int df = 0;                 // n - p
};

/// Observed pooled statistic for coefficient equality across groups,
/// together with the weight matrices that enter it.
struct PooledStatistic {
  double q0 = 0.0;                 // nonnegative
  Eigen::MatrixXd weight_sum;      // sum_i gram_i / s2_i
  Eigen::MatrixXd weight_sum_inv;  // its inverse
  int k = 0;                       // number of groups
  int df_chi2 = 0;                 // p * (k - 1)
};

/// Ordinary least squares fit of one group.
///
/// Throws InsufficientData when n <= p, RankDeficient when the smallest
/// singular value of the design falls below 1e-10 of the largest, and
/// DegenerateFit when the residual variance is zero to within round-off
/// of the response scale (downstream weights divide by it).
GroupEstimate fit_group(const RegressionGroup& group);

/// Pooled statistic over k >= 2 fitted groups sharing the same p.
/// The statistic is a weighted between-group quadratic form; tiny negative
/// round-off is clamped to zero.
PooledStatistic pooled_statistic(const std::vector<GroupEstimate>& estimates);

/// Chi-squared reference p-value: upper tail at q0 with p(k-1) degrees of
/// freedom. A large-sample approximation, liberal for small groups.
double chi_squared_pvalue(const PooledStatistic& stat);

}  // namespace hetreg
