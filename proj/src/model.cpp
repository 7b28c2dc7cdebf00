#include "hetreg/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hetreg/linalg.hpp"
#include "hetreg/special.hpp"

namespace hetreg {

namespace {

// Rank tolerance on singular values of the design.
constexpr double kRankRelTol = 1e-10;
// Residual variance below this fraction of the mean squared response is an
// exact fit; downstream weights divide by it.
constexpr double kDegenerateS2RelTol = 1e-12;

}  // namespace

GroupEstimate fit_group(const RegressionGroup& group) {
  const Eigen::Index n = group.design.rows();
  const Eigen::Index p = group.design.cols();
  if (p < 1) {
    fail(ErrorCode::InsufficientData, "design needs at least one column");
  }
  if (group.response.size() != n) {
    fail(ErrorCode::DimensionMismatch,
         "response length " + std::to_string(group.response.size()) +
             " does not match design rows " + std::to_string(n));
  }
  if (!group.design.allFinite() || !group.response.allFinite()) {
    fail(ErrorCode::NonFiniteInput, "design or response has non-finite entries");
  }
  if (n <= p) {
    fail(ErrorCode::InsufficientData,
         "need more observations (" + std::to_string(n) + ") than coefficients (" +
             std::to_string(p) + ")");
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(group.design,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(p - 1);
  if (!(smax > 0.0) || smin < kRankRelTol * smax) {
    fail(ErrorCode::RankDeficient,
         "design is rank deficient (singular values " + std::to_string(smin) +
             " .. " + std::to_string(smax) + ")");
  }

  GroupEstimate est;
  est.beta_hat = svd.solve(group.response);
  est.df = static_cast<int>(n - p);

  const Eigen::VectorXd residuals = group.response - group.design * est.beta_hat;
  est.s2 = residuals.squaredNorm() / est.df;

  const double mean_sq_response = group.response.squaredNorm() / n;
  if (est.s2 <= kDegenerateS2RelTol * mean_sq_response) {
    fail(ErrorCode::DegenerateFit,
         "residual variance is zero to round-off; the design explains the "
         "response exactly");
  }

  Eigen::MatrixXd gram = group.design.transpose() * group.design;
  est.gram = 0.5 * (gram + gram.transpose());
  est.gram_sqrt = spd_sqrt(est.gram);
  return est;
}

PooledStatistic pooled_statistic(const std::vector<GroupEstimate>& estimates) {
  const auto k = static_cast<int>(estimates.size());
  if (k < 2) {
    fail(ErrorCode::NeedTwoGroups,
         "need at least two groups, got " + std::to_string(k));
  }
  const Eigen::Index p = estimates.front().beta_hat.size();
  for (const GroupEstimate& est : estimates) {
    if (est.beta_hat.size() != p || est.gram.rows() != p || est.gram.cols() != p) {
      fail(ErrorCode::DimensionMismatch,
           "all groups must share the same number of coefficients");
    }
  }

  Eigen::MatrixXd weight_sum = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd weighted_coef = Eigen::VectorXd::Zero(p);
  for (const GroupEstimate& est : estimates) {
    const double inv_s2 = 1.0 / est.s2;
    weight_sum.noalias() += inv_s2 * est.gram;
    weighted_coef.noalias() += inv_s2 * (est.gram * est.beta_hat);
  }

  PooledStatistic stat;
  stat.weight_sum = weight_sum;
  stat.weight_sum_inv = spd_inverse(weight_sum);

  // Centered form of the weighted between-group quadratic: summing
  // (beta_i - pooled mean)' W_i (beta_i - pooled mean) avoids the
  // cancellation that "total minus projection" suffers when coefficients
  // are large relative to their spread.
  const Eigen::VectorXd pooled_mean = stat.weight_sum_inv * weighted_coef;
  double q0 = 0.0;
  for (const GroupEstimate& est : estimates) {
    const Eigen::VectorXd centered = est.beta_hat - pooled_mean;
    q0 += centered.dot(est.gram * centered) / est.s2;
  }
  stat.q0 = clamp_quadratic(q0, q0);
  stat.k = k;
  stat.df_chi2 = static_cast<int>(p) * (k - 1);
  return stat;
}

double chi_squared_pvalue(const PooledStatistic& stat) {
  if (!(stat.q0 >= 0.0) || stat.df_chi2 < 1) {
    fail(ErrorCode::InvalidArgument, "pooled statistic is not valid");
  }
  return chi_squared_upper_tail(stat.q0, stat.df_chi2);
}

}  // namespace hetreg
