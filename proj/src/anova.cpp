#include "hetreg/anova.hpp"

#include <cmath>
#include <string>

#include "hetreg/linalg.hpp"

namespace hetreg {

namespace {

void check_summaries(const std::vector<AnovaGroupSummary>& summaries) {
  if (summaries.empty()) {
    fail(ErrorCode::DimensionMismatch, "no group summaries");
  }
  for (const AnovaGroupSummary& s : summaries) {
    if (s.n < 2) {
      fail(ErrorCode::InsufficientData, "each sample needs n >= 2");
    }
    if (!(s.s2 > 0.0)) {
      fail(ErrorCode::DegenerateFit, "sample variance must be positive");
    }
  }
}

}  // namespace

std::vector<RegressionGroup> to_regression_groups(
    const std::vector<std::vector<double>>& samples) {
  std::vector<RegressionGroup> groups;
  groups.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto n = static_cast<Eigen::Index>(samples[i].size());
    if (n < 2) {
      fail(ErrorCode::InsufficientData,
           "sample " + std::to_string(i) + " needs at least two observations");
    }
    RegressionGroup group;
    group.design = Eigen::MatrixXd::Ones(n, 1);
    group.response = Eigen::Map<const Eigen::VectorXd>(samples[i].data(), n);
    groups.push_back(std::move(group));
  }
  return groups;
}

std::vector<AnovaGroupSummary> summarize_samples(
    const std::vector<std::vector<double>>& samples) {
  std::vector<AnovaGroupSummary> summaries;
  summaries.reserve(samples.size());
  for (const RegressionGroup& group : to_regression_groups(samples)) {
    const GroupEstimate est = fit_group(group);
    summaries.push_back(AnovaGroupSummary{est.beta_hat(0), est.s2,
                                          static_cast<int>(group.response.size())});
  }
  return summaries;
}

DrawSample anova_fiducial_draw(const std::vector<AnovaGroupSummary>& summaries,
                               const std::vector<double>& t_values,
                               std::int64_t draw_index) {
  check_summaries(summaries);
  if (t_values.size() != summaries.size()) {
    fail(ErrorCode::DimensionMismatch, "one t value per group required");
  }

  double total = 0.0;
  double weighted = 0.0;   // sum of (sqrt(n_i)/s_i) t_i
  double precision = 0.0;  // sum of n_i / s_i^2
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const double s = std::sqrt(summaries[i].s2);
    total += t_values[i] * t_values[i];
    weighted += std::sqrt(static_cast<double>(summaries[i].n)) / s * t_values[i];
    precision += static_cast<double>(summaries[i].n) / summaries[i].s2;
  }
  const double value = total - weighted * weighted / precision;
  return DrawSample{clamp_quadratic(value, total), draw_index};
}

DrawSample anova_generalized_draw(const std::vector<AnovaGroupSummary>& summaries,
                                  const Eigen::VectorXd& z,
                                  const std::vector<double>& u,
                                  std::int64_t draw_index) {
  check_summaries(summaries);
  const auto k = static_cast<int>(summaries.size());
  if (k < 2) {
    fail(ErrorCode::NeedTwoGroups, "need at least two groups");
  }
  if (z.size() != k - 1 || static_cast<int>(u.size()) != k) {
    fail(ErrorCode::DimensionMismatch, "draw inputs do not match k");
  }

  Eigen::MatrixXd contrast = Eigen::MatrixXd::Zero(k - 1, k);
  contrast.leftCols(k - 1).setIdentity();
  contrast.col(k - 1).setConstant(-1.0);

  Eigen::VectorXd scalar_cov(k);  // s_i^2 / n_i
  for (int i = 0; i < k; ++i) {
    scalar_cov(i) = summaries[i].s2 / static_cast<double>(summaries[i].n);
  }

  const Eigen::MatrixXd csc =
      contrast * scalar_cov.asDiagonal() * contrast.transpose();
  const Eigen::MatrixXd whitener = spd_inv_sqrt(csc);

  const Eigen::VectorXd y = contrast.transpose() * (whitener.transpose() * z);
  double value = 0.0;
  double magnitude = 0.0;
  for (int i = 0; i < k; ++i) {
    if (!(u[i] > 0.0)) {
      fail(ErrorCode::InvalidArgument, "chi-squared divisors must be positive");
    }
    const double df = static_cast<double>(summaries[i].n - 1);
    const double term = (df / u[i]) * scalar_cov(i) * y(i) * y(i);
    value += term;
    magnitude += std::abs(term);
  }
  return DrawSample{clamp_quadratic(value, magnitude), draw_index};
}

}  // namespace hetreg
