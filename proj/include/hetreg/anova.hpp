#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hetreg/engines.hpp"
#include "hetreg/model.hpp"

namespace hetreg {

/// Summary of one sample in the means-equality (one-way ANOVA) problem:
/// the intercept-only, p = 1 specialization of the regression test.
struct AnovaGroupSummary {
  double mean = 0.0;
  double s2 = 0.0;  // unbiased sample variance, > 0
  int n = 0;        // >= 2
};

/// Converts raw samples into intercept-only regression groups (design is a
/// column of ones), so the general machinery applies unchanged.
std::vector<RegressionGroup> to_regression_groups(
    const std::vector<std::vector<double>>& samples);

/// Mean / variance / count summaries of raw samples.
std::vector<AnovaGroupSummary> summarize_samples(
    const std::vector<std::vector<double>>& samples);

/// Fiducial draw specialized to means: sum_i t_i^2 minus the square of the
/// weighted t sum over the total precision, with weights sqrt(n_i)/s_i.
DrawSample anova_fiducial_draw(const std::vector<AnovaGroupSummary>& summaries,
                               const std::vector<double>& t_values,
                               std::int64_t draw_index = 0);

/// Generalized draw specialized to means, built from the k-1 x k contrast
/// and the scalar per-group variances s_i^2 / n_i.
DrawSample anova_generalized_draw(const std::vector<AnovaGroupSummary>& summaries,
                                  const Eigen::VectorXd& z,
                                  const std::vector<double>& u,
                                  std::int64_t draw_index = 0);

}  // namespace hetreg
