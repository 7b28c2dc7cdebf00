#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hetreg/csv.hpp"
#include "hetreg/engines.hpp"
#include "hetreg/method.hpp"

namespace hetreg {

struct GroupSummaryReport {
  std::string label;
  std::int64_t n = 0;
  int p = 0;
  Eigen::VectorXd beta_hat;
  double s2 = 0.0;
};

/// Everything one test run produces. The chi-squared p-value is always
/// computed; the Monte Carlo entries are present when requested.
struct TestReport {
  double q0 = 0.0;
  int df_chi2 = 0;
  double p_chi2 = 0.0;
  std::optional<MCResult> p_fiducial;
  std::optional<MCResult> p_generalized;
  std::vector<GroupSummaryReport> groups;
  std::int64_t total_rows = 0;
  double alpha = 0.05;
};

struct TestConfig {
  std::vector<TestMethod> methods;
  std::int64_t draws = 10000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
};

/// Fits every group, pools the statistic, and evaluates the requested
/// p-value procedures. Pure function of (data, config).
TestReport run_test(const IngestResult& data, const TestConfig& config);

/// Human-readable table with one decision line per requested method.
std::string render_text(const TestReport& report);

/// Machine-readable single-document JSON rendering. Byte-identical for
/// identical (data, config).
std::string render_json(const TestReport& report);

}  // namespace hetreg
