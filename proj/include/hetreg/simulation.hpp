#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hetreg/engines.hpp"
#include "hetreg/method.hpp"
#include "hetreg/model.hpp"

namespace hetreg {

/// Per-group design recipe. Generated designs are an intercept column plus
/// p-1 iid Uniform(0,1) covariates, drawn fresh for every replicate; fixed
/// designs are reused as given.
struct DesignSpec {
  bool generated = true;
  std::vector<Eigen::MatrixXd> fixed;  // one matrix per group when !generated
};

/// A population to simulate from: k group models with their own noise
/// variances. Scenarios with all beta equal are null scenarios.
struct SimulationScenario {
  int k = 0;
  int p = 0;
  std::vector<int> n;
  std::vector<Eigen::VectorXd> beta;
  std::vector<double> sigma2;
  DesignSpec design;
  std::uint64_t seed = 0;
};

void validate_scenario(const SimulationScenario& scenario);
bool is_null_scenario(const SimulationScenario& scenario);

/// Loads a scenario from the JSON config format documented in the README.
SimulationScenario load_scenario(const std::string& path);

/// Empirical type-I error of one method on a null scenario.
struct SizeReport {
  std::string method;
  double nominal_alpha = 0.0;
  std::int64_t rejections = 0;
  std::int64_t replications = 0;
  double empirical_size = 0.0;
  double mc_half_width = 0.0;  // 95% binomial half-width
};

/// Two-sample Kolmogorov-Smirnov comparison outcome.
struct KsReport {
  double distance = 0.0;
  double critical_value = 0.0;  // asymptotic 1% level
  bool pass = false;
  std::int64_t draws = 0;
  std::uint64_t seed = 0;
};

/// Draws one dataset: Y_i = X_i beta_i + noise with the scenario's group
/// variances. Deterministic in (scenario.seed, replicate_index); per group
/// the covariates (when generated) are consumed before the noise.
std::vector<RegressionGroup> generate_dataset(const SimulationScenario& scenario,
                                              std::int64_t replicate_index);

/// Fraction of null replications rejected at `alpha`, with binomial
/// half-width. Replicate r simulates from substream (seed, r) and, for the
/// Monte Carlo methods, evaluates its inner p-value under the nested seed
/// (seed, r, inner). OpenMP-parallel over replicates; the rejection count
/// is an integer reduction, so the report matches the serial reference.
SizeReport estimate_size(const SimulationScenario& scenario, TestMethod method,
                         double alpha, std::int64_t replications,
                         std::int64_t mc_draws);

/// Serial reference for estimate_size, kept for testing and benchmarks.
SizeReport estimate_size_serial(const SimulationScenario& scenario,
                                TestMethod method, double alpha,
                                std::int64_t replications,
                                std::int64_t mc_draws);

/// Two-sample KS distance between `draws` independent fiducial values and
/// `draws` independent generalized values on the same fitted groups, using
/// disjoint substream tags so the two samples are independent. Passes when
/// the distance is below the asymptotic 1% critical value.
KsReport compare_distributions(const std::vector<GroupEstimate>& estimates,
                               std::int64_t draws, std::uint64_t seed);

/// sup |F_a - F_b| between the empirical CDFs of two samples.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// Asymptotic two-sample KS critical value at the 1% level.
double ks_critical_1pct(std::int64_t na, std::int64_t nb);

}  // namespace hetreg
