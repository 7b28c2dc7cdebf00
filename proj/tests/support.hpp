#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hetreg/model.hpp"
#include "hetreg/rng.hpp"

namespace testsupport {

// Writes `text` to a fresh file under the system temp directory and removes
// it on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& text, const std::string& suffix = ".txt") {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("hetreg_test_" + std::to_string(++counter) + suffix))
                .string();
    std::ofstream out(path_);
    out << text;
  }
  ~TempFile() { std::remove(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Discrepancy measure used throughout: absolute difference over the larger
// magnitude, floored at 1 so values near zero compare absolutely.
inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Full-rank group with an intercept, uniform covariates in [-1, 1], random
// coefficients and a noise scale spread over a few orders of magnitude.
inline hetreg::RegressionGroup random_group(hetreg::RandomStream& stream,
                                            int n, int p) {
  hetreg::RegressionGroup group;
  group.design = Eigen::MatrixXd::Ones(n, p);
  for (int j = 1; j < p; ++j) {
    for (int r = 0; r < n; ++r) {
      group.design(r, j) = 2.0 * stream.next_unit() - 1.0;
    }
  }
  Eigen::VectorXd beta(p);
  for (int j = 0; j < p; ++j) {
    beta(j) = stream.next_normal();
  }
  const double sigma = std::exp(stream.next_normal());
  group.response = group.design * beta;
  for (int r = 0; r < n; ++r) {
    group.response(r) += sigma * stream.next_normal();
  }
  return group;
}

inline std::vector<hetreg::RegressionGroup> random_dataset(
    hetreg::RandomStream& stream, int k, int p, int n_min, int n_max) {
  std::vector<hetreg::RegressionGroup> groups;
  groups.reserve(k);
  for (int i = 0; i < k; ++i) {
    const int span = n_max - n_min + 1;
    const int n = n_min + static_cast<int>(stream.next_u64() %
                                           static_cast<std::uint64_t>(span));
    groups.push_back(random_group(stream, n, p));
  }
  return groups;
}

inline std::vector<hetreg::GroupEstimate> fit_all(
    const std::vector<hetreg::RegressionGroup>& groups) {
  std::vector<hetreg::GroupEstimate> estimates;
  estimates.reserve(groups.size());
  for (const hetreg::RegressionGroup& group : groups) {
    estimates.push_back(hetreg::fit_group(group));
  }
  return estimates;
}

}  // namespace testsupport
