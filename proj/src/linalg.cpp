#include "hetreg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hetreg {

namespace {

constexpr double kSymmetryRelTol = 1e-10;
constexpr double kEigenvalueRelFloor = 1e-12;
constexpr double kNegativeQuadTol = 1e-12;

// Qdiag(lambda^exponent)Q' with a relative positivity floor on the spectrum.
Eigen::MatrixXd spd_power(const Eigen::MatrixXd& m, double exponent,
                          ErrorCode singular_code) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorCode::DimensionMismatch, "matrix must be square and non-empty");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  if (!m.allFinite()) {
    fail(ErrorCode::NonFiniteInput, "matrix has non-finite entries");
  }
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryRelTol * std::max(1.0, scale)) {
    fail(ErrorCode::NotSymmetric,
         "matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) {
    fail(ErrorCode::InternalConsistency, "eigendecomposition failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double lmax = lambda(lambda.size() - 1);
  if (!(lmax > 0.0) || lambda(0) <= kEigenvalueRelFloor * lmax) {
    fail(singular_code, "matrix is not positive definite (eigenvalue range [" +
                            std::to_string(lambda(0)) + ", " +
                            std::to_string(lmax) + "])");
  }

  Eigen::VectorXd powered(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    powered(i) = std::pow(lambda(i), exponent);
  }
  Eigen::MatrixXd result =
      eig.eigenvectors() * powered.asDiagonal() * eig.eigenvectors().transpose();
  // The product above is symmetric only up to round-off; make it exact.
  return 0.5 * (result + result.transpose());
}

}  // namespace

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m) {
  return spd_power(m, 0.5, ErrorCode::NotPositiveDefinite);
}

Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& m) {
  return spd_power(m, -0.5, ErrorCode::NumericallySingular);
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m) {
  return spd_power(m, -1.0, ErrorCode::NumericallySingular);
}

double clamp_quadratic(double value, double scale) {
  if (value >= 0.0) {
    return value;
  }
  if (value >= -kNegativeQuadTol * std::max(1.0, std::abs(scale))) {
    return 0.0;
  }
  fail(ErrorCode::InternalConsistency,
       "quadratic form is negative beyond round-off: " + std::to_string(value));
}

}  // namespace hetreg
