#pragma once

#include <Eigen/Dense>

#include "hetreg/error.hpp"

namespace hetreg {

/// Unique symmetric positive-definite square root, computed spectrally.
/// Cholesky would give a different (triangular) factor, so it is not used.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m);

/// Symmetric inverse square root; throws NumericallySingular when the
/// smallest eigenvalue is at the round-off floor.
Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& m);

/// Inverse of a symmetric positive-definite matrix via its spectrum.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m);

/// Clamps round-off negatives of a mathematically nonnegative quadratic
/// form to zero. Negatives beyond -1e-12 relative to `scale` indicate a
/// computation bug and raise InternalConsistency.
double clamp_quadratic(double value, double scale);

}  // namespace hetreg
