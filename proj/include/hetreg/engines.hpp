#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hetreg/model.hpp"
#include "hetreg/rng.hpp"

namespace hetreg {

/// The two Monte Carlo constructions of the reference distribution.
enum class Engine { kFiducial, kGeneralized };

const char* to_string(Engine engine);

/// One realized Monte Carlo test value.
struct DrawSample {
  double q_value = 0.0;
  std::int64_t draw_index = 0;
};

/// Precomputed matrices for the generalized engine and the coupled check.
///
/// contrast lifts the group-difference contrast to coefficient blocks,
/// block_cov is the block-diagonal estimated covariance, whitener is the
/// symmetric inverse square root of contrast * block_cov * contrast', and
/// projector = I - proj_basis * proj_basis' is the rank-p(k-1) projection
/// onto the orthogonal complement of the pooled-weight directions.
struct GeneralizedOperator {
  Eigen::MatrixXd contrast;    // (k-1)p x kp
  Eigen::MatrixXd block_cov;   // kp x kp
  Eigen::MatrixXd whitener;    // (k-1)p x (k-1)p, symmetric
  Eigen::MatrixXd proj_basis;  // kp x p, orthonormal columns
  Eigen::MatrixXd projector;   // kp x kp, idempotent
  int k = 0;
  int p = 0;
};

/// Monte Carlo p-value with its binomial uncertainty.
struct MCResult {
  double p_value = 0.0;
  std::int64_t draws = 0;
  std::uint64_t seed = 0;
  double std_error = 0.0;       // sqrt(p (1-p) / draws)
  std::int64_t exceedances = 0; // p_value * draws, exactly
};

/// Builds the operator from fitted groups. The contrast pairs each of the
/// first k-1 groups against the last; `contrast_last_column` is the sign of
/// that last block column (+1 and -1 give identical quadratic forms since
/// the contrast only ever appears twice in every product).
GeneralizedOperator build_generalized_operator(
    const std::vector<GroupEstimate>& estimates,
    double contrast_last_column = -1.0);

/// Fiducial test value from one set of spherical multivariate t vectors,
/// one per group: sum_i t_i't_i minus the pooled-weight projection term.
DrawSample fiducial_draw(const std::vector<GroupEstimate>& estimates,
                         const Eigen::MatrixXd& weight_sum_inv,
                         const std::vector<Eigen::VectorXd>& t_vectors,
                         std::int64_t draw_index = 0);

/// Generalized test value from a standard normal z of length (k-1)p and one
/// chi-squared divisor per group.
DrawSample generalized_draw(const GeneralizedOperator& op,
                            const std::vector<GroupEstimate>& estimates,
                            const Eigen::VectorXd& z,
                            const std::vector<double>& u,
                            std::int64_t draw_index = 0);

/// Evaluates the same draw through two routes sharing the variates (v, u):
/// first the projector route (scale v blockwise by sqrt(df_i/u_i), then the
/// quadratic form through `projector`), second the multivariate-t route
/// (fiducial_draw on t_i = sqrt(df_i/u_i) v_i). The two results coincide
/// up to round-off; their agreement is checked by the acceptance suite.
std::pair<DrawSample, DrawSample> coupled_draw(
    const GeneralizedOperator& op,
    const std::vector<GroupEstimate>& estimates,
    const std::vector<Eigen::VectorXd>& v_vectors,
    const std::vector<double>& u,
    std::int64_t draw_index = 0);

// Draw kernels: consume the engine's variates from `stream` in the fixed
// order (all normal vectors first, then the chi-squared divisors) and
// return the realized test value.
double fiducial_draw_value(const std::vector<GroupEstimate>& estimates,
                           const Eigen::MatrixXd& weight_sum_inv,
                           RandomStream& stream);
double generalized_draw_value(const GeneralizedOperator& op,
                              const std::vector<GroupEstimate>& estimates,
                              RandomStream& stream);

/// Monte Carlo p-value P(Q > q0) over `draws` independent draws. Draw m
/// reads the substream keyed (seed, m), so the result is a pure function of
/// (engine, seed, draws, inputs). OpenMP-parallel over draws; the
/// exceedance count is an integer reduction, identical to the serial
/// reference below for every thread count.
MCResult mc_pvalue(Engine engine, const PooledStatistic& stat,
                   const std::vector<GroupEstimate>& estimates,
                   std::int64_t draws, std::uint64_t seed);

/// Serial reference implementation of mc_pvalue, kept for testing and
/// benchmarking against the parallel kernel.
MCResult mc_pvalue_serial(Engine engine, const PooledStatistic& stat,
                          const std::vector<GroupEstimate>& estimates,
                          std::int64_t draws, std::uint64_t seed);

}  // namespace hetreg
