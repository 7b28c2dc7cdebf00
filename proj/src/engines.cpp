#include "hetreg/engines.hpp"

#include <cmath>
#include <string>

#include "hetreg/linalg.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hetreg {

namespace {

void check_group_count(const std::vector<GroupEstimate>& estimates) {
  if (estimates.size() < 2) {
    fail(ErrorCode::NeedTwoGroups, "need at least two groups");
  }
}

int common_dim(const std::vector<GroupEstimate>& estimates) {
  const Eigen::Index p = estimates.front().beta_hat.size();
  for (const GroupEstimate& est : estimates) {
    if (est.beta_hat.size() != p || est.gram.rows() != p) {
      fail(ErrorCode::DimensionMismatch, "groups disagree on dimension");
    }
  }
  return static_cast<int>(p);
}

Eigen::MatrixXd pooled_weight_sum(const std::vector<GroupEstimate>& estimates,
                                  int p) {
  Eigen::MatrixXd weight_sum = Eigen::MatrixXd::Zero(p, p);
  for (const GroupEstimate& est : estimates) {
    weight_sum.noalias() += est.gram / est.s2;
  }
  return weight_sum;
}

}  // namespace

const char* to_string(Engine engine) {
  return engine == Engine::kFiducial ? "fiducial" : "generalized";
}

GeneralizedOperator build_generalized_operator(
    const std::vector<GroupEstimate>& estimates, double contrast_last_column) {
  check_group_count(estimates);
  const int p = common_dim(estimates);
  const int k = static_cast<int>(estimates.size());

  GeneralizedOperator op;
  op.k = k;
  op.p = p;

  // Contrast lifted to coefficient blocks: identity block on group i,
  // +-identity on the last group.
  op.contrast = Eigen::MatrixXd::Zero((k - 1) * p, k * p);
  for (int i = 0; i < k - 1; ++i) {
    op.contrast.block(i * p, i * p, p, p).setIdentity();
    op.contrast.block(i * p, (k - 1) * p, p, p) =
        contrast_last_column * Eigen::MatrixXd::Identity(p, p);
  }

  op.block_cov = Eigen::MatrixXd::Zero(k * p, k * p);
  for (int i = 0; i < k; ++i) {
    op.block_cov.block(i * p, i * p, p, p) =
        estimates[i].s2 * spd_inverse(estimates[i].gram);
  }

  const Eigen::MatrixXd hsh =
      op.contrast * op.block_cov * op.contrast.transpose();
  op.whitener = spd_inv_sqrt(hsh);

  const Eigen::MatrixXd pooled_inv_sqrt =
      spd_inv_sqrt(pooled_weight_sum(estimates, p));
  op.proj_basis = Eigen::MatrixXd(k * p, p);
  for (int i = 0; i < k; ++i) {
    op.proj_basis.block(i * p, 0, p, p) =
        (estimates[i].gram_sqrt / std::sqrt(estimates[i].s2)) * pooled_inv_sqrt;
  }
  op.projector = Eigen::MatrixXd::Identity(k * p, k * p) -
                 op.proj_basis * op.proj_basis.transpose();
  return op;
}

DrawSample fiducial_draw(const std::vector<GroupEstimate>& estimates,
                         const Eigen::MatrixXd& weight_sum_inv,
                         const std::vector<Eigen::VectorXd>& t_vectors,
                         std::int64_t draw_index) {
  // k = 1 is allowed here: the projection term then cancels the whole sum.
  if (estimates.empty()) {
    fail(ErrorCode::DimensionMismatch, "no groups");
  }
  const auto k = estimates.size();
  const Eigen::Index p = estimates.front().beta_hat.size();
  if (t_vectors.size() != k) {
    fail(ErrorCode::DimensionMismatch, "one t vector per group required");
  }
  if (weight_sum_inv.rows() != p || weight_sum_inv.cols() != p) {
    fail(ErrorCode::DimensionMismatch, "weight_sum_inv has the wrong shape");
  }

  double total = 0.0;
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(p);
  for (std::size_t i = 0; i < k; ++i) {
    if (t_vectors[i].size() != p) {
      fail(ErrorCode::DimensionMismatch, "t vector has the wrong length");
    }
    total += t_vectors[i].squaredNorm();
    pooled.noalias() +=
        (estimates[i].gram_sqrt * t_vectors[i]) / std::sqrt(estimates[i].s2);
  }
  const double value = total - pooled.dot(weight_sum_inv * pooled);
  return DrawSample{clamp_quadratic(value, total), draw_index};
}

DrawSample generalized_draw(const GeneralizedOperator& op,
                            const std::vector<GroupEstimate>& estimates,
                            const Eigen::VectorXd& z,
                            const std::vector<double>& u,
                            std::int64_t draw_index) {
  const int k = op.k;
  const int p = op.p;
  if (static_cast<int>(estimates.size()) != k ||
      static_cast<int>(u.size()) != k || z.size() != (k - 1) * p) {
    fail(ErrorCode::DimensionMismatch, "draw inputs do not match the operator");
  }

  // y = H' W' z, then the block-diagonal middle matrix contributes
  // (df_i / u_i) * y_i' S_i y_i per group.
  const Eigen::VectorXd y = op.contrast.transpose() * (op.whitener.transpose() * z);
  double value = 0.0;
  double magnitude = 0.0;
  for (int i = 0; i < k; ++i) {
    if (!(u[i] > 0.0)) {
      fail(ErrorCode::InvalidArgument, "chi-squared divisors must be positive");
    }
    const auto yi = y.segment(i * p, p);
    const double term = (static_cast<double>(estimates[i].df) / u[i]) *
                        yi.dot(op.block_cov.block(i * p, i * p, p, p) * yi);
    value += term;
    magnitude += std::abs(term);
  }
  return DrawSample{clamp_quadratic(value, magnitude), draw_index};
}

std::pair<DrawSample, DrawSample> coupled_draw(
    const GeneralizedOperator& op, const std::vector<GroupEstimate>& estimates,
    const std::vector<Eigen::VectorXd>& v_vectors, const std::vector<double>& u,
    std::int64_t draw_index) {
  const int k = op.k;
  const int p = op.p;
  if (static_cast<int>(estimates.size()) != k ||
      static_cast<int>(v_vectors.size()) != k ||
      static_cast<int>(u.size()) != k) {
    fail(ErrorCode::DimensionMismatch, "draw inputs do not match the operator");
  }

  // Route one: scale the stacked normals blockwise by sqrt(df_i/u_i) and push
  // them through the projector.
  Eigen::VectorXd scaled(k * p);
  std::vector<Eigen::VectorXd> t_vectors(k);
  for (int i = 0; i < k; ++i) {
    if (v_vectors[i].size() != p) {
      fail(ErrorCode::DimensionMismatch, "v vector has the wrong length");
    }
    t_vectors[i] = student_t_scale(v_vectors[i], estimates[i].df, u[i]);
    scaled.segment(i * p, p) = t_vectors[i];
  }
  const double star = scaled.dot(op.projector * scaled);
  DrawSample qg_star{clamp_quadratic(star, scaled.squaredNorm()), draw_index};

  // Route two: the grouped multivariate-t form on the same variates.
  const Eigen::MatrixXd weight_sum_inv =
      spd_inverse(pooled_weight_sum(estimates, p));
  DrawSample qf = fiducial_draw(estimates, weight_sum_inv, t_vectors, draw_index);
  return {qg_star, qf};
}

double fiducial_draw_value(const std::vector<GroupEstimate>& estimates,
                           const Eigen::MatrixXd& weight_sum_inv,
                           RandomStream& stream) {
  const auto k = estimates.size();
  const auto p = static_cast<int>(estimates.front().beta_hat.size());
  // Fixed consumption order: all normal vectors, then all divisors.
  std::vector<Eigen::VectorXd> normals(k);
  for (std::size_t i = 0; i < k; ++i) {
    normals[i] = stream.normal_vector(p);
  }
  std::vector<Eigen::VectorXd> t_vectors(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double u = stream.next_chi_squared(estimates[i].df);
    t_vectors[i] = student_t_scale(normals[i], estimates[i].df, u);
  }
  return fiducial_draw(estimates, weight_sum_inv, t_vectors).q_value;
}

double generalized_draw_value(const GeneralizedOperator& op,
                              const std::vector<GroupEstimate>& estimates,
                              RandomStream& stream) {
  const Eigen::VectorXd z = stream.normal_vector((op.k - 1) * op.p);
  std::vector<double> u(op.k);
  for (int i = 0; i < op.k; ++i) {
    u[i] = stream.next_chi_squared(estimates[i].df);
  }
  return generalized_draw(op, estimates, z, u).q_value;
}

namespace {

struct PreparedEngine {
  Engine engine;
  const std::vector<GroupEstimate>* estimates;
  const Eigen::MatrixXd* weight_sum_inv;
  GeneralizedOperator op;  // built once for the generalized engine

  double draw(RandomStream& stream) const {
    if (engine == Engine::kFiducial) {
      return fiducial_draw_value(*estimates, *weight_sum_inv, stream);
    }
    return generalized_draw_value(op, *estimates, stream);
  }
};

PreparedEngine prepare(Engine engine, const PooledStatistic& stat,
                       const std::vector<GroupEstimate>& estimates) {
  check_group_count(estimates);
  PreparedEngine prepared{engine, &estimates, &stat.weight_sum_inv, {}};
  if (engine == Engine::kGeneralized) {
    prepared.op = build_generalized_operator(estimates);
  }
  return prepared;
}

MCResult finalize(std::int64_t exceedances, std::int64_t draws,
                  std::uint64_t seed) {
  MCResult result;
  result.p_value = static_cast<double>(exceedances) / static_cast<double>(draws);
  result.draws = draws;
  result.seed = seed;
  result.std_error =
      std::sqrt(result.p_value * (1.0 - result.p_value) / static_cast<double>(draws));
  result.exceedances = exceedances;
  return result;
}

}  // namespace

MCResult mc_pvalue(Engine engine, const PooledStatistic& stat,
                   const std::vector<GroupEstimate>& estimates,
                   std::int64_t draws, std::uint64_t seed) {
  if (draws < 1) {
    fail(ErrorCode::InvalidArgument, "need at least one draw");
  }
  const PreparedEngine prepared = prepare(engine, stat, estimates);
  const double threshold = stat.q0;

  std::int64_t exceedances = 0;
#pragma omp parallel for reduction(+ : exceedances) schedule(static)
  for (std::int64_t m = 0; m < draws; ++m) {
    RandomStream stream{seed, static_cast<std::uint64_t>(m)};
    if (prepared.draw(stream) > threshold) {
      ++exceedances;
    }
  }
  return finalize(exceedances, draws, seed);
}

MCResult mc_pvalue_serial(Engine engine, const PooledStatistic& stat,
                          const std::vector<GroupEstimate>& estimates,
                          std::int64_t draws, std::uint64_t seed) {
  if (draws < 1) {
    fail(ErrorCode::InvalidArgument, "need at least one draw");
  }
  const PreparedEngine prepared = prepare(engine, stat, estimates);
  const double threshold = stat.q0;

  std::int64_t exceedances = 0;
  for (std::int64_t m = 0; m < draws; ++m) {
    RandomStream stream{seed, static_cast<std::uint64_t>(m)};
    if (prepared.draw(stream) > threshold) {
      ++exceedances;
    }
  }
  return finalize(exceedances, draws, seed);
}

}  // namespace hetreg
