#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "hetreg/anova.hpp"
#include "hetreg/engines.hpp"
#include "hetreg/error.hpp"
#include "hetreg/linalg.hpp"
#include "hetreg/model.hpp"
#include "support.hpp"

using hetreg::build_generalized_operator;
using hetreg::coupled_draw;
using hetreg::Engine;
using hetreg::Error;
using hetreg::ErrorCode;
using hetreg::fiducial_draw;
using hetreg::generalized_draw;
using hetreg::GeneralizedOperator;
using hetreg::GroupEstimate;
using hetreg::mc_pvalue;
using hetreg::mc_pvalue_serial;
using hetreg::pooled_statistic;
using hetreg::RandomStream;
using testsupport::fit_all;
using testsupport::random_dataset;
using testsupport::rel_diff;

namespace {

std::vector<GroupEstimate> reference_estimates() {
  // Two intercept-only groups with means 2 and 4, variances 1 and 4.
  return fit_all(hetreg::to_regression_groups({{1, 2, 3}, {2, 4, 6}}));
}

struct DrawVariates {
  std::vector<Eigen::VectorXd> v;
  std::vector<double> u;
};

DrawVariates draw_variates(RandomStream& stream,
                           const std::vector<GroupEstimate>& estimates) {
  DrawVariates out;
  for (const GroupEstimate& est : estimates) {
    out.v.push_back(stream.normal_vector(static_cast<int>(est.beta_hat.size())));
  }
  for (const GroupEstimate& est : estimates) {
    out.u.push_back(stream.next_chi_squared(est.df));
  }
  return out;
}

}  // namespace

TEST_CASE("whitener inverts the contrasted covariance on the reference data") {
  // HSH' = 1/3 + 4/3 = 5/3, so the scalar whitener is (5/3)^(-1/2).
  const auto estimates = reference_estimates();
  const GeneralizedOperator op = build_generalized_operator(estimates);
  CHECK(op.whitener.rows() == 1);
  CHECK(op.whitener(0, 0) ==
        doctest::Approx(0.7745966692414834).epsilon(1e-12));
  const Eigen::MatrixXd hsh =
      op.contrast * op.block_cov * op.contrast.transpose();
  CHECK(hsh(0, 0) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("operator invariants hold on randomized inputs") {
  RandomStream stream{301};
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 2 + static_cast<int>(stream.next_u64() % 4);
    const int p = 1 + static_cast<int>(stream.next_u64() % 4);
    const auto estimates =
        fit_all(random_dataset(stream, k, p, p + 2, 20));
    const GeneralizedOperator op = build_generalized_operator(estimates);

    const Eigen::MatrixXd wtw_hsh =
        op.whitener.transpose() * op.whitener * op.contrast * op.block_cov *
        op.contrast.transpose();
    const Eigen::MatrixXd identity_kp1 =
        Eigen::MatrixXd::Identity((k - 1) * p, (k - 1) * p);
    CHECK((wtw_hsh - identity_kp1).cwiseAbs().maxCoeff() <= 1e-8);

    const Eigen::MatrixXd qtq = op.proj_basis.transpose() * op.proj_basis;
    CHECK((qtq - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() <=
          1e-10);

    CHECK((op.projector * op.projector - op.projector).cwiseAbs().maxCoeff() <=
          1e-10);
    CHECK(rel_diff(op.projector.trace(), static_cast<double>(p * (k - 1))) <=
          1e-10);
  }
}

TEST_CASE("contrast sign choice does not change the draw value") {
  RandomStream stream{302};
  const auto estimates = fit_all(random_dataset(stream, 4, 2, 5, 12));
  const GeneralizedOperator minus = build_generalized_operator(estimates, -1.0);
  const GeneralizedOperator plus = build_generalized_operator(estimates, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd z = stream.normal_vector(6);
    std::vector<double> u;
    for (const GroupEstimate& est : estimates) {
      u.push_back(stream.next_chi_squared(est.df));
    }
    const double a = generalized_draw(minus, estimates, z, u).q_value;
    const double b = generalized_draw(plus, estimates, z, u).q_value;
    CHECK(rel_diff(a, b) <= 1e-10);
  }
}

TEST_CASE("unit chi-squared divisors collapse the draw to |z| squared") {
  // With every divisor at its degrees of freedom the scaling drops out and
  // the whitened quadratic form is exactly z'z.
  RandomStream stream{303};
  for (int trial = 0; trial < 25; ++trial) {
    const int k = 2 + static_cast<int>(stream.next_u64() % 3);
    const int p = 1 + static_cast<int>(stream.next_u64() % 3);
    const auto estimates = fit_all(random_dataset(stream, k, p, p + 3, 18));
    const GeneralizedOperator op = build_generalized_operator(estimates);
    const Eigen::VectorXd z = stream.normal_vector((k - 1) * p);
    std::vector<double> u;
    for (const GroupEstimate& est : estimates) {
      u.push_back(static_cast<double>(est.df));
    }
    CHECK(rel_diff(generalized_draw(op, estimates, z, u).q_value,
                   z.squaredNorm()) <= 1e-8);
  }
}

TEST_CASE("single-group fiducial draws are identically zero") {
  // With one group the pooled projection removes everything.
  RandomStream stream{304};
  const auto estimates = fit_all(random_dataset(stream, 1, 2, 6, 10));
  const Eigen::MatrixXd winv = hetreg::spd_inverse(
      estimates[0].gram / estimates[0].s2);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd t = stream.student_t_vector(2, estimates[0].df);
    CHECK(fiducial_draw(estimates, winv, {t}).q_value <= 1e-10);
  }
}

TEST_CASE("draw validation") {
  const auto estimates = reference_estimates();
  const auto stat = pooled_statistic(estimates);
  const GeneralizedOperator op = build_generalized_operator(estimates);

  CHECK_THROWS_AS(
      (void)fiducial_draw({}, stat.weight_sum_inv, {}), Error);
  CHECK_THROWS_AS((void)fiducial_draw(estimates, stat.weight_sum_inv,
                                      {Eigen::VectorXd::Ones(1)}),
                  Error);
  CHECK_THROWS_AS((void)generalized_draw(op, estimates,
                                         Eigen::VectorXd::Ones(2), {1.0, 1.0}),
                  Error);
  try {
    (void)generalized_draw(op, estimates, Eigen::VectorXd::Ones(1),
                           {1.0, -2.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("coupled draws agree through both evaluation routes") {
  RandomStream stream{305};
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(stream.next_u64() % 4);
    const int p = 1 + static_cast<int>(stream.next_u64() % 4);
    const auto estimates = fit_all(random_dataset(stream, k, p, p + 1, 30));
    const GeneralizedOperator op = build_generalized_operator(estimates);
    const DrawVariates variates = draw_variates(stream, estimates);
    const auto [qg_star, qf] = coupled_draw(op, estimates, variates.v,
                                            variates.u);
    CHECK(rel_diff(qg_star.q_value, qf.q_value) <= 1e-8);
  }
}

TEST_CASE("Monte Carlo p-values are deterministic and match the serial path") {
  RandomStream stream{306};
  const auto estimates = fit_all(random_dataset(stream, 3, 2, 6, 15));
  const auto stat = pooled_statistic(estimates);
  for (Engine engine : {Engine::kFiducial, Engine::kGeneralized}) {
    const auto a = mc_pvalue(engine, stat, estimates, 4000, 99);
    const auto b = mc_pvalue(engine, stat, estimates, 4000, 99);
    const auto c = mc_pvalue_serial(engine, stat, estimates, 4000, 99);
    CHECK(a.p_value == b.p_value);
    CHECK(a.exceedances == b.exceedances);
    CHECK(a.p_value == c.p_value);
    CHECK(a.exceedances == c.exceedances);
    CHECK(a.draws == 4000);
    CHECK(a.seed == 99);
    CHECK(a.p_value ==
          static_cast<double>(a.exceedances) / static_cast<double>(a.draws));
    CHECK(a.std_error ==
          doctest::Approx(std::sqrt(a.p_value * (1.0 - a.p_value) / 4000.0)));
    CHECK(a.p_value >= 0.0);
    CHECK(a.p_value <= 1.0);
  }
}

TEST_CASE("p-value boundaries follow the exceedance rule") {
  RandomStream stream{307};
  const auto estimates = fit_all(random_dataset(stream, 3, 1, 5, 9));
  auto stat = pooled_statistic(estimates);

  stat.q0 = 0.0;  // every positive draw exceeds a zero threshold
  CHECK(mc_pvalue(Engine::kFiducial, stat, estimates, 500, 1).p_value == 1.0);
  CHECK(mc_pvalue(Engine::kGeneralized, stat, estimates, 500, 1).p_value == 1.0);

  stat.q0 = 1e12;  // no finite draw gets near this
  CHECK(mc_pvalue(Engine::kFiducial, stat, estimates, 500, 1).p_value == 0.0);
  CHECK(mc_pvalue(Engine::kGeneralized, stat, estimates, 500, 1).p_value == 0.0);
}

TEST_CASE("draw count validation") {
  const auto estimates = reference_estimates();
  const auto stat = pooled_statistic(estimates);
  CHECK_THROWS_AS((void)mc_pvalue(Engine::kFiducial, stat, estimates, 0, 1),
                  Error);
  CHECK_THROWS_AS(
      (void)mc_pvalue_serial(Engine::kGeneralized, stat, estimates, -5, 1),
      Error);
}
