#include "hetreg/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "hetreg/rng.hpp"
#include "hetreg/special.hpp"

namespace hetreg {

namespace {

constexpr double kSigma2Floor = 1e-12;

}  // namespace

void validate_scenario(const SimulationScenario& scenario) {
  if (scenario.k < 2) {
    fail(ErrorCode::NeedTwoGroups, "scenario needs k >= 2 groups");
  }
  if (scenario.p < 1) {
    fail(ErrorCode::SchemaError, "scenario needs p >= 1");
  }
  const auto k = static_cast<std::size_t>(scenario.k);
  if (scenario.n.size() != k || scenario.beta.size() != k ||
      scenario.sigma2.size() != k) {
    fail(ErrorCode::SchemaError, "n, beta and sigma2 must each have k entries");
  }
  for (int i = 0; i < scenario.k; ++i) {
    if (scenario.n[i] <= scenario.p) {
      fail(ErrorCode::SchemaError,
           "group " + std::to_string(i) + " needs n > p");
    }
    if (!(scenario.sigma2[i] >= kSigma2Floor)) {
      fail(ErrorCode::SchemaError,
           "sigma2 must be at least " + std::to_string(kSigma2Floor));
    }
    if (scenario.beta[i].size() != scenario.p) {
      fail(ErrorCode::SchemaError, "beta vectors must have length p");
    }
  }
  if (!scenario.design.generated) {
    if (scenario.design.fixed.size() != k) {
      fail(ErrorCode::SchemaError, "fixed designs must have k matrices");
    }
    for (int i = 0; i < scenario.k; ++i) {
      const Eigen::MatrixXd& design = scenario.design.fixed[i];
      if (design.rows() != scenario.n[i] || design.cols() != scenario.p) {
        fail(ErrorCode::SchemaError,
             "fixed design " + std::to_string(i) + " must be n x p");
      }
      if (!design.allFinite()) {
        fail(ErrorCode::NonFiniteInput, "fixed design has non-finite entries");
      }
    }
  }
}

bool is_null_scenario(const SimulationScenario& scenario) {
  for (std::size_t i = 1; i < scenario.beta.size(); ++i) {
    if (scenario.beta[i] != scenario.beta[0]) {
      return false;
    }
  }
  return true;
}

std::vector<RegressionGroup> generate_dataset(const SimulationScenario& scenario,
                                              std::int64_t replicate_index) {
  validate_scenario(scenario);
  RandomStream stream{scenario.seed, static_cast<std::uint64_t>(replicate_index)};

  std::vector<RegressionGroup> groups;
  groups.reserve(scenario.k);
  for (int i = 0; i < scenario.k; ++i) {
    const int n = scenario.n[i];
    RegressionGroup group;
    if (scenario.design.generated) {
      // Intercept plus p-1 uniform covariates, column by column.
      group.design = Eigen::MatrixXd::Ones(n, scenario.p);
      for (int j = 1; j < scenario.p; ++j) {
        for (int r = 0; r < n; ++r) {
          group.design(r, j) = stream.next_unit();
        }
      }
    } else {
      group.design = scenario.design.fixed[i];
    }
    const double sigma = std::sqrt(scenario.sigma2[i]);
    group.response = group.design * scenario.beta[i];
    for (int r = 0; r < n; ++r) {
      group.response(r) += sigma * stream.next_normal();
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

namespace {

// One replicate of the size study: simulate, fit, test, compare to alpha.
bool replicate_rejects(const SimulationScenario& scenario, TestMethod method,
                       double alpha, std::int64_t mc_draws,
                       std::int64_t replicate) {
  const std::vector<RegressionGroup> groups =
      generate_dataset(scenario, replicate);
  std::vector<GroupEstimate> estimates;
  estimates.reserve(groups.size());
  for (const RegressionGroup& group : groups) {
    estimates.push_back(fit_group(group));
  }
  const PooledStatistic stat = pooled_statistic(estimates);

  double p_value = 0.0;
  switch (method) {
    case TestMethod::kChiSquared:
      p_value = chi_squared_pvalue(stat);
      break;
    case TestMethod::kFiducial:
    case TestMethod::kGeneralized: {
      // Nested seed keeps inner draw streams disjoint from the outer
      // replicate streams. The inner loop stays serial; the outer loop is
      // the parallel one.
      const std::uint64_t inner_seed =
          derive_seed({scenario.seed, static_cast<std::uint64_t>(replicate),
                       stream_tag::kInner});
      const Engine engine = method == TestMethod::kFiducial
                                ? Engine::kFiducial
                                : Engine::kGeneralized;
      p_value =
          mc_pvalue_serial(engine, stat, estimates, mc_draws, inner_seed).p_value;
      break;
    }
  }
  return p_value <= alpha;
}

void check_size_args(TestMethod method, double alpha, std::int64_t replications,
                     std::int64_t mc_draws) {
  if (replications < 1) {
    fail(ErrorCode::InvalidArgument, "need at least one replication");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  }
  if (method != TestMethod::kChiSquared && mc_draws < 1) {
    fail(ErrorCode::InvalidArgument, "Monte Carlo methods need draws >= 1");
  }
}

SizeReport make_size_report(TestMethod method, double alpha,
                            std::int64_t rejections, std::int64_t replications) {
  SizeReport report;
  report.method = to_string(method);
  report.nominal_alpha = alpha;
  report.rejections = rejections;
  report.replications = replications;
  report.empirical_size =
      static_cast<double>(rejections) / static_cast<double>(replications);
  report.mc_half_width =
      1.96 * std::sqrt(report.empirical_size * (1.0 - report.empirical_size) /
                       static_cast<double>(replications));
  return report;
}

}  // namespace

SizeReport estimate_size(const SimulationScenario& scenario, TestMethod method,
                         double alpha, std::int64_t replications,
                         std::int64_t mc_draws) {
  check_size_args(method, alpha, replications, mc_draws);
  validate_scenario(scenario);

  std::int64_t rejections = 0;
  bool failed = false;
  ErrorCode first_code = ErrorCode::InternalConsistency;
  std::string first_message;

#pragma omp parallel for reduction(+ : rejections) schedule(dynamic)
  for (std::int64_t r = 0; r < replications; ++r) {
    // Exceptions must not escape the parallel region; remember the first.
    try {
      if (replicate_rejects(scenario, method, alpha, mc_draws, r)) {
        ++rejections;
      }
    } catch (const Error& e) {
#pragma omp critical(hetreg_size_error)
      {
        if (!failed) {
          failed = true;
          first_code = e.code();
          first_message = e.what();
        }
      }
    }
  }
  if (failed) {
    fail(first_code, "replicate failed: " + first_message);
  }
  return make_size_report(method, alpha, rejections, replications);
}

SizeReport estimate_size_serial(const SimulationScenario& scenario,
                                TestMethod method, double alpha,
                                std::int64_t replications,
                                std::int64_t mc_draws) {
  check_size_args(method, alpha, replications, mc_draws);
  validate_scenario(scenario);

  std::int64_t rejections = 0;
  for (std::int64_t r = 0; r < replications; ++r) {
    if (replicate_rejects(scenario, method, alpha, mc_draws, r)) {
      ++rejections;
    }
  }
  return make_size_report(method, alpha, rejections, replications);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    fail(ErrorCode::InvalidArgument, "KS distance needs non-empty samples");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double distance = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    distance = std::max(distance,
                        std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
  }
  return distance;
}

double ks_critical_1pct(std::int64_t na, std::int64_t nb) {
  // c(0.01) = sqrt(-ln(0.005)/2) ~= 1.628.
  return 1.628 * std::sqrt(static_cast<double>(na + nb) /
                           (static_cast<double>(na) * static_cast<double>(nb)));
}

KsReport compare_distributions(const std::vector<GroupEstimate>& estimates,
                               std::int64_t draws, std::uint64_t seed) {
  if (draws < 1000) {
    fail(ErrorCode::InvalidArgument,
         "distribution comparison needs at least 1000 draws");
  }
  const PooledStatistic stat = pooled_statistic(estimates);
  const GeneralizedOperator op = build_generalized_operator(estimates);

  std::vector<double> fiducial(draws);
  std::vector<double> generalized(draws);
#pragma omp parallel for schedule(static)
  for (std::int64_t m = 0; m < draws; ++m) {
    // Disjoint tags make the two samples independent.
    RandomStream f_stream{seed, static_cast<std::uint64_t>(m),
                          stream_tag::kFiducial};
    fiducial[m] = fiducial_draw_value(estimates, stat.weight_sum_inv, f_stream);
    RandomStream g_stream{seed, static_cast<std::uint64_t>(m),
                          stream_tag::kGeneralized};
    generalized[m] = generalized_draw_value(op, estimates, g_stream);
  }

  KsReport report;
  report.distance = ks_distance(std::move(fiducial), std::move(generalized));
  report.critical_value = ks_critical_1pct(draws, draws);
  report.pass = report.distance < report.critical_value;
  report.draws = draws;
  report.seed = seed;
  return report;
}

namespace {

using nlohmann::json;

Eigen::VectorXd vector_from_json(const json& value, int p, const char* what) {
  if (!value.is_array() || static_cast<int>(value.size()) != p) {
    fail(ErrorCode::SchemaError,
         std::string(what) + " must be an array of length p");
  }
  Eigen::VectorXd v(p);
  for (int i = 0; i < p; ++i) {
    if (!value[i].is_number()) {
      fail(ErrorCode::SchemaError, std::string(what) + " entries must be numbers");
    }
    v(i) = value[i].get<double>();
  }
  return v;
}

}  // namespace

SimulationScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::ParseError, "cannot open scenario file: " + path);
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, "scenario is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) {
    fail(ErrorCode::SchemaError, "scenario must be a JSON object");
  }
  for (const char* key : {"k", "p", "n", "beta", "sigma2"}) {
    if (!doc.contains(key)) {
      fail(ErrorCode::SchemaError, std::string("scenario is missing \"") + key + "\"");
    }
  }

  SimulationScenario scenario;
  if (!doc["k"].is_number_integer() || !doc["p"].is_number_integer()) {
    fail(ErrorCode::SchemaError, "k and p must be integers");
  }
  scenario.k = doc["k"].get<int>();
  scenario.p = doc["p"].get<int>();
  if (scenario.k < 2 || scenario.p < 1) {
    fail(ErrorCode::SchemaError, "scenario needs k >= 2 and p >= 1");
  }

  // n, beta and sigma2 accept either one value broadcast to all groups or
  // one entry per group.
  const json& n = doc["n"];
  if (n.is_number_integer()) {
    scenario.n.assign(scenario.k, n.get<int>());
  } else if (n.is_array() && static_cast<int>(n.size()) == scenario.k) {
    for (const json& entry : n) {
      if (!entry.is_number_integer()) {
        fail(ErrorCode::SchemaError, "n entries must be integers");
      }
      scenario.n.push_back(entry.get<int>());
    }
  } else {
    fail(ErrorCode::SchemaError, "n must be an integer or an array of k integers");
  }

  const json& beta = doc["beta"];
  if (beta.is_array() && !beta.empty() && beta[0].is_array()) {
    if (static_cast<int>(beta.size()) != scenario.k) {
      fail(ErrorCode::SchemaError, "beta must have k rows");
    }
    for (const json& row : beta) {
      scenario.beta.push_back(vector_from_json(row, scenario.p, "beta row"));
    }
  } else {
    scenario.beta.assign(scenario.k,
                         vector_from_json(beta, scenario.p, "beta"));
  }

  const json& sigma2 = doc["sigma2"];
  if (sigma2.is_number()) {
    scenario.sigma2.assign(scenario.k, sigma2.get<double>());
  } else if (sigma2.is_array() && static_cast<int>(sigma2.size()) == scenario.k) {
    for (const json& entry : sigma2) {
      if (!entry.is_number()) {
        fail(ErrorCode::SchemaError, "sigma2 entries must be numbers");
      }
      scenario.sigma2.push_back(entry.get<double>());
    }
  } else {
    fail(ErrorCode::SchemaError, "sigma2 must be a number or an array of k numbers");
  }

  if (doc.contains("design")) {
    const json& design = doc["design"];
    if (design.is_string() && design.get<std::string>() == "generated") {
      scenario.design.generated = true;
    } else if (design.is_object() && design.contains("fixed")) {
      scenario.design.generated = false;
      const json& fixed = design["fixed"];
      if (!fixed.is_array() || static_cast<int>(fixed.size()) != scenario.k) {
        fail(ErrorCode::SchemaError, "design.fixed must have k matrices");
      }
      for (int i = 0; i < scenario.k; ++i) {
        const json& rows = fixed[i];
        if (!rows.is_array() || static_cast<int>(rows.size()) != scenario.n[i]) {
          fail(ErrorCode::SchemaError,
               "design.fixed[" + std::to_string(i) + "] must have n rows");
        }
        Eigen::MatrixXd m(scenario.n[i], scenario.p);
        for (int r = 0; r < scenario.n[i]; ++r) {
          m.row(r) = vector_from_json(rows[r], scenario.p, "design row").transpose();
        }
        scenario.design.fixed.push_back(std::move(m));
      }
    } else {
      fail(ErrorCode::SchemaError,
           "design must be \"generated\" or {\"fixed\": [...]}");
    }
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      fail(ErrorCode::SchemaError, "seed must be an integer");
    }
    scenario.seed = doc["seed"].get<std::uint64_t>();
  }

  validate_scenario(scenario);
  return scenario;
}

}  // namespace hetreg
