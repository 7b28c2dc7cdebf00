#include <chrono>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "hetreg/engines.hpp"
#include "hetreg/method.hpp"
#include "hetreg/simulation.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

hetreg::SimulationScenario bench_scenario(std::uint64_t seed) {
  hetreg::SimulationScenario scenario;
  scenario.k = 3;
  scenario.p = 2;
  scenario.n = {50, 50, 50};
  scenario.beta.assign(3, Eigen::Vector2d(1.0, 0.5));
  scenario.sigma2 = {1.0, 4.0, 16.0};
  scenario.seed = seed;
  return scenario;
}

void print_row(const std::string& name, double serial_s, double parallel_s,
               bool match) {
  std::cout << "  " << std::left << std::setw(22) << name << std::right
            << std::fixed << std::setprecision(3) << std::setw(9) << serial_s
            << " s" << std::setw(9) << parallel_s << " s" << std::setw(7)
            << std::setprecision(2) << (serial_s / parallel_s) << "x  "
            << (match ? "identical" : "MISMATCH") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Times the OpenMP Monte Carlo kernels against their serial "
               "reference implementations and checks that results agree "
               "bit for bit."};
  std::int64_t draws = 200000;
  std::int64_t replications = 200;
  std::int64_t inner_draws = 500;
  std::uint64_t seed = 42;
  app.add_option("--draws", draws, "Draws for the p-value benchmark");
  app.add_option("--replications", replications,
                 "Replications for the size-study benchmark");
  app.add_option("--inner", inner_draws,
                 "Inner draws per replication in the size study");
  app.add_option("--seed", seed, "Seed for the benchmark dataset");
  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  std::cout << "OpenMP enabled, max threads " << omp_get_max_threads() << "\n";
#else
  std::cout << "OpenMP disabled, both columns run serially\n";
#endif

  const hetreg::SimulationScenario scenario = bench_scenario(seed);
  const std::vector<hetreg::RegressionGroup> groups =
      hetreg::generate_dataset(scenario, 0);
  std::vector<hetreg::GroupEstimate> estimates;
  for (const hetreg::RegressionGroup& group : groups) {
    estimates.push_back(hetreg::fit_group(group));
  }
  const hetreg::PooledStatistic stat = hetreg::pooled_statistic(estimates);

  std::cout << "p-value, " << draws << " draws (k=3, p=2, n=50)\n";
  int mismatches = 0;
  for (hetreg::Engine engine :
       {hetreg::Engine::kFiducial, hetreg::Engine::kGeneralized}) {
    auto t0 = std::chrono::steady_clock::now();
    const hetreg::MCResult serial =
        hetreg::mc_pvalue_serial(engine, stat, estimates, draws, seed);
    const double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const hetreg::MCResult parallel =
        hetreg::mc_pvalue(engine, stat, estimates, draws, seed);
    const double parallel_s = seconds_since(t0);

    const bool match = serial.exceedances == parallel.exceedances &&
                       serial.p_value == parallel.p_value;
    mismatches += match ? 0 : 1;
    print_row(hetreg::to_string(engine), serial_s, parallel_s, match);
  }

  std::cout << "size study, " << replications << " replications x "
            << inner_draws << " draws\n";
  for (hetreg::TestMethod method :
       {hetreg::TestMethod::kChiSquared, hetreg::TestMethod::kFiducial}) {
    auto t0 = std::chrono::steady_clock::now();
    const hetreg::SizeReport serial = hetreg::estimate_size_serial(
        scenario, method, 0.05, replications, inner_draws);
    const double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const hetreg::SizeReport parallel = hetreg::estimate_size(
        scenario, method, 0.05, replications, inner_draws);
    const double parallel_s = seconds_since(t0);

    const bool match = serial.rejections == parallel.rejections;
    mismatches += match ? 0 : 1;
    print_row(hetreg::to_string(method), serial_s, parallel_s, match);
  }

  if (mismatches > 0) {
    std::cout << mismatches << " kernel(s) disagreed with the serial "
              << "reference\n";
    return 1;
  }
  return 0;
}
