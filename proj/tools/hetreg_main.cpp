#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hetreg/csv.hpp"
#include "hetreg/error.hpp"
#include "hetreg/report.hpp"
#include "hetreg/simulation.hpp"

namespace {

// Every failure leaves exactly one machine-parsable line on stderr.
std::string error_record(const std::string& code, const std::string& message) {
  return nlohmann::json{{"error", code}, {"message", message}}.dump();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) {
    hetreg::fail(hetreg::ErrorCode::InvalidArgument,
                 "cannot write output file: " + path);
  }
}

struct SchemaFlags {
  std::string group;
  std::string response;
  std::vector<std::string> covariates;
  bool intercept_only = false;
  bool no_intercept = false;
};

void add_schema_flags(CLI::App* cmd, SchemaFlags& flags) {
  cmd->add_option("--group", flags.group, "Column with the group label")
      ->required();
  cmd->add_option("--response", flags.response, "Column with the response")
      ->required();
  CLI::Option* cov =
      cmd->add_option("--covariates", flags.covariates,
                      "Covariate columns (comma-separated or repeated)")
          ->delimiter(',');
  CLI::Option* io = cmd->add_flag("--intercept-only", flags.intercept_only,
                                  "Fit a mean per group, no covariates");
  cmd->add_flag("--no-intercept", flags.no_intercept,
                "Do not prepend a column of ones")
      ->excludes(io);
  cov->excludes(io);
}

hetreg::CsvSchema to_schema(const SchemaFlags& flags) {
  if (!flags.intercept_only && flags.covariates.empty()) {
    hetreg::fail(hetreg::ErrorCode::InvalidArgument,
                 "specify --covariates or --intercept-only");
  }
  hetreg::CsvSchema schema;
  schema.group_column = flags.group;
  schema.response_column = flags.response;
  schema.covariate_columns = flags.covariates;
  schema.intercept = !flags.no_intercept;
  return schema;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Tests equality of regression coefficients across independent groups "
      "with unequal error variances."};
  app.require_subcommand(1);

  // test: fit groups from a CSV file and report p-values.
  CLI::App* test_cmd =
      app.add_subcommand("test", "Run the equality test on a CSV dataset");
  std::string test_input;
  SchemaFlags test_schema;
  std::string test_method = "all";
  std::int64_t test_draws = 10000;
  std::uint64_t test_seed = 0;
  double test_alpha = 0.05;
  std::string test_out;
  test_cmd->add_option("input", test_input, "CSV file to read")->required();
  add_schema_flags(test_cmd, test_schema);
  test_cmd->add_option("--method", test_method,
                       "chi2, fiducial, generalized or all");
  test_cmd->add_option("--draws", test_draws, "Monte Carlo draws per method");
  test_cmd->add_option("--seed", test_seed, "Monte Carlo seed");
  test_cmd->add_option("--alpha", test_alpha, "Decision level");
  test_cmd->add_option("--out", test_out, "Write a JSON report here");

  // simulate: estimate rejection rates over replicated synthetic datasets.
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Estimate rejection rates for a JSON scenario");
  std::string sim_input;
  std::string sim_method = "chi2";
  std::int64_t sim_replications = 1000;
  std::int64_t sim_draws = 2000;
  std::uint64_t sim_seed = 0;
  double sim_alpha = 0.05;
  bool sim_serial = false;
  std::string sim_out;
  sim_cmd->add_option("scenario", sim_input, "Scenario JSON file")->required();
  sim_cmd->add_option("--method", sim_method,
                      "chi2, fiducial, generalized or all");
  sim_cmd->add_option("--replications", sim_replications,
                      "Number of simulated datasets");
  sim_cmd->add_option("--draws", sim_draws, "Monte Carlo draws per dataset");
  CLI::Option* sim_seed_opt = sim_cmd->add_option(
      "--seed", sim_seed, "Override the scenario's seed");
  sim_cmd->add_option("--alpha", sim_alpha, "Decision level");
  sim_cmd->add_flag("--serial", sim_serial,
                    "Use the serial reference implementation");
  sim_cmd->add_option("--out", sim_out, "Write a JSON report here");

  // compare: sample both Monte Carlo engines and compare distributions.
  CLI::App* cmp_cmd = app.add_subcommand(
      "compare", "Compare the two Monte Carlo engines on a CSV dataset");
  std::string cmp_input;
  SchemaFlags cmp_schema;
  std::int64_t cmp_draws = 100000;
  std::uint64_t cmp_seed = 0;
  std::string cmp_out;
  cmp_cmd->add_option("input", cmp_input, "CSV file to read")->required();
  add_schema_flags(cmp_cmd, cmp_schema);
  cmp_cmd->add_option("--draws", cmp_draws, "Draws per engine");
  cmp_cmd->add_option("--seed", cmp_seed, "Monte Carlo seed");
  cmp_cmd->add_option("--out", cmp_out, "Write a JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help and friends
    }
    std::cerr << error_record("InvalidArgument", e.what()) << "\n";
    return 2;
  }

  try {
    if (*test_cmd) {
      const hetreg::IngestResult data =
          hetreg::ingest_csv(test_input, to_schema(test_schema));
      hetreg::TestConfig config;
      config.methods = hetreg::parse_methods(test_method);
      config.draws = test_draws;
      config.seed = test_seed;
      config.alpha = test_alpha;
      const hetreg::TestReport report = hetreg::run_test(data, config);
      std::cout << hetreg::render_text(report);
      if (!test_out.empty()) {
        write_file(test_out, hetreg::render_json(report));
      }
    } else if (*sim_cmd) {
      hetreg::SimulationScenario scenario = hetreg::load_scenario(sim_input);
      if (sim_seed_opt->count() > 0) {
        scenario.seed = sim_seed;
      }
      const bool null_scenario = hetreg::is_null_scenario(scenario);
      const char* rate_name = null_scenario ? "size" : "power";
      std::cout << "scenario k=" << scenario.k << " p=" << scenario.p << " ("
                << (null_scenario ? "null" : "alternative")
                << "), alpha = " << sim_alpha << ", " << sim_replications
                << " replications\n";
      nlohmann::ordered_json doc;
      doc["scenario"] = sim_input;
      doc["null_scenario"] = null_scenario;
      doc["alpha"] = sim_alpha;
      doc["replications"] = sim_replications;
      doc["mc_draws"] = sim_draws;
      doc["seed"] = scenario.seed;
      doc["results"] = nlohmann::ordered_json::array();
      for (hetreg::TestMethod method : hetreg::parse_methods(sim_method)) {
        const hetreg::SizeReport r =
            sim_serial ? hetreg::estimate_size_serial(scenario, method,
                                                      sim_alpha,
                                                      sim_replications,
                                                      sim_draws)
                       : hetreg::estimate_size(scenario, method, sim_alpha,
                                               sim_replications, sim_draws);
        std::cout << "  " << r.method << ": empirical " << rate_name << " "
                  << r.empirical_size << " (" << r.rejections << "/"
                  << r.replications << "), 95% half-width " << r.mc_half_width
                  << "\n";
        doc["results"].push_back({{"method", r.method},
                                  {"rejections", r.rejections},
                                  {"replications", r.replications},
                                  {"empirical_rate", r.empirical_size},
                                  {"half_width", r.mc_half_width}});
      }
      if (!sim_out.empty()) {
        write_file(sim_out, doc.dump(2) + "\n");
      }
    } else if (*cmp_cmd) {
      const hetreg::IngestResult data =
          hetreg::ingest_csv(cmp_input, to_schema(cmp_schema));
      std::vector<hetreg::GroupEstimate> estimates;
      estimates.reserve(data.groups.size());
      for (const hetreg::RegressionGroup& group : data.groups) {
        estimates.push_back(hetreg::fit_group(group));
      }
      const hetreg::KsReport r =
          hetreg::compare_distributions(estimates, cmp_draws, cmp_seed);
      std::cout << "fiducial vs generalized, " << r.draws
                << " draws per engine, seed " << r.seed << "\n"
                << "  KS distance " << r.distance << ", 1% critical value "
                << r.critical_value << ": " << (r.pass ? "PASS" : "FAIL")
                << "\n";
      if (!cmp_out.empty()) {
        nlohmann::ordered_json doc{{"draws", r.draws},
                                   {"seed", r.seed},
                                   {"distance", r.distance},
                                   {"critical_value", r.critical_value},
                                   {"pass", r.pass}};
        write_file(cmp_out, doc.dump(2) + "\n");
      }
    }
  } catch (const hetreg::Error& e) {
    std::cerr << error_record(hetreg::to_string(e.code()), e.what()) << "\n";
    return e.input_error() ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << error_record("InternalError", e.what()) << "\n";
    return 3;
  }
  return 0;
}
