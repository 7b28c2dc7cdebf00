#include <string>
#include <vector>

#include <doctest.h>

#include "hetreg/csv.hpp"
#include "hetreg/error.hpp"
#include "hetreg/method.hpp"
#include "hetreg/report.hpp"
#include "support.hpp"

using hetreg::CsvSchema;
using hetreg::Error;
using hetreg::ErrorCode;
using hetreg::ingest_csv;
using hetreg::IngestResult;
using hetreg::parse_methods;
using hetreg::run_test;
using hetreg::TestConfig;
using hetreg::TestMethod;
using hetreg::TestReport;
using testsupport::TempFile;

namespace {

CsvSchema intercept_only_schema() {
  CsvSchema schema;
  schema.group_column = "g";
  schema.response_column = "y";
  return schema;
}

ErrorCode ingest_code(const std::string& csv, const CsvSchema& schema) {
  const TempFile file(csv, ".csv");
  try {
    (void)ingest_csv(file.path(), schema);
    return ErrorCode::InvalidArgument;  // placeholder; should not happen
  } catch (const Error& e) {
    return e.code();
  }
}

}  // namespace

TEST_CASE("six rows over two labels become two groups of three") {
  const TempFile file("g,y\nB,2\nB,4\nA,1\nA,2\nB,6\nA,3\n", ".csv");
  const IngestResult data = ingest_csv(file.path(), intercept_only_schema());
  REQUIRE(data.groups.size() == 2);
  CHECK(data.labels == std::vector<std::string>{"B", "A"});  // first appearance
  CHECK(data.row_counts == std::vector<std::int64_t>{3, 3});
  CHECK(data.total_rows == 6);
  CHECK(data.groups[0].design.cols() == 1);
  CHECK(data.groups[0].response(2) == 6.0);
  CHECK(data.groups[1].response(0) == 1.0);
}

TEST_CASE("covariates plus intercept build p = 3 designs") {
  const TempFile file(
      "g,y,x1,x2\n"
      "A,1,0.5,2\nA,2,1.5,1\nA,3,2.5,0\nA,4,3.0,1\n"
      "B,2,0.25,1\nB,4,1.25,3\nB,6,2.25,5\nB,7,3.5,2\n",
      ".csv");
  CsvSchema schema = intercept_only_schema();
  schema.covariate_columns = {"x1", "x2"};
  const IngestResult data = ingest_csv(file.path(), schema);
  CHECK(data.groups[0].design.cols() == 3);
  CHECK(data.groups[0].design(0, 0) == 1.0);
  CHECK(data.groups[0].design(0, 1) == 0.5);
  CHECK(data.groups[0].design(0, 2) == 2.0);

  schema.intercept = false;
  const IngestResult bare = ingest_csv(file.path(), schema);
  CHECK(bare.groups[0].design.cols() == 2);
  CHECK(bare.groups[0].design(0, 0) == 0.5);
}

TEST_CASE("carriage returns and padding are tolerated") {
  const TempFile file("g, y\r\nA, 1\r\nA, 2\r\nA, 3\r\nB, 2\r\nB, 4\r\nB, 6\r\n",
                      ".csv");
  const IngestResult data = ingest_csv(file.path(), intercept_only_schema());
  CHECK(data.total_rows == 6);
  CHECK(data.groups[1].response(2) == 6.0);
}

TEST_CASE("ingestion failures carry the right codes and context") {
  const CsvSchema schema = intercept_only_schema();

  CHECK(ingest_code("h,y\nA,1\n", schema) == ErrorCode::SchemaError);
  CHECK(ingest_code("g,y,g\nA,1,x\n", schema) == ErrorCode::SchemaError);
  CHECK(ingest_code("", schema) == ErrorCode::SchemaError);
  CHECK(ingest_code("g,y\n", schema) == ErrorCode::InsufficientData);
  CHECK(ingest_code("g,y\nA,1\nA\nA,3\n", schema) == ErrorCode::ParseError);
  CHECK(ingest_code("g,y\nA,1\nA,2\nA,3\n,4\n", schema) ==
        ErrorCode::ParseError);  // empty label

  // A blank response cell names the offending line and column.
  const TempFile blank("g,y\nA,1\nA,\nA,3\n", ".csv");
  try {
    (void)ingest_csv(blank.path(), schema);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("\"y\"") != std::string::npos);
  }

  // Too few rows for the design names the group.
  const TempFile thin("g,y\nA,1\nA,2\nB,5\n", ".csv");
  try {
    (void)ingest_csv(thin.path(), schema);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
    CHECK(std::string(e.what()).find("\"B\"") != std::string::npos);
  }

  CsvSchema empty = schema;
  empty.intercept = false;
  CHECK(ingest_code("g,y\nA,1\n", empty) == ErrorCode::SchemaError);

  try {
    (void)ingest_csv("/nonexistent/file.csv", schema);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
}

TEST_CASE("method parsing") {
  CHECK(parse_methods("chi2") == std::vector<TestMethod>{TestMethod::kChiSquared});
  CHECK(parse_methods("fiducial") ==
        std::vector<TestMethod>{TestMethod::kFiducial});
  CHECK(parse_methods("generalized") ==
        std::vector<TestMethod>{TestMethod::kGeneralized});
  CHECK(parse_methods("all").size() == 3);
  CHECK_THROWS_AS((void)parse_methods("bayes"), Error);
  CHECK_THROWS_AS((void)parse_methods(""), Error);
}

namespace {

IngestResult reference_data() {
  static const TempFile file("g,y\nA,1\nA,2\nA,3\nB,2\nB,4\nB,6\n", ".csv");
  return ingest_csv(file.path(), intercept_only_schema());
}

}  // namespace

TEST_CASE("test run produces the hand-computed statistic and valid p-values") {
  TestConfig config;
  config.methods = parse_methods("all");
  config.draws = 2000;
  config.seed = 5;
  const TestReport report = run_test(reference_data(), config);

  CHECK(report.q0 == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(report.df_chi2 == 1);
  CHECK(report.p_chi2 == doctest::Approx(0.12133525035848215).epsilon(1e-10));
  REQUIRE(report.p_fiducial.has_value());
  REQUIRE(report.p_generalized.has_value());
  for (double p : {report.p_chi2, report.p_fiducial->p_value,
                   report.p_generalized->p_value}) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  CHECK(report.groups.size() == 2);
  CHECK(report.groups[0].label == "A");
  CHECK(report.groups[0].n == 3);
  CHECK(report.groups[1].beta_hat(0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(report.total_rows == 6);
}

TEST_CASE("summaries reproduce the statistic through the pooled form") {
  // Intercept-only summaries carry everything the statistic needs: the Gram
  // matrix is just the count.
  TestConfig config;
  config.methods = parse_methods("chi2");
  const TestReport report = run_test(reference_data(), config);

  std::vector<hetreg::GroupEstimate> rebuilt;
  for (const auto& g : report.groups) {
    hetreg::GroupEstimate est;
    est.beta_hat = g.beta_hat;
    est.s2 = g.s2;
    est.gram = Eigen::MatrixXd::Constant(1, 1, static_cast<double>(g.n));
    est.gram_sqrt =
        Eigen::MatrixXd::Constant(1, 1, std::sqrt(static_cast<double>(g.n)));
    est.df = static_cast<int>(g.n) - g.p;
    rebuilt.push_back(est);
  }
  CHECK(hetreg::pooled_statistic(rebuilt).q0 ==
        doctest::Approx(report.q0).epsilon(1e-12));
}

TEST_CASE("chi2-only runs skip the Monte Carlo engines") {
  TestConfig config;
  config.methods = parse_methods("chi2");
  const TestReport report = run_test(reference_data(), config);
  CHECK(!report.p_fiducial.has_value());
  CHECK(!report.p_generalized.has_value());
}

TEST_CASE("rendered output is identical across identical runs") {
  TestConfig config;
  config.methods = parse_methods("all");
  config.draws = 1000;
  config.seed = 11;
  const TestReport a = run_test(reference_data(), config);
  const TestReport b = run_test(reference_data(), config);
  CHECK(hetreg::render_json(a) == hetreg::render_json(b));
  CHECK(hetreg::render_text(a) == hetreg::render_text(b));
  CHECK(hetreg::render_json(a).find("\"q0\"") != std::string::npos);
}

TEST_CASE("test configuration validation") {
  TestConfig config;
  CHECK_THROWS_AS((void)run_test(reference_data(), config), Error);  // no methods

  config.methods = parse_methods("fiducial");
  config.draws = 0;
  CHECK_THROWS_AS((void)run_test(reference_data(), config), Error);

  config.draws = 100;
  config.alpha = 1.0;
  CHECK_THROWS_AS((void)run_test(reference_data(), config), Error);
}
