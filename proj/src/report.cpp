#include "hetreg/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hetreg/rng.hpp"

namespace hetreg {

namespace {

bool wants(const std::vector<TestMethod>& methods, TestMethod m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

}  // namespace

TestReport run_test(const IngestResult& data, const TestConfig& config) {
  if (config.methods.empty()) {
    fail(ErrorCode::InvalidArgument, "no test method requested");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  }
  const bool run_fiducial = wants(config.methods, TestMethod::kFiducial);
  const bool run_generalized = wants(config.methods, TestMethod::kGeneralized);
  if ((run_fiducial || run_generalized) && config.draws < 1) {
    fail(ErrorCode::InvalidArgument, "Monte Carlo methods need draws >= 1");
  }

  std::vector<GroupEstimate> estimates;
  estimates.reserve(data.groups.size());
  for (const RegressionGroup& group : data.groups) {
    estimates.push_back(fit_group(group));
  }
  const PooledStatistic stat = pooled_statistic(estimates);

  TestReport report;
  report.q0 = stat.q0;
  report.df_chi2 = stat.df_chi2;
  report.p_chi2 = chi_squared_pvalue(stat);
  report.total_rows = data.total_rows;
  report.alpha = config.alpha;

  // The two engines get disjoint seed material so requesting both does not
  // reuse any variates between them.
  if (run_fiducial) {
    report.p_fiducial =
        mc_pvalue(Engine::kFiducial, stat, estimates, config.draws,
                  derive_seed({config.seed, stream_tag::kFiducial}));
  }
  if (run_generalized) {
    report.p_generalized =
        mc_pvalue(Engine::kGeneralized, stat, estimates, config.draws,
                  derive_seed({config.seed, stream_tag::kGeneralized}));
  }

  for (std::size_t g = 0; g < data.groups.size(); ++g) {
    GroupSummaryReport summary;
    summary.label = g < data.labels.size() ? data.labels[g]
                                           : "group" + std::to_string(g + 1);
    summary.p = static_cast<int>(estimates[g].beta_hat.size());
    summary.n = estimates[g].df + summary.p;
    summary.beta_hat = estimates[g].beta_hat;
    summary.s2 = estimates[g].s2;
    report.groups.push_back(std::move(summary));
  }
  return report;
}

namespace {

std::string format_double(double value, int precision = 6) {
  std::ostringstream out;
  out << std::setprecision(precision) << value;
  return out.str();
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::ostringstream out;
  out << std::setprecision(6) << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) {
      out << ", ";
    }
    out << v(i);
  }
  out << ")";
  return out.str();
}

void append_decision(std::ostringstream& out, const std::string& name,
                     double p_value, double alpha) {
  out << "  " << std::left << std::setw(12) << name
      << (p_value <= alpha ? "reject" : "do not reject")
      << " (p = " << format_double(p_value) << ")\n";
}

}  // namespace

std::string render_text(const TestReport& report) {
  std::ostringstream out;
  out << "Groups (" << report.groups.size() << ", " << report.total_rows
      << " rows)\n";
  std::size_t label_width = 5;
  for (const GroupSummaryReport& g : report.groups) {
    label_width = std::max(label_width, g.label.size());
  }
  out << "  " << std::left << std::setw(static_cast<int>(label_width) + 2)
      << "group" << std::setw(6) << "n"
      << std::setw(28) << "beta_hat" << "s2\n";
  for (const GroupSummaryReport& g : report.groups) {
    out << "  " << std::left << std::setw(static_cast<int>(label_width) + 2)
        << g.label << std::setw(6) << g.n << std::setw(28)
        << format_vector(g.beta_hat) << format_double(g.s2) << "\n";
  }

  out << "Statistic\n";
  out << "  q0 = " << format_double(report.q0, 10) << " on " << report.df_chi2
      << " degrees of freedom\n";

  out << "P-values\n";
  out << "  " << std::left << std::setw(12) << "chi2"
      << format_double(report.p_chi2) << "\n";
  for (const auto* mc : {&report.p_fiducial, &report.p_generalized}) {
    if (!mc->has_value()) {
      continue;
    }
    const MCResult& r = mc->value();
    out << "  " << std::left << std::setw(12)
        << (mc == &report.p_fiducial ? "fiducial" : "generalized")
        << format_double(r.p_value) << " (draws = " << r.draws
        << ", seed = " << r.seed
        << ", std. error = " << format_double(r.std_error, 3) << ")\n";
  }

  out << "Decision at alpha = " << format_double(report.alpha) << "\n";
  append_decision(out, "chi2", report.p_chi2, report.alpha);
  if (report.p_fiducial) {
    append_decision(out, "fiducial", report.p_fiducial->p_value, report.alpha);
  }
  if (report.p_generalized) {
    append_decision(out, "generalized", report.p_generalized->p_value,
                    report.alpha);
  }
  return out.str();
}

namespace {

nlohmann::ordered_json mc_to_json(const MCResult& r) {
  return {{"p_value", r.p_value},
          {"draws", r.draws},
          {"seed", r.seed},
          {"std_error", r.std_error},
          {"exceedances", r.exceedances}};
}

}  // namespace

std::string render_json(const TestReport& report) {
  nlohmann::ordered_json doc;
  doc["q0"] = report.q0;
  doc["df"] = report.df_chi2;
  doc["alpha"] = report.alpha;
  doc["total_rows"] = report.total_rows;
  doc["groups"] = nlohmann::ordered_json::array();
  for (const GroupSummaryReport& g : report.groups) {
    nlohmann::ordered_json entry;
    entry["label"] = g.label;
    entry["n"] = g.n;
    entry["p"] = g.p;
    entry["beta_hat"] = std::vector<double>(g.beta_hat.data(),
                                            g.beta_hat.data() + g.beta_hat.size());
    entry["s2"] = g.s2;
    doc["groups"].push_back(std::move(entry));
  }
  doc["p_values"]["chi2"] = report.p_chi2;
  if (report.p_fiducial) {
    doc["p_values"]["fiducial"] = mc_to_json(*report.p_fiducial);
  }
  if (report.p_generalized) {
    doc["p_values"]["generalized"] = mc_to_json(*report.p_generalized);
  }
  doc["reject"]["chi2"] = report.p_chi2 <= report.alpha;
  if (report.p_fiducial) {
    doc["reject"]["fiducial"] = report.p_fiducial->p_value <= report.alpha;
  }
  if (report.p_generalized) {
    doc["reject"]["generalized"] =
        report.p_generalized->p_value <= report.alpha;
  }
  return doc.dump(2) + "\n";
}

}  // namespace hetreg
