#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hetreg/model.hpp"

namespace hetreg {

/// Column mapping for CSV ingestion. Dialect: comma-separated, UTF-8,
/// header row required, '.' decimal separator, no quoting.
struct CsvSchema {
  std::string group_column;
  std::string response_column;
  std::vector<std::string> covariate_columns;  // may be empty
  bool intercept = true;  // prepend a column of ones
};

/// Ingested groups in order of first appearance, plus the input fingerprint
/// carried into reports.
struct IngestResult {
  std::vector<RegressionGroup> groups;
  std::vector<std::string> labels;
  std::vector<std::int64_t> row_counts;
  std::int64_t total_rows = 0;
};

/// Reads one group per distinct label. Missing columns raise SchemaError;
/// unparseable cells raise ParseError naming the row and column; a group
/// with too few rows for the design raises InsufficientData naming it.
IngestResult ingest_csv(const std::string& path, const CsvSchema& schema);

}  // namespace hetreg
