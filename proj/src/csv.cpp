#include "hetreg/csv.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hetreg/error.hpp"

namespace hetreg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

// Column lookup that rejects both missing and duplicated headers.
std::size_t find_column(const std::vector<std::string_view>& header,
                        const std::string& name) {
  std::size_t found = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) {
      if (found != header.size()) {
        fail(ErrorCode::SchemaError, "column \"" + name + "\" appears twice");
      }
      found = i;
    }
  }
  if (found == header.size()) {
    fail(ErrorCode::SchemaError, "missing column \"" + name + "\"");
  }
  return found;
}

double parse_cell(std::string_view cell, std::size_t line_number,
                  const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    fail(ErrorCode::ParseError, "line " + std::to_string(line_number) +
                                    ", column \"" + column +
                                    "\": cannot parse \"" + std::string(cell) +
                                    "\" as a number");
  }
  return value;
}

struct RawGroup {
  std::vector<std::vector<double>> covariates;  // one inner vector per row
  std::vector<double> responses;
};

}  // namespace

IngestResult ingest_csv(const std::string& path, const CsvSchema& schema) {
  if (schema.covariate_columns.empty() && !schema.intercept) {
    fail(ErrorCode::SchemaError,
         "need an intercept or at least one covariate column");
  }

  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::ParseError, "cannot open input file: " + path);
  }

  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorCode::SchemaError, "input file has no header row");
  }
  const std::vector<std::string_view> header = split_fields(line);
  const std::size_t group_idx = find_column(header, schema.group_column);
  const std::size_t response_idx = find_column(header, schema.response_column);
  std::vector<std::size_t> covariate_idx;
  covariate_idx.reserve(schema.covariate_columns.size());
  for (const std::string& name : schema.covariate_columns) {
    covariate_idx.push_back(find_column(header, name));
  }

  // Groups keep their order of first appearance in the file.
  std::vector<std::string> labels;
  std::map<std::string, std::size_t> label_index;
  std::vector<RawGroup> raw;

  std::size_t line_number = 1;
  std::int64_t total_rows = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) {
      continue;
    }
    const std::vector<std::string_view> fields = split_fields(line);
    if (fields.size() != header.size()) {
      fail(ErrorCode::ParseError,
           "line " + std::to_string(line_number) + ": expected " +
               std::to_string(header.size()) + " fields, found " +
               std::to_string(fields.size()));
    }

    const std::string label(fields[group_idx]);
    if (label.empty()) {
      fail(ErrorCode::ParseError,
           "line " + std::to_string(line_number) + ": empty group label");
    }
    auto [it, inserted] = label_index.try_emplace(label, labels.size());
    if (inserted) {
      labels.push_back(label);
      raw.emplace_back();
    }
    RawGroup& group = raw[it->second];

    group.responses.push_back(
        parse_cell(fields[response_idx], line_number, schema.response_column));
    std::vector<double> row;
    row.reserve(covariate_idx.size());
    for (std::size_t j = 0; j < covariate_idx.size(); ++j) {
      row.push_back(parse_cell(fields[covariate_idx[j]], line_number,
                               schema.covariate_columns[j]));
    }
    group.covariates.push_back(std::move(row));
    ++total_rows;
  }

  if (raw.empty()) {
    fail(ErrorCode::InsufficientData, "input file has no data rows");
  }

  const int p = static_cast<int>(covariate_idx.size()) +
                (schema.intercept ? 1 : 0);
  IngestResult result;
  result.labels = labels;
  result.total_rows = total_rows;
  for (std::size_t g = 0; g < raw.size(); ++g) {
    const RawGroup& src = raw[g];
    const int n = static_cast<int>(src.responses.size());
    if (n <= p) {
      fail(ErrorCode::InsufficientData,
           "group \"" + labels[g] + "\" has " + std::to_string(n) +
               " rows but the design has " + std::to_string(p) + " columns");
    }
    RegressionGroup group;
    group.design.resize(n, p);
    group.response.resize(n);
    for (int r = 0; r < n; ++r) {
      int c = 0;
      if (schema.intercept) {
        group.design(r, c++) = 1.0;
      }
      for (double value : src.covariates[static_cast<std::size_t>(r)]) {
        group.design(r, c++) = value;
      }
      group.response(r) = src.responses[static_cast<std::size_t>(r)];
    }
    result.row_counts.push_back(n);
    result.groups.push_back(std::move(group));
  }
  return result;
}

}  // namespace hetreg
