// Copyright 2026 The PASS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pass/csv_io.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string_view>

#include "pass/error.h"

namespace pass {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string LineError(const std::string& path, std::size_t line, const std::string& what) {
  return path + ":" + std::to_string(line) + ": " + what;
}

}  // namespace

Dataset LoadCsv(const std::string& path, const std::vector<AttributeSchema>& schema) {
  ValidateSchema(schema);
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open CSV file '" + path + "'");

  std::string header;
  if (!std::getline(in, header)) throw SchemaError(path + ": missing header row");
  if (header.size() >= 3 && header.compare(0, 3, "\xEF\xBB\xBF") == 0) header.erase(0, 3);
  const auto columns = SplitFields(header);

  std::vector<std::size_t> feature_cols;
  std::vector<std::optional<std::size_t>> label_cols(schema.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const std::string_view name = Trim(columns[c]);
    if (name.starts_with("f_")) {
      feature_cols.push_back(c);
      continue;
    }
    for (std::size_t a = 0; a < schema.size(); ++a) {
      if (name == schema[a].name) label_cols[a] = c;
    }
  }
  for (std::size_t a = 0; a < schema.size(); ++a) {
    if (!label_cols[a]) {
      throw SchemaError(path + ": missing column for attribute '" + schema[a].name + "'");
    }
  }
  if (feature_cols.empty()) throw SchemaError(path + ": no feature columns (f_*)");

  std::vector<double> values;
  std::vector<std::vector<int>> labels(schema.size());
  std::size_t line_no = 1;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto fields = SplitFields(line);
    if (fields.size() != columns.size()) {
      throw ValidationError(LineError(path, line_no, "expected " + std::to_string(columns.size()) +
                                                         " fields, got " +
                                                         std::to_string(fields.size())));
    }
    for (std::size_t c : feature_cols) {
      const std::string_view f = Trim(fields[c]);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        throw ValidationError(LineError(path, line_no, "bad or missing feature value in column '" +
                                                           std::string(Trim(columns[c])) + "'"));
      }
      values.push_back(v);
    }
    for (std::size_t a = 0; a < schema.size(); ++a) {
      const std::string_view f = Trim(fields[*label_cols[a]]);
      int v = 0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        throw ValidationError(LineError(path, line_no, "bad or missing label for '" +
                                                           schema[a].name + "'"));
      }
      if (v < 0 || v >= schema[a].cardinality) {
        throw ValidationError(LineError(path, line_no, "value " + std::to_string(v) + " of '" +
                                                           schema[a].name + "' outside [0, " +
                                                           std::to_string(schema[a].cardinality) +
                                                           ")"));
      }
      labels[a].push_back(v);
    }
  }
  const std::size_t n = labels.empty() ? values.size() / feature_cols.size() : labels[0].size();
  if (n == 0) throw ValidationError(path + ": no data rows");
  return Dataset(Tensor({n, feature_cols.size()}, std::move(values)), schema, std::move(labels));
}

void WriteCsv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write CSV file '" + path + "'");
  const std::size_t d = data.feature_dim();
  for (std::size_t j = 0; j < d; ++j) out << (j ? "," : "") << "f_" << j;
  for (const auto& a : data.schema()) out << ',' << a.name;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < data.num_samples(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.features()(i, j));
      out << (j ? "," : "") << buf;
    }
    for (const auto& labels : data.labels()) out << ',' << labels[i];
    out << '\n';
  }
}

}  // namespace pass
