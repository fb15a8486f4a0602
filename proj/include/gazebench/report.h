// Copyright 2026 The GazeBench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAZEBENCH_REPORT_H_
#define GAZEBENCH_REPORT_H_

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gazebench/error.h"

namespace gazebench {

// Quotes a CSV field when it holds a comma, quote or newline.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

// Formats with a fixed number of decimals; never prints "-0.000".
inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  std::string s = buf;
  if (s.size() > 1 && s[0] == '-' &&
      s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

// Named-metric table. Missing cells render as "-".
class MetricReport {
 public:
  struct Row {
    std::string label;
    std::vector<std::optional<double>> values;
  };

  MetricReport() = default;
  MetricReport(std::string title, std::string label_header,
               std::vector<std::string> columns, int default_decimals = 3)
      : title_(std::move(title)),
        label_header_(std::move(label_header)),
        columns_(std::move(columns)),
        decimals_(columns_.size(), default_decimals) {}

  void set_decimals(const std::string& column, int decimals) {
    decimals_[column_index(column)] = decimals;
  }

  void add_row(std::string label, std::vector<std::optional<double>> values) {
    if (values.size() != columns_.size()) {
      throw ValidationError("row '" + label + "' has " +
                            std::to_string(values.size()) +
                            " values for " + std::to_string(columns_.size()) +
                            " columns");
    }
    rows_.push_back({std::move(label), std::move(values)});
  }

  void add_metadata(std::string key, std::string value) {
    metadata_.emplace_back(std::move(key), std::move(value));
  }

  const std::string& title() const { return title_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const {
    return metadata_;
  }

  std::optional<double> value(const std::string& row_label,
                              const std::string& column) const {
    const std::size_t c = column_index(column);
    for (const auto& row : rows_) {
      if (row.label == row_label) return row.values[c];
    }
    throw ValidationError("no row '" + row_label + "' in report '" + title_ +
                          "'");
  }

  std::string cell(const Row& row, std::size_t c) const {
    return row.values[c] ? format_fixed(*row.values[c], decimals_[c]) : "-";
  }

  // Metadata lines are '#' comments ahead of the header.
  std::string to_csv() const {
    std::ostringstream out;
    for (const auto& [k, v] : metadata_) out << "# " << k << "=" << v << "\n";
    out << csv_field(label_header_);
    for (const auto& c : columns_) out << "," << csv_field(c);
    out << "\n";
    for (const auto& row : rows_) {
      out << csv_field(row.label);
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        out << "," << cell(row, c);
      }
      out << "\n";
    }
    return out.str();
  }

  std::string to_markdown() const {
    std::ostringstream out;
    if (!title_.empty()) out << "### " << title_ << "\n\n";
    for (const auto& [k, v] : metadata_) out << "- " << k << ": " << v << "\n";
    if (!metadata_.empty()) out << "\n";
    out << "| " << label_header_ << " |";
    for (const auto& c : columns_) out << " " << c << " |";
    out << "\n|---|";
    for (std::size_t c = 0; c < columns_.size(); ++c) out << "---:|";
    out << "\n";
    for (const auto& row : rows_) {
      out << "| " << row.label << " |";
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        out << " " << cell(row, c) << " |";
      }
      out << "\n";
    }
    return out.str();
  }

 private:
  std::size_t column_index(const std::string& column) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i] == column) return i;
    }
    throw ValidationError("unknown report column '" + column + "'");
  }

  std::string title_;
  std::string label_header_;
  std::vector<std::string> columns_;
  std::vector<int> decimals_;
  std::vector<Row> rows_;
  std::vector<std::pair<std::string, std::string>> metadata_;
};

}  // namespace gazebench

#endif  // GAZEBENCH_REPORT_H_
