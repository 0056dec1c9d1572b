// Copyright 2026 The Logits-MMD Authors.
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

#include "logits_mmd/csv.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "logits_mmd/errors.h"

namespace logits_mmd::csv {

std::string FormatDouble(double value) { return fmt::format("{}", value); }

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

NumericTable ReadNumeric(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  NumericTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(fmt::format("{}: missing header row", path.string()));
  }
  table.header = SplitLine(line);
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = SplitLine(line);
    if (fields.size() != table.header.size()) {
      throw ParseError(fmt::format("{}: row {} has {} fields, expected {}",
                                   path.string(), row, fields.size(),
                                   table.header.size()));
    }
    std::vector<double> values;
    values.reserve(fields.size());
    for (const auto& f : fields) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(fmt::format("{}: row {}: '{}' is not a number",
                                     path.string(), row, f));
      }
      values.push_back(v);
    }
    table.rows.push_back(std::move(values));
  }
  return table;
}

}  // namespace logits_mmd::csv
