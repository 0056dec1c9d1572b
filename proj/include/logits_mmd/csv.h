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

#ifndef LOGITS_MMD_CSV_H_
#define LOGITS_MMD_CSV_H_

#include <filesystem>
#include <string>
#include <vector>

namespace logits_mmd::csv {

// Shortest decimal form that parses back to the identical double.
std::string FormatDouble(double value);

std::vector<std::string> SplitLine(const std::string& line);

struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Reads a header plus all-numeric rows. Throws IoError / ParseError.
NumericTable ReadNumeric(const std::filesystem::path& path);

}  // namespace logits_mmd::csv

#endif  // LOGITS_MMD_CSV_H_
