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

#include "logits_mmd/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>

#include "logits_mmd/csv.h"
#include "logits_mmd/errors.h"
#include "logits_mmd/random.h"

namespace logits_mmd::data {
namespace {

bool ParseDouble(const std::string& field, double& value) {
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc() && ptr == field.data() + field.size();
}

bool ParseInt(const std::string& field, int& value) {
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

int Dataset::group_count() const {
  if (a.empty()) return 0;
  return *std::max_element(a.begin(), a.end()) + 1;
}

size_t Dataset::CellCount(int group, int label) const {
  size_t count = 0;
  for (size_t i = 0; i < size(); ++i) {
    if (a[i] == group && y[i] == label) ++count;
  }
  return count;
}

Dataset Dataset::Subset(std::span<const size_t> indices, Split s) const {
  Dataset out;
  out.split = s;
  out.x.resize(static_cast<Eigen::Index>(indices.size()), x.cols());
  out.y.reserve(indices.size());
  out.a.reserve(indices.size());
  for (size_t r = 0; r < indices.size(); ++r) {
    out.x.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(indices[r]));
    out.y.push_back(y[indices[r]]);
    out.a.push_back(a[indices[r]]);
  }
  return out;
}

void Dataset::Validate() const {
  if (static_cast<size_t>(x.rows()) != y.size() || y.size() != a.size()) {
    throw DomainError(fmt::format("dataset length mismatch: x {}, y {}, a {}",
                                  x.rows(), y.size(), a.size()));
  }
  if (!x.allFinite()) throw DomainError("dataset has non-finite features");
  for (size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0 && y[i] != 1) {
      throw DomainError(fmt::format("row {}: target {} is not 0 or 1", i, y[i]));
    }
    if (a[i] < 0) {
      throw DomainError(fmt::format("row {}: sensitive value {} is negative", i, a[i]));
    }
  }
}

void BiasSpec::Validate() const {
  if (bias_level < 1) {
    throw DomainError(fmt::format("bias level N must be >= 1, got {}", bias_level));
  }
  if (n_per_cell < 1) {
    throw DomainError(fmt::format("n_per_cell must be >= 1, got {}", n_per_cell));
  }
  if (!(clusters.noise_std > 0.0) || !std::isfinite(clusters.noise_std) ||
      !std::isfinite(clusters.class_separation) ||
      !std::isfinite(clusters.nuisance_offset)) {
    throw DomainError("cluster parameters must be finite with noise_std > 0");
  }
}

Dataset GenerateBiased(const BiasSpec& spec) {
  spec.Validate();
  const int k = spec.n_per_cell;
  const int nk = spec.bias_level * spec.n_per_cell;
  // (a, y) -> count
  const int counts[2][2] = {{k, nk}, {nk, k}};
  const size_t total = static_cast<size_t>(2 * (k + nk));

  Rng rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.clusters.noise_std);
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(total), 2);
  out.y.reserve(total);
  out.a.reserve(total);
  Eigen::Index row = 0;
  for (int a = 0; a <= 1; ++a) {
    for (int y = 0; y <= 1; ++y) {
      const double class_center = (y == 1 ? 0.5 : -0.5) * spec.clusters.class_separation;
      const double nuisance_center = (a == 0 ? 0.5 : -0.5) * spec.clusters.nuisance_offset;
      for (int i = 0; i < counts[a][y]; ++i, ++row) {
        out.x(row, 0) = class_center + noise(rng);
        out.x(row, 1) = nuisance_center + noise(rng);
        out.y.push_back(y);
        out.a.push_back(a);
      }
    }
  }
  return out;
}

std::pair<Dataset, Dataset> MakeBalancedSplit(const Dataset& full, int per_cell,
                                              uint64_t seed, Split eval_split) {
  full.Validate();
  if (per_cell < 1) {
    throw DomainError(fmt::format("per_cell must be >= 1, got {}", per_cell));
  }
  const int groups = full.group_count();
  if (groups == 0) throw DomainError("cannot split an empty dataset");
  Rng rng(seed);
  std::vector<bool> to_eval(full.size(), false);
  for (int a = 0; a < groups; ++a) {
    for (int y = 0; y <= 1; ++y) {
      std::vector<size_t> members;
      for (size_t i = 0; i < full.size(); ++i) {
        if (full.a[i] == a && full.y[i] == y) members.push_back(i);
      }
      if (members.size() < static_cast<size_t>(per_cell)) {
        throw DomainError(fmt::format(
            "cell (a={}, y={}) holds {} rows, {} requested for the balanced split",
            a, y, members.size(), per_cell));
      }
      std::shuffle(members.begin(), members.end(), rng);
      for (int m = 0; m < per_cell; ++m) to_eval[members[m]] = true;
    }
  }
  std::vector<size_t> train_rows;
  std::vector<size_t> eval_rows;
  for (size_t i = 0; i < full.size(); ++i) {
    (to_eval[i] ? eval_rows : train_rows).push_back(i);
  }
  return {full.Subset(train_rows, Split::kTrain), full.Subset(eval_rows, eval_split)};
}

ExperimentSplits MakeExperimentSplits(const BiasSpec& spec, int val_per_cell,
                                      int test_per_cell, uint64_t seed) {
  if (val_per_cell < 1 || test_per_cell < 1) {
    throw DomainError(fmt::format("held-out sets need >= 1 row per cell, got {} and {}",
                                  val_per_cell, test_per_cell));
  }
  ExperimentSplits out;
  BiasSpec train_spec = spec;
  train_spec.seed = DeriveSeed(seed, kStreamData);
  out.train = GenerateBiased(train_spec);
  out.train.split = Split::kTrain;

  BiasSpec pool_spec = spec;
  pool_spec.bias_level = 1;
  pool_spec.n_per_cell = val_per_cell + test_per_cell;
  pool_spec.seed = DeriveSeed(seed, kStreamData + 100);
  auto [rest, val] = MakeBalancedSplit(GenerateBiased(pool_spec), val_per_cell,
                                       DeriveSeed(seed, kStreamSplit), Split::kVal);
  out.val = std::move(val);
  out.test = std::move(rest);
  out.test.split = Split::kTest;
  return out;
}

std::vector<double> SampleToyMultimodal(int n, uint64_t seed) {
  if (n < 1) throw DomainError(fmt::format("toy sample count must be >= 1, got {}", n));
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> out(n);
  for (double& v : out) {
    const double mode = coin(rng) ? kToyModeOffset : -kToyModeOffset;
    v = mode + unit(rng);
  }
  return out;
}

Dataset LoadCsv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open dataset {}", path.string()));
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(fmt::format("{}: missing header row", path.string()));
  }
  const auto header = csv::SplitLine(line);
  auto column_of = [&](const std::string& name) -> size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ParseError(fmt::format("{}: missing column '{}'", path.string(), name));
    }
    return static_cast<size_t>(it - header.begin());
  };
  const size_t target_col = column_of(schema.target_column);
  const size_t sensitive_col = column_of(schema.sensitive_column);
  std::vector<size_t> feature_cols;
  if (schema.feature_columns.empty()) {
    for (size_t c = 0; c < header.size(); ++c) {
      if (c != target_col && c != sensitive_col) feature_cols.push_back(c);
    }
  } else {
    for (const auto& name : schema.feature_columns) feature_cols.push_back(column_of(name));
  }

  std::vector<double> features;
  Dataset out;
  size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const auto fields = csv::SplitLine(line);
    if (fields.size() != header.size()) {
      throw ParseError(fmt::format("{}: row {} has {} fields, expected {}",
                                   path.string(), row, fields.size(), header.size()));
    }
    for (size_t c : feature_cols) {
      double v = 0.0;
      if (!ParseDouble(fields[c], v) || !std::isfinite(v)) {
        throw ParseError(fmt::format("{}: row {}: feature '{}' has non-numeric value '{}'",
                                     path.string(), row, header[c], fields[c]));
      }
      features.push_back(v);
    }
    int target = 0;
    if (!ParseInt(fields[target_col], target) || (target != 0 && target != 1)) {
      throw ParseError(fmt::format("{}: row {}: target '{}' is not 0 or 1",
                                   path.string(), row, fields[target_col]));
    }
    int sensitive = 0;
    if (!ParseInt(fields[sensitive_col], sensitive) || sensitive < 0) {
      throw ParseError(fmt::format("{}: row {}: sensitive '{}' is not an integer >= 0",
                                   path.string(), row, fields[sensitive_col]));
    }
    out.y.push_back(target);
    out.a.push_back(sensitive);
  }
  const auto d = static_cast<Eigen::Index>(feature_cols.size());
  out.x.resize(static_cast<Eigen::Index>(row), d);
  for (Eigen::Index r = 0; r < out.x.rows(); ++r) {
    for (Eigen::Index c = 0; c < d; ++c) out.x(r, c) = features[r * d + c];
  }
  return out;
}

void WriteCsv(const Dataset& dataset, const std::filesystem::path& path) {
  dataset.Validate();
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  for (int c = 0; c < dataset.dim(); ++c) out << 'f' << c << ',';
  out << "target,sensitive\n";
  for (size_t r = 0; r < dataset.size(); ++r) {
    for (int c = 0; c < dataset.dim(); ++c) {
      out << csv::FormatDouble(dataset.x(static_cast<Eigen::Index>(r), c)) << ',';
    }
    out << dataset.y[r] << ',' << dataset.a[r] << '\n';
  }
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

}  // namespace logits_mmd::data
