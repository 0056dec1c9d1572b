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

#ifndef LOGITS_MMD_DATA_H_
#define LOGITS_MMD_DATA_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace logits_mmd::data {

enum class Split { kFull, kTrain, kVal, kTest };

// Feature rows with a binary target and a sensitive value in 0..M.
struct Dataset {
  Eigen::MatrixXd x;  // n x d
  std::vector<int> y;
  std::vector<int> a;
  Split split = Split::kFull;

  size_t size() const { return y.size(); }
  int dim() const { return static_cast<int>(x.cols()); }
  // max(a) + 1, or 0 for an empty dataset.
  int group_count() const;
  size_t CellCount(int group, int label) const;
  // Rows at `indices`, in that order.
  Dataset Subset(std::span<const size_t> indices, Split split) const;

  // Throws DomainError on length mismatch, non-finite features, or labels out
  // of range.
  void Validate() const;
};

// Feature geometry of the synthetic bias experiment. Feature 0 carries the
// class signal (cluster centers at +-class_separation / 2). Feature 1 is a
// nuisance "color" that only depends on the sensitive group (centers at
// +-nuisance_offset / 2). Both get isotropic Gaussian noise.
struct ClusterParams {
  double class_separation = 3.0;
  double nuisance_offset = 3.0;
  double noise_std = 1.0;
};

struct BiasSpec {
  int bias_level = 6;   // N
  int n_per_cell = 100; // k
  uint64_t seed = 0;
  ClusterParams clusters;

  void Validate() const;
};

// Group 0 gets N*k samples with y = 1 and k with y = 0; group 1 mirrors
// (k with y = 1, N*k with y = 0). Rows are grouped by cell in the order
// (0,0), (0,1), (1,0), (1,1). Deterministic in spec.seed.
Dataset GenerateBiased(const BiasSpec& spec);

// Moves exactly `per_cell` rows of every (a, y) cell into the evaluation set.
// Both outputs keep the input row order. Throws DomainError naming the first
// cell that holds fewer than `per_cell` rows.
std::pair<Dataset, Dataset> MakeBalancedSplit(const Dataset& full, int per_cell,
                                              uint64_t seed,
                                              Split eval_split = Split::kTest);

struct ExperimentSplits {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Biased training set from `spec` plus balanced validation and test sets
// drawn from an unbiased (N = 1) pool with the same geometry. All three are
// derived from `seed`; spec.seed is ignored.
ExperimentSplits MakeExperimentSplits(const BiasSpec& spec, int val_per_cell,
                                      int test_per_cell, uint64_t seed);

// Equal-weight mixture of N(-3, 1) and N(3, 1).
inline constexpr double kToyModeOffset = 3.0;
std::vector<double> SampleToyMultimodal(int n, uint64_t seed);

struct CsvSchema {
  // Empty means every column other than target and sensitive, in file order.
  std::vector<std::string> feature_columns;
  std::string target_column = "target";
  std::string sensitive_column = "sensitive";
};

// Throws IoError when the file cannot be read and ParseError (with the data
// row number) on malformed content.
Dataset LoadCsv(const std::filesystem::path& path, const CsvSchema& schema = {});

// Header f0,...,f{d-1},target,sensitive.
void WriteCsv(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace logits_mmd::data

#endif  // LOGITS_MMD_DATA_H_
