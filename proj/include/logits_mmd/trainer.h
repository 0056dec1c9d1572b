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

#ifndef LOGITS_MMD_TRAINER_H_
#define LOGITS_MMD_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "logits_mmd/data.h"
#include "logits_mmd/fairness_metrics.h"
#include "logits_mmd/losses.h"
#include "logits_mmd/mlp.h"
#include "logits_mmd/random.h"

namespace logits_mmd::trainer {

struct SgdConfig {
  double learning_rate = 0.01;
  int epochs = 200;
  int batch_size = 64;
  uint64_t seed = 0;
};

enum class Batching { kUniform, kStratified };

inline constexpr double kDefaultLambda = 0.05;

struct TrainConfig {
  SgdConfig sgd;
  double lambda = kDefaultLambda;
  losses::Regularizer regularizer = losses::Regularizer::kMmd;
  Batching batching = Batching::kStratified;
  int min_per_cell = 2;
  double threshold = metrics::kDefaultThreshold;
  losses::RegularizerConfig reg;
  // Architecture used when a run builds its own model (sweeps, CLI).
  std::vector<int> hidden = {16, 16};
  // When set, one CSV row per epoch is appended here during training.
  std::filesystem::path log_path;

  void Validate() const;
};

struct EpochLog {
  int epoch = 0;
  double ce_loss = 0.0;   // mean over iterations
  double reg_loss = 0.0;  // mean over iterations, unweighted by lambda
  metrics::FairnessReport val;
  int skipped_pairs = 0;
};

// Columns: epoch,ce_loss,reg_loss,skipped_pairs, then the report columns.
std::string EpochCsvHeader(const metrics::FairnessReport& shape);
std::string EpochCsvRow(const EpochLog& log);

// Buckets a batch's logits into its (a, y) cells. A negative group_count
// means max(sensitive) + 1.
losses::LogitGroups PartitionBatch(std::span<const double> logits,
                                   std::span<const int> targets,
                                   std::span<const int> sensitive,
                                   int group_count = -1);

// Row indices of every mini-batch in one epoch. Stratified batching draws
// max(min_per_cell, round(batch_size * n_cell / n)) rows from each non-empty
// cell, cycling through a per-epoch shuffle of that cell.
std::vector<std::vector<size_t>> EpochBatches(const data::Dataset& train,
                                              const TrainConfig& cfg, Rng& rng);

struct TrainResult {
  model::MlpModel model;
  std::vector<EpochLog> logs;
};

// Mini-batch SGD on CE + lambda * regularizer. Deterministic in
// cfg.sgd.seed. Degenerate-batch errors are rethrown with epoch and
// iteration context.
TrainResult Train(model::MlpModel model, const data::Dataset& train,
                  const data::Dataset& val, const TrainConfig& cfg);

// Logits of a trained model for a whole dataset, wrapped for evaluation.
metrics::EvalBatch EvalBatchFor(const model::MlpModel& model,
                                const data::Dataset& dataset);

struct ToyConfig {
  int epochs = 500;
  int noise_dim = 2;
  std::vector<int> hidden = {32};
  int batch_size = 256;
  double learning_rate = 0.05;
  uint64_t seed = 0;
  kernels::KernelConfig kernel;
};

struct ToyResult {
  model::MlpModel generator;
  std::vector<double> generated;  // as many samples as the target set
  std::vector<double> trace;      // mean distance per epoch
};

// Trains a noise-to-scalar generator by minimizing only a distribution
// distance to `target`: squared MMD (kMmd) or symmetric KL of fitted
// Gaussians (kGa).
ToyResult FitToyDistribution(losses::Regularizer regularizer,
                             std::span<const double> target,
                             const ToyConfig& cfg);

std::vector<double> GenerateToySamples(const model::MlpModel& generator, int n,
                                       uint64_t seed);

struct SweepRow {
  double lambda = 0.0;
  double accuracy = 0.0;  // median over seeds
  double eo = 0.0;        // median over seeds
  std::vector<double> run_accuracy;
  std::vector<double> run_eo;
};

// One training run per (lambda, seed); rows sorted by lambda. Each run
// initializes its model from DeriveSeed(seed, kStreamInit) and evaluates on
// `eval` at cfg.threshold.
std::vector<SweepRow> SweepLambda(std::vector<double> grid,
                                  const TrainConfig& tmpl,
                                  const data::Dataset& train,
                                  const data::Dataset& eval,
                                  std::span<const uint64_t> seeds);

double Median(std::vector<double> values);

}  // namespace logits_mmd::trainer

#endif  // LOGITS_MMD_TRAINER_H_
