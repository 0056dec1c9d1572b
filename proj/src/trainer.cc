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

#include "logits_mmd/trainer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "logits_mmd/csv.h"
#include "logits_mmd/errors.h"

namespace logits_mmd::trainer {
namespace {

Eigen::MatrixXd GatherRows(const Eigen::MatrixXd& x, std::span<const size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

void CheckCoversCells(const data::Dataset& dataset, int groups, const char* what) {
  for (int a = 0; a < groups; ++a) {
    for (int y = 0; y <= 1; ++y) {
      if (dataset.CellCount(a, y) == 0) {
        throw EmptyCellError(a, y, fmt::format("{} set has no rows in cell (a={}, y={})",
                                               what, a, y));
      }
    }
  }
}

Eigen::MatrixXd NoiseBatch(int rows, int dim, Rng& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd z(rows, dim);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < dim; ++c) z(r, c) = unit(rng);
  }
  return z;
}

}  // namespace

void TrainConfig::Validate() const {
  if (!std::isfinite(sgd.learning_rate) || sgd.learning_rate <= 0.0) {
    throw DomainError(fmt::format("learning rate must be > 0, got {}", sgd.learning_rate));
  }
  if (sgd.epochs < 1) throw DomainError(fmt::format("epochs must be >= 1, got {}", sgd.epochs));
  if (sgd.batch_size < 1) {
    throw DomainError(fmt::format("batch size must be >= 1, got {}", sgd.batch_size));
  }
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw DomainError(fmt::format("lambda must be >= 0, got {}", lambda));
  }
  if (batching == Batching::kStratified && min_per_cell < 2) {
    throw DomainError(fmt::format("min_per_cell must be >= 2, got {}", min_per_cell));
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw DomainError(fmt::format("threshold must lie in [0, 1], got {}", threshold));
  }
  for (int h : hidden) {
    if (h < 1) throw DomainError(fmt::format("hidden size must be >= 1, got {}", h));
  }
  reg.histogram.Validate();
}

std::string EpochCsvHeader(const metrics::FairnessReport& shape) {
  return "epoch,ce_loss,reg_loss,skipped_pairs," + metrics::ReportCsvHeader(shape);
}

std::string EpochCsvRow(const EpochLog& log) {
  return fmt::format("{},{},{},{},{}", log.epoch, csv::FormatDouble(log.ce_loss),
                     csv::FormatDouble(log.reg_loss), log.skipped_pairs,
                     metrics::ReportCsvRow(log.val));
}

losses::LogitGroups PartitionBatch(std::span<const double> logits,
                                   std::span<const int> targets,
                                   std::span<const int> sensitive,
                                   int group_count) {
  if (group_count < 0) {
    group_count = sensitive.empty()
                      ? 1
                      : *std::max_element(sensitive.begin(), sensitive.end()) + 1;
  }
  return losses::LogitGroups::Partition(logits, targets, sensitive, group_count);
}

std::vector<std::vector<size_t>> EpochBatches(const data::Dataset& train,
                                              const TrainConfig& cfg, Rng& rng) {
  const size_t n = train.size();
  const size_t batch = static_cast<size_t>(cfg.sgd.batch_size);
  const size_t iterations = (n + batch - 1) / batch;
  std::vector<std::vector<size_t>> batches;
  batches.reserve(iterations);

  if (cfg.batching == Batching::kUniform) {
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < n; start += batch) {
      const size_t stop = std::min(n, start + batch);
      batches.emplace_back(order.begin() + start, order.begin() + stop);
    }
    return batches;
  }

  const int groups = train.group_count();
  std::vector<std::vector<size_t>> cells;
  for (int a = 0; a < groups; ++a) {
    for (int y = 0; y <= 1; ++y) {
      std::vector<size_t> members;
      for (size_t i = 0; i < n; ++i) {
        if (train.a[i] == a && train.y[i] == y) members.push_back(i);
      }
      if (members.empty()) continue;
      std::shuffle(members.begin(), members.end(), rng);
      cells.push_back(std::move(members));
    }
  }
  std::vector<size_t> quota(cells.size());
  for (size_t c = 0; c < cells.size(); ++c) {
    const double share = static_cast<double>(batch) * cells[c].size() / n;
    quota[c] = std::max(static_cast<size_t>(cfg.min_per_cell),
                        static_cast<size_t>(std::llround(share)));
  }
  std::vector<size_t> cursor(cells.size(), 0);
  for (size_t it = 0; it < iterations; ++it) {
    std::vector<size_t> rows;
    for (size_t c = 0; c < cells.size(); ++c) {
      for (size_t q = 0; q < quota[c]; ++q) {
        rows.push_back(cells[c][cursor[c]]);
        cursor[c] = (cursor[c] + 1) % cells[c].size();
      }
    }
    batches.push_back(std::move(rows));
  }
  return batches;
}

metrics::EvalBatch EvalBatchFor(const model::MlpModel& model,
                                const data::Dataset& dataset) {
  return metrics::EvalBatch(model::Logits(model, dataset.x), dataset.y, dataset.a);
}

TrainResult Train(model::MlpModel initial, const data::Dataset& train,
                  const data::Dataset& val, const TrainConfig& cfg) {
  cfg.Validate();
  train.Validate();
  val.Validate();
  if (train.size() == 0 || val.size() == 0) {
    throw DomainError("training and validation sets must be non-empty");
  }
  if (train.dim() != initial.input_dim() || val.dim() != initial.input_dim()) {
    throw DomainError(fmt::format("dataset has {} features, model expects {}",
                                  train.dim(), initial.input_dim()));
  }
  const int groups = std::max(train.group_count(), val.group_count());
  CheckCoversCells(val, groups, "validation");

  std::ofstream log_file;
  if (!cfg.log_path.empty()) {
    log_file.open(cfg.log_path);
    if (!log_file) throw IoError(fmt::format("cannot write {}", cfg.log_path.string()));
  }

  Rng rng(DeriveSeed(cfg.sgd.seed, kStreamBatches));
  TrainResult result{std::move(initial), {}};
  result.logs.reserve(cfg.sgd.epochs);
  for (int epoch = 0; epoch < cfg.sgd.epochs; ++epoch) {
    const auto batches = EpochBatches(train, cfg, rng);
    EpochLog log;
    log.epoch = epoch;
    for (size_t it = 0; it < batches.size(); ++it) {
      const auto& rows = batches[it];
      const Eigen::MatrixXd xb = GatherRows(train.x, rows);
      std::vector<int> yb(rows.size());
      std::vector<int> ab(rows.size());
      for (size_t r = 0; r < rows.size(); ++r) {
        yb[r] = train.y[rows[r]];
        ab[r] = train.a[rows[r]];
      }
      const auto fwd = model::Forward(result.model, xb);
      const auto cells = PartitionBatch(fwd.logits, yb, ab, groups);
      losses::ObjectiveValue objective;
      try {
        objective = losses::CombinedObjective(fwd.logits, yb, cells, cfg.lambda,
                                              cfg.regularizer, cfg.reg);
      } catch (const DegenerateBatchError& e) {
        throw DegenerateBatchError(
            fmt::format("epoch {} iteration {}: {}", epoch, it, e.what()));
      }
      if (!std::isfinite(objective.total.value)) {
        throw DegenerateBatchError(
            fmt::format("epoch {} iteration {}: objective is not finite", epoch, it));
      }
      log.ce_loss += objective.ce;
      log.reg_loss += objective.reg;
      log.skipped_pairs += objective.total.skipped_pairs;
      const auto grads = model::Backward(result.model, fwd.cache, objective.total.grad);
      model::SgdStep(result.model, grads, cfg.sgd.learning_rate);
    }
    log.ce_loss /= static_cast<double>(batches.size());
    log.reg_loss /= static_cast<double>(batches.size());
    log.val = metrics::Evaluate(EvalBatchFor(result.model, val), cfg.threshold);
    if (log_file.is_open()) {
      if (epoch == 0) log_file << EpochCsvHeader(log.val) << '\n';
      log_file << EpochCsvRow(log) << '\n';
      log_file.flush();
    }
    result.logs.push_back(std::move(log));
  }
  return result;
}

std::vector<double> GenerateToySamples(const model::MlpModel& generator, int n,
                                       uint64_t seed) {
  if (n < 1) throw DomainError("toy sample count must be >= 1");
  Rng rng(seed);
  return model::Logits(generator, NoiseBatch(n, generator.input_dim(), rng));
}

ToyResult FitToyDistribution(losses::Regularizer regularizer,
                             std::span<const double> target,
                             const ToyConfig& cfg) {
  if (regularizer != losses::Regularizer::kMmd && regularizer != losses::Regularizer::kGa) {
    throw DomainError(fmt::format("toy fitting supports mmd and ga, not {}",
                                  losses::RegularizerName(regularizer)));
  }
  if (target.size() < 2) throw DomainError("toy target needs at least two samples");
  if (cfg.epochs < 1 || cfg.batch_size < 2 || cfg.noise_dim < 1 ||
      !(cfg.learning_rate > 0.0)) {
    throw DomainError("invalid toy configuration");
  }
  const size_t batch = std::min(static_cast<size_t>(cfg.batch_size), target.size());
  const size_t iterations = target.size() / batch;

  ToyResult result{model::MlpModel::Init(cfg.noise_dim, cfg.hidden,
                                         DeriveSeed(cfg.seed, kStreamInit)),
                   {},
                   {}};
  Rng noise_rng(DeriveSeed(cfg.seed, kStreamToyNoise));
  Rng order_rng(DeriveSeed(cfg.seed, kStreamBatches));
  std::vector<size_t> order(target.size());
  std::iota(order.begin(), order.end(), 0);

  // Generated samples sit in group 0, target samples in group 1, both in one
  // class cell; only the generated half of the gradient is used.
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    double distance = 0.0;
    for (size_t it = 0; it < iterations; ++it) {
      const auto fwd = model::Forward(
          result.generator, NoiseBatch(static_cast<int>(batch), cfg.noise_dim, noise_rng));
      losses::LogitGroups cells(2, 2 * batch);
      for (size_t k = 0; k < batch; ++k) cells.Add(0, 1, fwd.logits[k], k);
      for (size_t k = 0; k < batch; ++k) {
        cells.Add(1, 1, target[order[it * batch + k]], batch + k);
      }
      const losses::LossValue loss =
          regularizer == losses::Regularizer::kMmd
              ? losses::LogitsMmdLoss(cells, cfg.kernel)
              : losses::GaussianAssumptionLoss(cells);
      if (!std::isfinite(loss.value)) {
        throw DegenerateBatchError(
            fmt::format("toy epoch {} iteration {}: distance is not finite", epoch, it));
      }
      distance += loss.value;
      const std::span<const double> grad(loss.grad.data(), batch);
      model::SgdStep(result.generator, model::Backward(result.generator, fwd.cache, grad),
                     cfg.learning_rate);
    }
    result.trace.push_back(distance / static_cast<double>(iterations));
  }
  result.generated = GenerateToySamples(result.generator, static_cast<int>(target.size()),
                                        DeriveSeed(cfg.seed, kStreamToyEval));
  return result;
}

double Median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty list");
  std::sort(values.begin(), values.end());
  const size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<SweepRow> SweepLambda(std::vector<double> grid, const TrainConfig& tmpl,
                                  const data::Dataset& train,
                                  const data::Dataset& eval,
                                  std::span<const uint64_t> seeds) {
  if (grid.empty()) throw DomainError("lambda grid is empty");
  if (seeds.empty()) throw DomainError("sweep needs at least one seed");
  std::sort(grid.begin(), grid.end());
  std::vector<SweepRow> rows;
  for (double lambda : grid) {
    SweepRow row;
    row.lambda = lambda;
    for (uint64_t seed : seeds) {
      TrainConfig cfg = tmpl;
      cfg.lambda = lambda;
      cfg.sgd.seed = seed;
      cfg.log_path.clear();
      auto init = model::MlpModel::Init(train.dim(), cfg.hidden, DeriveSeed(seed, kStreamInit));
      const auto trained = Train(std::move(init), train, eval, cfg);
      const auto report = metrics::Evaluate(EvalBatchFor(trained.model, eval), cfg.threshold);
      row.run_accuracy.push_back(report.accuracy);
      row.run_eo.push_back(report.eo);
    }
    row.accuracy = Median(row.run_accuracy);
    row.eo = Median(row.run_eo);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace logits_mmd::trainer
