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

#include "logits_mmd/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "logits_mmd/errors.h"
#include "logits_mmd/fairness_metrics.h"

namespace logits_mmd::losses {
namespace {

using Cell = LogitGroups::Cell;

// Cell contents sorted by value so the regularizer does not depend on the
// order samples arrived in the batch.
Cell Canonical(const Cell& cell) {
  std::vector<size_t> order(cell.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t l, size_t r) {
    return cell.values[l] < cell.values[r];
  });
  Cell out;
  out.values.reserve(order.size());
  out.positions.reserve(order.size());
  for (size_t k : order) {
    out.values.push_back(cell.values[k]);
    out.positions.push_back(cell.positions[k]);
  }
  return out;
}

struct GaussianFit {
  double mean = 0.0;
  double var = 0.0;
  bool floored = false;
};

GaussianFit FitGaussian(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  GaussianFit fit;
  for (double v : x) fit.mean += v;
  fit.mean /= n;
  for (double v : x) fit.var += (v - fit.mean) * (v - fit.mean);
  fit.var /= n - 1.0;
  if (fit.var < kGaussianVarianceFloor) {
    fit.var = kGaussianVarianceFloor;
    fit.floored = true;
  }
  return fit;
}

// Pushes d loss / d mean and d loss / d var back onto the cell's logits.
void BackpropGaussian(const Cell& cell, const GaussianFit& fit, double d_mean,
                      double d_var, std::vector<double>& grad) {
  const double n = static_cast<double>(cell.values.size());
  for (size_t k = 0; k < cell.values.size(); ++k) {
    double g = d_mean / n;
    if (!fit.floored) g += d_var * 2.0 * (cell.values[k] - fit.mean) / (n - 1.0);
    grad[cell.positions[k]] += g;
  }
}

// Per-sample soft bin weights for one cell, rows normalized to 1.
struct SoftAssignment {
  std::vector<double> confidence;
  std::vector<std::vector<double>> weights;
  std::vector<double> histogram;  // column means, sums to 1
};

SoftAssignment Assign(std::span<const double> confidences,
                      const HistogramConfig& hcfg) {
  const int bins = hcfg.bin_count;
  const double width = hcfg.bin_width();
  const double h = hcfg.bandwidth();
  SoftAssignment out;
  out.confidence.assign(confidences.begin(), confidences.end());
  out.histogram.assign(bins, 0.0);
  out.weights.reserve(confidences.size());
  std::vector<double> expo(bins);
  for (double c : confidences) {
    double top = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < bins; ++b) {
      const double d = c - (hcfg.lo + (b + 0.5) * width);
      expo[b] = -d * d / (2.0 * h * h);
      top = std::max(top, expo[b]);
    }
    std::vector<double> row(bins);
    double total = 0.0;
    for (int b = 0; b < bins; ++b) {
      row[b] = std::exp(expo[b] - top);
      total += row[b];
    }
    for (int b = 0; b < bins; ++b) {
      row[b] /= total;
      out.histogram[b] += row[b];
    }
    out.weights.push_back(std::move(row));
  }
  const double n = static_cast<double>(confidences.size());
  for (double& v : out.histogram) v /= n;
  return out;
}

struct FlooredHistogram {
  std::vector<double> p;
  std::vector<bool> active;  // false where the floor clamped the bin
  double mass = 0.0;          // sum before renormalization
};

FlooredHistogram Floor(const std::vector<double>& histogram) {
  FlooredHistogram out;
  out.p.resize(histogram.size());
  out.active.resize(histogram.size());
  for (size_t b = 0; b < histogram.size(); ++b) {
    out.active[b] = histogram[b] > kHistogramFloor;
    out.p[b] = out.active[b] ? histogram[b] : kHistogramFloor;
    out.mass += out.p[b];
  }
  for (double& v : out.p) v /= out.mass;
  return out;
}

void BackpropHistogram(const Cell& cell, const SoftAssignment& soft,
                       const FlooredHistogram& floored,
                       const std::vector<double>& d_p,
                       const HistogramConfig& hcfg, std::vector<double>& grad) {
  const size_t bins = d_p.size();
  double dot = 0.0;
  for (size_t b = 0; b < bins; ++b) dot += d_p[b] * floored.p[b];
  std::vector<double> d_hist(bins, 0.0);
  for (size_t b = 0; b < bins; ++b) {
    if (floored.active[b]) d_hist[b] = (d_p[b] - dot) / floored.mass;
  }
  const double n = static_cast<double>(cell.values.size());
  const double width = hcfg.bin_width();
  const double h = hcfg.bandwidth();
  for (size_t k = 0; k < cell.values.size(); ++k) {
    const double c = soft.confidence[k];
    const auto& r = soft.weights[k];
    // d r_b / d c = r_b (s_b - sum_j r_j s_j), s_b = -(c - center_b) / h^2
    double mean_slope = 0.0;
    std::vector<double> slope(bins);
    for (size_t b = 0; b < bins; ++b) {
      slope[b] = -(c - (hcfg.lo + (b + 0.5) * width)) / (h * h);
      mean_slope += r[b] * slope[b];
    }
    double d_c = 0.0;
    for (size_t b = 0; b < bins; ++b) {
      d_c += d_hist[b] / n * r[b] * (slope[b] - mean_slope);
    }
    grad[cell.positions[k]] += d_c * c * (1.0 - c);
  }
}

}  // namespace

LogitGroups::LogitGroups(int group_count, size_t total)
    : group_count_(group_count), total_(total) {
  if (group_count < 1) {
    throw DomainError(fmt::format("group count must be >= 1, got {}", group_count));
  }
  cells_.resize(static_cast<size_t>(group_count) * 2);
}

LogitGroups LogitGroups::Partition(std::span<const double> logits,
                                   std::span<const int> targets,
                                   std::span<const int> sensitive,
                                   int group_count) {
  if (logits.size() != targets.size() || logits.size() != sensitive.size()) {
    throw DomainError("partition inputs must have equal length");
  }
  LogitGroups groups(group_count, logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    groups.Add(sensitive[i], targets[i], logits[i], i);
  }
  return groups;
}

void LogitGroups::Add(int group, int label, double logit, size_t position) {
  if (group < 0 || group >= group_count_ || (label != 0 && label != 1)) {
    throw DomainError(fmt::format("cell (a={}, y={}) out of range", group, label));
  }
  if (position >= total_) {
    throw DomainError(fmt::format("position {} beyond batch of {}", position, total_));
  }
  Cell& c = cells_[static_cast<size_t>(group) * 2 + label];
  c.values.push_back(logit);
  c.positions.push_back(position);
}

const LogitGroups::Cell& LogitGroups::cell(int group, int label) const {
  if (group < 0 || group >= group_count_ || (label != 0 && label != 1)) {
    throw DomainError(fmt::format("cell (a={}, y={}) out of range", group, label));
  }
  return cells_[static_cast<size_t>(group) * 2 + label];
}

void HistogramConfig::Validate() const {
  if (bin_count < 2) {
    throw DomainError(fmt::format("histogram needs >= 2 bins, got {}", bin_count));
  }
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError(fmt::format("histogram range [{}, {}] is invalid", lo, hi));
  }
  if (!std::isfinite(soft_bandwidth)) {
    throw DomainError("histogram soft bandwidth must be finite");
  }
}

LossValue BceLoss(std::span<const double> logits, std::span<const int> targets) {
  if (logits.empty() || logits.size() != targets.size()) {
    throw DomainError("cross-entropy needs equal, non-zero lengths");
  }
  const double n = static_cast<double>(logits.size());
  LossValue out;
  out.grad.resize(logits.size());
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    const double z = logits[i];
    const double y = targets[i];
    total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    out.grad[i] = (metrics::Sigmoid(z) - y) / n;
  }
  out.value = total / n;
  return out;
}

LossValue LogitsMmdLoss(const LogitGroups& groups,
                        const kernels::KernelConfig& cfg) {
  LossValue out;
  out.grad.assign(groups.total(), 0.0);
  int evaluated = 0;
  for (int y = 0; y <= 1; ++y) {
    for (int i = 0; i < groups.group_count(); ++i) {
      for (int j = i + 1; j < groups.group_count(); ++j) {
        const Cell& ci = groups.cell(i, y);
        const Cell& cj = groups.cell(j, y);
        if (ci.values.empty() || cj.values.empty()) {
          ++out.skipped_pairs;
          continue;
        }
        const Cell p = Canonical(ci);
        const Cell q = Canonical(cj);
        const auto mmd = kernels::MmdSquaredGrad(p.values, q.values, cfg);
        out.value += mmd.value;
        for (size_t k = 0; k < p.positions.size(); ++k) {
          out.grad[p.positions[k]] += mmd.grad_a[k];
        }
        for (size_t k = 0; k < q.positions.size(); ++k) {
          out.grad[q.positions[k]] += mmd.grad_b[k];
        }
        ++evaluated;
      }
    }
  }
  if (evaluated == 0) {
    throw DegenerateBatchError(
        fmt::format("logits-MMD: all {} group pairs have an empty cell",
                    out.skipped_pairs));
  }
  return out;
}

LossValue GaussianAssumptionLoss(const LogitGroups& groups) {
  LossValue out;
  out.grad.assign(groups.total(), 0.0);
  int evaluated = 0;
  for (int y = 0; y <= 1; ++y) {
    for (int i = 0; i < groups.group_count(); ++i) {
      for (int j = i + 1; j < groups.group_count(); ++j) {
        const Cell& ci = groups.cell(i, y);
        const Cell& cj = groups.cell(j, y);
        if (ci.values.size() < 2 || cj.values.size() < 2) {
          ++out.skipped_pairs;
          continue;
        }
        const GaussianFit p = FitGaussian(ci.values);
        const GaussianFit q = FitGaussian(cj.values);
        const double d = p.mean - q.mean;
        // KL(p||q) + KL(q||p); the log terms cancel.
        out.value += (p.var + d * d) / (2.0 * q.var) +
                     (q.var + d * d) / (2.0 * p.var) - 1.0;
        const double d_mean = d / q.var + d / p.var;
        const double d_pvar =
            1.0 / (2.0 * q.var) - (q.var + d * d) / (2.0 * p.var * p.var);
        const double d_qvar =
            1.0 / (2.0 * p.var) - (p.var + d * d) / (2.0 * q.var * q.var);
        BackpropGaussian(ci, p, d_mean, d_pvar, out.grad);
        BackpropGaussian(cj, q, -d_mean, d_qvar, out.grad);
        ++evaluated;
      }
    }
  }
  if (evaluated == 0) {
    throw DegenerateBatchError(fmt::format(
        "gaussian assumption: all {} group pairs lack two samples per cell",
        out.skipped_pairs));
  }
  return out;
}

std::vector<double> SoftHistogram(std::span<const double> confidences,
                                  const HistogramConfig& hcfg) {
  hcfg.Validate();
  if (confidences.empty()) throw DomainError("soft histogram of an empty set");
  return Assign(confidences, hcfg).histogram;
}

LossValue HistogramApproxLoss(const LogitGroups& groups,
                              const HistogramConfig& hcfg) {
  hcfg.Validate();
  LossValue out;
  out.grad.assign(groups.total(), 0.0);

  const int cells = groups.group_count() * 2;
  std::vector<SoftAssignment> soft(cells);
  std::vector<FlooredHistogram> floored(cells);
  std::vector<std::vector<double>> d_p(cells);
  std::vector<bool> used(cells, false);
  auto index = [](int a, int y) { return a * 2 + y; };

  int evaluated = 0;
  for (int y = 0; y <= 1; ++y) {
    for (int i = 0; i < groups.group_count(); ++i) {
      for (int j = i + 1; j < groups.group_count(); ++j) {
        const Cell& ci = groups.cell(i, y);
        const Cell& cj = groups.cell(j, y);
        if (ci.values.empty() || cj.values.empty()) {
          ++out.skipped_pairs;
          continue;
        }
        for (int a : {i, j}) {
          const int k = index(a, y);
          if (used[k]) continue;
          const Cell& c = groups.cell(a, y);
          std::vector<double> conf(c.values.size());
          for (size_t m = 0; m < conf.size(); ++m) {
            conf[m] = metrics::Sigmoid(c.values[m]);
          }
          soft[k] = Assign(conf, hcfg);
          floored[k] = Floor(soft[k].histogram);
          d_p[k].assign(hcfg.bin_count, 0.0);
          used[k] = true;
        }
        const auto& p = floored[index(i, y)].p;
        const auto& q = floored[index(j, y)].p;
        auto& gp = d_p[index(i, y)];
        auto& gq = d_p[index(j, y)];
        for (int b = 0; b < hcfg.bin_count; ++b) {
          const double log_ratio = std::log(p[b] / q[b]);
          out.value += (p[b] - q[b]) * log_ratio;
          gp[b] += log_ratio + 1.0 - q[b] / p[b];
          gq[b] += -log_ratio + 1.0 - p[b] / q[b];
        }
        ++evaluated;
      }
    }
  }
  if (evaluated == 0) {
    throw DegenerateBatchError(
        fmt::format("histogram approximation: all {} group pairs have an "
                    "empty cell",
                    out.skipped_pairs));
  }
  for (int a = 0; a < groups.group_count(); ++a) {
    for (int y = 0; y <= 1; ++y) {
      const int k = index(a, y);
      if (!used[k]) continue;
      BackpropHistogram(groups.cell(a, y), soft[k], floored[k], d_p[k], hcfg,
                        out.grad);
    }
  }
  return out;
}

std::string_view RegularizerName(Regularizer r) {
  switch (r) {
    case Regularizer::kNone: return "none";
    case Regularizer::kMmd: return "mmd";
    case Regularizer::kGa: return "ga";
    case Regularizer::kHa: return "ha";
  }
  return "none";
}

Regularizer ParseRegularizer(std::string_view name) {
  if (name == "none") return Regularizer::kNone;
  if (name == "mmd") return Regularizer::kMmd;
  if (name == "ga") return Regularizer::kGa;
  if (name == "ha") return Regularizer::kHa;
  throw DomainError(fmt::format(
      "unknown regularizer '{}' (expected none, mmd, ga or ha)", name));
}

LossValue RegularizerLoss(Regularizer regularizer, const LogitGroups& groups,
                          const RegularizerConfig& cfg) {
  switch (regularizer) {
    case Regularizer::kMmd: return LogitsMmdLoss(groups, cfg.kernel);
    case Regularizer::kGa: return GaussianAssumptionLoss(groups);
    case Regularizer::kHa: return HistogramApproxLoss(groups, cfg.histogram);
    case Regularizer::kNone: break;
  }
  LossValue zero;
  zero.grad.assign(groups.total(), 0.0);
  return zero;
}

ObjectiveValue CombinedObjective(std::span<const double> logits,
                                 std::span<const int> targets,
                                 const LogitGroups& groups, double lambda,
                                 Regularizer regularizer,
                                 const RegularizerConfig& cfg) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw DomainError(fmt::format("lambda must be finite and >= 0, got {}", lambda));
  }
  if (groups.total() != logits.size()) {
    throw DomainError("logit groups do not cover the batch");
  }
  ObjectiveValue out;
  out.total = BceLoss(logits, targets);
  out.ce = out.total.value;
  if (lambda == 0.0 || regularizer == Regularizer::kNone) return out;

  const LossValue reg = RegularizerLoss(regularizer, groups, cfg);
  out.reg = reg.value;
  out.total.value += lambda * reg.value;
  for (size_t i = 0; i < out.total.grad.size(); ++i) {
    out.total.grad[i] += lambda * reg.grad[i];
  }
  out.total.skipped_pairs = reg.skipped_pairs;
  return out;
}

}  // namespace logits_mmd::losses
