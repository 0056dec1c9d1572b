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

#ifndef LOGITS_MMD_LOSSES_H_
#define LOGITS_MMD_LOSSES_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "logits_mmd/kernels.h"

namespace logits_mmd::losses {

// Logits of one batch split into |A| x 2 cells keyed by (sensitive, target).
// Each cell remembers the batch positions of its members so regularizer
// gradients land back on the right logit.
class LogitGroups {
 public:
  struct Cell {
    std::vector<double> values;
    std::vector<size_t> positions;
  };

  // Empty table for `group_count` sensitive values over `total` logits.
  LogitGroups(int group_count, size_t total);

  // Places logits[i] into cell (sensitive[i], targets[i]), batch order kept.
  static LogitGroups Partition(std::span<const double> logits,
                               std::span<const int> targets,
                               std::span<const int> sensitive,
                               int group_count);

  void Add(int group, int label, double logit, size_t position);

  int group_count() const { return group_count_; }
  size_t total() const { return total_; }
  const Cell& cell(int group, int label) const;

 private:
  int group_count_;
  size_t total_;
  std::vector<Cell> cells_;  // index = group * 2 + label
};

struct LossValue {
  double value = 0.0;
  // d value / d logit, aligned with batch position.
  std::vector<double> grad;
  // Group pairs left out because a side was empty (or too small for GA).
  int skipped_pairs = 0;
};

struct HistogramConfig {
  int bin_count = 32;
  double lo = 0.0;
  double hi = 1.0;
  // Width of the Gaussian soft assignment. Non-positive means one bin width.
  double soft_bandwidth = 0.0;

  double bin_width() const { return (hi - lo) / bin_count; }
  double bandwidth() const {
    return soft_bandwidth > 0.0 ? soft_bandwidth : bin_width();
  }
  void Validate() const;
};

inline constexpr double kGaussianVarianceFloor = 1e-4;
inline constexpr double kHistogramFloor = 1e-8;

// Mean binary cross-entropy on logits in the log-sum-exp stable form.
LossValue BceLoss(std::span<const double> logits, std::span<const int> targets);

// Sum over y and unordered group pairs of squared MMD between cell logits.
LossValue LogitsMmdLoss(const LogitGroups& groups,
                        const kernels::KernelConfig& cfg);

// Symmetric KL between Gaussians fitted to each cell (mean, sample variance
// floored at kGaussianVarianceFloor).
LossValue GaussianAssumptionLoss(const LogitGroups& groups);

// Symmetric KL between soft histograms of cell confidences sigmoid(logit).
LossValue HistogramApproxLoss(const LogitGroups& groups,
                              const HistogramConfig& hcfg);

// Normalized soft histogram of one set of confidences before flooring.
std::vector<double> SoftHistogram(std::span<const double> confidences,
                                  const HistogramConfig& hcfg);

enum class Regularizer { kNone, kMmd, kGa, kHa };

std::string_view RegularizerName(Regularizer r);
// Accepts none|mmd|ga|ha. Throws DomainError otherwise.
Regularizer ParseRegularizer(std::string_view name);

struct RegularizerConfig {
  kernels::KernelConfig kernel;
  HistogramConfig histogram;
};

LossValue RegularizerLoss(Regularizer regularizer, const LogitGroups& groups,
                          const RegularizerConfig& cfg);

struct ObjectiveValue {
  LossValue total;
  double ce = 0.0;
  double reg = 0.0;
};

// bce + lambda * reg. The regularizer is not evaluated at all when lambda is
// zero or the regularizer is kNone, so those cases equal plain BCE exactly.
ObjectiveValue CombinedObjective(std::span<const double> logits,
                                 std::span<const int> targets,
                                 const LogitGroups& groups, double lambda,
                                 Regularizer regularizer,
                                 const RegularizerConfig& cfg);

}  // namespace logits_mmd::losses

#endif  // LOGITS_MMD_LOSSES_H_
