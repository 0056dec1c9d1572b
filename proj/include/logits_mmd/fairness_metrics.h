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

#ifndef LOGITS_MMD_FAIRNESS_METRICS_H_
#define LOGITS_MMD_FAIRNESS_METRICS_H_

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace logits_mmd::metrics {

inline constexpr double kDefaultThreshold = 0.5;

double Sigmoid(double z);

// Immutable evaluation batch: model logits, binary targets and sensitive
// attribute values. Sensitive values must cover 0..M without gaps.
class EvalBatch {
 public:
  EvalBatch(std::vector<double> logits, std::vector<int> targets,
            std::vector<int> sensitive);

  size_t size() const { return logits_.size(); }
  int group_count() const { return group_count_; }
  std::span<const double> logits() const { return logits_; }
  std::span<const int> targets() const { return targets_; }
  std::span<const int> sensitive() const { return sensitive_; }

 private:
  std::vector<double> logits_;
  std::vector<int> targets_;
  std::vector<int> sensitive_;
  int group_count_ = 0;
};

// yhat_i = 1 iff sigmoid(logit_i) > t.
std::vector<int> Predict(std::span<const double> logits, double threshold);

// P(yhat = 1 | A = group, Y = label). Throws EmptyCellError for an empty cell.
double GroupRate(const EvalBatch& batch, int group, int label,
                 double threshold);

// P(yhat = 1 | A = group). Throws EmptyCellError (label -1) when empty.
double PositiveRate(const EvalBatch& batch, int group, double threshold);

// Sum over unordered group pairs of positive-rate gaps. For two groups this
// is |P(yhat=1|A=0) - P(yhat=1|A=1)|.
double DemographicParity(const EvalBatch& batch, double threshold);

// Sum over y in {0,1} and unordered group pairs (i < j) of
// |P_{i,y} - P_{j,y}|. With two groups this is the classic two-term EO.
double EqualizedOdds(const EvalBatch& batch, double threshold);

double Accuracy(const EvalBatch& batch, double threshold);

struct FairnessReport {
  double threshold = kDefaultThreshold;
  double accuracy = 0.0;
  double dp = 0.0;
  double eo = 0.0;
  // Keyed by (group, label).
  std::map<std::pair<int, int>, double> per_group;

  // EO in percentage points, the unit used in result tables.
  double eo_percent() const { return 100.0 * eo; }
};

FairnessReport Evaluate(const EvalBatch& batch,
                        double threshold = kDefaultThreshold);

// Flat JSON object: threshold, accuracy, dp, eo, eo_percent, rate_a{a}_y{y}.
std::string ReportToJson(const FairnessReport& report);
FairnessReport ReportFromJson(const std::string& json);

// CSV columns: threshold,accuracy,dp,eo, then rate_a{a}_y{y} in (a, y) order.
std::string ReportCsvHeader(const FairnessReport& report);
std::string ReportCsvRow(const FairnessReport& report);

}  // namespace logits_mmd::metrics

#endif  // LOGITS_MMD_FAIRNESS_METRICS_H_
