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

#include "logits_mmd/fairness_metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <fmt/format.h>
#include <json.hpp>

#include "logits_mmd/csv.h"
#include "logits_mmd/errors.h"

namespace logits_mmd::metrics {
namespace {

void CheckThreshold(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError(fmt::format("threshold must lie in [0, 1], got {}", t));
  }
}

std::string RateKey(int group, int label) {
  return fmt::format("rate_a{}_y{}", group, label);
}

}  // namespace

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

EvalBatch::EvalBatch(std::vector<double> logits, std::vector<int> targets,
                     std::vector<int> sensitive)
    : logits_(std::move(logits)),
      targets_(std::move(targets)),
      sensitive_(std::move(sensitive)) {
  if (logits_.empty()) throw DomainError("evaluation batch is empty");
  if (logits_.size() != targets_.size() ||
      logits_.size() != sensitive_.size()) {
    throw DomainError(fmt::format(
        "evaluation batch length mismatch: logits {}, targets {}, sensitive {}",
        logits_.size(), targets_.size(), sensitive_.size()));
  }
  for (size_t i = 0; i < logits_.size(); ++i) {
    if (!std::isfinite(logits_[i])) {
      throw DomainError(fmt::format("logit {} is not finite", i));
    }
    if (targets_[i] != 0 && targets_[i] != 1) {
      throw DomainError(fmt::format("target {} is {}, expected 0 or 1", i,
                                    targets_[i]));
    }
    if (sensitive_[i] < 0) {
      throw DomainError(fmt::format("sensitive value {} is negative", i));
    }
  }
  group_count_ = *std::max_element(sensitive_.begin(), sensitive_.end()) + 1;
  std::vector<bool> seen(group_count_, false);
  for (int a : sensitive_) seen[a] = true;
  for (int a = 0; a < group_count_; ++a) {
    if (!seen[a]) {
      throw DomainError(fmt::format(
          "sensitive values must cover 0..{} contiguously; {} is missing",
          group_count_ - 1, a));
    }
  }
}

std::vector<int> Predict(std::span<const double> logits, double threshold) {
  CheckThreshold(threshold);
  std::vector<int> out(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = Sigmoid(logits[i]) > threshold ? 1 : 0;
  }
  return out;
}

double GroupRate(const EvalBatch& batch, int group, int label,
                 double threshold) {
  CheckThreshold(threshold);
  size_t members = 0;
  size_t positives = 0;
  for (size_t i = 0; i < batch.size(); ++i) {
    if (batch.sensitive()[i] != group || batch.targets()[i] != label) continue;
    ++members;
    if (Sigmoid(batch.logits()[i]) > threshold) ++positives;
  }
  if (members == 0) {
    throw EmptyCellError(group, label,
                         fmt::format("cell (a={}, y={}) is empty", group, label));
  }
  return static_cast<double>(positives) / static_cast<double>(members);
}

double PositiveRate(const EvalBatch& batch, int group, double threshold) {
  CheckThreshold(threshold);
  size_t members = 0;
  size_t positives = 0;
  for (size_t i = 0; i < batch.size(); ++i) {
    if (batch.sensitive()[i] != group) continue;
    ++members;
    if (Sigmoid(batch.logits()[i]) > threshold) ++positives;
  }
  if (members == 0) {
    throw EmptyCellError(group, -1,
                         fmt::format("sensitive group a={} is empty", group));
  }
  return static_cast<double>(positives) / static_cast<double>(members);
}

double DemographicParity(const EvalBatch& batch, double threshold) {
  std::vector<double> rates(batch.group_count());
  for (int a = 0; a < batch.group_count(); ++a) {
    rates[a] = PositiveRate(batch, a, threshold);
  }
  double total = 0.0;
  for (int i = 0; i < batch.group_count(); ++i) {
    for (int j = i + 1; j < batch.group_count(); ++j) {
      total += std::abs(rates[i] - rates[j]);
    }
  }
  return total;
}

double EqualizedOdds(const EvalBatch& batch, double threshold) {
  const int groups = batch.group_count();
  double total = 0.0;
  for (int y = 0; y <= 1; ++y) {
    std::vector<double> rates(groups);
    for (int a = 0; a < groups; ++a) rates[a] = GroupRate(batch, a, y, threshold);
    for (int i = 0; i < groups; ++i) {
      for (int j = i + 1; j < groups; ++j) {
        total += std::abs(rates[i] - rates[j]);
      }
    }
  }
  return total;
}

double Accuracy(const EvalBatch& batch, double threshold) {
  const auto predicted = Predict(batch.logits(), threshold);
  size_t correct = 0;
  for (size_t i = 0; i < batch.size(); ++i) {
    if (predicted[i] == batch.targets()[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.size());
}

FairnessReport Evaluate(const EvalBatch& batch, double threshold) {
  FairnessReport report;
  report.threshold = threshold;
  report.accuracy = Accuracy(batch, threshold);
  report.dp = DemographicParity(batch, threshold);
  report.eo = EqualizedOdds(batch, threshold);
  for (int a = 0; a < batch.group_count(); ++a) {
    for (int y = 0; y <= 1; ++y) {
      report.per_group[{a, y}] = GroupRate(batch, a, y, threshold);
    }
  }
  return report;
}

std::string ReportToJson(const FairnessReport& report) {
  nlohmann::ordered_json j;
  j["threshold"] = report.threshold;
  j["accuracy"] = report.accuracy;
  j["dp"] = report.dp;
  j["eo"] = report.eo;
  j["eo_percent"] = report.eo_percent();
  for (const auto& [cell, rate] : report.per_group) {
    j[RateKey(cell.first, cell.second)] = rate;
  }
  return j.dump(2);
}

FairnessReport ReportFromJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("fairness report: {}", e.what()));
  }
  FairnessReport report;
  try {
    report.threshold = j.at("threshold").get<double>();
    report.accuracy = j.at("accuracy").get<double>();
    report.dp = j.at("dp").get<double>();
    report.eo = j.at("eo").get<double>();
    for (const auto& [key, value] : j.items()) {
      int a = 0;
      int y = 0;
      if (std::sscanf(key.c_str(), "rate_a%d_y%d", &a, &y) == 2) {
        report.per_group[{a, y}] = value.get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("fairness report: {}", e.what()));
  }
  return report;
}

std::string ReportCsvHeader(const FairnessReport& report) {
  std::string header = "threshold,accuracy,dp,eo";
  for (const auto& [cell, rate] : report.per_group) {
    header += "," + RateKey(cell.first, cell.second);
  }
  return header;
}

std::string ReportCsvRow(const FairnessReport& report) {
  std::string row = fmt::format(
      "{},{},{},{}", csv::FormatDouble(report.threshold),
      csv::FormatDouble(report.accuracy), csv::FormatDouble(report.dp),
      csv::FormatDouble(report.eo));
  for (const auto& [cell, rate] : report.per_group) {
    row += "," + csv::FormatDouble(rate);
  }
  return row;
}

}  // namespace logits_mmd::metrics
