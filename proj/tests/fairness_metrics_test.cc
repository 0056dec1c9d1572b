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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "logits_mmd/errors.h"

namespace logits_mmd::metrics {
namespace {

// Logit that predicts `label` at the default threshold.
double LogitFor(int label) { return label == 1 ? 1.0 : -1.0; }

// Builds a batch from (group, target, prediction) triples.
struct Row {
  int a;
  int y;
  int yhat;
};
EvalBatch FromRows(const std::vector<Row>& rows) {
  std::vector<double> logits;
  std::vector<int> y, a;
  for (const Row& r : rows) {
    logits.push_back(LogitFor(r.yhat));
    y.push_back(r.y);
    a.push_back(r.a);
  }
  return EvalBatch(logits, y, a);
}

// Literal counting of P(yhat = 1 | condition), independent of the library.
struct BruteForce {
  std::vector<double> logits;
  std::vector<int> y;
  std::vector<int> a;
  double t;

  int Pred(size_t i) const { return 1.0 / (1.0 + std::exp(-logits[i])) > t; }
  double Rate(int group, int label) const {
    double hits = 0, total = 0;
    for (size_t i = 0; i < y.size(); ++i) {
      if (a[i] != group || (label >= 0 && y[i] != label)) continue;
      total += 1;
      hits += Pred(i);
    }
    return hits / total;
  }
  int Groups() const { return *std::max_element(a.begin(), a.end()) + 1; }
  double Eo() const {
    double sum = 0;
    for (int label = 0; label <= 1; ++label)
      for (int i = 0; i < Groups(); ++i)
        for (int j = i + 1; j < Groups(); ++j)
          sum += std::abs(Rate(i, label) - Rate(j, label));
    return sum;
  }
  double Dp() const {
    double sum = 0;
    for (int i = 0; i < Groups(); ++i)
      for (int j = i + 1; j < Groups(); ++j)
        sum += std::abs(Rate(i, -1) - Rate(j, -1));
    return sum;
  }
};

TEST(Predict, StrictThreshold) {
  EXPECT_EQ(Predict(std::vector<double>{0.0}, 0.5), std::vector<int>{0});
  EXPECT_EQ(Predict(std::vector<double>{2.0, -2.0}, 0.5),
            (std::vector<int>{1, 0}));
  EXPECT_EQ(Predict(std::vector<double>{30.0, 5.0, -1.0}, 1.0),
            (std::vector<int>{0, 0, 0}));
}

TEST(Predict, ThresholdOutsideUnitIntervalIsAnError) {
  EXPECT_THROW(Predict(std::vector<double>{0.0}, 1.5), DomainError);
  EXPECT_THROW(Predict(std::vector<double>{0.0}, -0.1), DomainError);
}

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_EQ(Sigmoid(0.0), 0.5);
  EXPECT_NEAR(Sigmoid(2.0), 0.880797, 1e-6);
  EXPECT_GE(Sigmoid(-800.0), 0.0);
  EXPECT_LT(Sigmoid(-800.0), 1e-300);
  EXPECT_EQ(Sigmoid(800.0), 1.0);
}

TEST(EvalBatch, ValidatesInputs) {
  EXPECT_THROW(EvalBatch({}, {}, {}), DomainError);
  EXPECT_THROW(EvalBatch({0.0}, {0, 1}, {0}), DomainError);
  EXPECT_THROW(EvalBatch({0.0}, {2}, {0}), DomainError);
  // Sensitive values must cover 0..M without gaps.
  EXPECT_THROW(EvalBatch({0.0, 1.0}, {0, 1}, {0, 2}), DomainError);
}

TEST(GroupRate, Counts) {
  const auto batch = FromRows({{0, 1, 1}, {0, 1, 0}, {0, 1, 0}, {0, 1, 1},
                               {1, 1, 1}, {1, 0, 0}});
  EXPECT_EQ(GroupRate(batch, 0, 1, 0.5), 0.5);
  EXPECT_EQ(GroupRate(batch, 1, 1, 0.5), 1.0);
}

TEST(GroupRate, EmptyCellIsAnError) {
  const auto batch = FromRows({{0, 1, 1}, {1, 1, 1}});
  try {
    GroupRate(batch, 0, 0, 0.5);
    FAIL() << "expected EmptyCellError";
  } catch (const EmptyCellError& e) {
    EXPECT_EQ(e.group(), 0);
    EXPECT_EQ(e.label(), 0);
  }
  EXPECT_THROW(EqualizedOdds(batch, 0.5), EmptyCellError);
}

TEST(DemographicParity, HandCases) {
  EXPECT_EQ(DemographicParity(FromRows({{0, 0, 1}, {0, 1, 1}, {1, 0, 1},
                                        {1, 1, 1}}),
                              0.5),
            0.0);
  // Group 0 rate 3/4, group 1 rate 1/4.
  const auto eight = FromRows({{0, 0, 1}, {0, 1, 1}, {0, 0, 1}, {0, 1, 0},
                               {1, 0, 0}, {1, 1, 1}, {1, 0, 0}, {1, 1, 0}});
  EXPECT_DOUBLE_EQ(DemographicParity(eight, 0.5), 0.5);
}

TEST(DemographicParity, ThreeGroupsSumUnorderedPairs) {
  // Rates 0.2, 0.5 and 0.9 from 10 rows per group.
  std::vector<Row> rows;
  const int positives[] = {2, 5, 9};
  for (int g = 0; g < 3; ++g)
    for (int i = 0; i < 10; ++i) rows.push_back({g, i % 2, i < positives[g]});
  EXPECT_NEAR(DemographicParity(FromRows(rows), 0.5), 1.4, 1e-12);
}

TEST(EqualizedOdds, PerfectClassifierIsFair) {
  const auto batch = FromRows({{0, 0, 0}, {0, 1, 1}, {1, 0, 0}, {1, 1, 1}});
  EXPECT_EQ(EqualizedOdds(batch, 0.5), 0.0);
  EXPECT_EQ(Accuracy(batch, 0.5), 1.0);
}

TEST(EqualizedOdds, SixteenRowHandCase) {
  // P_{0,1}=1, P_{1,1}=0.5, P_{0,0}=0, P_{1,0}=0.25; four rows per cell.
  std::vector<Row> rows;
  const int positives[2][2] = {{0, 4}, {1, 2}};  // [a][y]
  for (int a = 0; a < 2; ++a)
    for (int y = 0; y < 2; ++y)
      for (int i = 0; i < 4; ++i) rows.push_back({a, y, i < positives[a][y]});
  const auto batch = FromRows(rows);
  EXPECT_DOUBLE_EQ(EqualizedOdds(batch, 0.5), 0.75);
  const auto report = Evaluate(batch);
  EXPECT_EQ(report.per_group.at({1, 0}), 0.25);
  EXPECT_DOUBLE_EQ(report.eo_percent(), 75.0);
}

TEST(EqualizedOdds, ThreeIdenticalGroupsAreFair) {
  std::vector<Row> rows;
  for (int a = 0; a < 3; ++a)
    for (int y = 0; y < 2; ++y) {
      rows.push_back({a, y, 1});
      rows.push_back({a, y, 0});
    }
  EXPECT_EQ(EqualizedOdds(FromRows(rows), 0.5), 0.0);
}

TEST(Accuracy, Counts) {
  EXPECT_EQ(Accuracy(FromRows({{0, 0, 1}, {0, 1, 0}, {1, 0, 1}, {1, 1, 0}}),
                     0.5),
            0.0);
  EXPECT_EQ(Accuracy(FromRows({{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}}),
                     0.5),
            0.75);
}

TEST(Thresholds, UpperEndpointZeroesEverything) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z(0.0, 3.0);
  std::vector<double> logits;
  std::vector<int> y, a;
  for (int i = 0; i < 40; ++i) {
    logits.push_back(z(rng));
    y.push_back(i % 2);
    a.push_back((i / 2) % 2);
  }
  const EvalBatch batch(logits, y, a);
  EXPECT_EQ(EqualizedOdds(batch, 1.0), 0.0);
  EXPECT_EQ(DemographicParity(batch, 1.0), 0.0);
}

TEST(Oracle, RandomBatchesMatchBruteForce) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> z(0.0, 2.0);
  std::uniform_int_distribution<int> groups_dist(2, 4);
  std::uniform_int_distribution<int> size_dist(0, 64);
  std::uniform_real_distribution<double> t_dist(0.0, 1.0);
  int checked = 0;
  while (checked < 500) {
    const int groups = groups_dist(rng);
    const int n = std::max(2 * groups, size_dist(rng));
    BruteForce bf;
    // One row per cell first so every cell is populated.
    for (int i = 0; i < n; ++i) {
      const int cell = i < 2 * groups
                           ? i
                           : std::uniform_int_distribution<int>(0, 2 * groups - 1)(rng);
      bf.a.push_back(cell / 2);
      bf.y.push_back(cell % 2);
      bf.logits.push_back(z(rng));
    }
    bf.t = checked % 5 == 0 ? 0.5 : t_dist(rng);
    const EvalBatch batch(bf.logits, bf.y, bf.a);
    EXPECT_NEAR(EqualizedOdds(batch, bf.t), bf.Eo(), 1e-12);
    EXPECT_NEAR(DemographicParity(batch, bf.t), bf.Dp(), 1e-12);
    ++checked;
  }
}

TEST(Oracle, TwoGroupEoIsTheTwoTermDefinition) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> logits;
    std::vector<int> y, a;
    for (int i = 0; i < 24; ++i) {
      logits.push_back(z(rng));
      y.push_back(i % 2);
      a.push_back((i / 2) % 2);
    }
    const EvalBatch batch(logits, y, a);
    const double two_term =
        std::abs(GroupRate(batch, 0, 0, 0.5) - GroupRate(batch, 1, 0, 0.5)) +
        std::abs(GroupRate(batch, 0, 1, 0.5) - GroupRate(batch, 1, 1, 0.5));
    EXPECT_EQ(EqualizedOdds(batch, 0.5), two_term);
  }
}

TEST(Invariance, RowShuffleAndRelabel) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z(0.0, 2.0);
  std::vector<double> logits;
  std::vector<int> y, a;
  for (int i = 0; i < 60; ++i) {
    logits.push_back(z(rng));
    y.push_back(i % 2);
    a.push_back((i / 2) % 3);
  }
  const auto base = Evaluate(EvalBatch(logits, y, a));

  std::vector<size_t> order(logits.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<double> l2;
  std::vector<int> y2, a2;
  for (size_t i : order) {
    l2.push_back(logits[i]);
    y2.push_back(y[i]);
    a2.push_back(a[i]);
  }
  const auto shuffled = Evaluate(EvalBatch(l2, y2, a2));
  EXPECT_EQ(shuffled.eo, base.eo);
  EXPECT_EQ(shuffled.dp, base.dp);
  EXPECT_EQ(shuffled.accuracy, base.accuracy);

  for (int& g : a2) g = (g + 1) % 3;
  const auto relabeled = Evaluate(EvalBatch(l2, y2, a2));
  EXPECT_NEAR(relabeled.eo, base.eo, 1e-15);
  EXPECT_NEAR(relabeled.dp, base.dp, 1e-15);
}

TEST(Report, RecomputesFromPerGroupTable) {
  const auto batch = FromRows({{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 0, 0},
                               {1, 1, 0}, {1, 1, 1}});
  const auto r = Evaluate(batch);
  const double eo = std::abs(r.per_group.at({0, 0}) - r.per_group.at({1, 0})) +
                    std::abs(r.per_group.at({0, 1}) - r.per_group.at({1, 1}));
  EXPECT_EQ(r.eo, eo);
  EXPECT_EQ(r.per_group.size(), 4u);
}

TEST(Report, JsonAndCsvRoundTrip) {
  const auto batch = FromRows({{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 0, 0},
                               {1, 1, 0}, {1, 1, 1}, {2, 0, 1}, {2, 1, 1}});
  const auto r = Evaluate(batch, 0.3);
  const auto back = ReportFromJson(ReportToJson(r));
  EXPECT_EQ(back.threshold, r.threshold);
  EXPECT_EQ(back.accuracy, r.accuracy);
  EXPECT_EQ(back.dp, r.dp);
  EXPECT_EQ(back.eo, r.eo);
  EXPECT_EQ(back.per_group, r.per_group);
  EXPECT_EQ(ReportCsvHeader(r).substr(0, 24), "threshold,accuracy,dp,eo");
  EXPECT_NE(ReportCsvHeader(r).find("rate_a2_y1"), std::string::npos);
  EXPECT_THROW(ReportFromJson("{not json"), ParseError);
}

}  // namespace
}  // namespace logits_mmd::metrics
