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

#ifndef LOGITS_MMD_ANALYSIS_H_
#define LOGITS_MMD_ANALYSIS_H_

#include <filesystem>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "logits_mmd/data.h"
#include "logits_mmd/fairness_metrics.h"
#include "logits_mmd/mlp.h"
#include "logits_mmd/trainer.h"

namespace logits_mmd::analysis {

// `points` evenly spaced values from lo to hi inclusive.
std::vector<double> LinearGrid(double lo, double hi, int points);

// Confidence axis padded past [0, 1] so boundary smoothing stays visible:
// 256 points over [-0.05, 1.05].
std::vector<double> ConfidenceGrid();

struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

// 0.9 * min(std, IQR / 1.34) * n^(-1/5), floored at 1e-3.
double SilvermanBandwidth(std::span<const double> samples);

// Gaussian KDE evaluated on `grid`. The bandwidth is the Silverman rule,
// capped at 1/2.5 of the gap between the extreme samples and the grid ends
// (so the estimate integrates to ~1 on the grid) and floored at the widest
// grid step (so it stays resolvable). Requires n >= 2.
DensityEstimate Kde(std::span<const double> samples, std::span<const double> grid);

double TrapezoidIntegral(const DensityEstimate& estimate);

using CellDensities = std::map<std::pair<int, int>, DensityEstimate>;

// Per-(a, y) KDE of sigmoid(logit) on a shared grid. Throws EmptyCellError
// naming a cell with fewer than two rows.
CellDensities GroupPdfs(const model::MlpModel& model, const data::Dataset& eval,
                        std::span<const double> grid);

// Trapezoidal L1 distance between two estimates on the same grid.
double PdfGap(const DensityEstimate& p, const DensityEstimate& q);

// Sum over y and unordered group pairs of PdfGap.
double SummedPdfGap(const CellDensities& pdfs);

// Number of modes of a KDE of `samples`: local maxima at least
// min_relative_height of the tallest one, where two neighbouring maxima
// count once unless the density between them dips below 90% of the
// smaller peak.
int CountModes(std::span<const double> samples, double min_relative_height = 0.1);

// Writes metrics.csv (one row per epoch), report.json, report.csv and
// pdf_a{a}_y{y}.csv (grid,density) into out_dir, creating it if needed.
void EmitReport(std::span<const trainer::EpochLog> logs,
                const metrics::FairnessReport& report, const CellDensities& pdfs,
                const std::filesystem::path& out_dir);

}  // namespace logits_mmd::analysis

#endif  // LOGITS_MMD_ANALYSIS_H_
