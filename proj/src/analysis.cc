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

#include "logits_mmd/analysis.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "logits_mmd/csv.h"
#include "logits_mmd/errors.h"

namespace logits_mmd::analysis {
namespace {

constexpr double kBandwidthFloor = 1e-3;
// Kernel standard deviations that must fit between a sample and the grid end.
constexpr double kEdgeSigmas = 2.5;

// Linear-interpolation quantile of sorted data.
double Quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  return out;
}

}  // namespace

std::vector<double> LinearGrid(double lo, double hi, int points) {
  if (points < 2 || !(lo < hi)) {
    throw DomainError(fmt::format("invalid grid [{}, {}] with {} points", lo, hi, points));
  }
  std::vector<double> grid(points);
  const double step = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) grid[i] = lo + step * i;
  grid.back() = hi;
  return grid;
}

std::vector<double> ConfidenceGrid() { return LinearGrid(-0.05, 1.05, 256); }

double SilvermanBandwidth(std::span<const double> samples) {
  if (samples.size() < 2) throw DomainError("bandwidth needs at least two samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / (n - 1.0));
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = Quantile(sorted, 0.75) - Quantile(sorted, 0.25);
  const double h = 0.9 * std::min(sd, iqr / 1.34) * std::pow(n, -0.2);
  return std::max(h, kBandwidthFloor);
}

DensityEstimate Kde(std::span<const double> samples, std::span<const double> grid) {
  if (samples.size() < 2) throw DomainError("KDE needs at least two samples");
  if (grid.size() < 2) throw DomainError("KDE grid needs at least two points");
  for (double v : samples) {
    if (!std::isfinite(v)) throw DomainError("KDE sample is not finite");
  }
  double widest_step = 0.0;
  for (size_t g = 1; g < grid.size(); ++g) {
    if (!(grid[g] > grid[g - 1])) throw DomainError("KDE grid must be increasing");
    widest_step = std::max(widest_step, grid[g] - grid[g - 1]);
  }
  DensityEstimate out;
  out.grid.assign(grid.begin(), grid.end());
  // Cap the bandwidth so every sample keeps all but a sliver of its kernel
  // mass on the grid; never go below the grid resolution.
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double margin = std::min(*lo_it - grid.front(), grid.back() - *hi_it);
  double h_rule = SilvermanBandwidth(samples);
  if (margin > 0.0) h_rule = std::min(h_rule, margin / kEdgeSigmas);
  out.bandwidth = std::max(h_rule, widest_step);
  const double h = out.bandwidth;
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h *
                             std::sqrt(2.0 * std::numbers::pi));
  out.density.resize(grid.size());
  for (size_t g = 0; g < grid.size(); ++g) {
    double total = 0.0;
    for (double c : samples) {
      const double u = (grid[g] - c) / h;
      total += std::exp(-0.5 * u * u);
    }
    out.density[g] = total * norm;
  }
  return out;
}

double TrapezoidIntegral(const DensityEstimate& estimate) {
  double total = 0.0;
  for (size_t g = 1; g < estimate.grid.size(); ++g) {
    total += 0.5 * (estimate.density[g] + estimate.density[g - 1]) *
             (estimate.grid[g] - estimate.grid[g - 1]);
  }
  return total;
}

CellDensities GroupPdfs(const model::MlpModel& model, const data::Dataset& eval,
                        std::span<const double> grid) {
  eval.Validate();
  const auto logits = model::Logits(model, eval.x);
  CellDensities out;
  for (int a = 0; a < eval.group_count(); ++a) {
    for (int y = 0; y <= 1; ++y) {
      std::vector<double> confidences;
      for (size_t i = 0; i < eval.size(); ++i) {
        if (eval.a[i] == a && eval.y[i] == y) {
          confidences.push_back(metrics::Sigmoid(logits[i]));
        }
      }
      if (confidences.size() < 2) {
        throw EmptyCellError(a, y, fmt::format(
            "cell (a={}, y={}) has {} samples, density needs at least 2", a, y,
            confidences.size()));
      }
      out[{a, y}] = Kde(confidences, grid);
    }
  }
  return out;
}

double PdfGap(const DensityEstimate& p, const DensityEstimate& q) {
  if (p.grid != q.grid || p.density.size() != p.grid.size() ||
      q.density.size() != q.grid.size()) {
    throw DomainError("pdf gap needs estimates on an identical grid");
  }
  double total = 0.0;
  for (size_t g = 1; g < p.grid.size(); ++g) {
    const double left = std::abs(p.density[g - 1] - q.density[g - 1]);
    const double right = std::abs(p.density[g] - q.density[g]);
    total += 0.5 * (left + right) * (p.grid[g] - p.grid[g - 1]);
  }
  return total;
}

double SummedPdfGap(const CellDensities& pdfs) {
  int groups = 0;
  for (const auto& [cell, _] : pdfs) groups = std::max(groups, cell.first + 1);
  double total = 0.0;
  for (int y = 0; y <= 1; ++y) {
    for (int i = 0; i < groups; ++i) {
      for (int j = i + 1; j < groups; ++j) {
        const auto pi = pdfs.find({i, y});
        const auto pj = pdfs.find({j, y});
        if (pi == pdfs.end() || pj == pdfs.end()) {
          throw DomainError(fmt::format("missing density for y={} between groups {} and {}",
                                        y, i, j));
        }
        total += PdfGap(pi->second, pj->second);
      }
    }
  }
  return total;
}

int CountModes(std::span<const double> samples, double min_relative_height) {
  if (samples.size() < 2) throw DomainError("mode count needs at least two samples");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double pad = 3.0 * SilvermanBandwidth(samples);
  const auto grid = LinearGrid(*lo_it - pad, *hi_it + pad, 512);
  const auto est = Kde(samples, grid);
  const auto& f = est.density;
  const double top = *std::max_element(f.begin(), f.end());

  std::vector<size_t> peaks;
  for (size_t g = 1; g + 1 < f.size(); ++g) {
    if (f[g] > f[g - 1] && f[g] >= f[g + 1] && f[g] >= min_relative_height * top) {
      peaks.push_back(g);
    }
  }
  bool merged = true;
  while (merged && peaks.size() > 1) {
    merged = false;
    for (size_t k = 0; k + 1 < peaks.size(); ++k) {
      const size_t l = peaks[k];
      const size_t r = peaks[k + 1];
      const double valley = *std::min_element(f.begin() + l, f.begin() + r + 1);
      if (valley >= 0.9 * std::min(f[l], f[r])) {
        peaks.erase(peaks.begin() + (f[l] < f[r] ? k : k + 1));
        merged = true;
        break;
      }
    }
  }
  return static_cast<int>(peaks.size());
}

void EmitReport(std::span<const trainer::EpochLog> logs,
                const metrics::FairnessReport& report, const CellDensities& pdfs,
                const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));

  {
    auto out = OpenForWrite(out_dir / "metrics.csv");
    out << trainer::EpochCsvHeader(report) << '\n';
    for (const auto& log : logs) out << trainer::EpochCsvRow(log) << '\n';
    if (!out) throw IoError(fmt::format("write failed for {}", (out_dir / "metrics.csv").string()));
  }
  {
    auto out = OpenForWrite(out_dir / "report.json");
    out << metrics::ReportToJson(report) << '\n';
  }
  {
    auto out = OpenForWrite(out_dir / "report.csv");
    out << metrics::ReportCsvHeader(report) << '\n' << metrics::ReportCsvRow(report) << '\n';
  }
  for (const auto& [cell, est] : pdfs) {
    const auto path = out_dir / fmt::format("pdf_a{}_y{}.csv", cell.first, cell.second);
    auto out = OpenForWrite(path);
    out << "grid,density\n";
    for (size_t g = 0; g < est.grid.size(); ++g) {
      out << csv::FormatDouble(est.grid[g]) << ',' << csv::FormatDouble(est.density[g]) << '\n';
    }
    if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
  }
}

}  // namespace logits_mmd::analysis
