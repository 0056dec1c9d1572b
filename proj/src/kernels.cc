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

#include "logits_mmd/kernels.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include <fmt/format.h>

#include "logits_mmd/errors.h"

namespace logits_mmd::kernels {
namespace {

void CheckSigma(double sigma) {
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    throw DomainError(fmt::format("RBF bandwidth must be finite and > 0, got {}", sigma));
  }
}

void CheckFinite(std::span<const double> values, const char* what) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw DomainError(fmt::format("{}[{}] is not finite", what, i));
    }
  }
}

void CheckNonEmpty(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw DomainError("MMD needs two non-empty sample sets");
  }
}

// Orders the pair so that (a, b) and (b, a) run the identical arithmetic.
bool ShouldSwap(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return a.size() > b.size();
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

double KernelSum(std::span<const double> x, std::span<const double> y,
                 double inv_two_sigma_sq) {
  const Eigen::Map<const Eigen::ArrayXd> ys(y.data(),
                                            static_cast<Eigen::Index>(y.size()));
  double total = 0.0;
  for (double xi : x) {
    total += (-(ys - xi).square() * inv_two_sigma_sq).exp().sum();
  }
  return total;
}

// KernelSum(x, x) using k(u, v) = k(v, u): strict upper triangle twice plus
// the unit diagonal.
double KernelSelfSum(std::span<const double> x, double inv_two_sigma_sq) {
  const Eigen::Map<const Eigen::ArrayXd> xs(x.data(),
                                            static_cast<Eigen::Index>(x.size()));
  double upper = 0.0;
  for (Eigen::Index i = 0; i + 1 < xs.size(); ++i) {
    const auto tail = xs.tail(xs.size() - i - 1);
    upper += (-(tail - xs[i]).square() * inv_two_sigma_sq).exp().sum();
  }
  return 2.0 * upper + static_cast<double>(x.size());
}

double MmdOrdered(std::span<const double> x, std::span<const double> y,
                  double sigma) {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double sxx = KernelSelfSum(x, inv);
  const double syy = KernelSelfSum(y, inv);
  const double sxy = KernelSum(x, y, inv);
  return sxx / (nx * nx) + syy / (ny * ny) - 2.0 * sxy / (nx * ny);
}

// Number of pairs i < j with sorted[j] - sorted[i] <= limit.
uint64_t CountPairsWithin(const std::vector<double>& sorted, double limit) {
  uint64_t count = 0;
  size_t lo = 0;
  for (size_t hi = 0; hi < sorted.size(); ++hi) {
    while (sorted[hi] - sorted[lo] > limit) ++lo;
    count += hi - lo;
  }
  return count;
}

// k-th smallest (1-based) pairwise difference. Non-negative doubles order the
// same way as their bit patterns, so bisecting on the bits is exact.
double KthPairwiseDifference(const std::vector<double>& sorted, uint64_t k) {
  uint64_t lo = 0;
  uint64_t hi = std::bit_cast<uint64_t>(sorted.back() - sorted.front());
  while (lo < hi) {
    const uint64_t mid = lo + (hi - lo) / 2;
    if (CountPairsWithin(sorted, std::bit_cast<double>(mid)) >= k) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return std::bit_cast<double>(lo);
}

}  // namespace

KernelConfig KernelConfig::Fixed(double sigma) {
  CheckSigma(sigma);
  KernelConfig cfg;
  cfg.policy_ = Policy::kFixed;
  cfg.sigma_ = sigma;
  return cfg;
}

double RbfKernel(double x, double y, double sigma) {
  CheckSigma(sigma);
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw DomainError("RBF kernel arguments must be finite");
  }
  const double d = x - y;
  return std::exp(-d * d / (2.0 * sigma * sigma));
}

double RbfKernel(std::span<const double> x, std::span<const double> y,
                 double sigma) {
  CheckSigma(sigma);
  if (x.size() != y.size()) {
    throw DomainError(fmt::format("RBF kernel dimension mismatch: {} vs {}",
                                  x.size(), y.size()));
  }
  CheckFinite(x, "x");
  CheckFinite(y, "y");
  double sq = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sq += d * d;
  }
  return std::exp(-sq / (2.0 * sigma * sigma));
}

Eigen::MatrixXd GramMatrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           double sigma) {
  CheckSigma(sigma);
  if (a.cols() != b.cols()) {
    throw DomainError(fmt::format("Gram matrix dimension mismatch: {} vs {}",
                                  a.cols(), b.cols()));
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw DomainError("Gram matrix inputs must be finite");
  }
  const double inv = 1.0 / (2.0 * sigma * sigma);
  Eigen::MatrixXd gram(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      gram(i, j) = std::exp(-(a.row(i) - b.row(j)).squaredNorm() * inv);
    }
  }
  return gram;
}

double MedianHeuristicBandwidth(std::span<const double> a,
                                std::span<const double> b) {
  if (a.size() + b.size() < 2) {
    throw DomainError("median heuristic needs at least two pooled samples");
  }
  CheckFinite(a, "a");
  CheckFinite(b, "b");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());

  const uint64_t n = pooled.size();
  const uint64_t pairs = n * (n - 1) / 2;
  double median;
  if (pairs % 2 == 1) {
    median = KthPairwiseDifference(pooled, (pairs + 1) / 2);
  } else {
    median = 0.5 * (KthPairwiseDifference(pooled, pairs / 2) +
                    KthPairwiseDifference(pooled, pairs / 2 + 1));
  }
  return median > 0.0 ? median : 1.0;
}

double ResolveBandwidth(const KernelConfig& cfg, std::span<const double> a,
                        std::span<const double> b) {
  if (cfg.policy() == KernelConfig::Policy::kFixed) return cfg.sigma();
  return MedianHeuristicBandwidth(a, b);
}

double MmdSquared(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                  double sigma) {
  if (a.rows() == 0 || b.rows() == 0) {
    throw DomainError("MMD needs two non-empty sample sets");
  }
  const double na = static_cast<double>(a.rows());
  const double nb = static_cast<double>(b.rows());
  return GramMatrix(a, a, sigma).sum() / (na * na) +
         GramMatrix(b, b, sigma).sum() / (nb * nb) -
         2.0 * GramMatrix(a, b, sigma).sum() / (na * nb);
}

double MmdSquared(std::span<const double> a, std::span<const double> b,
                  const KernelConfig& cfg) {
  CheckNonEmpty(a, b);
  CheckFinite(a, "a");
  CheckFinite(b, "b");
  const double sigma = ResolveBandwidth(cfg, a, b);
  CheckSigma(sigma);
  if (ShouldSwap(a, b)) return MmdOrdered(b, a, sigma);
  return MmdOrdered(a, b, sigma);
}

MmdGradient MmdSquaredGrad(std::span<const double> a,
                           std::span<const double> b, const KernelConfig& cfg) {
  CheckNonEmpty(a, b);
  CheckFinite(a, "a");
  CheckFinite(b, "b");
  const double sigma = ResolveBandwidth(cfg, a, b);
  CheckSigma(sigma);

  const bool swapped = ShouldSwap(a, b);
  const std::span<const double> x = swapped ? b : a;
  const std::span<const double> y = swapped ? a : b;

  const double inv = 1.0 / (2.0 * sigma * sigma);
  const double inv_sq = 1.0 / (sigma * sigma);
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double self_x = 2.0 / (nx * nx);
  const double self_y = 2.0 / (ny * ny);
  const double cross = 2.0 / (nx * ny);

  // d k(u, v) / du = -(u - v) / sigma^2 * k(u, v)
  std::vector<double> gx(x.size(), 0.0);
  std::vector<double> gy(y.size(), 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    double acc = 0.0;
    for (size_t j = 0; j < x.size(); ++j) {
      const double d = x[i] - x[j];
      acc += -d * inv_sq * std::exp(-d * d * inv);
    }
    gx[i] += self_x * acc;
  }
  for (size_t i = 0; i < y.size(); ++i) {
    double acc = 0.0;
    for (size_t j = 0; j < y.size(); ++j) {
      const double d = y[i] - y[j];
      acc += -d * inv_sq * std::exp(-d * d * inv);
    }
    gy[i] += self_y * acc;
  }
  for (size_t i = 0; i < x.size(); ++i) {
    for (size_t j = 0; j < y.size(); ++j) {
      const double d = x[i] - y[j];
      const double dk = -d * inv_sq * std::exp(-d * d * inv);
      gx[i] -= cross * dk;
      gy[j] += cross * dk;
    }
  }

  MmdGradient out;
  out.value = MmdOrdered(x, y, sigma);
  out.sigma = sigma;
  out.grad_a = swapped ? std::move(gy) : std::move(gx);
  out.grad_b = swapped ? std::move(gx) : std::move(gy);
  return out;
}

}  // namespace logits_mmd::kernels
