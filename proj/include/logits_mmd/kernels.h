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

#ifndef LOGITS_MMD_KERNELS_H_
#define LOGITS_MMD_KERNELS_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace logits_mmd::kernels {

// RBF bandwidth policy. The median heuristic is re-evaluated on every call
// from the pooled pair of sample sets.
class KernelConfig {
 public:
  enum class Policy { kFixed, kMedianHeuristic };

  static KernelConfig Fixed(double sigma);
  static KernelConfig MedianHeuristic() { return KernelConfig(); }

  KernelConfig() = default;

  Policy policy() const { return policy_; }
  // Only meaningful for kFixed.
  double sigma() const { return sigma_; }

 private:
  Policy policy_ = Policy::kMedianHeuristic;
  double sigma_ = 1.0;
};

// exp(-(x - y)^2 / (2 sigma^2)).
double RbfKernel(double x, double y, double sigma);

// Vector form, ||x - y||^2 in the exponent. Dimensions must match.
double RbfKernel(std::span<const double> x, std::span<const double> y,
                 double sigma);

// K(i, j) = k(a.row(i), b.row(j)). Rows are points of dimension a.cols().
Eigen::MatrixXd GramMatrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           double sigma);

// Median of all pairwise absolute differences over the pooled samples,
// or 1.0 when that median is zero. Requires at least two pooled values.
double MedianHeuristicBandwidth(std::span<const double> a,
                                std::span<const double> b);

// Bandwidth that `cfg` selects for the pair (a, b).
double ResolveBandwidth(const KernelConfig& cfg, std::span<const double> a,
                        std::span<const double> b);

// Biased (V-statistic) squared MMD between point sets given as rows.
double MmdSquared(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                  double sigma);

// Scalar sample sets. Symmetric in (a, b) bit-for-bit.
double MmdSquared(std::span<const double> a, std::span<const double> b,
                  const KernelConfig& cfg);

struct MmdGradient {
  double value = 0.0;
  double sigma = 1.0;
  std::vector<double> grad_a;
  std::vector<double> grad_b;
};

// Value and derivative of MmdSquared with respect to every element of a and
// b. The bandwidth is held constant; no gradient flows through the median.
MmdGradient MmdSquaredGrad(std::span<const double> a,
                           std::span<const double> b, const KernelConfig& cfg);

}  // namespace logits_mmd::kernels

#endif  // LOGITS_MMD_KERNELS_H_
