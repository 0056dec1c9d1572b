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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "logits_mmd/errors.h"
#include "test_util.h"

namespace logits_mmd::kernels {
namespace {

using test_util::NumericGradient;
using test_util::RelativeError;

// Direct triple sum of the V-statistic, written independently of the library.
double BruteMmd(const std::vector<double>& a, const std::vector<double>& b,
                double sigma) {
  auto k = [sigma](double x, double y) {
    return std::exp(-(x - y) * (x - y) / (2.0 * sigma * sigma));
  };
  double aa = 0.0, bb = 0.0, ab = 0.0;
  for (double x : a)
    for (double y : a) aa += k(x, y);
  for (double x : b)
    for (double y : b) bb += k(x, y);
  for (double x : a)
    for (double y : b) ab += k(x, y);
  const double na = a.size(), nb = b.size();
  return aa / (na * na) + bb / (nb * nb) - 2.0 * ab / (na * nb);
}

// Median of all pooled pairwise distances by explicit enumeration.
double BruteMedian(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> d;
  for (size_t i = 0; i < pooled.size(); ++i)
    for (size_t j = i + 1; j < pooled.size(); ++j)
      d.push_back(std::abs(pooled[i] - pooled[j]));
  const double m = test_util::MedianOf(d);
  return m == 0.0 ? 1.0 : m;
}

TEST(RbfKernel, IdentityIsOne) { EXPECT_EQ(RbfKernel(3.7, 3.7, 1.0), 1.0); }

TEST(RbfKernel, HandValues) {
  EXPECT_NEAR(RbfKernel(0.0, 1.0, 1.0), 0.606531, 1e-6);
  EXPECT_NEAR(RbfKernel(0.0, 2.0, 2.0), 0.606531, 1e-6);
  EXPECT_DOUBLE_EQ(RbfKernel(0.0, 1.0, 1.0), std::exp(-0.5));
}

TEST(RbfKernel, SymmetricAndBounded) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 1000; ++t) {
    const auto v = test_util::Uniform(rng, 3, -5.0, 5.0);
    const double sigma = 0.5 + std::abs(v[2]);
    const double k = RbfKernel(v[0], v[1], sigma);
    EXPECT_EQ(k, RbfKernel(v[1], v[0], sigma));
    EXPECT_GT(k, 0.0);
    EXPECT_LE(k, 1.0);
  }
}

TEST(RbfKernel, RejectsBadArguments) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(RbfKernel(0.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(RbfKernel(0.0, 1.0, -1.0), DomainError);
  EXPECT_THROW(RbfKernel(nan, 1.0, 1.0), DomainError);
  EXPECT_THROW(RbfKernel(0.0, std::numeric_limits<double>::infinity(), 1.0),
               DomainError);
  EXPECT_THROW(KernelConfig::Fixed(0.0), DomainError);
}

TEST(RbfKernel, VectorFormMatchesSquaredNorm) {
  const std::vector<double> x = {1.0, 2.0, 3.0};
  const std::vector<double> y = {0.0, 2.5, 1.0};
  const double sq = 1.0 + 0.25 + 4.0;
  EXPECT_DOUBLE_EQ(RbfKernel(x, y, 1.5), std::exp(-sq / (2.0 * 1.5 * 1.5)));
  const std::vector<double> z = {1.0};
  EXPECT_THROW(RbfKernel(x, z, 1.0), DomainError);
}

TEST(GramMatrix, MatchesPairwiseKernel) {
  std::mt19937_64 rng(3);
  Eigen::MatrixXd a(4, 3), b(5, 3);
  for (int i = 0; i < a.size(); ++i) a.data()[i] = test_util::Normal(rng, 1)[0];
  for (int i = 0; i < b.size(); ++i) b.data()[i] = test_util::Normal(rng, 1)[0];
  const Eigen::MatrixXd k = GramMatrix(a, b, 0.8);
  ASSERT_EQ(k.rows(), 4);
  ASSERT_EQ(k.cols(), 5);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double sq = (a.row(i) - b.row(j)).squaredNorm();
      EXPECT_NEAR(k(i, j), std::exp(-sq / (2.0 * 0.64)), 1e-15);
    }
  }
  EXPECT_THROW(GramMatrix(a, Eigen::MatrixXd(2, 2), 1.0), DomainError);
}

TEST(MedianHeuristic, HandCases) {
  EXPECT_EQ(MedianHeuristicBandwidth(std::vector<double>{0.0},
                                     std::vector<double>{2.0}),
            2.0);
  EXPECT_EQ(MedianHeuristicBandwidth(std::vector<double>{1.0, 1.0},
                                     std::vector<double>{1.0}),
            1.0);
  EXPECT_EQ(MedianHeuristicBandwidth(std::vector<double>{0.0, 1.0},
                                     std::vector<double>{2.0, 3.0}),
            1.5);
}

TEST(MedianHeuristic, NeedsTwoPooledValues) {
  EXPECT_THROW(MedianHeuristicBandwidth(std::vector<double>{1.0},
                                        std::vector<double>{}),
               DomainError);
}

TEST(MedianHeuristic, MatchesEnumeration) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(1, 30);
  for (int t = 0; t < 300; ++t) {
    auto a = test_util::Normal(rng, size(rng));
    auto b = test_util::Normal(rng, size(rng), 1.0, 2.0);
    if (t % 3 == 0) {
      // Ties and repeated values.
      for (double& v : a) v = std::round(v);
      for (double& v : b) v = std::round(v);
    }
    EXPECT_EQ(MedianHeuristicBandwidth(a, b), BruteMedian(a, b)) << "t=" << t;
  }
}

TEST(MmdSquared, IdenticalSetsGiveZero) {
  const std::vector<double> a = {0.3, -1.2};
  EXPECT_EQ(MmdSquared(a, a, KernelConfig::Fixed(1.0)), 0.0);
}

TEST(MmdSquared, HandValue) {
  const double expected = 2.0 - 2.0 * std::exp(-0.5);
  EXPECT_NEAR(MmdSquared(std::vector<double>{0.0}, std::vector<double>{1.0},
                         KernelConfig::Fixed(1.0)),
              expected, 1e-9);
  EXPECT_NEAR(expected, 0.786939, 1e-6);
}

TEST(MmdSquared, EmptySetIsAnError) {
  EXPECT_THROW(MmdSquared(std::vector<double>{}, std::vector<double>{1.0},
                          KernelConfig::Fixed(1.0)),
               DomainError);
}

TEST(MmdSquared, MatchesBruteForceAndMatrixForm) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto a = test_util::Normal(rng, 1 + t % 7);
    const auto b = test_util::Normal(rng, 1 + t % 5, 0.5);
    const double sigma = 0.3 + 0.05 * t;
    const double got = MmdSquared(a, b, KernelConfig::Fixed(sigma));
    EXPECT_NEAR(got, BruteMmd(a, b, sigma), 1e-12);
    const Eigen::MatrixXd ma = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
    const Eigen::MatrixXd mb = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
    EXPECT_NEAR(MmdSquared(ma, mb, sigma), got, 1e-12);
  }
}

TEST(MmdSquared, MedianPolicyUsesPooledMedian) {
  std::mt19937_64 rng(9);
  const auto a = test_util::Normal(rng, 12);
  const auto b = test_util::Normal(rng, 9, 1.0);
  const double sigma = BruteMedian(a, b);
  EXPECT_NEAR(MmdSquared(a, b, KernelConfig::MedianHeuristic()),
              BruteMmd(a, b, sigma), 1e-12);
  EXPECT_EQ(ResolveBandwidth(KernelConfig::MedianHeuristic(), a, b), sigma);
  EXPECT_EQ(ResolveBandwidth(KernelConfig::Fixed(0.7), a, b), 0.7);
}

TEST(MmdSquared, SymmetricBitForBit) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 500; ++t) {
    const auto a = test_util::Normal(rng, 1 + t % 9);
    const auto b = test_util::Normal(rng, 1 + t % 4, 0.3);
    const KernelConfig cfg = t % 2 ? KernelConfig::MedianHeuristic()
                                   : KernelConfig::Fixed(0.9);
    EXPECT_EQ(MmdSquared(a, b, cfg), MmdSquared(b, a, cfg));
  }
}

TEST(MmdSquared, NonNegativeAndZeroOnEqual) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 1000; ++t) {
    const auto a = test_util::Normal(rng, 1 + t % 11);
    const auto b = test_util::Normal(rng, 1 + t % 6, 0.2);
    EXPECT_GE(MmdSquared(a, b, KernelConfig::MedianHeuristic()), -1e-12);
    EXPECT_LE(MmdSquared(a, a, KernelConfig::MedianHeuristic()), 1e-12);
  }
}

TEST(MmdSquared, LargeSameDistributionDrawsAreClose) {
  int passed = 0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const auto a = test_util::Normal(rng, 5000);
    const auto b = test_util::Normal(rng, 5000);
    if (MmdSquared(a, b, KernelConfig::MedianHeuristic()) < 0.01) ++passed;
  }
  EXPECT_GE(passed, 19);
}

TEST(MmdSquared, ShrinksWithSampleSize) {
  std::vector<double> medians;
  for (int n : {10, 100, 1000}) {
    std::vector<double> values;
    for (uint64_t seed = 0; seed < 9; ++seed) {
      std::mt19937_64 rng(seed * 31 + n);
      const auto a = test_util::Normal(rng, n);
      const auto b = test_util::Normal(rng, n);
      values.push_back(MmdSquared(a, b, KernelConfig::MedianHeuristic()));
    }
    medians.push_back(test_util::MedianOf(values));
  }
  EXPECT_GT(medians[0], medians[1]);
  EXPECT_GT(medians[1], medians[2]);
}

TEST(MmdGradient, ZeroAtCoincidence) {
  const auto g = MmdSquaredGrad(std::vector<double>{0.0},
                                std::vector<double>{0.0},
                                KernelConfig::Fixed(1.0));
  EXPECT_EQ(g.value, 0.0);
  EXPECT_EQ(g.grad_a[0], 0.0);
  EXPECT_EQ(g.grad_b[0], 0.0);
}

TEST(MmdGradient, HandValuePullsTogether) {
  const auto g = MmdSquaredGrad(std::vector<double>{0.0},
                                std::vector<double>{1.0},
                                KernelConfig::Fixed(1.0));
  EXPECT_NEAR(g.grad_a[0], -2.0 * std::exp(-0.5), 1e-12);
  EXPECT_NEAR(g.grad_b[0], 2.0 * std::exp(-0.5), 1e-12);
  EXPECT_EQ(g.sigma, 1.0);
}

TEST(MmdGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const size_t na = t == 0 ? 3 : 1 + t % 6;
    const size_t nb = t == 0 ? 4 : 1 + (t / 6) % 6;
    const auto a = test_util::Normal(rng, na);
    const auto b = test_util::Normal(rng, nb, 0.5);
    const double sigma = test_util::Uniform(rng, 1, 0.3, 2.0)[0];
    const KernelConfig cfg = KernelConfig::Fixed(sigma);
    std::vector<double> joint = a;
    joint.insert(joint.end(), b.begin(), b.end());
    const auto f = [&](const std::vector<double>& x) {
      return MmdSquared(std::span(x).first(na), std::span(x).subspan(na), cfg);
    };
    const auto g = MmdSquaredGrad(a, b, cfg);
    std::vector<double> analytic = g.grad_a;
    analytic.insert(analytic.end(), g.grad_b.begin(), g.grad_b.end());
    EXPECT_LT(RelativeError(analytic, NumericGradient(f, joint, 1e-4)), 1e-6)
        << "t=" << t;
  }
}

TEST(MmdGradient, MedianBandwidthIsHeldConstant) {
  std::mt19937_64 rng(23);
  const auto a = test_util::Normal(rng, 6);
  const auto b = test_util::Normal(rng, 5, 1.0);
  const auto g = MmdSquaredGrad(a, b, KernelConfig::MedianHeuristic());
  EXPECT_EQ(g.sigma, BruteMedian(a, b));
  const auto fixed = MmdSquaredGrad(a, b, KernelConfig::Fixed(g.sigma));
  EXPECT_EQ(g.grad_a, fixed.grad_a);
  EXPECT_EQ(g.grad_b, fixed.grad_b);
  EXPECT_EQ(g.value, fixed.value);
}

}  // namespace
}  // namespace logits_mmd::kernels
