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

#ifndef LOGITS_MMD_MLP_H_
#define LOGITS_MMD_MLP_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace logits_mmd::model {

struct DenseLayer {
  Eigen::MatrixXd weight;  // fan_out x fan_in
  Eigen::VectorXd bias;    // fan_out
};

// Feed-forward network: affine + ReLU hidden layers and a single linear
// output unit (the logit).
class MlpModel {
 public:
  // Glorot-uniform weights, zero biases. Deterministic in `seed`.
  static MlpModel Init(int input_dim, const std::vector<int>& hidden,
                       uint64_t seed);

  // Validates that adjacent shapes chain and end in one output.
  MlpModel(int input_dim, std::vector<DenseLayer> layers);

  MlpModel(const MlpModel& other);
  MlpModel& operator=(const MlpModel& other);
  MlpModel(MlpModel&&) noexcept = default;
  MlpModel& operator=(MlpModel&&) noexcept = default;

  int input_dim() const { return input_dim_; }
  std::vector<int> hidden() const;
  const std::vector<DenseLayer>& layers() const { return layers_; }
  size_t parameter_count() const;

  // Identity of this instance and its update counter. A forward cache is
  // only valid for the (id, version) it was produced with.
  uint64_t id() const { return id_; }
  uint64_t version() const { return version_; }

  // Flat parameter view in checkpoint order: per layer, weight row-major then
  // bias.
  std::vector<double> Parameters() const;
  void SetParameters(std::span<const double> flat);

  bool operator==(const MlpModel& other) const;

 private:
  friend void SgdStep(MlpModel& model, const std::vector<DenseLayer>& grads,
                      double learning_rate);

  int input_dim_;
  std::vector<DenseLayer> layers_;
  uint64_t id_;
  uint64_t version_ = 0;
};

using Gradients = std::vector<DenseLayer>;

struct ForwardCache {
  uint64_t model_id = 0;
  uint64_t model_version = 0;
  std::vector<Eigen::MatrixXd> inputs;  // input to each layer, n x fan_in
  std::vector<Eigen::MatrixXd> pre;     // pre-activation of each layer
};

struct ForwardResult {
  std::vector<double> logits;
  ForwardCache cache;
};

// x is n x input_dim.
ForwardResult Forward(const MlpModel& model, const Eigen::MatrixXd& x);

// Logits only, no cache.
std::vector<double> Logits(const MlpModel& model, const Eigen::MatrixXd& x);

// Gradients of sum_i grad_logits[i] * logit_i. Throws DomainError when the
// cache does not belong to the current model state.
Gradients Backward(const MlpModel& model, const ForwardCache& cache,
                   std::span<const double> grad_logits);

// theta <- theta - learning_rate * g. No momentum, no weight decay.
void SgdStep(MlpModel& model, const Gradients& grads, double learning_rate);

// JSON checkpoint: format version, input_dim, and per layer the shape with
// row-major weights and biases. Doubles round-trip exactly.
std::string ToJson(const MlpModel& model);
MlpModel FromJson(const std::string& text);
void SaveCheckpoint(const MlpModel& model, const std::filesystem::path& path);
MlpModel LoadCheckpoint(const std::filesystem::path& path);

}  // namespace logits_mmd::model

#endif  // LOGITS_MMD_MLP_H_
