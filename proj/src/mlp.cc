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

#include "logits_mmd/mlp.h"

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "logits_mmd/errors.h"
#include "logits_mmd/random.h"

namespace logits_mmd::model {
namespace {

constexpr int kCheckpointVersion = 1;

uint64_t NextModelId() {
  static std::atomic<uint64_t> counter{1};
  return counter.fetch_add(1);
}

}  // namespace

MlpModel MlpModel::Init(int input_dim, const std::vector<int>& hidden,
                        uint64_t seed) {
  if (input_dim < 1) {
    throw DomainError(fmt::format("input dimension must be >= 1, got {}", input_dim));
  }
  for (int h : hidden) {
    if (h < 1) throw DomainError(fmt::format("hidden size must be >= 1, got {}", h));
  }
  Rng rng(seed);
  std::vector<DenseLayer> layers;
  int fan_in = input_dim;
  for (size_t k = 0; k <= hidden.size(); ++k) {
    const int fan_out = k < hidden.size() ? hidden[k] : 1;
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> uniform(-limit, limit);
    DenseLayer layer;
    layer.weight.resize(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weight(r, c) = uniform(rng);
    }
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    layers.push_back(std::move(layer));
    fan_in = fan_out;
  }
  return MlpModel(input_dim, std::move(layers));
}

MlpModel::MlpModel(int input_dim, std::vector<DenseLayer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)), id_(NextModelId()) {
  if (input_dim_ < 1) throw DomainError("input dimension must be >= 1");
  if (layers_.empty()) throw DomainError("model needs at least one layer");
  Eigen::Index fan_in = input_dim_;
  for (size_t k = 0; k < layers_.size(); ++k) {
    const DenseLayer& layer = layers_[k];
    if (layer.weight.cols() != fan_in || layer.bias.size() != layer.weight.rows() ||
        layer.weight.rows() < 1) {
      throw DomainError(fmt::format("layer {} has incompatible shape {}x{} (bias {})",
                                    k, layer.weight.rows(), layer.weight.cols(),
                                    layer.bias.size()));
    }
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
      throw DomainError(fmt::format("layer {} has non-finite parameters", k));
    }
    fan_in = layer.weight.rows();
  }
  if (fan_in != 1) throw DomainError("last layer must have a single output");
}

MlpModel::MlpModel(const MlpModel& other)
    : input_dim_(other.input_dim_), layers_(other.layers_), id_(NextModelId()) {}

MlpModel& MlpModel::operator=(const MlpModel& other) {
  if (this != &other) {
    input_dim_ = other.input_dim_;
    layers_ = other.layers_;
    id_ = NextModelId();
    version_ = 0;
  }
  return *this;
}

std::vector<int> MlpModel::hidden() const {
  std::vector<int> sizes;
  for (size_t k = 0; k + 1 < layers_.size(); ++k) {
    sizes.push_back(static_cast<int>(layers_[k].weight.rows()));
  }
  return sizes;
}

size_t MlpModel::parameter_count() const {
  size_t count = 0;
  for (const auto& layer : layers_) count += layer.weight.size() + layer.bias.size();
  return count;
}

std::vector<double> MlpModel::Parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        flat.push_back(layer.weight(r, c));
      }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) flat.push_back(layer.bias(r));
  }
  return flat;
}

void MlpModel::SetParameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw DomainError(fmt::format("expected {} parameters, got {}",
                                  parameter_count(), flat.size()));
  }
  size_t k = 0;
  for (auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = flat[k++];
      }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = flat[k++];
  }
  ++version_;
}

bool MlpModel::operator==(const MlpModel& other) const {
  if (input_dim_ != other.input_dim_ || layers_.size() != other.layers_.size()) {
    return false;
  }
  for (size_t k = 0; k < layers_.size(); ++k) {
    const auto& a = layers_[k];
    const auto& b = other.layers_[k];
    if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols() ||
        a.weight != b.weight || a.bias != b.bias) {
      return false;
    }
  }
  return true;
}

ForwardResult Forward(const MlpModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.input_dim()) {
    throw DomainError(fmt::format("input has {} columns, model expects {}",
                                  x.cols(), model.input_dim()));
  }
  if (!x.allFinite()) throw DomainError("input contains non-finite values");
  ForwardResult result;
  result.cache.model_id = model.id();
  result.cache.model_version = model.version();
  Eigen::MatrixXd h = x;
  const auto& layers = model.layers();
  for (size_t k = 0; k < layers.size(); ++k) {
    Eigen::MatrixXd z = h * layers[k].weight.transpose();
    z.rowwise() += layers[k].bias.transpose();
    result.cache.inputs.push_back(std::move(h));
    h = k + 1 < layers.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
    result.cache.pre.push_back(std::move(z));
  }
  result.logits.assign(h.data(), h.data() + h.rows());
  return result;
}

std::vector<double> Logits(const MlpModel& model, const Eigen::MatrixXd& x) {
  return Forward(model, x).logits;
}

Gradients Backward(const MlpModel& model, const ForwardCache& cache,
                   std::span<const double> grad_logits) {
  if (cache.model_id != model.id() || cache.model_version != model.version() ||
      cache.inputs.size() != model.layers().size()) {
    throw DomainError("forward cache is stale for this model");
  }
  const Eigen::Index n = cache.inputs.front().rows();
  if (static_cast<Eigen::Index>(grad_logits.size()) != n) {
    throw DomainError(fmt::format("expected {} logit gradients, got {}", n,
                                  grad_logits.size()));
  }
  const auto& layers = model.layers();
  Gradients grads(layers.size());
  Eigen::MatrixXd upstream =
      Eigen::Map<const Eigen::VectorXd>(grad_logits.data(), n);
  for (size_t k = layers.size(); k-- > 0;) {
    if (k + 1 < layers.size()) {
      upstream = upstream.cwiseProduct(
          (cache.pre[k].array() > 0.0).cast<double>().matrix());
    }
    grads[k].weight = upstream.transpose() * cache.inputs[k];
    grads[k].bias = upstream.colwise().sum().transpose();
    if (k > 0) upstream = upstream * layers[k].weight;
  }
  return grads;
}

void SgdStep(MlpModel& model, const Gradients& grads, double learning_rate) {
  if (!std::isfinite(learning_rate) || learning_rate < 0.0) {
    throw DomainError(fmt::format("learning rate must be finite and >= 0, got {}",
                                  learning_rate));
  }
  if (grads.size() != model.layers_.size()) {
    throw DomainError("gradient layer count does not match the model");
  }
  for (size_t k = 0; k < grads.size(); ++k) {
    auto& layer = model.layers_[k];
    if (grads[k].weight.rows() != layer.weight.rows() ||
        grads[k].weight.cols() != layer.weight.cols() ||
        grads[k].bias.size() != layer.bias.size()) {
      throw DomainError(fmt::format("gradient shape mismatch at layer {}", k));
    }
  }
  for (size_t k = 0; k < grads.size(); ++k) {
    model.layers_[k].weight -= learning_rate * grads[k].weight;
    model.layers_[k].bias -= learning_rate * grads[k].bias;
  }
  ++model.version_;
}

std::string ToJson(const MlpModel& model) {
  nlohmann::ordered_json j;
  j["format"] = "logits_mmd.mlp";
  j["version"] = kCheckpointVersion;
  j["input_dim"] = model.input_dim();
  j["layers"] = nlohmann::ordered_json::array();
  for (const auto& layer : model.layers()) {
    nlohmann::ordered_json entry;
    entry["rows"] = layer.weight.rows();
    entry["cols"] = layer.weight.cols();
    std::vector<double> w;
    w.reserve(layer.weight.size());
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) w.push_back(layer.weight(r, c));
    }
    entry["weight"] = w;
    entry["bias"] = std::vector<double>(layer.bias.data(),
                                        layer.bias.data() + layer.bias.size());
    j["layers"].push_back(std::move(entry));
  }
  return j.dump();
}

MlpModel FromJson(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "logits_mmd.mlp") {
      throw ParseError("checkpoint: unknown format tag");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw ParseError(fmt::format("checkpoint: unsupported version {}", version));
    }
    std::vector<DenseLayer> layers;
    for (const auto& entry : j.at("layers")) {
      const auto rows = entry.at("rows").get<Eigen::Index>();
      const auto cols = entry.at("cols").get<Eigen::Index>();
      const auto w = entry.at("weight").get<std::vector<double>>();
      const auto b = entry.at("bias").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
          static_cast<Eigen::Index>(b.size()) != rows) {
        throw ParseError("checkpoint: layer array sizes do not match its shape");
      }
      DenseLayer layer;
      layer.weight.resize(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) layer.weight(r, c) = w[r * cols + c];
      }
      layer.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), rows);
      layers.push_back(std::move(layer));
    }
    return MlpModel(j.at("input_dim").get<int>(), std::move(layers));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("checkpoint: {}", e.what()));
  }
}

void SaveCheckpoint(const MlpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << ToJson(model) << '\n';
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

MlpModel LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJson(buffer.str());
}

}  // namespace logits_mmd::model
