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

#ifndef LOGITS_MMD_CLI_H_
#define LOGITS_MMD_CLI_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "logits_mmd/data.h"
#include "logits_mmd/trainer.h"

namespace logits_mmd::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
  kExitDegenerate = 4,
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataSection {
  data::BiasSpec bias;
  // Overrides the top-level seed for data generation when present.
  std::optional<uint64_t> seed;
  int val_per_cell = 150;
  int test_per_cell = 150;
};

struct ToySection {
  trainer::ToyConfig fit;
  int target_samples = 2048;
};

struct SweepSection {
  std::vector<double> grid;  // empty means 0.01, 0.02, ..., 0.10
  int seeds = 1;
};

// Everything a command needs. Built from a JSON file (unknown keys are
// rejected) with command-line overrides applied on top.
struct RunConfig {
  uint64_t seed = 0;
  std::filesystem::path out = "runs";
  std::filesystem::path data_dir;
  DataSection data;
  trainer::TrainConfig train;
  ToySection toy;
  SweepSection sweep;

  static RunConfig FromJson(const nlohmann::json& j);
  nlohmann::ordered_json ToJson() const;
  // Throws ConfigError.
  void Validate() const;

  uint64_t data_seed() const { return data.seed.value_or(seed); }
  std::vector<double> lambda_grid() const;
  std::vector<uint64_t> sweep_seeds() const;
};

struct Overrides {
  std::optional<std::filesystem::path> config;
  std::optional<uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> data_dir;
  std::optional<double> lambda;
  std::optional<std::string> regularizer;
  std::optional<int> bias_level;
  std::optional<double> threshold;
  std::optional<int> epochs;
  std::optional<std::string> grid;
  std::optional<int> sweep_seeds;
};

// Loads the config file (if any), applies overrides and validates. Throws
// ConfigError; an unreadable config file is also a ConfigError.
RunConfig ResolveConfig(const Overrides& overrides);

// "0,0.05,0.1" -> {0, 0.05, 0.1}. Throws ConfigError on malformed input.
std::vector<double> ParseGrid(std::string_view text);

// Each command writes its artifacts under cfg.out and returns an ExitCode.
int CmdGenData(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int CmdTrain(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int CmdToy(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int CmdSweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full command line: subcommand dispatch, flag parsing, exit code.
int Main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace logits_mmd::cli

#endif  // LOGITS_MMD_CLI_H_
