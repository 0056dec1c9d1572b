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

#include "logits_mmd/cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "logits_mmd/analysis.h"
#include "logits_mmd/csv.h"
#include "logits_mmd/errors.h"
#include "logits_mmd/random.h"

namespace logits_mmd::cli {
namespace {

using nlohmann::json;

// Strict reader for one JSON object: every key must be consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("{} must be a JSON object", Name()));
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(fmt::format("unknown config key '{}{}'", Prefix(), key));
    }
  }

  const json* Find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void Double(const std::string& key, double& value) {
    if (const json* v = Find(key)) {
      if (!v->is_number()) throw TypeError(key, "a number");
      value = v->get<double>();
    }
  }

  template <typename Int>
  void Integer(const std::string& key, Int& value) {
    if (const json* v = Find(key)) {
      if (!v->is_number_integer()) throw TypeError(key, "an integer");
      if (std::is_unsigned_v<Int> && v->is_number_integer() && !v->is_number_unsigned() &&
          v->get<int64_t>() < 0) {
        throw TypeError(key, "a non-negative integer");
      }
      value = v->get<Int>();
    }
  }

  void String(const std::string& key, std::string& value) {
    if (const json* v = Find(key)) {
      if (!v->is_string()) throw TypeError(key, "a string");
      value = v->get<std::string>();
    }
  }

  void IntList(const std::string& key, std::vector<int>& value) {
    if (const json* v = Find(key)) {
      if (!v->is_array()) throw TypeError(key, "an array of integers");
      value.clear();
      for (const auto& e : *v) {
        if (!e.is_number_integer()) throw TypeError(key, "an array of integers");
        value.push_back(e.get<int>());
      }
    }
  }

  std::string Prefix() const { return path_.empty() ? "" : path_ + "."; }

 private:
  std::string Name() const { return path_.empty() ? "config" : "'" + path_ + "'"; }
  ConfigError TypeError(const std::string& key, const char* expected) const {
    return ConfigError(fmt::format("config key '{}{}' must be {}", Prefix(), key, expected));
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void ReadKernel(const json& j, kernels::KernelConfig& cfg, const std::string& path) {
  Section s(j, path);
  if (const json* v = s.Find("bandwidth")) {
    if (v->is_string() && v->get<std::string>() == "median") {
      cfg = kernels::KernelConfig::MedianHeuristic();
    } else if (v->is_number() && v->get<double>() > 0.0) {
      cfg = kernels::KernelConfig::Fixed(v->get<double>());
    } else {
      throw ConfigError(fmt::format("config key '{}bandwidth' must be \"median\" or a "
                                    "positive number", s.Prefix()));
    }
  }
}

json KernelToJson(const kernels::KernelConfig& cfg) {
  if (cfg.policy() == kernels::KernelConfig::Policy::kFixed) {
    return json{{"bandwidth", cfg.sigma()}};
  }
  return json{{"bandwidth", "median"}};
}

std::string BatchingName(trainer::Batching b) {
  return b == trainer::Batching::kUniform ? "uniform" : "stratified";
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

void EnsureDir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

data::Dataset LoadSplit(const std::filesystem::path& dir, const char* name) {
  const auto path = dir / fmt::format("{}.csv", name);
  if (!std::filesystem::exists(path)) {
    throw IoError(fmt::format("dataset file {} does not exist", path.string()));
  }
  return data::LoadCsv(path);
}

void WriteColumn(const std::filesystem::path& path, const char* header,
                 std::span<const double> values) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << header << '\n';
  for (double v : values) out << csv::FormatDouble(v) << '\n';
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

void WriteTrace(const std::filesystem::path& path, std::span<const double> trace) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << "epoch,distance\n";
  for (size_t e = 0; e < trace.size(); ++e) out << e << ',' << csv::FormatDouble(trace[e]) << '\n';
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

// Runs `body`, translating exceptions into the documented exit codes.
template <typename Body>
int Guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DegenerateBatchError& e) {
    err << "degenerate training batch: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const EmptyCellError& e) {
    err << "degenerate evaluation: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const DomainError& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitDegenerate;
  }
}

}  // namespace

RunConfig RunConfig::FromJson(const json& j) {
  RunConfig cfg;
  Section top(j, "");
  top.Integer("seed", cfg.seed);
  std::string path;
  top.String("out", path);
  if (!path.empty()) cfg.out = path;
  path.clear();
  top.String("data_dir", path);
  if (!path.empty()) cfg.data_dir = path;

  if (const json* d = top.Find("data")) {
    Section s(*d, "data");
    s.Integer("bias_level", cfg.data.bias.bias_level);
    s.Integer("n_per_cell", cfg.data.bias.n_per_cell);
    if (s.Find("seed") != nullptr) {
      uint64_t seed = 0;
      s.Integer("seed", seed);
      cfg.data.seed = seed;
    }
    s.Double("class_separation", cfg.data.bias.clusters.class_separation);
    s.Double("nuisance_offset", cfg.data.bias.clusters.nuisance_offset);
    s.Double("noise_std", cfg.data.bias.clusters.noise_std);
    s.Integer("val_per_cell", cfg.data.val_per_cell);
    s.Integer("test_per_cell", cfg.data.test_per_cell);
  }
  if (const json* t = top.Find("train")) {
    Section s(*t, "train");
    auto& tc = cfg.train;
    s.Double("lambda", tc.lambda);
    std::string name;
    s.String("regularizer", name);
    if (!name.empty()) {
      try {
        tc.regularizer = losses::ParseRegularizer(name);
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
    }
    s.Double("learning_rate", tc.sgd.learning_rate);
    s.Integer("epochs", tc.sgd.epochs);
    s.Integer("batch_size", tc.sgd.batch_size);
    name.clear();
    s.String("batching", name);
    if (name == "uniform") {
      tc.batching = trainer::Batching::kUniform;
    } else if (name == "stratified") {
      tc.batching = trainer::Batching::kStratified;
    } else if (!name.empty()) {
      throw ConfigError(fmt::format("train.batching must be uniform or stratified, got '{}'", name));
    }
    s.Integer("min_per_cell", tc.min_per_cell);
    s.Double("threshold", tc.threshold);
    s.IntList("hidden", tc.hidden);
  }
  if (const json* k = top.Find("kernel")) ReadKernel(*k, cfg.train.reg.kernel, "kernel");
  if (const json* h = top.Find("histogram")) {
    Section s(*h, "histogram");
    s.Integer("bins", cfg.train.reg.histogram.bin_count);
    s.Double("lo", cfg.train.reg.histogram.lo);
    s.Double("hi", cfg.train.reg.histogram.hi);
    s.Double("bandwidth", cfg.train.reg.histogram.soft_bandwidth);
  }
  if (const json* t = top.Find("toy")) {
    Section s(*t, "toy");
    auto& fit = cfg.toy.fit;
    s.Integer("epochs", fit.epochs);
    s.Integer("noise_dim", fit.noise_dim);
    s.IntList("hidden", fit.hidden);
    s.Integer("batch_size", fit.batch_size);
    s.Double("learning_rate", fit.learning_rate);
    s.Integer("target_samples", cfg.toy.target_samples);
    if (const json* k = s.Find("kernel")) ReadKernel(*k, fit.kernel, "toy.kernel");
  }
  if (const json* w = top.Find("sweep")) {
    Section s(*w, "sweep");
    if (const json* g = s.Find("grid")) {
      if (!g->is_array()) throw ConfigError("config key 'sweep.grid' must be an array of numbers");
      for (const auto& e : *g) {
        if (!e.is_number()) throw ConfigError("config key 'sweep.grid' must be an array of numbers");
        cfg.sweep.grid.push_back(e.get<double>());
      }
    }
    s.Integer("seeds", cfg.sweep.seeds);
  }
  return cfg;
}

nlohmann::ordered_json RunConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["out"] = out.string();
  if (!data_dir.empty()) j["data_dir"] = data_dir.string();
  auto& d = j["data"];
  d["bias_level"] = data.bias.bias_level;
  d["n_per_cell"] = data.bias.n_per_cell;
  if (data.seed) d["seed"] = *data.seed;
  d["class_separation"] = data.bias.clusters.class_separation;
  d["nuisance_offset"] = data.bias.clusters.nuisance_offset;
  d["noise_std"] = data.bias.clusters.noise_std;
  d["val_per_cell"] = data.val_per_cell;
  d["test_per_cell"] = data.test_per_cell;
  auto& t = j["train"];
  t["lambda"] = train.lambda;
  t["regularizer"] = std::string(losses::RegularizerName(train.regularizer));
  t["learning_rate"] = train.sgd.learning_rate;
  t["epochs"] = train.sgd.epochs;
  t["batch_size"] = train.sgd.batch_size;
  t["batching"] = BatchingName(train.batching);
  t["min_per_cell"] = train.min_per_cell;
  t["threshold"] = train.threshold;
  t["hidden"] = train.hidden;
  j["kernel"] = KernelToJson(train.reg.kernel);
  auto& h = j["histogram"];
  h["bins"] = train.reg.histogram.bin_count;
  h["lo"] = train.reg.histogram.lo;
  h["hi"] = train.reg.histogram.hi;
  h["bandwidth"] = train.reg.histogram.soft_bandwidth;
  auto& y = j["toy"];
  y["epochs"] = toy.fit.epochs;
  y["noise_dim"] = toy.fit.noise_dim;
  y["hidden"] = toy.fit.hidden;
  y["batch_size"] = toy.fit.batch_size;
  y["learning_rate"] = toy.fit.learning_rate;
  y["target_samples"] = toy.target_samples;
  y["kernel"] = KernelToJson(toy.fit.kernel);
  j["sweep"]["grid"] = lambda_grid();
  j["sweep"]["seeds"] = sweep.seeds;
  return j;
}

void RunConfig::Validate() const {
  try {
    data.bias.Validate();
    train.Validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (data.val_per_cell < 1 || data.test_per_cell < 1) {
    throw ConfigError("data.val_per_cell and data.test_per_cell must be >= 1");
  }
  if (toy.fit.epochs < 1 || toy.fit.noise_dim < 1 || toy.fit.batch_size < 2 ||
      !(toy.fit.learning_rate > 0.0) || toy.target_samples < 2) {
    throw ConfigError("toy section has an invalid value");
  }
  for (int h : toy.fit.hidden) {
    if (h < 1) throw ConfigError("toy.hidden sizes must be >= 1");
  }
  if (sweep.seeds < 1) throw ConfigError("sweep.seeds must be >= 1");
  for (double l : sweep.grid) {
    if (!std::isfinite(l) || l < 0.0) throw ConfigError(fmt::format("sweep grid value {} is not >= 0", l));
  }
}

std::vector<double> RunConfig::lambda_grid() const {
  if (!sweep.grid.empty()) return sweep.grid;
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(i / 100.0);
  return grid;
}

std::vector<uint64_t> RunConfig::sweep_seeds() const {
  std::vector<uint64_t> seeds;
  for (int i = 0; i < sweep.seeds; ++i) seeds.push_back(seed + static_cast<uint64_t>(i));
  return seeds;
}

std::vector<double> ParseGrid(std::string_view text) {
  std::vector<double> grid;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = std::min(text.find(',', start), text.size());
    std::string_view token = text.substr(start, comma - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() ||
        !std::isfinite(v) || v < 0.0) {
      throw ConfigError(fmt::format("malformed lambda grid '{}'", text));
    }
    grid.push_back(v);
    start = comma + 1;
  }
  return grid;
}

RunConfig ResolveConfig(const Overrides& o) {
  RunConfig cfg;
  if (o.config) {
    std::ifstream in(*o.config);
    if (!in) throw ConfigError(fmt::format("cannot read config file {}", o.config->string()));
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("{}: {}", o.config->string(), e.what()));
    }
    try {
      cfg = RunConfig::FromJson(j);
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("{}: {}", o.config->string(), e.what()));
    }
  }
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.data.seed.reset();
  }
  if (o.out) cfg.out = *o.out;
  if (o.data_dir) cfg.data_dir = *o.data_dir;
  if (o.lambda) cfg.train.lambda = *o.lambda;
  if (o.regularizer) {
    try {
      cfg.train.regularizer = losses::ParseRegularizer(*o.regularizer);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (o.bias_level) cfg.data.bias.bias_level = *o.bias_level;
  if (o.threshold) cfg.train.threshold = *o.threshold;
  if (o.epochs) cfg.train.sgd.epochs = *o.epochs;
  if (o.grid) cfg.sweep.grid = ParseGrid(*o.grid);
  if (o.sweep_seeds) cfg.sweep.seeds = *o.sweep_seeds;
  cfg.Validate();
  return cfg;
}

int CmdGenData(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    cfg.Validate();
    const data::BiasSpec& spec = cfg.data.bias;
    const auto splits = data::MakeExperimentSplits(
        spec, cfg.data.val_per_cell, cfg.data.test_per_cell, cfg.data_seed());
    const data::Dataset& train = splits.train;
    const data::Dataset& val = splits.val;
    const data::Dataset& rest = splits.test;

    EnsureDir(cfg.out);
    data::WriteCsv(train, cfg.out / "train.csv");
    data::WriteCsv(val, cfg.out / "val.csv");
    data::WriteCsv(rest, cfg.out / "test.csv");
    WriteText(cfg.out / "run_config.json", cfg.ToJson().dump(2) + "\n");

    out << fmt::format("bias level N={} k={}\n", spec.bias_level, spec.n_per_cell);
    for (int a = 0; a <= 1; ++a) {
      for (int y = 0; y <= 1; ++y) {
        out << fmt::format("train cell a={} y={}: {}\n", a, y, train.CellCount(a, y));
      }
    }
    out << fmt::format("val: {} rows ({} per cell), test: {} rows ({} per cell)\n",
                       val.size(), cfg.data.val_per_cell, rest.size(), cfg.data.test_per_cell);
    return static_cast<int>(kExitOk);
  });
}

int CmdTrain(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    cfg.Validate();
    if (cfg.data_dir.empty()) throw ConfigError("train needs a dataset directory (--data)");
    const auto train = LoadSplit(cfg.data_dir, "train");
    const auto val = LoadSplit(cfg.data_dir, "val");
    const auto test = LoadSplit(cfg.data_dir, "test");
    EnsureDir(cfg.out);
    WriteText(cfg.out / "run_config.json", cfg.ToJson().dump(2) + "\n");

    trainer::TrainConfig tc = cfg.train;
    tc.sgd.seed = cfg.seed;
    auto init = model::MlpModel::Init(train.dim(), tc.hidden, DeriveSeed(cfg.seed, kStreamInit));
    const auto result = trainer::Train(std::move(init), train, val, tc);
    const auto report =
        metrics::Evaluate(trainer::EvalBatchFor(result.model, test), tc.threshold);
    const auto pdfs = analysis::GroupPdfs(result.model, test, analysis::ConfidenceGrid());

    model::SaveCheckpoint(result.model, cfg.out / "model.json");
    analysis::EmitReport(result.logs, report, pdfs, cfg.out);

    out << fmt::format("regularizer={} lambda={} epochs={}\n",
                       losses::RegularizerName(tc.regularizer), tc.lambda, tc.sgd.epochs);
    out << fmt::format("test accuracy={:.4f} dp={:.4f} eo={:.4f} ({:.2f} pp) pdf_gap={:.4f}\n",
                       report.accuracy, report.dp, report.eo, report.eo_percent(),
                       analysis::SummedPdfGap(pdfs));
    return static_cast<int>(kExitOk);
  });
}

int CmdToy(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    cfg.Validate();
    const auto target =
        data::SampleToyMultimodal(cfg.toy.target_samples, DeriveSeed(cfg.seed, kStreamToyTarget));
    const auto fresh = data::SampleToyMultimodal(
        cfg.toy.target_samples, DeriveSeed(cfg.seed, kStreamToyTarget + 100));
    EnsureDir(cfg.out);
    WriteText(cfg.out / "run_config.json", cfg.ToJson().dump(2) + "\n");
    trainer::ToyConfig fit = cfg.toy.fit;
    fit.seed = cfg.seed;
    for (auto reg : {losses::Regularizer::kMmd, losses::Regularizer::kGa}) {
      const auto name = losses::RegularizerName(reg);
      const auto result = trainer::FitToyDistribution(reg, target, fit);
      WriteColumn(cfg.out / fmt::format("toy_{}_samples.csv", name), "value", result.generated);
      WriteTrace(cfg.out / fmt::format("toy_{}_trace.csv", name), result.trace);
      const double mmd = kernels::MmdSquared(result.generated, fresh,
                                             kernels::KernelConfig::MedianHeuristic());
      out << fmt::format("{}: final distance={:.5f} mmd2_to_fresh_target={:.5f} modes={}\n", name,
                         result.trace.back(), mmd, analysis::CountModes(result.generated));
    }
    out << fmt::format("target modes={}\n", analysis::CountModes(target));
    return static_cast<int>(kExitOk);
  });
}

int CmdSweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    cfg.Validate();
    if (cfg.data_dir.empty()) throw ConfigError("sweep needs a dataset directory (--data)");
    const auto train = LoadSplit(cfg.data_dir, "train");
    const auto eval = LoadSplit(cfg.data_dir, "test");
    const auto seeds = cfg.sweep_seeds();
    const auto rows = trainer::SweepLambda(cfg.lambda_grid(), cfg.train, train, eval, seeds);
    EnsureDir(cfg.out);
    WriteText(cfg.out / "run_config.json", cfg.ToJson().dump(2) + "\n");
    std::ofstream csv_out(cfg.out / "sweep.csv");
    if (!csv_out) throw IoError(fmt::format("cannot write {}", (cfg.out / "sweep.csv").string()));
    csv_out << "lambda,accuracy,eo\n";
    out << fmt::format("regularizer={} seeds={}\n", losses::RegularizerName(cfg.train.regularizer),
                       seeds.size());
    for (const auto& row : rows) {
      csv_out << csv::FormatDouble(row.lambda) << ',' << csv::FormatDouble(row.accuracy) << ','
              << csv::FormatDouble(row.eo) << '\n';
      out << fmt::format("lambda={:<6} accuracy={:.4f} eo={:.4f}\n", row.lambda, row.accuracy,
                         row.eo);
    }
    if (!csv_out) throw IoError("write failed for sweep.csv");
    return static_cast<int>(kExitOk);
  });
}

int Main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fairness-regularized training with logits-space MMD"};
  app.require_subcommand(1);

  Overrides o;
  std::string config, out_dir, data_dir, regularizer, grid;
  uint64_t seed = 0;
  double lambda = 0.0;
  double threshold = 0.0;
  int bias_level = 0;
  int epochs = 0;
  int sweep_seeds = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON config file");
    sub->add_option("--seed", seed, "top-level seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--lambda", lambda, "regularizer weight");
    sub->add_option("--regularizer", regularizer, "none|mmd|ga|ha");
    sub->add_option("--bias-level", bias_level, "bias level N");
    sub->add_option("--threshold", threshold, "decision threshold");
    sub->add_option("--epochs", epochs, "training epochs");
  };
  auto* gen = app.add_subcommand("gen-data", "generate biased train and balanced val/test CSVs");
  auto* train = app.add_subcommand("train", "train a classifier and write logs and reports");
  auto* toy = app.add_subcommand("toy", "fit a bimodal toy distribution with MMD and GA");
  auto* sweep = app.add_subcommand("sweep", "accuracy/EO trade-off over a lambda grid");
  for (auto* sub : {gen, train, toy, sweep}) add_common(sub);
  for (auto* sub : {train, sweep}) sub->add_option("--data", data_dir, "dataset directory");
  sweep->add_option("--grid", grid, "comma-separated lambda values");
  sweep->add_option("--seeds", sweep_seeds, "number of seeds per lambda");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitConfig;
  }

  auto* sub = app.get_subcommands().front();
  auto given = [&](const char* flag) { return sub->count(flag) > 0; };
  if (given("--config")) o.config = config;
  if (given("--seed")) o.seed = seed;
  if (given("--out")) o.out = out_dir;
  if (given("--lambda")) o.lambda = lambda;
  if (given("--regularizer")) o.regularizer = regularizer;
  if (given("--bias-level")) o.bias_level = bias_level;
  if (given("--threshold")) o.threshold = threshold;
  if (given("--epochs")) o.epochs = epochs;
  if (sub == train || sub == sweep) {
    if (given("--data")) o.data_dir = data_dir;
  }
  if (sub == sweep) {
    if (given("--grid")) o.grid = grid;
    if (given("--seeds")) o.sweep_seeds = sweep_seeds;
  }

  RunConfig cfg;
  try {
    cfg = ResolveConfig(o);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (sub == gen) return CmdGenData(cfg, out, err);
  if (sub == train) return CmdTrain(cfg, out, err);
  if (sub == toy) return CmdToy(cfg, out, err);
  return CmdSweep(cfg, out, err);
}

}  // namespace logits_mmd::cli
