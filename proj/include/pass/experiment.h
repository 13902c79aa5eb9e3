// Copyright 2026 The PASS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pass/adv_baseline.h"
#include "pass/dataset.h"
#include "pass/error.h"
#include "pass/eval.h"
#include "pass/infotheory.h"
#include "pass/substitution_model.h"
#include "pass/synthetic.h"
#include "pass/train.h"

namespace pass {

// Every violation found while reading or validating a config, each prefixed
// with its "section.key" path.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct DataSection {
  std::string source = "synthetic";  // "synthetic" or "csv"
  std::vector<AttributeSchema> attributes;
  // synthetic
  std::size_t n_samples = 4000;
  std::size_t feature_dim = 0;
  double noise_scale = 0.3;
  double prototype_scale = 1.0;
  double rho = 0.0;  // latent correlation between every attribute pair
  // csv
  std::string train_path;
  std::string test_path;  // empty: split train_path
  double test_fraction = 0.2;
};

struct DiagnosticsSection {
  bool train_log = true;
  bool substitutions = true;
  bool confusion = true;
  bool theorem1 = true;
  bool theorem2 = true;
  bool ldp = true;
  bool bias_demo = true;
  std::size_t theorem1_batches = 2000;
  std::size_t bias_batch_size = 4;
  std::size_t bias_batches = 2000;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string out_dir = "pass_out";
  DataSection data;
  std::size_t substitutes = 256;  // K
  ModelConfig model;
  TrainConfig train;
  EvalConfig eval;
  bool run_adv = false;
  AdvConfig adv;
  DiagnosticsSection diagnostics;
};

// INI text (Boost.PropertyTree dialect). Unknown sections or keys and bad
// values are all reported together in one ConfigError.
ExperimentConfig ParseConfig(const std::string& text);
ExperimentConfig LoadConfig(const std::string& path);
void ValidateConfig(const ExperimentConfig& config);

// Canonical INI rendering of every setting; ParseConfig round-trips it.
std::string CanonicalConfig(const ExperimentConfig& config);
// FNV-1a (64-bit, hex) of the canonical rendering without seed and out_dir.
std::string ConfigHash(const ExperimentConfig& config);

// Dataset build: synthetic generation or CSV load, then the train/test split.
TrainTestSplit BuildData(const ExperimentConfig& config);

enum class ExitCode : int {
  kOk = 0,
  kError = 1,
  kConfig = 2,
  kRefused = 3,
  kAborted = 4,
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool force = false;
};

struct RunSummary {
  ExitCode code = ExitCode::kOk;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::optional<MetricsReport> pass_metrics;
  std::optional<MetricsReport> adv_metrics;
  std::optional<double> protector_accuracy;  // jointly trained adversary, first private
  std::vector<BoundReport> bounds;
  std::vector<std::string> files;  // written, relative to the output directory
};

// Full pipeline: data, PASS training, substitution, evaluation, optional
// adversarial baseline, bound checks. Writes every artifact under the output
// directory and a one-line mNAG summary to `log`. Refuses (kRefused) when the
// directory holds a run with a different config hash or seed, unless forced.
RunSummary RunExperiment(const ExperimentConfig& config, const RunOptions& options,
                         std::ostream& log);
// Reuses the directory's checkpoint: evaluation only.
RunSummary EvalOnly(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);
// Reuses the directory's checkpoint: bound checks only.
RunSummary Diagnose(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);

}  // namespace pass
