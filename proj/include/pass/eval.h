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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pass/checkpoint.h"
#include "pass/dataset.h"
#include "pass/mlp.h"
#include "pass/substitution_model.h"
#include "pass/tensor.h"

namespace pass {

// Anything that maps original rows to released rows in the same space.
class Obfuscator {
 public:
  virtual ~Obfuscator() = default;
  virtual std::string name() const = 0;
  // `repeats` released rows per input row, ordered by row then repeat.
  virtual Tensor Release(const Tensor& x, std::size_t repeats, std::uint64_t seed) const = 0;
};

class PassObfuscator : public Obfuscator {
 public:
  explicit PassObfuscator(const SubstitutionModel& model) : model_(model) {}
  std::string name() const override { return "pass"; }
  Tensor Release(const Tensor& x, std::size_t repeats, std::uint64_t seed) const override;

 private:
  const SubstitutionModel& model_;
};

// Releases the input unchanged: no protection.
class IdentityObfuscator : public Obfuscator {
 public:
  std::string name() const override { return "identity"; }
  Tensor Release(const Tensor& x, std::size_t repeats, std::uint64_t seed) const override;
};

// Releases one fixed row for every input: no information.
class ConstantObfuscator : public Obfuscator {
 public:
  explicit ConstantObfuscator(std::vector<double> row) : row_(std::move(row)) {}
  std::string name() const override { return "constant"; }
  Tensor Release(const Tensor& x, std::size_t repeats, std::uint64_t seed) const override;

 private:
  std::vector<double> row_;
};

// Repeats each row of `x` `repeats` times, matching Release ordering.
Tensor RepeatRows(const Tensor& x, std::size_t repeats);
std::vector<int> RepeatLabels(std::span<const int> labels, std::size_t repeats);

struct ProbeConfig {
  std::vector<std::size_t> hidden = {64};
  std::size_t epochs = 30;
  std::size_t batch_size = 256;
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  double init_stddev = 0.02;
};

// MLP classifier over standardized inputs, trained by cross-entropy.
struct ProbeClassifier {
  std::string attribute;
  int cardinality = 2;
  std::vector<std::size_t> hidden;
  Standardization standardization;
  ParameterSet params;  // "p.w<l>", "p.b<l>"
};

ProbeClassifier TrainProbe(const Tensor& x, std::span<const int> labels, int cardinality,
                           const std::string& attribute, const ProbeConfig& config,
                           std::uint64_t seed);

// Row-wise softmax class probabilities.
Tensor PredictProba(const ProbeClassifier& probe, const Tensor& x);
// Argmax per row; ties go to the lowest class index.
std::vector<int> Predict(const ProbeClassifier& probe, const Tensor& x);
std::vector<int> ArgmaxRows(const Tensor& scores);

double Accuracy(std::span<const int> predictions, std::span<const int> labels);

struct AttackBudget {
  double data_fraction = 1.0;  // share of the attacker's training rows used
  std::size_t repeats = 4;     // releases per original row
  ProbeConfig probe;
  std::uint64_t seed = 0;
};

void ValidateBudget(const AttackBudget& budget);

// Queries the obfuscator on the attacker's rows and trains a fresh probe on
// the released rows.
ProbeClassifier ProbingAttack(const Obfuscator& obfuscator, const Dataset& attacker_data,
                              const std::string& attribute, const AttackBudget& budget);

// Accuracy of `probe` on `repeats` releases of every test row.
double ReleasedAccuracy(const ProbeClassifier& probe, const Obfuscator& obfuscator,
                        const Dataset& test, const std::string& attribute, std::size_t repeats,
                        std::uint64_t seed);

struct BaselineResult {
  double acc_guessing = 0.0;
  double acc_no_suppr = 0.0;
  ProbeClassifier clean_probe;  // trained on original train features
};

// Majority class of the training labels (lowest index on ties).
int MajorityClass(std::span<const int> labels, int cardinality);

BaselineResult Baselines(const Dataset& train, const Dataset& test, const std::string& attribute,
                         const ProbeConfig& config, std::uint64_t seed);

// Probe trained on original data, evaluated on released test rows.
double UnfinetunedAccuracy(const ProbeClassifier& clean_probe, const Obfuscator& obfuscator,
                           const Dataset& test, const std::string& attribute,
                           std::size_t repeats, std::uint64_t seed);

// max(0, (acc - guess) / (ceiling - guess)). Throws ValidationError when the
// ceiling does not exceed the guess.
double Nag(double acc, double acc_guessing, double acc_no_suppr);

struct AttributeMetrics {
  std::string attribute;
  Role role = Role::kUseful;
  double acc = 0.0;
  double acc_guessing = 0.0;
  double acc_no_suppr = 0.0;
  double nag = 0.0;
  std::optional<double> acc_unfinetuned;
  std::optional<double> nag_unfinetuned;
};

struct MetricsReport {
  std::string method;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<AttributeMetrics> attributes;  // sorted by attribute name
  double mnag = 0.0;
  std::optional<double> mnag_unfinetuned;

  const AttributeMetrics& Find(const std::string& attribute) const;
};

// Mean NAG over useful and hidden attributes minus mean NAG over private
// attributes. Throws ValidationError if either group is empty.
double Mnag(const std::vector<AttributeMetrics>& attributes, bool unfinetuned = false);

struct EvalConfig {
  AttackBudget budget;
  bool unfinetuned = true;
};

// Baselines, probing attack, and (optionally) un-finetuned accuracy for
// every attribute of the schema.
MetricsReport Evaluate(const Obfuscator& obfuscator, const Dataset& train, const Dataset& test,
                       const EvalConfig& config);

void WriteMetricsJson(const std::string& path, const MetricsReport& report);
// Stamp comment line, then attribute,role,acc,acc_guessing,acc_no_suppr,nag.
void WriteMetricsCsv(const std::string& path, const MetricsReport& report);

}  // namespace pass
