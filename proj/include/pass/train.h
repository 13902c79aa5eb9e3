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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pass/checkpoint.h"
#include "pass/dataset.h"
#include "pass/error.h"
#include "pass/graph.h"
#include "pass/loss.h"
#include "pass/mlp.h"
#include "pass/substitution_model.h"

namespace pass {

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 256;
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  std::optional<double> lambda;  // unset selects N / M
  std::optional<double> mu;      // unset selects 0.2 N
  std::uint64_t seed = 0;
  std::size_t log_every = 50;
};

void ValidateTrainConfig(const TrainConfig& config);

// Adaptive-moment optimizer with decoupled weight decay.
struct AdamWState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  ParameterSet m;
  ParameterSet v;
};

// One bias-corrected update of every parameter that has a gradient:
//   p <- p - lr * m_hat / (sqrt(v_hat) + eps) - lr * weight_decay * p
// where the decay term uses the pre-update value.
void OptimizerStep(ParameterSet& params, const Gradients& grads, AdamWState& state, double lr,
                   double weight_decay);

// base_lr * 0.5 * (1 + cos(pi * step / total_steps)).
double CosineLr(std::size_t step, std::size_t total_steps, double base_lr);

struct TrainRecord {
  std::size_t step = 0;  // optimizer steps taken before this batch
  std::size_t epoch = 0;
  double learning_rate = 0.0;
  double wall_seconds = 0.0;
  LossBreakdown breakdown;
};

struct TrainLog {
  std::vector<TrainRecord> records;
  std::size_t total_steps = 0;
  std::vector<std::string> warnings;
};

struct TrainResult {
  SubstitutionModel model;
  TrainLog log;
};

// Raised when a loss value, gradient, or parameter stops being finite.
class TrainingAborted : public OverflowError {
 public:
  TrainingAborted(const std::string& what, std::size_t step, LossBreakdown snapshot)
      : OverflowError(what), step_(step), snapshot_(std::move(snapshot)) {}
  std::size_t step() const { return step_; }
  const LossBreakdown& snapshot() const { return snapshot_; }

 private:
  std::size_t step_;
  LossBreakdown snapshot_;
};

// Resolved trade-off weights for a schema.
LossWeights ResolveWeights(const TrainConfig& config, const std::vector<AttributeSchema>& schema);

// Labels of one batch for the attributes the loss sees. Hidden attributes
// are left out.
BatchLabels GatherBatchLabels(const Dataset& data, const SubstituteSet& substitute,
                              std::span<const std::size_t> batch);

// Loss breakdown of the current model on the given rows, constant_c included.
LossBreakdown EvaluateLoss(const SubstitutionModel& model, const Dataset& data,
                           std::span<const std::size_t> rows, double lambda, double mu);

// Mini-batch gradient training. Deterministic given the model, data, and
// config. `on_record` sees every logged record as it is produced.
TrainResult Train(SubstitutionModel model, const Dataset& train, const TrainConfig& config,
                  const std::function<void(const TrainRecord&)>& on_record = {});

// One JSON object per line: step, epoch, lr, wall_seconds, l_s, l_u, l_x,
// lambda, mu, total, constant_c, plus the run stamp.
void WriteTrainLog(const std::string& path, const TrainLog& log, const RunStamp& stamp);

}  // namespace pass
