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
#include <string>
#include <vector>

#include "pass/checkpoint.h"
#include "pass/dataset.h"
#include "pass/error.h"
#include "pass/eval.h"
#include "pass/mlp.h"
#include "pass/tensor.h"

namespace pass {

inline constexpr const char* kAdvMethod = "generic-adv";

struct AdvConfig {
  std::vector<std::size_t> hidden = {64};      // obfuscator hidden widths
  std::vector<std::size_t> head_hidden = {32};  // adversary and utility heads
  std::size_t epochs = 100;
  std::size_t batch_size = 256;
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  // w in CE_U - w CE_S. Lower weights leave the min-max oscillating.
  double adversary_weight = 3.0;
  double init_stddev = 0.02;
  std::uint64_t seed = 0;
  std::size_t log_every = 50;
};

void ValidateAdvConfig(const AdvConfig& config);

// Deterministic residual encoder-decoder z' = z + net(z) on standardized
// features, mapped back to the raw feature space. The last obfuscator layer
// starts at zero, so an untrained obfuscator is the identity.
//
// Parameters: "o.w<l>"/"o.b<l>" obfuscator, "a<i>.*" adversary for the i-th
// private attribute, "t<j>.*" utility head for the j-th useful attribute.
struct AdvObfuscator {
  AdvConfig config;
  std::vector<AttributeSchema> schema;
  Standardization standardization;
  ParameterSet params;
};

AdvObfuscator InitAdv(const AdvConfig& config, const Dataset& train);

// x' with the same shape as x.
Tensor Obfuscate(const AdvObfuscator& adv, const Tensor& x);

struct AdvRecord {
  std::size_t step = 0;
  std::size_t epoch = 0;
  double learning_rate = 0.0;
  double adversary_loss = 0.0;   // sum of private cross-entropies
  double utility_loss = 0.0;     // sum of useful cross-entropies
  double obfuscator_loss = 0.0;  // utility_loss - w adversary_loss
};

struct AdvTrainResult {
  AdvObfuscator model;
  std::vector<AdvRecord> log;
};

class AdvTrainingAborted : public OverflowError {
 public:
  AdvTrainingAborted(const std::string& what, std::size_t step, AdvRecord snapshot)
      : OverflowError(what), step_(step), snapshot_(snapshot) {}
  std::size_t step() const { return step_; }
  const AdvRecord& snapshot() const { return snapshot_; }

 private:
  std::size_t step_;
  AdvRecord snapshot_;
};

// Per batch: (a) the adversaries descend their cross-entropy on S from x';
// (b) the utility heads descend theirs on U; (c) the obfuscator descends
// CE_U - w CE_S. Needs at least one private and one useful attribute.
AdvTrainResult TrainAdv(const Dataset& train, const AdvConfig& config,
                        const std::function<void(const AdvRecord&)>& on_record = {});

// Softmax output of the jointly trained adversary for a private attribute,
// on already-released rows.
Tensor AdversaryProba(const AdvObfuscator& adv, const Tensor& released,
                      const std::string& attribute);

// Accuracy of the protector's own adversary on released test rows.
double ProtectorAccuracy(const AdvObfuscator& adv, const Dataset& test,
                         const std::string& attribute);

class AdvRelease : public Obfuscator {
 public:
  explicit AdvRelease(const AdvObfuscator& model) : model_(model) {}
  std::string name() const override { return kAdvMethod; }
  // Deterministic: every repeat of a row is the same x'.
  Tensor Release(const Tensor& x, std::size_t repeats, std::uint64_t seed) const override;

 private:
  const AdvObfuscator& model_;
};

void SaveAdvCheckpoint(const std::string& path, const AdvObfuscator& adv, const RunStamp& stamp);
AdvObfuscator LoadAdvCheckpoint(const std::string& path, RunStamp* stamp = nullptr);
void WriteAdvTrainLog(const std::string& path, const std::vector<AdvRecord>& log,
                      const RunStamp& stamp);

}  // namespace pass
