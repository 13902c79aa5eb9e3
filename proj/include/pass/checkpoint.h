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
#include <string>

#include "pass/dataset.h"
#include "pass/substitution_model.h"

namespace pass {

// Run identity stamped into every artifact a run writes.
struct RunStamp {
  std::string method = "pass";
  std::string config_hash;
  std::uint64_t seed = 0;
};

inline constexpr int kCheckpointVersion = 1;

// Writes a JSON checkpoint. Layout (version 1):
//
//   {
//     "format": "pass-checkpoint", "version": 1,
//     "method": "pass", "config_hash": "<hex>", "seed": <u64>,
//     "input_dim": d, "hidden": [..], "embed_dim": e, "tau": t,
//     "substitute_indices": [..],            // rows of the training split
//     "standardization": {"mean": [..], "scale": [..]},
//     "parameters": {"<name>": {"shape": [r, c], "values": [..]}, ...}
//   }
//
// Doubles are written with round-trip precision.
void SaveCheckpoint(const std::string& path, const SubstitutionModel& model, const RunStamp& stamp);

// Restores a model; `train` must be the training split the substitute
// indices refer to.
SubstitutionModel LoadCheckpoint(const std::string& path, const Dataset& train,
                                 RunStamp* stamp = nullptr);

}  // namespace pass
