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
#include <map>
#include <string>
#include <vector>

#include "pass/graph.h"
#include "pass/rng.h"
#include "pass/tensor.h"

namespace pass {

// Named trainable tensors. Ordered by name so iteration order is stable.
using ParameterSet = std::map<std::string, Tensor>;

std::size_t ParameterCount(const ParameterSet& params);

// Parameter names of a layer: "<prefix>w<l>" (in x out) and "<prefix>b<l>" (1 x out).
std::string WeightName(const std::string& prefix, std::size_t layer);
std::string BiasName(const std::string& prefix, std::size_t layer);

// Fully connected network with tanh between layers and a linear last layer.
// `widths` lists input width, hidden widths, and output width.
//
// Weights ~ Normal(0, stddev), biases zero.
void InitMlp(ParameterSet& params, const std::string& prefix,
             const std::vector<std::size_t>& widths, double stddev, Rng& rng);

// Appends the network to `graph`, registering its parameters. Returns the
// output node.
NodeId BuildMlp(Graph& graph, NodeId input, const std::string& prefix, std::size_t num_layers);

// Copies every parameter into `bindings`.
void BindParameters(const ParameterSet& params, Bindings& bindings);

}  // namespace pass
