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

#include "pass/mlp.h"

#include <random>

#include "pass/error.h"

namespace pass {

std::size_t ParameterCount(const ParameterSet& params) {
  std::size_t n = 0;
  for (const auto& [name, t] : params) n += t.size();
  return n;
}

std::string WeightName(const std::string& prefix, std::size_t layer) {
  return prefix + "w" + std::to_string(layer);
}

std::string BiasName(const std::string& prefix, std::size_t layer) {
  return prefix + "b" + std::to_string(layer);
}

void InitMlp(ParameterSet& params, const std::string& prefix,
             const std::vector<std::size_t>& widths, double stddev, Rng& rng) {
  if (widths.size() < 2) throw ValidationError("an MLP needs at least input and output widths");
  std::normal_distribution<double> normal(0.0, stddev);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    if (widths[l] == 0 || widths[l + 1] == 0) throw ValidationError("layer widths must be positive");
    Tensor w = Tensor::Matrix(widths[l], widths[l + 1]);
    for (double& v : w.values()) v = normal(rng);
    params[WeightName(prefix, l)] = std::move(w);
    params[BiasName(prefix, l)] = Tensor::Matrix(1, widths[l + 1]);
  }
}

NodeId BuildMlp(Graph& graph, NodeId input, const std::string& prefix, std::size_t num_layers) {
  NodeId h = input;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const NodeId w = graph.Parameter(WeightName(prefix, l));
    const NodeId b = graph.Parameter(BiasName(prefix, l));
    h = graph.AddRowBias(graph.MatMul(h, w), b);
    if (l + 1 < num_layers) h = graph.Tanh(h);
  }
  return h;
}

void BindParameters(const ParameterSet& params, Bindings& bindings) {
  for (const auto& [name, t] : params) bindings[name] = t;
}

}  // namespace pass
