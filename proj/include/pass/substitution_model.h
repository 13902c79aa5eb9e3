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
#include <vector>

#include "pass/dataset.h"
#include "pass/graph.h"
#include "pass/mlp.h"
#include "pass/tensor.h"

namespace pass {

inline constexpr double kNormGuard = 1e-12;

struct ModelConfig {
  std::vector<std::size_t> hidden = {64};
  std::size_t embed_dim = 32;
  double tau = 0.01;
  double init_stddev = 0.02;
};

// Stochastic substitution model. An embedding network f maps a standardized
// input row to an embedding; every substitute owns a free learnable
// embedding row in `g`. The probability of releasing substitute j for input x
// is a temperature softmax over cos(f(x), g_j).
//
// Parameters: "f.w<l>", "f.b<l>" for the embedding network and "g"
// (|substitute| x embed_dim) for the substitute table.
struct SubstitutionModel {
  ModelConfig config;
  std::size_t input_dim = 0;
  SubstituteSet substitute;
  Standardization standardization;
  ParameterSet params;

  std::size_t num_layers() const { return config.hidden.size() + 1; }
  std::size_t num_substitutes() const { return substitute.size(); }
};

// Embedding-network weights and the substitute table ~ Normal(0, init_stddev),
// biases zero. Standardization is fitted on `train`.
SubstitutionModel InitModel(const ModelConfig& config, const Dataset& train,
                            SubstituteSet substitute, std::uint64_t seed);

// Throws ValidationError if the model's invariants are broken.
void ValidateModel(const SubstitutionModel& model);

// f(x) for every row of raw (unstandardized) features.
Tensor Embed(const SubstitutionModel& model, const Tensor& x);

// Row-stochastic batch x |substitute| matrix of substitution probabilities.
Tensor SubstitutionProbs(const SubstitutionModel& model, const Tensor& x);

// Softmax over cos(f_i, g_j) / tau for precomputed embeddings.
Tensor SubstitutionProbsFromEmbeddings(const Tensor& f, const Tensor& g, double tau);

// Graph nodes of the substitution pipeline. The graph's "x" input expects
// standardized features.
struct SubstitutionGraph {
  NodeId x;
  NodeId embedding;
  NodeId logits;
  NodeId probs;
};

SubstitutionGraph BuildSubstitutionGraph(Graph& graph, const SubstitutionModel& model);

}  // namespace pass
