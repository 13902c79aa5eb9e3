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
#include <span>
#include <string>
#include <vector>

#include "pass/graph.h"
#include "pass/tensor.h"

namespace pass {

// Probabilities are clamped to this floor before any logarithm.
inline constexpr double kProbFloor = 1e-12;

// Labels of one mini-batch, grouped by role. Hidden attributes never appear
// here.
struct BatchLabels {
  std::vector<std::vector<int>> private_labels;  // per private attribute, length b
  std::vector<int> private_cardinalities;
  std::vector<std::vector<int>> useful_labels;  // per useful attribute, length b
  std::vector<int> useful_cardinalities;
  std::vector<std::vector<int>> substitute_useful;  // per useful attribute, length K
};

// Values of every loss term for one batch. All logarithms are natural.
struct LossBreakdown {
  std::vector<double> l_s;  // -sum_s w_s H(X' | S_i = s), one per private attribute
  std::vector<double> l_u;  // ln|U_j| * mean(-ln P(U'_j = u | x)), one per useful attribute
  double l_x = 0.0;         // mean row entropy H(X' | X = x)
  double lambda = 0.0;
  double mu = 0.0;
  double total = 0.0;       // sum l_s + lambda sum l_u + mu l_x
  double constant_c = 0.0;  // offset making total + constant_c bound the exact objective

  double Recompute() const;
};

// Default trade-off weights: lambda = N / M, mu = 0.2 N.
struct LossWeights {
  double lambda = 1.0;
  double mu = 0.2;
};
LossWeights DefaultLossWeights(std::size_t num_private, std::size_t num_useful);

// Nodes of the loss built on top of a probability node.
struct LossGraph {
  std::vector<NodeId> private_terms;
  std::vector<NodeId> useful_terms;
  NodeId general;
  NodeId total;
};

// Appends every loss term to `graph`. Per-batch label data enter through
// input leaves bound by BindBatchLabels:
//   "s<i>.avg"        c x b   row s averages the batch rows with label s
//   "s<i>.weight"     1 x c   batch frequency of each class
//   "u<j>.onehot"     b x c   one-hot batch labels
//   "u<j>.sub_onehot" K x c   one-hot substitute labels
LossGraph BuildLossGraph(Graph& graph, NodeId probs, std::size_t num_private,
                         const std::vector<int>& useful_cardinalities, double lambda, double mu);

void BindBatchLabels(const BatchLabels& labels, Bindings& bindings);

// Private-attribute term: class-conditional substitute distributions are
// averaged over the batch rows of each class, and their entropies are
// weighted by batch class frequency. Classes absent from the batch weigh 0.
double LossPrivate(const Tensor& probs, std::span<const int> labels, int cardinality);

// Useful-attribute term: ln(cardinality) times the batch mean of
// -ln max(P(U' = label | x), 1e-12), with P(U' = u | x) the probability mass
// on substitutes labelled u.
double LossUseful(const Tensor& probs, std::span<const int> labels,
                  std::span<const int> substitute_labels, int cardinality);

// Mean row entropy of the probability matrix.
double LossGeneral(const Tensor& probs);

LossBreakdown LossTotal(const Tensor& probs, const BatchLabels& labels, double lambda, double mu);

// (M - mu) ln K - lambda sum_j H(U_j) + lambda. Appends a warning when
// mu > N, where the bound's hypothesis fails; the value is still returned.
double ConstantC(std::size_t num_private, std::size_t num_useful, double lambda, double mu,
                 std::size_t num_substitutes, std::span<const double> useful_entropies,
                 std::vector<std::string>* warnings = nullptr);

// Classes of a useful attribute that no substitute carries. The useful loss
// stays defined (via the clamp) but cannot reach zero for these classes.
std::vector<int> MissingClasses(std::span<const int> substitute_labels, int cardinality);

}  // namespace pass
