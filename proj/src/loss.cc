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

#include "pass/loss.h"

#include <cmath>

#include "pass/error.h"

namespace pass {
namespace {

std::string Key(char role, std::size_t i, const char* what) {
  return std::string(1, role) + std::to_string(i) + "." + what;
}

void CheckLabels(std::span<const int> labels, int cardinality, const char* what) {
  for (int v : labels) {
    if (v < 0 || v >= cardinality) {
      throw ValidationError(std::string(what) + " label " + std::to_string(v) + " outside [0, " +
                            std::to_string(cardinality) + ")");
    }
  }
}

Tensor OneHot(std::span<const int> labels, int cardinality) {
  Tensor t = Tensor::Matrix(labels.size(), static_cast<std::size_t>(cardinality));
  for (std::size_t i = 0; i < labels.size(); ++i) t(i, static_cast<std::size_t>(labels[i])) = 1.0;
  return t;
}

void CheckProbs(const Tensor& probs) {
  if (probs.rank() != 2) throw ShapeError("probability matrix must be rank 2");
}

}  // namespace

double LossBreakdown::Recompute() const {
  double t = 0.0;
  for (double v : l_s) t += v;
  for (double v : l_u) t += lambda * v;
  return t + mu * l_x;
}

LossWeights DefaultLossWeights(std::size_t num_private, std::size_t num_useful) {
  if (num_private == 0) throw ValidationError("need at least one private attribute");
  return {static_cast<double>(num_useful) / static_cast<double>(num_private),
          0.2 * static_cast<double>(num_useful)};
}

LossGraph BuildLossGraph(Graph& graph, NodeId probs, std::size_t num_private,
                         const std::vector<int>& useful_cardinalities, double lambda, double mu) {
  if (lambda < 0.0 || mu < 0.0) throw ValidationError("lambda and mu must be non-negative");
  LossGraph lg{};
  std::vector<std::pair<NodeId, double>> terms;

  for (std::size_t i = 0; i < num_private; ++i) {
    const NodeId avg = graph.Input(Key('s', i, "avg"));
    const NodeId weight = graph.Input(Key('s', i, "weight"));
    const NodeId conditional = graph.MatMul(avg, probs);
    const NodeId neg_entropy = graph.RowSum(graph.XLogX(conditional, kProbFloor));
    const NodeId term = graph.MatMul(weight, neg_entropy);
    graph.SetLabel(term, "loss_private_" + std::to_string(i));
    lg.private_terms.push_back(term);
    terms.emplace_back(term, 1.0);
  }

  for (std::size_t j = 0; j < useful_cardinalities.size(); ++j) {
    const int c = useful_cardinalities[j];
    if (c < 2) throw ValidationError("useful attribute cardinality must be >= 2");
    const NodeId onehot = graph.Input(Key('u', j, "onehot"));
    const NodeId sub_onehot = graph.Input(Key('u', j, "sub_onehot"));
    const NodeId class_mass = graph.MatMul(probs, sub_onehot);
    const NodeId matched = graph.RowSum(graph.Mul(class_mass, onehot));
    const NodeId log_p = graph.Log(graph.ClampMin(matched, kProbFloor));
    const NodeId term = graph.Scale(graph.Mean(log_p), -std::log(static_cast<double>(c)));
    graph.SetLabel(term, "loss_useful_" + std::to_string(j));
    lg.useful_terms.push_back(term);
    terms.emplace_back(term, lambda);
  }

  lg.general = graph.Scale(graph.Mean(graph.RowSum(graph.XLogX(probs, kProbFloor))), -1.0);
  graph.SetLabel(lg.general, "loss_general");
  terms.emplace_back(lg.general, mu);

  lg.total = graph.Combine(std::move(terms));
  graph.SetLabel(lg.total, "loss_total");
  return lg;
}

void BindBatchLabels(const BatchLabels& labels, Bindings& bindings) {
  if (labels.private_labels.size() != labels.private_cardinalities.size() ||
      labels.useful_labels.size() != labels.useful_cardinalities.size() ||
      labels.substitute_useful.size() != labels.useful_labels.size()) {
    throw ValidationError("batch labels are inconsistent with their cardinalities");
  }
  for (std::size_t i = 0; i < labels.private_labels.size(); ++i) {
    const auto& y = labels.private_labels[i];
    const int c = labels.private_cardinalities[i];
    if (y.empty()) throw ValidationError("empty batch");
    CheckLabels(y, c, "private");
    std::vector<double> counts(static_cast<std::size_t>(c), 0.0);
    for (int v : y) counts[static_cast<std::size_t>(v)] += 1.0;
    Tensor avg = Tensor::Matrix(static_cast<std::size_t>(c), y.size());
    Tensor weight = Tensor::Matrix(1, static_cast<std::size_t>(c));
    for (std::size_t r = 0; r < y.size(); ++r) {
      const auto s = static_cast<std::size_t>(y[r]);
      avg(s, r) = 1.0 / counts[s];
    }
    for (std::size_t s = 0; s < counts.size(); ++s) {
      weight[s] = counts[s] / static_cast<double>(y.size());
    }
    bindings[Key('s', i, "avg")] = std::move(avg);
    bindings[Key('s', i, "weight")] = std::move(weight);
  }
  for (std::size_t j = 0; j < labels.useful_labels.size(); ++j) {
    const int c = labels.useful_cardinalities[j];
    if (labels.useful_labels[j].empty()) throw ValidationError("empty batch");
    CheckLabels(labels.useful_labels[j], c, "useful");
    CheckLabels(labels.substitute_useful[j], c, "substitute useful");
    bindings[Key('u', j, "onehot")] = OneHot(labels.useful_labels[j], c);
    bindings[Key('u', j, "sub_onehot")] = OneHot(labels.substitute_useful[j], c);
  }
}

double LossPrivate(const Tensor& probs, std::span<const int> labels, int cardinality) {
  CheckProbs(probs);
  if (labels.empty()) throw ValidationError("loss_private: empty batch");
  if (labels.size() != probs.rows()) throw ShapeError("loss_private: label count != batch size");
  BatchLabels bl;
  bl.private_labels.emplace_back(labels.begin(), labels.end());
  bl.private_cardinalities.push_back(cardinality);
  Graph g;
  const NodeId p = g.Input("probs");
  const LossGraph lg = BuildLossGraph(g, p, 1, {}, 0.0, 0.0);
  g.SetOutput(lg.private_terms[0]);
  Bindings b{{"probs", probs}};
  BindBatchLabels(bl, b);
  return g.Forward(b).item();
}

double LossUseful(const Tensor& probs, std::span<const int> labels,
                  std::span<const int> substitute_labels, int cardinality) {
  CheckProbs(probs);
  if (labels.empty()) throw ValidationError("loss_useful: empty batch");
  if (labels.size() != probs.rows()) throw ShapeError("loss_useful: label count != batch size");
  if (substitute_labels.size() != probs.cols()) {
    throw ShapeError("loss_useful: substitute label count != substitute count");
  }
  BatchLabels bl;
  bl.useful_labels.emplace_back(labels.begin(), labels.end());
  bl.useful_cardinalities.push_back(cardinality);
  bl.substitute_useful.emplace_back(substitute_labels.begin(), substitute_labels.end());
  Graph g;
  const NodeId p = g.Input("probs");
  const LossGraph lg = BuildLossGraph(g, p, 0, {cardinality}, 0.0, 0.0);
  g.SetOutput(lg.useful_terms[0]);
  Bindings b{{"probs", probs}};
  BindBatchLabels(bl, b);
  return g.Forward(b).item();
}

double LossGeneral(const Tensor& probs) {
  CheckProbs(probs);
  Graph g;
  const NodeId p = g.Input("probs");
  const LossGraph lg = BuildLossGraph(g, p, 0, {}, 0.0, 0.0);
  g.SetOutput(lg.general);
  return g.Forward({{"probs", probs}}).item();
}

LossBreakdown LossTotal(const Tensor& probs, const BatchLabels& labels, double lambda, double mu) {
  CheckProbs(probs);
  Graph g;
  const NodeId p = g.Input("probs");
  const LossGraph lg = BuildLossGraph(g, p, labels.private_labels.size(),
                                      labels.useful_cardinalities, lambda, mu);
  g.SetOutput(lg.total);
  Bindings b{{"probs", probs}};
  BindBatchLabels(labels, b);
  g.Forward(b);
  LossBreakdown out;
  for (NodeId id : lg.private_terms) out.l_s.push_back(g.Value(id).item());
  for (NodeId id : lg.useful_terms) out.l_u.push_back(g.Value(id).item());
  out.l_x = g.Value(lg.general).item();
  out.lambda = lambda;
  out.mu = mu;
  out.total = g.Value(lg.total).item();
  return out;
}

double ConstantC(std::size_t num_private, std::size_t num_useful, double lambda, double mu,
                 std::size_t num_substitutes, std::span<const double> useful_entropies,
                 std::vector<std::string>* warnings) {
  if (num_substitutes == 0) throw ValidationError("constant_c: empty substitute set");
  if (mu > static_cast<double>(num_useful) && warnings != nullptr) {
    warnings->push_back("mu = " + std::to_string(mu) + " exceeds N = " +
                        std::to_string(num_useful) + "; the loss bound's hypothesis does not hold");
  }
  double sum_h = 0.0;
  for (double h : useful_entropies) sum_h += h;
  return (static_cast<double>(num_private) - mu) * std::log(static_cast<double>(num_substitutes)) -
         lambda * sum_h + lambda;
}

std::vector<int> MissingClasses(std::span<const int> substitute_labels, int cardinality) {
  std::vector<bool> seen(static_cast<std::size_t>(cardinality), false);
  for (int v : substitute_labels) {
    if (v >= 0 && v < cardinality) seen[static_cast<std::size_t>(v)] = true;
  }
  std::vector<int> missing;
  for (int c = 0; c < cardinality; ++c) {
    if (!seen[static_cast<std::size_t>(c)]) missing.push_back(c);
  }
  return missing;
}

}  // namespace pass
