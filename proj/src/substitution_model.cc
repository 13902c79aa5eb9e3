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

#include "pass/substitution_model.h"

#include <random>

#include "pass/error.h"
#include "pass/rng.h"

namespace pass {

SubstitutionModel InitModel(const ModelConfig& config, const Dataset& train,
                            SubstituteSet substitute, std::uint64_t seed) {
  if (config.embed_dim == 0) throw ValidationError("embed_dim must be positive");
  if (!(config.tau > 0.0)) throw ValidationError("tau must be positive");
  if (substitute.size() == 0) throw ValidationError("substitute set must not be empty");
  SubstitutionModel model;
  model.config = config;
  model.input_dim = train.feature_dim();
  model.standardization = Standardization::Fit(train.features());

  std::vector<std::size_t> widths{model.input_dim};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(config.embed_dim);

  Rng rng(DeriveSeed(seed, Stream::kInit));
  InitMlp(model.params, "f.", widths, config.init_stddev, rng);
  std::normal_distribution<double> normal(0.0, config.init_stddev);
  Tensor g = Tensor::Matrix(substitute.size(), config.embed_dim);
  for (double& v : g.values()) v = normal(rng);
  model.params["g"] = std::move(g);
  model.substitute = std::move(substitute);
  ValidateModel(model);
  return model;
}

void ValidateModel(const SubstitutionModel& model) {
  if (!(model.config.tau > 0.0)) throw ValidationError("tau must be positive");
  auto it = model.params.find("g");
  if (it == model.params.end()) throw ValidationError("model has no substitute table 'g'");
  if (it->second.rows() != model.substitute.size()) {
    throw ValidationError("substitute table has " + std::to_string(it->second.rows()) +
                          " rows for " + std::to_string(model.substitute.size()) + " substitutes");
  }
  for (const auto& [name, t] : model.params) {
    if (!t.AllFinite()) throw ValidationError("parameter '" + name + "' is not finite");
  }
}

SubstitutionGraph BuildSubstitutionGraph(Graph& graph, const SubstitutionModel& model) {
  SubstitutionGraph sg{};
  sg.x = graph.Input("x");
  sg.embedding = BuildMlp(graph, sg.x, "f.", model.num_layers());
  graph.SetLabel(sg.embedding, "embedding");
  const NodeId g = graph.Parameter("g");
  const NodeId f_hat = graph.RowL2Normalize(sg.embedding, kNormGuard);
  const NodeId g_hat = graph.RowL2Normalize(g, kNormGuard);
  sg.logits = graph.Scale(graph.MatMulTransposeB(f_hat, g_hat), 1.0 / model.config.tau);
  graph.SetLabel(sg.logits, "cosine_logits");
  sg.probs = graph.RowSoftmax(sg.logits);
  graph.SetLabel(sg.probs, "substitution_probs");
  return sg;
}

Tensor Embed(const SubstitutionModel& model, const Tensor& x) {
  if (x.cols() != model.input_dim) {
    throw ShapeError("embed expects " + std::to_string(model.input_dim) + " features, got " +
                     std::to_string(x.cols()));
  }
  Graph graph;
  const NodeId input = graph.Input("x");
  const NodeId out = BuildMlp(graph, input, "f.", model.num_layers());
  graph.SetOutput(out);
  Bindings b;
  for (const auto& [name, t] : model.params) {
    if (name != "g") b[name] = t;
  }
  b["x"] = model.standardization.Apply(x);
  return graph.Forward(b);
}

Tensor SubstitutionProbs(const SubstitutionModel& model, const Tensor& x) {
  if (x.cols() != model.input_dim) {
    throw ShapeError("substitution_probs expects " + std::to_string(model.input_dim) +
                     " features, got " + std::to_string(x.cols()));
  }
  Graph graph;
  const SubstitutionGraph sg = BuildSubstitutionGraph(graph, model);
  graph.SetOutput(sg.probs);
  Bindings b;
  BindParameters(model.params, b);
  b["x"] = model.standardization.Apply(x);
  return graph.Forward(b);
}

Tensor SubstitutionProbsFromEmbeddings(const Tensor& f, const Tensor& g, double tau) {
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  Graph graph;
  const NodeId fi = graph.Input("f");
  const NodeId gi = graph.Input("g");
  const NodeId logits = graph.Scale(
      graph.MatMulTransposeB(graph.RowL2Normalize(fi, kNormGuard), graph.RowL2Normalize(gi, kNormGuard)),
      1.0 / tau);
  graph.SetOutput(graph.RowSoftmax(logits));
  return graph.Forward({{"f", f}, {"g", g}});
}

}  // namespace pass
