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

#include "pass/train.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <numeric>

namespace pass {
namespace {

double Entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

bool AllFinite(const LossBreakdown& b) {
  if (!std::isfinite(b.total) || !std::isfinite(b.l_x)) return false;
  for (double v : b.l_s) {
    if (!std::isfinite(v)) return false;
  }
  for (double v : b.l_u) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double TrainingConstant(const SubstitutionModel& model, const Dataset& data, double lambda,
                        double mu, std::vector<std::string>* warnings) {
  std::vector<double> entropies;
  const auto useful = data.AttributesWithRole(Role::kUseful);
  for (std::size_t a : useful) {
    entropies.push_back(Entropy(ClassFrequencies(data.labels()[a], data.schema()[a].cardinality)));
  }
  return ConstantC(data.AttributesWithRole(Role::kPrivate).size(), useful.size(), lambda, mu,
                   model.num_substitutes(), entropies, warnings);
}

std::vector<int> UsefulCardinalities(const Dataset& data) {
  std::vector<int> out;
  for (std::size_t a : data.AttributesWithRole(Role::kUseful)) {
    out.push_back(data.schema()[a].cardinality);
  }
  return out;
}

// Substitution graph with the loss stacked on top.
struct TrainingGraph {
  Graph graph;
  SubstitutionGraph sub;
  LossGraph loss;
};

void BuildTrainingGraph(TrainingGraph& tg, const SubstitutionModel& model, const Dataset& data,
                        double lambda, double mu) {
  tg.sub = BuildSubstitutionGraph(tg.graph, model);
  tg.loss = BuildLossGraph(tg.graph, tg.sub.probs, data.AttributesWithRole(Role::kPrivate).size(),
                           UsefulCardinalities(data), lambda, mu);
  tg.graph.SetOutput(tg.loss.total);
}

LossBreakdown ReadBreakdown(const TrainingGraph& tg, double lambda, double mu, double c) {
  LossBreakdown b;
  for (NodeId id : tg.loss.private_terms) b.l_s.push_back(tg.graph.Value(id).item());
  for (NodeId id : tg.loss.useful_terms) b.l_u.push_back(tg.graph.Value(id).item());
  b.l_x = tg.graph.Value(tg.loss.general).item();
  b.lambda = lambda;
  b.mu = mu;
  b.total = tg.graph.Value(tg.loss.total).item();
  b.constant_c = c;
  return b;
}

}  // namespace

void ValidateTrainConfig(const TrainConfig& config) {
  if (config.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (config.batch_size < 2) throw ValidationError("batch_size must be >= 2");
  if (!(config.learning_rate >= 0.0)) throw ValidationError("learning_rate must be >= 0");
  if (!(config.weight_decay >= 0.0)) throw ValidationError("weight_decay must be >= 0");
  if (config.lambda && !(*config.lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
  if (config.mu && !(*config.mu >= 0.0)) throw ValidationError("mu must be >= 0");
  if (config.log_every < 1) throw ValidationError("log_every must be >= 1");
}

void OptimizerStep(ParameterSet& params, const Gradients& grads, AdamWState& state, double lr,
                   double weight_decay) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (auto& [name, p] : params) {
    auto g = grads.find(name);
    if (g == grads.end()) continue;
    if (!g->second.SameShape(p)) {
      throw ShapeError("gradient of '" + name + "' has shape " + g->second.ShapeString() +
                       ", parameter has " + p.ShapeString());
    }
    auto [m_it, m_new] = state.m.try_emplace(name, p.shape(), 0.0);
    auto [v_it, v_new] = state.v.try_emplace(name, p.shape(), 0.0);
    Tensor& m = m_it->second;
    Tensor& v = v_it->second;
    const Tensor& gr = g->second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * gr[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * gr[i] * gr[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      const double old = p[i];
      p[i] = old - lr * m_hat / (std::sqrt(v_hat) + state.eps) - lr * weight_decay * old;
    }
  }
}

double CosineLr(std::size_t step, std::size_t total_steps, double base_lr) {
  if (total_steps == 0) return base_lr;
  if (step > total_steps) throw ValidationError("cosine_lr: step beyond total_steps");
  const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
}

LossWeights ResolveWeights(const TrainConfig& config, const std::vector<AttributeSchema>& schema) {
  std::size_t m = 0, n = 0;
  for (const auto& a : schema) {
    if (a.role == Role::kPrivate) ++m;
    if (a.role == Role::kUseful) ++n;
  }
  LossWeights w = DefaultLossWeights(m, n);
  if (config.lambda) w.lambda = *config.lambda;
  if (config.mu) w.mu = *config.mu;
  return w;
}

BatchLabels GatherBatchLabels(const Dataset& data, const SubstituteSet& substitute,
                              std::span<const std::size_t> batch) {
  BatchLabels bl;
  for (std::size_t a = 0; a < data.schema().size(); ++a) {
    const auto& attr = data.schema()[a];
    if (attr.role == Role::kHidden) continue;
    std::vector<int> y;
    y.reserve(batch.size());
    for (std::size_t i : batch) y.push_back(data.labels()[a][i]);
    if (attr.role == Role::kPrivate) {
      bl.private_labels.push_back(std::move(y));
      bl.private_cardinalities.push_back(attr.cardinality);
    } else {
      bl.useful_labels.push_back(std::move(y));
      bl.useful_cardinalities.push_back(attr.cardinality);
      bl.substitute_useful.push_back(substitute.labels[a]);
    }
  }
  return bl;
}

LossBreakdown EvaluateLoss(const SubstitutionModel& model, const Dataset& data,
                           std::span<const std::size_t> rows, double lambda, double mu) {
  if (rows.empty()) throw ValidationError("evaluate_loss: no rows");
  TrainingGraph tg;
  BuildTrainingGraph(tg, model, data, lambda, mu);
  Bindings b;
  BindParameters(model.params, b);
  BindBatchLabels(GatherBatchLabels(data, model.substitute, rows), b);
  b["x"] = model.standardization.Apply(data.features().Rows(rows));
  tg.graph.Forward(b);
  return ReadBreakdown(tg, lambda, mu, TrainingConstant(model, data, lambda, mu, nullptr));
}

TrainResult Train(SubstitutionModel model, const Dataset& train, const TrainConfig& config,
                  const std::function<void(const TrainRecord&)>& on_record) {
  ValidateTrainConfig(config);
  RequirePassRoles(train.schema());
  ValidateModel(model);
  if (train.feature_dim() != model.input_dim) {
    throw ShapeError("model expects " + std::to_string(model.input_dim) +
                     " features, training data has " + std::to_string(train.feature_dim()));
  }
  for (std::size_t idx : model.substitute.indices) {
    if (idx >= train.num_samples()) {
      throw ValidationError("substitute index " + std::to_string(idx) +
                            " is outside the training set");
    }
  }

  const LossWeights w = ResolveWeights(config, train.schema());
  TrainResult result;
  TrainLog& log = result.log;
  const double c = TrainingConstant(model, train, w.lambda, w.mu, &log.warnings);
  for (std::size_t a : train.AttributesWithRole(Role::kUseful)) {
    const auto missing = MissingClasses(model.substitute.labels[a], train.schema()[a].cardinality);
    if (!missing.empty()) {
      log.warnings.push_back("substitute set lacks " + std::to_string(missing.size()) +
                             " class(es) of useful attribute '" + train.schema()[a].name + "'");
    }
  }

  TrainingGraph tg;
  BuildTrainingGraph(tg, model, train, w.lambda, w.mu);
  const Tensor x_all = model.standardization.Apply(train.features());

  const std::size_t n = train.num_samples();
  const std::size_t per_epoch = (n + config.batch_size - 1) / config.batch_size;
  log.total_steps = per_epoch * config.epochs;

  AdamWState opt;
  Bindings b;
  const auto start = std::chrono::steady_clock::now();
  std::size_t step = 0;
  LossBreakdown last;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& batch : Batches(n, config.batch_size, config.seed, epoch)) {
      BindParameters(model.params, b);
      BindBatchLabels(GatherBatchLabels(train, model.substitute, batch), b);
      b["x"] = x_all.Rows(batch);
      try {
        tg.graph.Forward(b);
      } catch (const OverflowError& e) {
        throw TrainingAborted("step " + std::to_string(step) + ": " + e.what(), step, last);
      }
      const LossBreakdown breakdown = ReadBreakdown(tg, w.lambda, w.mu, c);
      if (!AllFinite(breakdown)) {
        throw TrainingAborted("step " + std::to_string(step) + ": non-finite loss", step,
                              breakdown);
      }
      const double lr = CosineLr(step, log.total_steps, config.learning_rate);
      const bool is_last = step + 1 == log.total_steps;
      if (step % config.log_every == 0 || is_last) {
        TrainRecord rec;
        rec.step = step;
        rec.epoch = epoch;
        rec.learning_rate = lr;
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rec.breakdown = breakdown;
        if (on_record) on_record(rec);
        log.records.push_back(std::move(rec));
      }
      const Gradients grads = tg.graph.Backward();
      for (const auto& [name, g] : grads) {
        if (!g.AllFinite()) {
          throw TrainingAborted("step " + std::to_string(step) + ": non-finite gradient of '" +
                                    name + "'",
                                step, breakdown);
        }
      }
      OptimizerStep(model.params, grads, opt, lr, config.weight_decay);
      for (const auto& [name, p] : model.params) {
        if (!p.AllFinite()) {
          throw TrainingAborted("step " + std::to_string(step) + ": parameter '" + name +
                                    "' became non-finite",
                                step, breakdown);
        }
      }
      last = breakdown;
      ++step;
    }
  }
  result.model = std::move(model);
  return result;
}

void WriteTrainLog(const std::string& path, const TrainLog& log, const RunStamp& stamp) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write train log '" + path + "'");
  for (const TrainRecord& r : log.records) {
    nlohmann::json j;
    j["config_hash"] = stamp.config_hash;
    j["seed"] = stamp.seed;
    j["step"] = r.step;
    j["epoch"] = r.epoch;
    j["lr"] = r.learning_rate;
    j["wall_seconds"] = r.wall_seconds;
    j["l_s"] = r.breakdown.l_s;
    j["l_u"] = r.breakdown.l_u;
    j["l_x"] = r.breakdown.l_x;
    j["lambda"] = r.breakdown.lambda;
    j["mu"] = r.breakdown.mu;
    j["total"] = r.breakdown.total;
    j["constant_c"] = r.breakdown.constant_c;
    out << j.dump() << '\n';
  }
}

}  // namespace pass
