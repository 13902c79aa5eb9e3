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

#include "pass/adv_baseline.h"

#include <fstream>
#include <json.hpp>

#include "pass/graph.h"
#include "pass/loss.h"
#include "pass/rng.h"
#include "pass/train.h"

namespace pass {
namespace {

using nlohmann::json;

constexpr const char* kObfPrefix = "o.";

std::string AdversaryPrefix(std::size_t i) { return "a" + std::to_string(i) + "."; }
std::string UtilityPrefix(std::size_t j) { return "t" + std::to_string(j) + "."; }

std::vector<std::size_t> WithRole(const std::vector<AttributeSchema>& schema, Role role) {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < schema.size(); ++a) {
    if (schema[a].role == role) out.push_back(a);
  }
  return out;
}

NodeId CrossEntropy(Graph& g, NodeId logits, NodeId onehot) {
  const NodeId picked = g.RowSum(g.Mul(g.RowSoftmax(logits), onehot));
  return g.Scale(g.Mean(g.Log(g.ClampMin(picked, kProbFloor))), -1.0);
}

struct AdvGraph {
  Graph graph;
  NodeId released;
  NodeId adversary;
  NodeId utility;
  NodeId obfuscator;
};

void BuildAdvGraph(AdvGraph& ag, const AdvObfuscator& adv) {
  Graph& g = ag.graph;
  const NodeId z = g.Input("x");
  ag.released = g.Add(z, BuildMlp(g, z, kObfPrefix, adv.config.hidden.size() + 1));
  const std::size_t head_layers = adv.config.head_hidden.size() + 1;
  std::vector<std::pair<NodeId, double>> adversary, utility;
  const auto priv = WithRole(adv.schema, Role::kPrivate);
  const auto useful = WithRole(adv.schema, Role::kUseful);
  for (std::size_t i = 0; i < priv.size(); ++i) {
    const NodeId logits = BuildMlp(g, ag.released, AdversaryPrefix(i), head_layers);
    adversary.emplace_back(CrossEntropy(g, logits, g.Input("s" + std::to_string(i) + ".onehot")), 1.0);
  }
  for (std::size_t j = 0; j < useful.size(); ++j) {
    const NodeId logits = BuildMlp(g, ag.released, UtilityPrefix(j), head_layers);
    utility.emplace_back(CrossEntropy(g, logits, g.Input("u" + std::to_string(j) + ".onehot")), 1.0);
  }
  ag.adversary = g.Combine(adversary);
  ag.utility = g.Combine(utility);
  ag.obfuscator = g.Combine({{ag.utility, 1.0}, {ag.adversary, -adv.config.adversary_weight}});
  g.SetLabel(ag.obfuscator, "adv_obfuscator_loss");
  g.SetOutput(ag.obfuscator);
}

Tensor OneHot(const std::vector<int>& labels, std::span<const std::size_t> rows, int c) {
  Tensor t = Tensor::Matrix(rows.size(), static_cast<std::size_t>(c));
  for (std::size_t i = 0; i < rows.size(); ++i) t(i, static_cast<std::size_t>(labels[rows[i]])) = 1.0;
  return t;
}

Gradients OnlyPrefix(const Gradients& grads, const std::string& prefix) {
  Gradients out;
  for (const auto& [name, g] : grads) {
    if (name.rfind(prefix, 0) == 0) out.emplace(name, g);
  }
  return out;
}

void CheckFinite(const AdvObfuscator& adv, const AdvRecord& rec) {
  if (!std::isfinite(rec.adversary_loss) || !std::isfinite(rec.utility_loss)) {
    throw AdvTrainingAborted("step " + std::to_string(rec.step) + ": loss became non-finite",
                             rec.step, rec);
  }
  for (const auto& [name, p] : adv.params) {
    if (!p.AllFinite()) {
      throw AdvTrainingAborted(
          "step " + std::to_string(rec.step) + ": parameter '" + name + "' became non-finite",
          rec.step, rec);
    }
  }
}

Tensor Unstandardize(const Standardization& st, const Tensor& z) {
  Tensor x = z;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = row[c] * st.scale[c] + st.mean[c];
  }
  return x;
}

}  // namespace

void ValidateAdvConfig(const AdvConfig& config) {
  if (config.epochs < 1) throw ValidationError("adv: epochs must be >= 1");
  if (config.batch_size < 2) throw ValidationError("adv: batch_size must be >= 2");
  if (!(config.learning_rate > 0.0)) throw ValidationError("adv: learning_rate must be > 0");
  if (config.weight_decay < 0.0) throw ValidationError("adv: weight_decay must be >= 0");
  if (config.adversary_weight < 0.0) throw ValidationError("adv: adversary_weight must be >= 0");
  if (!(config.init_stddev > 0.0)) throw ValidationError("adv: init_stddev must be > 0");
}

AdvObfuscator InitAdv(const AdvConfig& config, const Dataset& train) {
  ValidateAdvConfig(config);
  RequirePassRoles(train.schema());
  AdvObfuscator adv;
  adv.config = config;
  adv.schema = train.schema();
  adv.standardization = Standardization::Fit(train.features());
  Rng rng(DeriveSeed(config.seed, Stream::kAdversarial, {0}));
  const std::size_t d = train.feature_dim();
  std::vector<std::size_t> widths{d};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(d);
  InitMlp(adv.params, kObfPrefix, widths, config.init_stddev, rng);
  Tensor& last = adv.params.at(WeightName(kObfPrefix, widths.size() - 2));
  last = Tensor(last.shape(), 0.0);

  auto head = [&](const std::string& prefix, int c) {
    std::vector<std::size_t> w{d};
    w.insert(w.end(), config.head_hidden.begin(), config.head_hidden.end());
    w.push_back(static_cast<std::size_t>(c));
    InitMlp(adv.params, prefix, w, config.init_stddev, rng);
  };
  const auto priv = WithRole(adv.schema, Role::kPrivate);
  const auto useful = WithRole(adv.schema, Role::kUseful);
  for (std::size_t i = 0; i < priv.size(); ++i) head(AdversaryPrefix(i), adv.schema[priv[i]].cardinality);
  for (std::size_t j = 0; j < useful.size(); ++j) head(UtilityPrefix(j), adv.schema[useful[j]].cardinality);
  return adv;
}

Tensor Obfuscate(const AdvObfuscator& adv, const Tensor& x) {
  if (x.rank() != 2 || x.cols() != adv.standardization.mean.size()) {
    throw ShapeError("obfuscator expects " + std::to_string(adv.standardization.mean.size()) +
                     " features, got " + x.ShapeString());
  }
  Graph g;
  const NodeId z = g.Input("x");
  g.SetOutput(g.Add(z, BuildMlp(g, z, kObfPrefix, adv.config.hidden.size() + 1)));
  Bindings b;
  BindParameters(adv.params, b);
  b["x"] = adv.standardization.Apply(x);
  return Unstandardize(adv.standardization, g.Forward(b));
}

AdvTrainResult TrainAdv(const Dataset& train, const AdvConfig& config,
                        const std::function<void(const AdvRecord&)>& on_record) {
  AdvTrainResult result;
  result.model = InitAdv(config, train);
  AdvObfuscator& adv = result.model;
  AdvGraph ag;
  BuildAdvGraph(ag, adv);

  const auto priv = WithRole(adv.schema, Role::kPrivate);
  const auto useful = WithRole(adv.schema, Role::kUseful);
  const Tensor z = adv.standardization.Apply(train.features());
  const std::size_t n = train.num_samples();
  const std::size_t per_epoch = (n + config.batch_size - 1) / config.batch_size;
  const std::size_t total = per_epoch * config.epochs;
  const std::uint64_t batch_seed = DeriveSeed(config.seed, Stream::kAdversarial, {1});
  AdamWState adversary_opt, utility_opt, obfuscator_opt;

  Bindings b;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& batch : Batches(n, config.batch_size, batch_seed, epoch)) {
      const double lr = CosineLr(step, total, config.learning_rate);
      b["x"] = z.Rows(batch);
      for (std::size_t i = 0; i < priv.size(); ++i) {
        b["s" + std::to_string(i) + ".onehot"] =
            OneHot(train.labels()[priv[i]], batch, adv.schema[priv[i]].cardinality);
      }
      for (std::size_t j = 0; j < useful.size(); ++j) {
        b["u" + std::to_string(j) + ".onehot"] =
            OneHot(train.labels()[useful[j]], batch, adv.schema[useful[j]].cardinality);
      }
      AdvRecord rec;
      rec.step = step;
      rec.epoch = epoch;
      rec.learning_rate = lr;

      // (a) adversaries.
      BindParameters(adv.params, b);
      ag.graph.Forward(b);
      rec.adversary_loss = ag.graph.Value(ag.adversary).item();
      OptimizerStep(adv.params, OnlyPrefix(ag.graph.Backward(ag.adversary), "a"), adversary_opt, lr,
                    config.weight_decay);
      // (b) utility heads and (c) obfuscator, against the updated adversaries.
      BindParameters(adv.params, b);
      ag.graph.Forward(b);
      rec.utility_loss = ag.graph.Value(ag.utility).item();
      rec.obfuscator_loss = ag.graph.Value(ag.obfuscator).item();
      const Gradients utility_grads = OnlyPrefix(ag.graph.Backward(ag.utility), "t");
      const Gradients obfuscator_grads = OnlyPrefix(ag.graph.Backward(ag.obfuscator), kObfPrefix);
      OptimizerStep(adv.params, utility_grads, utility_opt, lr, config.weight_decay);
      OptimizerStep(adv.params, obfuscator_grads, obfuscator_opt, lr, config.weight_decay);
      CheckFinite(adv, rec);

      if (step % config.log_every == 0 || step + 1 == total) {
        result.log.push_back(rec);
        if (on_record) on_record(rec);
      }
      ++step;
    }
  }
  return result;
}

Tensor AdversaryProba(const AdvObfuscator& adv, const Tensor& released,
                      const std::string& attribute) {
  const auto priv = WithRole(adv.schema, Role::kPrivate);
  for (std::size_t i = 0; i < priv.size(); ++i) {
    if (adv.schema[priv[i]].name != attribute) continue;
    Graph g;
    const NodeId zp = g.Input("x");
    g.SetOutput(g.RowSoftmax(BuildMlp(g, zp, AdversaryPrefix(i), adv.config.head_hidden.size() + 1)));
    Bindings b;
    BindParameters(adv.params, b);
    b["x"] = adv.standardization.Apply(released);
    return g.Forward(b);
  }
  throw SchemaError("no jointly trained adversary for '" + attribute + "'");
}

double ProtectorAccuracy(const AdvObfuscator& adv, const Dataset& test,
                         const std::string& attribute) {
  return Accuracy(ArgmaxRows(AdversaryProba(adv, Obfuscate(adv, test.features()), attribute)),
                  test.Labels(attribute));
}

Tensor AdvRelease::Release(const Tensor& x, std::size_t repeats, std::uint64_t) const {
  return RepeatRows(Obfuscate(model_, x), repeats);
}

void SaveAdvCheckpoint(const std::string& path, const AdvObfuscator& adv, const RunStamp& stamp) {
  json j;
  j["format"] = "pass-adv-checkpoint";
  j["version"] = kCheckpointVersion;
  j["method"] = stamp.method;
  j["config_hash"] = stamp.config_hash;
  j["seed"] = stamp.seed;
  j["hidden"] = adv.config.hidden;
  j["head_hidden"] = adv.config.head_hidden;
  j["adversary_weight"] = adv.config.adversary_weight;
  json schema = json::array();
  for (const auto& a : adv.schema) {
    schema.push_back({{"name", a.name}, {"cardinality", a.cardinality}, {"role", RoleName(a.role)}});
  }
  j["schema"] = std::move(schema);
  j["standardization"] = {{"mean", adv.standardization.mean},
                          {"scale", adv.standardization.scale}};
  json params = json::object();
  for (const auto& [name, t] : adv.params) {
    params[name] = {{"shape", t.shape()}, {"values", t.values()}};
  }
  j["parameters"] = std::move(params);
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write checkpoint '" + path + "'");
  out << j.dump(1) << '\n';
}

AdvObfuscator LoadAdvCheckpoint(const std::string& path, RunStamp* stamp) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open checkpoint '" + path + "'");
  try {
    json j;
    in >> j;
    if (j.at("format") != "pass-adv-checkpoint") throw ValidationError(path + ": not an adv checkpoint");
    AdvObfuscator adv;
    adv.config.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    adv.config.head_hidden = j.at("head_hidden").get<std::vector<std::size_t>>();
    adv.config.adversary_weight = j.at("adversary_weight").get<double>();
    for (const auto& a : j.at("schema")) {
      adv.schema.push_back({a.at("name").get<std::string>(), a.at("cardinality").get<int>(),
                            ParseRole(a.at("role").get<std::string>())});
    }
    adv.standardization.mean = j.at("standardization").at("mean").get<std::vector<double>>();
    adv.standardization.scale = j.at("standardization").at("scale").get<std::vector<double>>();
    for (const auto& [name, p] : j.at("parameters").items()) {
      adv.params[name] = Tensor(p.at("shape").get<std::vector<std::size_t>>(),
                                p.at("values").get<std::vector<double>>());
    }
    if (stamp != nullptr) {
      stamp->method = j.at("method").get<std::string>();
      stamp->config_hash = j.at("config_hash").get<std::string>();
      stamp->seed = j.at("seed").get<std::uint64_t>();
    }
    return adv;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": malformed checkpoint: " + e.what());
  }
}

void WriteAdvTrainLog(const std::string& path, const std::vector<AdvRecord>& log,
                      const RunStamp& stamp) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  for (const auto& r : log) {
    json j;
    j["method"] = stamp.method;
    j["config_hash"] = stamp.config_hash;
    j["seed"] = stamp.seed;
    j["step"] = r.step;
    j["epoch"] = r.epoch;
    j["lr"] = r.learning_rate;
    j["adversary_loss"] = r.adversary_loss;
    j["utility_loss"] = r.utility_loss;
    j["obfuscator_loss"] = r.obfuscator_loss;
    out << j.dump() << '\n';
  }
}

}  // namespace pass
