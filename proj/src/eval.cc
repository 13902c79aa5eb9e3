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

#include "pass/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "pass/error.h"
#include "pass/graph.h"
#include "pass/infer.h"
#include "pass/loss.h"
#include "pass/rng.h"
#include "pass/train.h"

namespace pass {
namespace {

constexpr const char* kProbePrefix = "p.";

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ProbeGraph {
  Graph graph;
  NodeId probs;
  NodeId loss;
};

void BuildProbeGraph(ProbeGraph& pg, std::size_t num_layers) {
  const NodeId x = pg.graph.Input("x");
  const NodeId logits = BuildMlp(pg.graph, x, kProbePrefix, num_layers);
  pg.probs = pg.graph.RowSoftmax(logits);
  const NodeId picked = pg.graph.RowSum(pg.graph.Mul(pg.probs, pg.graph.Input("onehot")));
  pg.loss = pg.graph.Scale(pg.graph.Mean(pg.graph.Log(pg.graph.ClampMin(picked, kProbFloor))), -1.0);
  pg.graph.SetLabel(pg.loss, "probe_cross_entropy");
  pg.graph.SetOutput(pg.loss);
}

Tensor OneHot(std::span<const int> labels, std::span<const std::size_t> rows, int c) {
  Tensor t = Tensor::Matrix(rows.size(), static_cast<std::size_t>(c));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t(i, static_cast<std::size_t>(labels[rows[i]])) = 1.0;
  }
  return t;
}

ProbeClassifier TrainOnReleases(const Tensor& released, std::span<const int> labels,
                                const AttributeSchema& attr, const ProbeConfig& config,
                                std::uint64_t seed) {
  return TrainProbe(released, labels, attr.cardinality, attr.name, config, seed);
}

// Rows of `data` the attacker may use.
std::vector<std::size_t> AttackerRows(std::size_t n, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  if (fraction >= 1.0) return rows;
  const auto keep = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
  Rng rng(DeriveSeed(seed, Stream::kAttack, {0}));
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(std::min(keep, n));
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

Tensor PassObfuscator::Release(const Tensor& x, std::size_t repeats, std::uint64_t seed) const {
  return ReleasedFeatures(model_.substitute, SubstituteBatch(model_, x, repeats, seed));
}

Tensor IdentityObfuscator::Release(const Tensor& x, std::size_t repeats, std::uint64_t) const {
  return RepeatRows(x, repeats);
}

Tensor ConstantObfuscator::Release(const Tensor& x, std::size_t repeats, std::uint64_t) const {
  if (row_.size() != x.cols()) throw ShapeError("constant row width != feature width");
  Tensor out = Tensor::Matrix(x.rows() * repeats, x.cols());
  for (std::size_t i = 0; i < out.rows(); ++i) std::copy(row_.begin(), row_.end(), out.row(i).begin());
  return out;
}

Tensor RepeatRows(const Tensor& x, std::size_t repeats) {
  if (repeats < 1) throw ValidationError("repeats must be >= 1");
  std::vector<std::size_t> idx;
  idx.reserve(x.rows() * repeats);
  for (std::size_t i = 0; i < x.rows(); ++i) idx.insert(idx.end(), repeats, i);
  return x.Rows(idx);
}

std::vector<int> RepeatLabels(std::span<const int> labels, std::size_t repeats) {
  std::vector<int> out;
  out.reserve(labels.size() * repeats);
  for (int v : labels) out.insert(out.end(), repeats, v);
  return out;
}

ProbeClassifier TrainProbe(const Tensor& x, std::span<const int> labels, int cardinality,
                           const std::string& attribute, const ProbeConfig& config,
                           std::uint64_t seed) {
  if (x.rows() != labels.size()) throw ShapeError("probe: label count != row count");
  if (x.rows() < 2) throw ValidationError("probe: need at least two training rows");
  if (config.epochs < 1 || config.batch_size < 2) {
    throw ValidationError("probe: epochs >= 1 and batch_size >= 2 required");
  }
  for (int v : labels) {
    if (v < 0 || v >= cardinality) throw ValidationError("probe: label out of range");
  }
  ProbeClassifier probe;
  probe.attribute = attribute;
  probe.cardinality = cardinality;
  probe.hidden = config.hidden;
  probe.standardization = Standardization::Fit(x);
  std::vector<std::size_t> widths{x.cols()};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(static_cast<std::size_t>(cardinality));
  Rng init(DeriveSeed(seed, Stream::kProbe, {0}));
  InitMlp(probe.params, kProbePrefix, widths, config.init_stddev, init);

  ProbeGraph pg;
  BuildProbeGraph(pg, widths.size() - 1);
  const Tensor z = probe.standardization.Apply(x);
  const std::size_t n = x.rows();
  const std::size_t per_epoch = (n + config.batch_size - 1) / config.batch_size;
  const std::size_t total = per_epoch * config.epochs;
  const std::uint64_t batch_seed = DeriveSeed(seed, Stream::kProbe, {1});
  AdamWState opt;
  Bindings b;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& batch : Batches(n, config.batch_size, batch_seed, epoch)) {
      BindParameters(probe.params, b);
      b["x"] = z.Rows(batch);
      b["onehot"] = OneHot(labels, batch, cardinality);
      pg.graph.Forward(b);
      OptimizerStep(probe.params, pg.graph.Backward(), opt,
                    CosineLr(step, total, config.learning_rate), config.weight_decay);
      ++step;
    }
  }
  return probe;
}

Tensor PredictProba(const ProbeClassifier& probe, const Tensor& x) {
  Graph g;
  const NodeId in = g.Input("x");
  g.SetOutput(g.RowSoftmax(BuildMlp(g, in, kProbePrefix, probe.hidden.size() + 1)));
  Bindings b;
  BindParameters(probe.params, b);
  b["x"] = probe.standardization.Apply(x);
  return g.Forward(b);
}

std::vector<int> ArgmaxRows(const Tensor& scores) {
  std::vector<int> out(scores.rows());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto row = scores.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (row[j] > row[best]) best = j;
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

std::vector<int> Predict(const ProbeClassifier& probe, const Tensor& x) {
  return ArgmaxRows(PredictProba(probe, x));
}

double Accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.empty()) throw ValidationError("accuracy of an empty set");
  if (predictions.size() != labels.size()) throw ShapeError("prediction count != label count");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

void ValidateBudget(const AttackBudget& budget) {
  if (!(budget.data_fraction > 0.0 && budget.data_fraction <= 1.0)) {
    throw ValidationError("attack data_fraction must be in (0, 1]");
  }
  if (budget.repeats < 1) throw ValidationError("attack repeats must be >= 1");
}

ProbeClassifier ProbingAttack(const Obfuscator& obfuscator, const Dataset& attacker_data,
                              const std::string& attribute, const AttackBudget& budget) {
  ValidateBudget(budget);
  const AttributeSchema& attr = attacker_data.Attribute(attribute);
  const auto rows = AttackerRows(attacker_data.num_samples(), budget.data_fraction, budget.seed);
  const Tensor released = obfuscator.Release(attacker_data.features().Rows(rows), budget.repeats,
                                             DeriveSeed(budget.seed, Stream::kAttack, {1}));
  std::vector<int> y;
  y.reserve(rows.size());
  for (std::size_t r : rows) y.push_back(attacker_data.Labels(attribute)[r]);
  return TrainOnReleases(released, RepeatLabels(y, budget.repeats), attr, budget.probe,
                         DeriveSeed(budget.seed, Stream::kProbe, {2}));
}

double ReleasedAccuracy(const ProbeClassifier& probe, const Obfuscator& obfuscator,
                        const Dataset& test, const std::string& attribute, std::size_t repeats,
                        std::uint64_t seed) {
  const Tensor released = obfuscator.Release(test.features(), repeats, seed);
  return Accuracy(Predict(probe, released), RepeatLabels(test.Labels(attribute), repeats));
}

int MajorityClass(std::span<const int> labels, int cardinality) {
  const auto freq = ClassFrequencies(labels, cardinality);
  return static_cast<int>(std::max_element(freq.begin(), freq.end()) - freq.begin());
}

BaselineResult Baselines(const Dataset& train, const Dataset& test, const std::string& attribute,
                         const ProbeConfig& config, std::uint64_t seed) {
  const AttributeSchema& attr = train.Attribute(attribute);
  BaselineResult r;
  const int majority = MajorityClass(train.Labels(attribute), attr.cardinality);
  r.acc_guessing = ClassFrequencies(test.Labels(attribute), attr.cardinality)[majority];
  r.clean_probe = TrainProbe(train.features(), train.Labels(attribute), attr.cardinality,
                             attribute, config, seed);
  r.acc_no_suppr = Accuracy(Predict(r.clean_probe, test.features()), test.Labels(attribute));
  return r;
}

double UnfinetunedAccuracy(const ProbeClassifier& clean_probe, const Obfuscator& obfuscator,
                           const Dataset& test, const std::string& attribute,
                           std::size_t repeats, std::uint64_t seed) {
  return ReleasedAccuracy(clean_probe, obfuscator, test, attribute, repeats, seed);
}

double Nag(double acc, double acc_guessing, double acc_no_suppr) {
  if (!(acc_no_suppr > acc_guessing)) {
    throw ValidationError("NAG undefined: no-suppression accuracy " + Num(acc_no_suppr) +
                          " does not exceed guessing accuracy " + Num(acc_guessing));
  }
  return std::max(0.0, (acc - acc_guessing) / (acc_no_suppr - acc_guessing));
}

const AttributeMetrics& MetricsReport::Find(const std::string& attribute) const {
  for (const auto& a : attributes) {
    if (a.attribute == attribute) return a;
  }
  throw SchemaError("no metrics for attribute '" + attribute + "'");
}

double Mnag(const std::vector<AttributeMetrics>& attributes, bool unfinetuned) {
  double keep = 0.0, hide = 0.0;
  std::size_t n_keep = 0, n_hide = 0;
  for (const auto& a : attributes) {
    double v = a.nag;
    if (unfinetuned) {
      if (!a.nag_unfinetuned) throw ValidationError("missing un-finetuned NAG for " + a.attribute);
      v = *a.nag_unfinetuned;
    }
    if (a.role == Role::kPrivate) {
      hide += v;
      ++n_hide;
    } else {
      keep += v;
      ++n_keep;
    }
  }
  if (n_keep == 0 || n_hide == 0) {
    throw ValidationError("mNAG needs at least one private and one useful or hidden attribute");
  }
  return keep / static_cast<double>(n_keep) - hide / static_cast<double>(n_hide);
}

MetricsReport Evaluate(const Obfuscator& obfuscator, const Dataset& train, const Dataset& test,
                       const EvalConfig& config) {
  const AttackBudget& budget = config.budget;
  ValidateBudget(budget);
  MetricsReport report;
  report.method = obfuscator.name();
  report.seed = budget.seed;

  // One attacker query set and one test release, shared by every attribute.
  const auto rows = AttackerRows(train.num_samples(), budget.data_fraction, budget.seed);
  const Tensor attack_x = obfuscator.Release(train.features().Rows(rows), budget.repeats,
                                             DeriveSeed(budget.seed, Stream::kAttack, {1}));
  const Tensor test_x = obfuscator.Release(test.features(), budget.repeats,
                                           DeriveSeed(budget.seed, Stream::kAttack, {2}));

  std::vector<std::size_t> order(train.schema().size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return train.schema()[a].name < train.schema()[b].name;
  });
  for (std::size_t a : order) {
    const AttributeSchema& attr = train.schema()[a];
    const std::uint64_t attr_seed = DeriveSeed(budget.seed, Stream::kProbe, {a});
    const BaselineResult base =
        Baselines(train, test, attr.name, budget.probe, DeriveSeed(attr_seed, {0}));
    std::vector<int> y;
    y.reserve(rows.size());
    for (std::size_t r : rows) y.push_back(train.labels()[a][r]);
    const ProbeClassifier probe = TrainOnReleases(attack_x, RepeatLabels(y, budget.repeats), attr,
                                                  budget.probe, DeriveSeed(attr_seed, {1}));
    const std::vector<int> test_y = RepeatLabels(test.labels()[a], budget.repeats);

    AttributeMetrics m;
    m.attribute = attr.name;
    m.role = attr.role;
    m.acc = Accuracy(Predict(probe, test_x), test_y);
    m.acc_guessing = base.acc_guessing;
    m.acc_no_suppr = base.acc_no_suppr;
    m.nag = Nag(m.acc, m.acc_guessing, m.acc_no_suppr);
    if (config.unfinetuned) {
      m.acc_unfinetuned = Accuracy(Predict(base.clean_probe, test_x), test_y);
      m.nag_unfinetuned = Nag(*m.acc_unfinetuned, m.acc_guessing, m.acc_no_suppr);
    }
    report.attributes.push_back(std::move(m));
  }
  report.mnag = Mnag(report.attributes);
  if (config.unfinetuned) report.mnag_unfinetuned = Mnag(report.attributes, true);
  return report;
}

void WriteMetricsJson(const std::string& path, const MetricsReport& report) {
  nlohmann::json j;
  j["method"] = report.method;
  j["config_hash"] = report.config_hash;
  j["seed"] = report.seed;
  j["mnag"] = report.mnag;
  if (report.mnag_unfinetuned) j["mnag_unfinetuned"] = *report.mnag_unfinetuned;
  nlohmann::json attrs = nlohmann::json::array();
  for (const auto& a : report.attributes) {
    nlohmann::json r;
    r["attribute"] = a.attribute;
    r["role"] = RoleName(a.role);
    r["acc"] = a.acc;
    r["acc_guessing"] = a.acc_guessing;
    r["acc_no_suppr"] = a.acc_no_suppr;
    r["nag"] = a.nag;
    if (a.acc_unfinetuned) r["acc_unfinetuned"] = *a.acc_unfinetuned;
    if (a.nag_unfinetuned) r["nag_unfinetuned"] = *a.nag_unfinetuned;
    attrs.push_back(std::move(r));
  }
  j["attributes"] = std::move(attrs);
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

void WriteMetricsCsv(const std::string& path, const MetricsReport& report) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "# method=" << report.method << " config_hash=" << report.config_hash
      << " seed=" << report.seed << '\n';
  out << "attribute,role,acc,acc_guessing,acc_no_suppr,nag\n";
  for (const auto& a : report.attributes) {
    out << a.attribute << ',' << RoleName(a.role) << ',' << Num(a.acc) << ','
        << Num(a.acc_guessing) << ',' << Num(a.acc_no_suppr) << ',' << Num(a.nag) << '\n';
  }
}

}  // namespace pass
