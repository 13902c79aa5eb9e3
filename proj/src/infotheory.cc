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

#include "pass/infotheory.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <numeric>
#include <random>

#include "pass/error.h"
#include "pass/loss.h"
#include "pass/rng.h"

namespace pass {
namespace {

constexpr double kSumTolerance = 1e-9;
constexpr std::size_t kMaxJointCells = std::size_t{1} << 24;
constexpr int kMaxLdpClasses = 8;

double XLogX(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

void CheckChannel(const EnumerableInstance& instance, const Tensor& probs) {
  if (probs.rank() != 2 || probs.rows() != instance.num_states()) {
    throw ShapeError("channel must have one row per state (" +
                     std::to_string(instance.num_states()) + "), got " + ShapeString(probs.shape()));
  }
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    double sum = 0.0;
    for (double v : probs.row(i)) {
      if (!(v >= 0.0)) throw ValidationError("channel row " + std::to_string(i) + " has a negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw ValidationError("channel row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

// Joint over `axes` with state weights `weights` (need not be normalized to
// the row count, but must sum to 1).
DiscreteJoint JointFromWeights(const EnumerableInstance& instance, std::span<const double> weights,
                               const Tensor& probs, const std::vector<std::string>& axes) {
  std::vector<std::size_t> cards;
  std::vector<int> kind;  // -1 = X, -2 = X', else attribute index
  int xprime_axis = -1;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (axes[a] == "X") {
      cards.push_back(instance.num_states());
      kind.push_back(-1);
    } else if (axes[a] == "X'") {
      cards.push_back(probs.cols());
      kind.push_back(-2);
      xprime_axis = static_cast<int>(a);
    } else {
      const std::size_t idx = instance.AttributeIndex(axes[a]);
      cards.push_back(static_cast<std::size_t>(instance.schema[idx].cardinality));
      kind.push_back(static_cast<int>(idx));
    }
  }
  std::size_t cells = 1;
  for (std::size_t c : cards) {
    cells *= c;
    if (cells > kMaxJointCells) throw ResourceError("joint table exceeds 2^24 cells");
  }
  std::vector<std::size_t> strides(cards.size(), 1);
  for (std::size_t a = cards.size(); a-- > 1;) strides[a - 1] = strides[a] * cards[a];

  std::vector<double> table(cells, 0.0);
  for (std::size_t i = 0; i < instance.num_states(); ++i) {
    if (weights[i] == 0.0) continue;
    std::size_t base = 0;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      if (kind[a] == -1) base += i * strides[a];
      if (kind[a] >= 0) {
        base += static_cast<std::size_t>(instance.labels[static_cast<std::size_t>(kind[a])][i]) *
                strides[a];
      }
    }
    if (xprime_axis < 0) {
      table[base] += weights[i];
      continue;
    }
    const auto row = probs.row(i);
    const std::size_t stride = strides[static_cast<std::size_t>(xprime_axis)];
    for (std::size_t k = 0; k < row.size(); ++k) table[base + k * stride] += weights[i] * row[k];
  }
  return DiscreteJoint(axes, std::move(cards), std::move(table));
}

std::vector<std::size_t> RolesInSchema(const std::vector<AttributeSchema>& schema, Role role) {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < schema.size(); ++a) {
    if (schema[a].role == role) out.push_back(a);
  }
  return out;
}

ExactObjective ObjectiveFromWeights(const EnumerableInstance& instance,
                                    std::span<const double> weights, const Tensor& probs,
                                    double lambda, double mu) {
  ExactObjective obj;
  obj.lambda = lambda;
  obj.mu = mu;
  for (std::size_t a : RolesInSchema(instance.schema, Role::kPrivate)) {
    obj.i_s.push_back(JointFromWeights(instance, weights, probs, {"X'", instance.schema[a].name})
                          .MutualInformation({"X'"}, {instance.schema[a].name}));
  }
  for (std::size_t a : RolesInSchema(instance.schema, Role::kUseful)) {
    obj.i_u.push_back(JointFromWeights(instance, weights, probs, {"X'", instance.schema[a].name})
                          .MutualInformation({"X'"}, {instance.schema[a].name}));
  }
  // I(X'; X) = H(X') - sum_x p(x) H(X' | x), without the states x K table.
  std::vector<double> marginal(probs.cols(), 0.0);
  double conditional = 0.0;
  for (std::size_t i = 0; i < instance.num_states(); ++i) {
    if (weights[i] == 0.0) continue;
    double h = 0.0;
    const auto row = probs.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      marginal[k] += weights[i] * row[k];
      h -= XLogX(row[k]);
    }
    conditional += weights[i] * h;
  }
  double hx = 0.0;
  for (double v : marginal) hx -= XLogX(v);
  obj.i_x = hx - conditional;
  obj.value = std::accumulate(obj.i_s.begin(), obj.i_s.end(), 0.0) -
              lambda * std::accumulate(obj.i_u.begin(), obj.i_u.end(), 0.0) - mu * obj.i_x;
  return obj;
}

// One state index per dataset row.
std::vector<std::size_t> ExpandRows(const EnumerableInstance& instance) {
  std::vector<std::size_t> rows;
  rows.reserve(instance.num_rows());
  for (std::size_t i = 0; i < instance.num_states(); ++i) rows.insert(rows.end(), instance.counts[i], i);
  return rows;
}

// Draws `b` rows without replacement by a partial Fisher-Yates shuffle.
std::vector<std::size_t> DrawBatch(std::vector<std::size_t>& rows, std::size_t b, Rng& rng) {
  for (std::size_t i = 0; i < b; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, rows.size() - 1);
    std::swap(rows[i], rows[pick(rng)]);
  }
  return {rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(b)};
}

void MeanAndError(const std::vector<double>& xs, double* mean, double* se) {
  const double n = static_cast<double>(xs.size());
  *mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - *mean) * (x - *mean);
  *se = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
}

}  // namespace

double Entropy(std::span<const double> p) {
  double sum = 0.0, h = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ValidationError("entropy of a distribution with a negative entry");
    sum += v;
    h -= XLogX(v);
  }
  if (std::abs(sum - 1.0) > kSumTolerance) throw ValidationError("distribution does not sum to 1");
  return h;
}

DiscreteJoint::DiscreteJoint(std::vector<std::string> axes, std::vector<std::size_t> cardinalities,
                             std::vector<double> table)
    : axes_(std::move(axes)), cards_(std::move(cardinalities)), table_(std::move(table)) {
  if (axes_.size() != cards_.size()) throw ShapeError("one cardinality per axis required");
  std::size_t cells = 1;
  for (std::size_t c : cards_) cells *= c;
  if (cells != table_.size()) {
    throw ShapeError("joint table has " + std::to_string(table_.size()) + " cells, axes need " +
                     std::to_string(cells));
  }
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    for (std::size_t b = a + 1; b < axes_.size(); ++b) {
      if (axes_[a] == axes_[b]) throw SchemaError("duplicate axis '" + axes_[a] + "'");
    }
  }
  Entropy();  // validates entries and total
}

std::size_t DiscreteJoint::AxisIndex(const std::string& name) const {
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (axes_[a] == name) return a;
  }
  throw SchemaError("joint has no axis '" + name + "'");
}

DiscreteJoint DiscreteJoint::Marginal(const std::vector<std::string>& keep) const {
  std::vector<std::size_t> src;
  std::vector<std::size_t> cards;
  for (const auto& name : keep) {
    src.push_back(AxisIndex(name));
    cards.push_back(cards_[src.back()]);
  }
  std::size_t cells = 1;
  for (std::size_t c : cards) cells *= c;
  std::vector<std::size_t> out_strides(keep.size(), 1);
  for (std::size_t a = keep.size(); a-- > 1;) out_strides[a - 1] = out_strides[a] * cards[a];
  // Contribution of each source axis coordinate to the output index.
  std::vector<std::size_t> step(axes_.size(), 0);
  for (std::size_t a = 0; a < keep.size(); ++a) step[src[a]] = out_strides[a];

  std::vector<double> out(cells, 0.0);
  std::vector<std::size_t> coord(axes_.size(), 0);
  std::size_t target = 0;
  for (double v : table_) {
    out[target] += v;
    for (std::size_t a = axes_.size(); a-- > 0;) {
      if (++coord[a] < cards_[a]) {
        target += step[a];
        break;
      }
      target -= step[a] * (cards_[a] - 1);
      coord[a] = 0;
    }
  }
  return DiscreteJoint(keep, std::move(cards), std::move(out));
}

double DiscreteJoint::Entropy() const { return pass::Entropy(table_); }

double DiscreteJoint::ConditionalEntropy(const std::vector<std::string>& a,
                                         const std::vector<std::string>& b) const {
  std::vector<std::string> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  return Marginal(ab).Entropy() - Marginal(b).Entropy();
}

double DiscreteJoint::MutualInformation(const std::vector<std::string>& a,
                                        const std::vector<std::string>& b) const {
  std::vector<std::string> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  return Marginal(a).Entropy() + Marginal(b).Entropy() - Marginal(ab).Entropy();
}

double MutualInformation(const DiscreteJoint& joint, const std::string& a, const std::string& b) {
  return joint.MutualInformation({a}, {b});
}

std::size_t EnumerableInstance::num_rows() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::vector<double> EnumerableInstance::Probabilities() const {
  const double n = static_cast<double>(num_rows());
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / n;
  return p;
}

std::size_t EnumerableInstance::AttributeIndex(const std::string& name) const {
  for (std::size_t a = 0; a < schema.size(); ++a) {
    if (schema[a].name == name) return a;
  }
  throw SchemaError("no attribute named '" + name + "'");
}

EnumerableInstance MakeEnumerable(const Dataset& data) {
  EnumerableInstance inst;
  inst.schema = data.schema();
  inst.labels.assign(data.schema().size(), {});
  std::map<std::vector<double>, std::size_t> seen;
  std::vector<std::size_t> first_row;
  for (std::size_t r = 0; r < data.num_samples(); ++r) {
    const auto row = data.features().row(r);
    std::vector<double> key(row.begin(), row.end());
    auto [it, fresh] = seen.emplace(std::move(key), inst.counts.size());
    if (fresh) {
      if (inst.counts.size() == EnumerableInstance::kMaxStates) {
        throw ResourceError("more than " + std::to_string(EnumerableInstance::kMaxStates) +
                            " distinct rows; instance is not enumerable");
      }
      inst.counts.push_back(0);
      first_row.push_back(r);
      for (std::size_t a = 0; a < inst.schema.size(); ++a) inst.labels[a].push_back(data.labels()[a][r]);
    }
    const std::size_t s = it->second;
    ++inst.counts[s];
    for (std::size_t a = 0; a < inst.schema.size(); ++a) {
      if (data.labels()[a][r] != inst.labels[a][s]) {
        throw ValidationError("rows " + std::to_string(first_row[s]) + " and " + std::to_string(r) +
                              " share features but differ on '" + inst.schema[a].name + "'");
      }
    }
  }
  inst.states = data.features().Rows(first_row);
  return inst;
}

EnumerableInstance RandomInstance(std::size_t num_states, const std::vector<AttributeSchema>& schema,
                                  std::size_t rows, std::uint64_t seed) {
  if (num_states < 1 || num_states > EnumerableInstance::kMaxStates) {
    throw ValidationError("state count must be in [1, 4096]");
  }
  if (rows < num_states) throw ValidationError("need at least one row per state");
  ValidateSchema(schema);
  Rng rng(DeriveSeed(seed, Stream::kDiagnostics, {0}));
  EnumerableInstance inst;
  inst.schema = schema;
  std::size_t bits = 1;
  while ((std::size_t{1} << bits) < num_states) ++bits;
  inst.states = Tensor::Matrix(num_states, bits);
  for (std::size_t i = 0; i < num_states; ++i) {
    for (std::size_t b = 0; b < bits; ++b) inst.states(i, b) = static_cast<double>((i >> b) & 1);
  }
  for (const auto& attr : schema) {
    std::uniform_int_distribution<int> pick(0, attr.cardinality - 1);
    std::vector<int> y(num_states);
    for (int& v : y) v = pick(rng);
    inst.labels.push_back(std::move(y));
  }
  inst.counts.assign(num_states, 1);
  std::uniform_int_distribution<std::size_t> state(0, num_states - 1);
  for (std::size_t r = num_states; r < rows; ++r) ++inst.counts[state(rng)];
  return inst;
}

Channel ModelChannel(const SubstitutionModel& model, const EnumerableInstance& instance) {
  Channel ch;
  ch.probs = SubstitutionProbs(model, instance.states);
  ch.substitute_labels = model.substitute.labels;
  if (ch.substitute_labels.size() != instance.schema.size()) {
    throw SchemaError("model substitute labels do not match the instance schema");
  }
  return ch;
}

Channel RandomChannel(const EnumerableInstance& instance, std::size_t k, double sharpness,
                      std::uint64_t seed) {
  if (k < 1) throw ValidationError("channel needs at least one substitute");
  Rng rng(DeriveSeed(seed, Stream::kDiagnostics, {1}));
  std::normal_distribution<double> normal(0.0, sharpness);
  Channel ch;
  ch.probs = Tensor::Matrix(instance.num_states(), k);
  for (std::size_t i = 0; i < instance.num_states(); ++i) {
    auto row = ch.probs.row(i);
    for (double& v : row) v = normal(rng);
    const double top = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double& v : row) sum += (v = std::exp(v - top));
    for (double& v : row) v /= sum;
  }
  for (const auto& attr : instance.schema) {
    std::uniform_int_distribution<int> pick(0, attr.cardinality - 1);
    std::vector<int> y(k);
    for (int& v : y) v = pick(rng);
    ch.substitute_labels.push_back(std::move(y));
  }
  return ch;
}

DiscreteJoint BuildJoint(const EnumerableInstance& instance, const Tensor& probs,
                         const std::vector<std::string>& axes) {
  CheckChannel(instance, probs);
  return JointFromWeights(instance, instance.Probabilities(), probs, axes);
}

ExactObjective ComputeExactObjective(const EnumerableInstance& instance, const Tensor& probs,
                                     double lambda, double mu) {
  CheckChannel(instance, probs);
  return ObjectiveFromWeights(instance, instance.Probabilities(), probs, lambda, mu);
}

BoundReport MakeBound(std::string name, double lhs, double rhs, double standard_error) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.standard_error = standard_error;
  r.holds = standard_error > 0.0 ? r.slack >= -3.0 * standard_error : r.slack >= -r.tolerance;
  return r;
}

BoundReport CheckTheorem1(const EnumerableInstance& instance, const Channel& channel,
                          const Theorem1Options& options) {
  CheckChannel(instance, channel.probs);
  const auto priv = RolesInSchema(instance.schema, Role::kPrivate);
  const auto useful = RolesInSchema(instance.schema, Role::kUseful);
  if (options.mu > static_cast<double>(useful.size())) {
    throw ValidationError("mu = " + std::to_string(options.mu) +
                          " exceeds the useful-attribute count; the bound's hypothesis fails");
  }
  if (options.lambda < 0.0 || options.mu < 0.0) throw ValidationError("lambda and mu must be >= 0");
  if (options.num_batches < 2) throw ValidationError("need at least two batches");
  if (options.batch_size < 1 || options.batch_size > instance.num_rows()) {
    throw ValidationError("batch size must be in [1, row count]");
  }
  if (channel.substitute_labels.size() != instance.schema.size()) {
    throw SchemaError("channel substitute labels do not match the instance schema");
  }

  std::vector<double> entropies;
  for (std::size_t a : useful) {
    entropies.push_back(BuildJoint(instance, channel.probs, {instance.schema[a].name}).Entropy());
  }
  const double c = ConstantC(priv.size(), useful.size(), options.lambda, options.mu,
                             channel.probs.cols(), entropies);
  const double exact =
      ComputeExactObjective(instance, channel.probs, options.lambda, options.mu).value;

  std::vector<std::size_t> rows = ExpandRows(instance);
  std::vector<double> samples;
  samples.reserve(options.num_batches);
  BatchLabels labels;
  for (std::size_t a : priv) labels.private_cardinalities.push_back(instance.schema[a].cardinality);
  for (std::size_t a : useful) {
    labels.useful_cardinalities.push_back(instance.schema[a].cardinality);
    labels.substitute_useful.push_back(channel.substitute_labels[a]);
  }
  for (std::size_t b = 0; b < options.num_batches; ++b) {
    Rng rng(DeriveSeed(options.seed, Stream::kDiagnostics, {2, b}));
    const auto batch = DrawBatch(rows, options.batch_size, rng);
    labels.private_labels.clear();
    labels.useful_labels.clear();
    for (std::size_t a : priv) {
      std::vector<int> y;
      for (std::size_t s : batch) y.push_back(instance.labels[a][s]);
      labels.private_labels.push_back(std::move(y));
    }
    for (std::size_t a : useful) {
      std::vector<int> y;
      for (std::size_t s : batch) y.push_back(instance.labels[a][s]);
      labels.useful_labels.push_back(std::move(y));
    }
    samples.push_back(
        LossTotal(channel.probs.Rows(batch), labels, options.lambda, options.mu).total + c);
  }
  double mean = 0.0, se = 0.0;
  MeanAndError(samples, &mean, &se);
  return MakeBound("theorem1", exact, mean, se);
}

double TotalCorrelation(const EnumerableInstance& instance, const std::vector<std::string>& attrs) {
  const auto weights = instance.Probabilities();
  const DiscreteJoint joint = JointFromWeights(instance, weights, Tensor(), attrs);
  double sum = 0.0;
  for (const auto& a : attrs) sum += joint.Marginal({a}).Entropy();
  return sum - joint.Entropy();
}

std::vector<BoundReport> CheckTheorem2(const EnumerableInstance& instance, const Tensor& probs,
                                       std::size_t max_subset) {
  CheckChannel(instance, probs);
  const auto priv = RolesInSchema(instance.schema, Role::kPrivate);
  const auto useful = RolesInSchema(instance.schema, Role::kUseful);
  std::vector<double> i_u;
  for (std::size_t a : useful) {
    const auto& name = instance.schema[a].name;
    i_u.push_back(BuildJoint(instance, probs, {"X'", name}).MutualInformation({"X'"}, {name}));
  }
  const double i_x = ComputeExactObjective(instance, probs, 0.0, 0.0).i_x;

  std::vector<BoundReport> out;
  for (std::size_t s : priv) {
    const auto& s_name = instance.schema[s].name;
    const double i_s =
        BuildJoint(instance, probs, {"X'", s_name}).MutualInformation({"X'"}, {s_name});
    for (std::size_t mask = 1; mask < (std::size_t{1} << useful.size()); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) > max_subset) continue;
      std::vector<std::string> names;
      double lhs = 0.0;
      std::string label;
      for (std::size_t j = 0; j < useful.size(); ++j) {
        if (!(mask >> j & 1)) continue;
        names.push_back(instance.schema[useful[j]].name);
        lhs += i_u[j];
        label += (label.empty() ? "" : "+") + names.back();
      }
      std::vector<std::string> axes = names;
      axes.push_back(s_name);
      const double h_u_s = BuildJoint(instance, probs, axes).ConditionalEntropy(names, {s_name});
      out.push_back(MakeBound("theorem2.utility[" + s_name + "|" + label + "]", lhs,
                              i_s + h_u_s + TotalCorrelation(instance, names)));
    }
    const double h_x_s = BuildJoint(instance, probs, {"X", s_name}).ConditionalEntropy({"X"}, {s_name});
    out.push_back(MakeBound("theorem2.fidelity[" + s_name + "]", i_x, i_s + h_x_s));
  }
  return out;
}

Tensor TruePosterior(const EnumerableInstance& instance, const Tensor& probs,
                     const std::string& attribute) {
  const DiscreteJoint joint = BuildJoint(instance, probs, {"X'", attribute});
  const std::size_t k = joint.cardinalities()[0];
  const std::size_t c = joint.cardinalities()[1];
  const std::vector<double> prior = joint.Marginal({attribute}).table();
  Tensor post = Tensor::Matrix(k, c);
  for (std::size_t x = 0; x < k; ++x) {
    double px = 0.0;
    for (std::size_t s = 0; s < c; ++s) px += joint.table()[x * c + s];
    for (std::size_t s = 0; s < c; ++s) post(x, s) = px > 0.0 ? joint.table()[x * c + s] / px : prior[s];
  }
  return post;
}

LdpReport LdpBound(const EnumerableInstance& instance, const Tensor& probs,
                   const std::string& attribute) {
  const int c = instance.schema[instance.AttributeIndex(attribute)].cardinality;
  if (c > kMaxLdpClasses) {
    throw ResourceError("class-set enumeration is limited to 8 classes, '" + attribute + "' has " +
                        std::to_string(c));
  }
  const DiscreteJoint joint = BuildJoint(instance, probs, {"X'", attribute});
  const std::vector<double> prior = joint.Marginal({attribute}).table();
  const Tensor post = TruePosterior(instance, probs, attribute);
  const auto cs = static_cast<std::size_t>(c);

  LdpReport r;
  for (std::size_t x = 0; x < post.rows(); ++x) {
    double px = 0.0;
    for (std::size_t s = 0; s < cs; ++s) px += joint.table()[x * cs + s];
    if (px <= 0.0) continue;
    double kl = 0.0;
    for (std::size_t s = 0; s < cs; ++s) {
      if (post(x, s) > 0.0) kl += post(x, s) * std::log(post(x, s) / prior[s]);
    }
    r.gamma = std::max(r.gamma, kl);
  }
  r.delta = std::sqrt(2.0 * r.gamma);

  // A(x): the almighty attacker's expected posterior for each state.
  Tensor attack = Tensor::Matrix(probs.rows(), cs);
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    for (std::size_t x = 0; x < probs.cols(); ++x) {
      for (std::size_t s = 0; s < cs; ++s) attack(i, s) += probs(i, x) * post(x, s);
    }
  }
  for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << cs); ++mask) {
    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < attack.rows(); ++i) {
      double mass = 0.0;
      for (std::size_t s = 0; s < cs; ++s) {
        if (mask >> s & 1) mass += attack(i, s);
      }
      lo = std::min(lo, mass);
      hi = std::max(hi, mass);
    }
    r.empirical_sup = std::max(r.empirical_sup, hi - lo);
  }
  r.bound = MakeBound("ldp[" + attribute + "]", r.empirical_sup, r.delta);
  return r;
}

double AdversaryGap(const EnumerableInstance& instance, const Tensor& probs,
                    const std::string& attribute, const Tensor& probe_posterior) {
  const DiscreteJoint joint = BuildJoint(instance, probs, {"X'", attribute});
  const std::size_t k = joint.cardinalities()[0];
  const std::size_t c = joint.cardinalities()[1];
  if (probe_posterior.rank() != 2 || probe_posterior.rows() != k || probe_posterior.cols() != c) {
    throw ShapeError("probe posterior must be " + std::to_string(k) + " x " + std::to_string(c));
  }
  double gap = 0.0;
  for (std::size_t x = 0; x < k; ++x) {
    double px = 0.0;
    for (std::size_t s = 0; s < c; ++s) px += joint.table()[x * c + s];
    if (px <= 0.0) continue;
    for (std::size_t s = 0; s < c; ++s) {
      const double p = joint.table()[x * c + s] / px;
      if (p > 0.0) gap += px * p * std::log(p / std::max(probe_posterior(x, s), kProbFloor));
    }
  }
  if (gap < -1e-10) throw StateError("negative adversary gap " + std::to_string(gap));
  return gap;
}

double AdversaryGap(const EnumerableInstance& instance, const Tensor& probs,
                    const std::string& attribute, const ProbeClassifier& probe,
                    const Tensor& substitute_features) {
  return AdversaryGap(instance, probs, attribute, PredictProba(probe, substitute_features));
}

BiasReport MinibatchBiasDemo(const EnumerableInstance& instance, const Tensor& probs, double lambda,
                             double mu, std::size_t batch_size, std::size_t num_batches,
                             std::uint64_t seed) {
  CheckChannel(instance, probs);
  if (batch_size < 1 || batch_size > instance.num_rows()) {
    throw ValidationError("batch size must be in [1, row count]");
  }
  if (num_batches < 1) throw ValidationError("need at least one batch");
  BiasReport r;
  r.exact = ComputeExactObjective(instance, probs, lambda, mu).value;
  std::vector<std::size_t> rows = ExpandRows(instance);
  std::vector<double> samples;
  std::vector<double> weights(instance.num_states());
  for (std::size_t b = 0; b < num_batches; ++b) {
    Rng rng(DeriveSeed(seed, Stream::kDiagnostics, {3, b}));
    std::fill(weights.begin(), weights.end(), 0.0);
    const auto batch = DrawBatch(rows, batch_size, rng);
    // Accumulate counts first so a full batch reproduces the exact weights.
    std::vector<std::size_t> counts(instance.num_states(), 0);
    for (std::size_t s : batch) ++counts[s];
    for (std::size_t i = 0; i < counts.size(); ++i) {
      weights[i] = static_cast<double>(counts[i]) / static_cast<double>(batch_size);
    }
    samples.push_back(ObjectiveFromWeights(instance, weights, probs, lambda, mu).value);
  }
  MeanAndError(samples, &r.expected_batch, &r.standard_error);
  r.bias = r.expected_batch - r.exact;
  return r;
}

void WriteBoundReports(const std::string& path, const std::vector<BoundReport>& reports,
                       const RunStamp& stamp) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  for (const auto& r : reports) {
    nlohmann::json j;
    j["method"] = stamp.method;
    j["config_hash"] = stamp.config_hash;
    j["seed"] = stamp.seed;
    j["name"] = r.name;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["slack"] = r.slack;
    j["standard_error"] = r.standard_error;
    j["holds"] = r.holds;
    out << j.dump() << '\n';
  }
}

}  // namespace pass
