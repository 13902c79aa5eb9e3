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
#include <span>
#include <string>
#include <vector>

#include "pass/dataset.h"
#include "pass/eval.h"
#include "pass/substitution_model.h"
#include "pass/tensor.h"

namespace pass {

// Shannon entropy in nats with 0 ln 0 = 0. Throws ValidationError on a
// negative entry or a total that is not 1 (within 1e-9).
double Entropy(std::span<const double> p);

// Dense joint distribution over named categorical axes, row-major with the
// last axis fastest.
class DiscreteJoint {
 public:
  DiscreteJoint(std::vector<std::string> axes, std::vector<std::size_t> cardinalities,
                std::vector<double> table);

  const std::vector<std::string>& axes() const { return axes_; }
  const std::vector<std::size_t>& cardinalities() const { return cards_; }
  const std::vector<double>& table() const { return table_; }

  // Sums out every axis not listed; the result keeps the listed order.
  DiscreteJoint Marginal(const std::vector<std::string>& keep) const;
  double Entropy() const;
  // H(A, B) - H(B).
  double ConditionalEntropy(const std::vector<std::string>& a,
                            const std::vector<std::string>& b) const;
  // H(A) + H(B) - H(A, B).
  double MutualInformation(const std::vector<std::string>& a,
                           const std::vector<std::string>& b) const;

 private:
  std::size_t AxisIndex(const std::string& name) const;

  std::vector<std::string> axes_;
  std::vector<std::size_t> cards_;
  std::vector<double> table_;
};

double MutualInformation(const DiscreteJoint& joint, const std::string& a, const std::string& b);

// A dataset whose distinct feature rows are the states of X. P_data(x) is the
// row multiplicity over the row count, and every attribute is a function of
// the state.
struct EnumerableInstance {
  static constexpr std::size_t kMaxStates = 4096;

  Tensor states;                         // distinct rows, first-seen order
  std::vector<std::size_t> counts;       // multiplicity of each state
  std::vector<AttributeSchema> schema;
  std::vector<std::vector<int>> labels;  // per attribute, per state

  std::size_t num_states() const { return counts.size(); }
  std::size_t num_rows() const;
  std::vector<double> Probabilities() const;
  std::size_t AttributeIndex(const std::string& name) const;
};

// Collapses duplicate rows. ResourceError above kMaxStates distinct rows;
// ValidationError if equal rows carry different labels.
EnumerableInstance MakeEnumerable(const Dataset& data);

// Random instance for property sweeps: states are one-hot codes, labels and
// multiplicities uniform at random.
EnumerableInstance RandomInstance(std::size_t num_states, const std::vector<AttributeSchema>& schema,
                                  std::size_t rows, std::uint64_t seed);

// P(X' | X) restricted to the instance's states, with the substitutes'
// labels in the instance's schema order.
struct Channel {
  Tensor probs;                                     // states x K, rows sum to 1
  std::vector<std::vector<int>> substitute_labels;  // per attribute, length K
};

Channel ModelChannel(const SubstitutionModel& model, const EnumerableInstance& instance);
// Random row-stochastic channel: softmax of Normal(0, sharpness) logits.
Channel RandomChannel(const EnumerableInstance& instance, std::size_t k, double sharpness,
                      std::uint64_t seed);

// Joint of the requested axes under P_data(x) P(x' | x). Axis names are
// "X", "X'", or attribute names. ResourceError if the table exceeds 2^24
// cells.
DiscreteJoint BuildJoint(const EnumerableInstance& instance, const Tensor& probs,
                         const std::vector<std::string>& axes);

struct ExactObjective {
  std::vector<double> i_s;  // I(X'; S_i), private attributes in schema order
  std::vector<double> i_u;  // I(X'; U_j), useful attributes in schema order
  double i_x = 0.0;         // I(X'; X)
  double lambda = 0.0;
  double mu = 0.0;
  double value = 0.0;       // sum i_s - lambda sum i_u - mu i_x
};

ExactObjective ComputeExactObjective(const EnumerableInstance& instance, const Tensor& probs,
                                     double lambda, double mu);

// Bound check lhs <= rhs. Exact bounds carry standard_error 0 and hold when
// slack >= -tolerance; Monte-Carlo bounds hold when slack >= -3 standard_error.
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double standard_error = 0.0;
  double tolerance = 1e-10;
  bool holds = false;
};

BoundReport MakeBound(std::string name, double lhs, double rhs, double standard_error = 0.0);

struct Theorem1Options {
  double lambda = 1.0;
  double mu = 0.2;
  std::size_t num_batches = 2000;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
};

// Exact objective against the Monte-Carlo mean of the mini-batch loss plus
// its constant. Batches are drawn without replacement from the instance's
// rows. Throws ValidationError when mu exceeds the useful-attribute count.
BoundReport CheckTheorem1(const EnumerableInstance& instance, const Channel& channel,
                          const Theorem1Options& options);

// For every private S_i and every non-empty useful subset of at most
// `max_subset` attributes: sum I(X'; U_j) <= I(X'; S_i) + H(U | S_i) + C(U);
// and I(X'; X) <= I(X'; S_i) + H(X | S_i).
std::vector<BoundReport> CheckTheorem2(const EnumerableInstance& instance, const Tensor& probs,
                                       std::size_t max_subset = 3);

// sum H(U_j) - H(U_1, ..., U_n) over the listed attributes.
double TotalCorrelation(const EnumerableInstance& instance, const std::vector<std::string>& attrs);

struct LdpReport {
  double gamma = 0.0;          // max_x' KL(P(S | x') || P(S))
  double delta = 0.0;          // sqrt(2 gamma)
  double empirical_sup = 0.0;  // max over class sets and state pairs
  BoundReport bound;           // empirical_sup <= delta
};

// ResourceError when the attribute has more than 8 classes.
LdpReport LdpBound(const EnumerableInstance& instance, const Tensor& probs,
                   const std::string& attribute);

// E_{P(X')}[KL(P(S | X') || Q(S | X'))] for a posterior table Q (K x c).
// Equals I(X'; S) minus the probe's variational estimate of it.
double AdversaryGap(const EnumerableInstance& instance, const Tensor& probs,
                    const std::string& attribute, const Tensor& probe_posterior);
double AdversaryGap(const EnumerableInstance& instance, const Tensor& probs,
                    const std::string& attribute, const ProbeClassifier& probe,
                    const Tensor& substitute_features);

// Exact P(S | X' = x') per substitute (K x c); rows of unreachable
// substitutes hold the prior.
Tensor TruePosterior(const EnumerableInstance& instance, const Tensor& probs,
                     const std::string& attribute);

struct BiasReport {
  double expected_batch = 0.0;  // mean of L(B) over batches
  double exact = 0.0;           // L
  double bias = 0.0;            // expected_batch - exact
  double standard_error = 0.0;
};

// L(B) is the exact objective evaluated on the empirical distribution of
// the batch. Batches are drawn without replacement from the instance's rows.
BiasReport MinibatchBiasDemo(const EnumerableInstance& instance, const Tensor& probs, double lambda,
                             double mu, std::size_t batch_size, std::size_t num_batches,
                             std::uint64_t seed);

// One JSON object per line: name, lhs, rhs, slack, standard_error, holds.
void WriteBoundReports(const std::string& path, const std::vector<BoundReport>& reports,
                       const RunStamp& stamp);

}  // namespace pass
