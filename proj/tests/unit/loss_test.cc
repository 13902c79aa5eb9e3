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
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "pass/error.h"
#include "pass/substitution_model.h"
#include "pass/synthetic.h"
#include "test_util.h"

namespace pass {
namespace {

using testing::GradClose;
using testing::NumericGrad;

// Independent entropy oracle, nats.
double H(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

Tensor Uniform(std::size_t rows, std::size_t k) {
  return Tensor::Matrix(rows, k, 1.0 / static_cast<double>(k));
}

Tensor RandomProbs(std::size_t rows, std::size_t k, std::mt19937_64& rng, double spread) {
  std::normal_distribution<double> n(0.0, spread);
  Tensor p = Tensor::Matrix(rows, k);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) s += (p(r, c) = std::exp(n(rng)));
    for (std::size_t c = 0; c < k; ++c) p(r, c) /= s;
  }
  return p;
}

TEST(LossPrivate, UniformRowsReachMinimum) {
  const std::vector<int> labels{0, 1, 1, 0, 1};
  EXPECT_NEAR(LossPrivate(Uniform(5, 16), labels, 2), -std::log(16.0), 1e-14);
  EXPECT_NEAR(-std::log(16.0), -2.7725887, 1e-7);
}

TEST(LossPrivate, SharedOneHotColumnIsZero) {
  Tensor p = Tensor::Matrix(3, 4);
  for (std::size_t r = 0; r < 3; ++r) p(r, 2) = 1.0;
  EXPECT_EQ(LossPrivate(p, std::vector<int>{1, 1, 1}, 2), 0.0);
}

TEST(LossPrivate, HandEntropyOracle) {
  const Tensor p = Tensor::FromRows({{0.5, 0.5}, {1.0, 0.0}, {0.0, 1.0}});
  const double expected = -(2.0 / 3.0 * H({0.75, 0.25}) + 1.0 / 3.0 * H({0.0, 1.0}));
  EXPECT_NEAR(H({0.75, 0.25}), 0.5623351, 1e-7);
  EXPECT_NEAR(expected, -0.3748901, 1e-7);
  EXPECT_NEAR(LossPrivate(p, std::vector<int>{0, 0, 1}, 2), expected, 1e-14);
}

TEST(LossPrivate, AbsentClassContributesNothing) {
  const Tensor p = Tensor::FromRows({{0.5, 0.5}, {0.25, 0.75}});
  const double with_absent = LossPrivate(p, std::vector<int>{2, 2}, 3);
  EXPECT_NEAR(with_absent, -H({0.375, 0.625}), 1e-14);
}

TEST(LossPrivate, InvariantToPermutationWithinClass) {
  std::mt19937_64 rng(2);
  const Tensor p = RandomProbs(6, 5, rng, 1.0);
  const std::vector<int> labels{0, 1, 0, 1, 0, 1};
  const std::vector<std::size_t> perm{4, 3, 0, 5, 2, 1};  // evens and odds stay in class
  const Tensor q = p.Rows(perm);
  EXPECT_NEAR(LossPrivate(p, labels, 2), LossPrivate(q, labels, 2), 1e-14);
}

TEST(LossPrivate, EmptyBatchAndBadLabelsRejected) {
  EXPECT_THROW(LossPrivate(Uniform(2, 3), std::vector<int>{0, 2}, 2), ValidationError);
  EXPECT_THROW(LossPrivate(Uniform(2, 3), std::vector<int>{0}, 2), ShapeError);
}

TEST(LossUseful, PerfectPreservationIsZero) {
  const Tensor p = Tensor::FromRows({{0.5, 0.5, 0.0}, {0.0, 0.0, 1.0}});
  const std::vector<int> sub{1, 1, 0};
  EXPECT_EQ(LossUseful(p, std::vector<int>{1, 0}, sub, 2), 0.0);
}

TEST(LossUseful, HalfMassOracle) {
  const Tensor p = Tensor::FromRows({{0.5, 0.5}});
  const double ln2 = std::log(2.0);
  EXPECT_NEAR(LossUseful(p, std::vector<int>{0}, std::vector<int>{0, 1}, 2), ln2 * ln2, 1e-15);
  EXPECT_NEAR(ln2 * ln2, 0.4804530, 1e-7);
}

TEST(LossUseful, ClampBoundary) {
  const Tensor p = Tensor::FromRows({{1.0, 0.0}});
  const double got = LossUseful(p, std::vector<int>{1}, std::vector<int>{0, 1}, 3);
  EXPECT_NEAR(got, std::log(3.0) * -std::log(1e-12), 1e-12);
  EXPECT_NEAR(-std::log(1e-12), 27.631, 1e-3);
}

TEST(LossUseful, MissingClassesReported) {
  EXPECT_EQ(MissingClasses(std::vector<int>{0, 2, 2}, 4), (std::vector<int>{1, 3}));
  EXPECT_TRUE(MissingClasses(std::vector<int>{1, 0}, 2).empty());
}

TEST(LossGeneral, Oracles) {
  Tensor onehot = Tensor::Matrix(3, 4);
  onehot(0, 1) = onehot(1, 0) = onehot(2, 3) = 1.0;
  EXPECT_EQ(LossGeneral(onehot), 0.0);
  EXPECT_NEAR(LossGeneral(Uniform(4, 16)), std::log(16.0), 1e-14);
  const Tensor p = Tensor::FromRows({{0.5, 0.25, 0.25}, {1.0, 0.0, 0.0}});
  EXPECT_NEAR(H({0.5, 0.25, 0.25}), 1.0397208, 1e-7);
  EXPECT_NEAR(LossGeneral(p), 0.5 * H({0.5, 0.25, 0.25}), 1e-15);
}

TEST(LossBounds, RandomMatricesStayInRange) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> lab(0, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + static_cast<std::size_t>(trial % 9);
    const Tensor p = RandomProbs(7, k, rng, 0.5 + 0.05 * trial);
    std::vector<int> s(7), u(7), sub(k);
    for (int& v : s) v = lab(rng);
    for (int& v : u) v = lab(rng);
    for (int& v : sub) v = lab(rng);
    const double ls = LossPrivate(p, s, 3);
    const double lx = LossGeneral(p);
    EXPECT_GE(ls, -std::log(static_cast<double>(k)) - 1e-12);
    EXPECT_LE(ls, 1e-15);
    EXPECT_GE(lx, -1e-15);
    EXPECT_LE(lx, std::log(static_cast<double>(k)) + 1e-12);
    EXPECT_GE(LossUseful(p, u, sub, 3), 0.0);
  }
}

BatchLabels OneOfEach(std::vector<int> s, std::vector<int> u, std::vector<int> sub) {
  BatchLabels bl;
  bl.private_labels = {std::move(s)};
  bl.private_cardinalities = {2};
  bl.useful_labels = {std::move(u)};
  bl.useful_cardinalities = {4};
  bl.substitute_useful = {std::move(sub)};
  return bl;
}

TEST(LossTotal, ZeroWeightsLeavePrivateOnly) {
  std::mt19937_64 rng(4);
  const Tensor p = RandomProbs(4, 5, rng, 1.0);
  const BatchLabels bl = OneOfEach({0, 1, 1, 0}, {3, 2, 1, 0}, {0, 1, 2, 3, 3});
  const LossBreakdown br = LossTotal(p, bl, 0.0, 0.0);
  EXPECT_EQ(br.total, br.l_s[0]);
}

TEST(LossTotal, ComposesPartOracles) {
  // Signs follow the bound derivation: the useful and general terms are
  // minimized alongside the private term.
  const Tensor p = Uniform(4, 16);
  std::vector<int> sub(16);
  for (int j = 0; j < 16; ++j) sub[static_cast<std::size_t>(j)] = j % 4;
  const BatchLabels bl = OneOfEach({0, 1, 1, 0}, {3, 2, 1, 0}, sub);
  const LossBreakdown br = LossTotal(p, bl, 1.0, 1.0);
  const double lu = std::log(4.0) * -std::log(0.25);
  EXPECT_NEAR(br.l_u[0], lu, 1e-14);
  EXPECT_NEAR(br.total, -std::log(16.0) + 1.0 * lu + 1.0 * std::log(16.0), 1e-13);
}

TEST(LossTotal, RecomputableFromBreakdown) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor p = RandomProbs(4, 5, rng, 2.0);
    const BatchLabels bl = OneOfEach({0, 1, 1, 0}, {3, 2, 1, 0}, {0, 1, 2, 3, 3});
    const LossBreakdown br = LossTotal(p, bl, 0.7, 0.3);
    EXPECT_NEAR(br.total, br.Recompute(), 1e-12);
    EXPECT_NEAR(br.total, br.l_s[0] + 0.7 * br.l_u[0] + 0.3 * br.l_x, 1e-12);
  }
}

TEST(LossTotal, NegativeWeightsRejected) {
  const BatchLabels bl = OneOfEach({0}, {0}, {0, 1});
  EXPECT_THROW(LossTotal(Uniform(1, 2), bl, -1.0, 0.0), ValidationError);
}

TEST(LossTotal, GradientMatchesFiniteDifferences) {
  SyntheticSpec spec;
  spec.n_samples = 64;
  spec.feature_dim = 6;
  spec.schema = {{"s", 2, Role::kPrivate}, {"u", 3, Role::kUseful}};
  spec.noise_scale = 0.4;
  spec.seed = 17;
  const Dataset d = GenerateSynthetic(spec);
  ModelConfig cfg;
  cfg.hidden = {7};
  cfg.embed_dim = 4;
  cfg.init_stddev = 0.5;
  std::mt19937_64 rng(33);
  for (double tau : {0.01, 0.5}) {
    cfg.tau = tau;
    const SubstitutionModel m = InitModel(cfg, d, SampleSubstitute(d, 8, 2), 2);
    const std::vector<std::size_t> batch{3, 9, 12, 20, 31, 40, 51, 60};
    BatchLabels bl;
    bl.private_labels = {{}};
    bl.useful_labels = {{}};
    for (std::size_t i : batch) {
      bl.private_labels[0].push_back(d.Labels("s")[i]);
      bl.useful_labels[0].push_back(d.Labels("u")[i]);
    }
    bl.private_cardinalities = {2};
    bl.useful_cardinalities = {3};
    bl.substitute_useful = {m.substitute.labels[d.AttributeIndex("u")]};

    Graph g;
    const SubstitutionGraph sg = BuildSubstitutionGraph(g, m);
    const LossGraph lg = BuildLossGraph(g, sg.probs, 1, {3}, 1.0, 0.2);
    g.SetOutput(lg.total);
    Bindings b;
    BindParameters(m.params, b);
    BindBatchLabels(bl, b);
    b["x"] = m.standardization.Apply(d.features().Rows(batch));
    g.Forward(b);
    const Gradients grads = g.Backward();
    for (const auto& [name, t] : m.params) {
      EXPECT_TRUE(GradClose(grads.at(name), NumericGrad(g, b, name))) << name << " tau " << tau;
    }
  }
}

TEST(ConstantC, Oracles) {
  const std::vector<double> none;
  EXPECT_NEAR(ConstantC(1, 1, 0.0, 0.0, 1, none), 0.0, 1e-15);
  // With M = 1 and lambda = mu = 0, C is just ln K.
  const double c3 = ConstantC(1, 1, 0.0, 0.0, 3, none);
  EXPECT_NEAR(c3, std::log(3.0), 1e-15);
  const std::vector<double> h{std::log(4.0)};
  EXPECT_NEAR(ConstantC(1, 1, 1.0, 0.2, 16, h),
              0.8 * std::log(16.0) - std::log(4.0) + 1.0, 1e-14);
  EXPECT_NEAR(ConstantC(1, 1, 1.0, 0.2, 16, h), 1.8317766, 1e-7);
  EXPECT_NEAR(ConstantC(2, 3, 0.0, 2.0, 50, none), 0.0, 1e-15);
}

TEST(ConstantC, WarnsWhenMuExceedsN) {
  std::vector<std::string> warnings;
  ConstantC(1, 1, 1.0, 0.5, 8, std::vector<double>{0.5}, &warnings);
  EXPECT_TRUE(warnings.empty());
  const double c = ConstantC(1, 1, 1.0, 1.5, 8, std::vector<double>{0.5}, &warnings);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_TRUE(std::isfinite(c));
}

TEST(DefaultLossWeights, FromAttributeCounts) {
  const LossWeights w = DefaultLossWeights(2, 3);
  EXPECT_DOUBLE_EQ(w.lambda, 1.5);
  EXPECT_DOUBLE_EQ(w.mu, 0.6000000000000001);
}

}  // namespace
}  // namespace pass
