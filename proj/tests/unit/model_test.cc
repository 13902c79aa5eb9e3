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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "pass/checkpoint.h"
#include "pass/error.h"
#include "pass/substitution_model.h"
#include "pass/synthetic.h"
#include "test_util.h"

namespace pass {
namespace {

using testing::GradClose;
using testing::NumericGrad;
using testing::RandomMatrix;

Dataset Eight(std::size_t n = 64) {
  SyntheticSpec spec;
  spec.n_samples = n;
  spec.feature_dim = 8;
  spec.schema = {{"s", 2, Role::kPrivate}, {"u", 4, Role::kUseful}};
  spec.noise_scale = 0.3;
  spec.seed = 3;
  return GenerateSynthetic(spec);
}

SubstitutionModel SmallModel(const Dataset& d, std::size_t k, std::uint64_t seed = 1) {
  return InitModel(ModelConfig{}, d, SampleSubstitute(d, k, seed), seed);
}

TEST(InitModel, Deterministic) {
  const Dataset d = Eight();
  EXPECT_EQ(SmallModel(d, 16).params, SmallModel(d, 16).params);
  EXPECT_NE(SmallModel(d, 16, 1).params, SmallModel(d, 16, 2).params);
}

TEST(InitModel, ShapesAndParameterCount) {
  const Dataset d = Eight();
  const SubstitutionModel m = SmallModel(d, 16);
  EXPECT_EQ(m.params.at("g").shape(), (std::vector<std::size_t>{16, 32}));
  EXPECT_EQ(m.params.at("f.w0").shape(), (std::vector<std::size_t>{8, 64}));
  EXPECT_EQ(m.params.at("f.b1").shape(), (std::vector<std::size_t>{1, 32}));
  EXPECT_EQ(ParameterCount(m.params), 8u * 64 + 64 + 64 * 32 + 32 + 16 * 32);
  EXPECT_EQ(ParameterCount(m.params), 3168u);
}

TEST(InitModel, InitialisationScale) {
  const Dataset d = Eight(600);
  const SubstitutionModel m = SmallModel(d, 500);
  double ss = 0.0;
  const Tensor& g = m.params.at("g");
  for (double v : g.values()) ss += v * v;
  EXPECT_NEAR(std::sqrt(ss / static_cast<double>(g.size())), 0.02, 0.001);
  for (double v : m.params.at("f.b0").values()) EXPECT_EQ(v, 0.0);
}

TEST(Embed, ZeroWeightsGiveZeroEmbeddings) {
  const Dataset d = Eight();
  SubstitutionModel m = SmallModel(d, 4);
  for (auto& [name, t] : m.params) {
    for (double& v : t.values()) v = 0.0;
  }
  const Tensor e = Embed(m, d.features());
  for (double v : e.values()) EXPECT_EQ(v, 0.0);
}

TEST(Embed, IdenticalRowsGiveIdenticalEmbeddings) {
  const Dataset d = Eight();
  const SubstitutionModel m = SmallModel(d, 4);
  const std::vector<std::size_t> idx{5, 5, 5};
  const Tensor e = Embed(m, d.features().Rows(idx));
  for (std::size_t c = 0; c < e.cols(); ++c) {
    EXPECT_EQ(e(0, c), e(1, c));
    EXPECT_EQ(e(0, c), e(2, c));
  }
}

TEST(Embed, MatchesStraightLineMlp) {
  const Dataset d = Eight();
  const SubstitutionModel m = SmallModel(d, 4);
  std::mt19937_64 rng(5);
  const Tensor x = RandomMatrix(4, 8, rng);
  const Tensor got = Embed(m, x);
  const Tensor& w0 = m.params.at("f.w0");
  const Tensor& b0 = m.params.at("f.b0");
  const Tensor& w1 = m.params.at("f.w1");
  const Tensor& b1 = m.params.at("f.b1");
  for (std::size_t r = 0; r < 4; ++r) {
    std::vector<double> z(8), h(64);
    for (std::size_t i = 0; i < 8; ++i) {
      z[i] = (x(r, i) - m.standardization.mean[i]) / m.standardization.scale[i];
    }
    for (std::size_t j = 0; j < 64; ++j) {
      double a = b0[j];
      for (std::size_t i = 0; i < 8; ++i) a += z[i] * w0(i, j);
      h[j] = std::tanh(a);
    }
    for (std::size_t k = 0; k < 32; ++k) {
      double a = b1[k];
      for (std::size_t j = 0; j < 64; ++j) a += h[j] * w1(j, k);
      EXPECT_NEAR(got(r, k), a, 1e-14);
    }
  }
}

TEST(Embed, WidthMismatchRejected) {
  const Dataset d = Eight();
  const SubstitutionModel m = SmallModel(d, 4);
  EXPECT_THROW(Embed(m, Tensor::Matrix(2, 7)), ShapeError);
  EXPECT_THROW(SubstitutionProbs(m, Tensor::Matrix(2, 9)), ShapeError);
}

TEST(SubstitutionProbs, IdenticalSubstituteEmbeddingsGiveUniformRows) {
  const Dataset d = Eight();
  SubstitutionModel m = SmallModel(d, 5);
  Tensor& g = m.params.at("g");
  for (std::size_t r = 1; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) g(r, c) = g(0, c);
  }
  const Tensor p = SubstitutionProbs(m, d.features());
  for (double v : p.values()) EXPECT_NEAR(v, 0.2, 1e-15);
}

TEST(SubstitutionProbs, HandOracleAtLowTemperature) {
  const Tensor p = SubstitutionProbsFromEmbeddings(Tensor::FromRows({{1.0, 0.0}}),
                                                   Tensor::FromRows({{1.0, 0.0}, {0.0, 1.0}}), 0.01);
  // Logits 100 and 0: the second entry is e^-100 / (1 + e^-100).
  const double tail = std::exp(-100.0) / (1.0 + std::exp(-100.0));
  EXPECT_NEAR(tail, 3.72e-44, 1e-46);
  EXPECT_DOUBLE_EQ(p(0, 0), 1.0);
  EXPECT_NEAR(p(0, 1) / tail, 1.0, 1e-9);
}

TEST(SubstitutionProbs, HighTemperatureIsUniform) {
  std::mt19937_64 rng(8);
  const Tensor p = SubstitutionProbsFromEmbeddings(RandomMatrix(6, 5, rng), RandomMatrix(7, 5, rng), 1e6);
  for (double v : p.values()) EXPECT_NEAR(v, 1.0 / 7.0, 1e-4);
}

TEST(SubstitutionProbs, RowsAreDistributions) {
  const Dataset d = Eight(200);
  const SubstitutionModel m = SmallModel(d, 40);
  const Tensor p = SubstitutionProbs(m, d.features());
  for (std::size_t r = 0; r < p.rows(); ++r) {
    double s = 0.0;
    for (double v : p.row(r)) {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(SubstitutionProbs, SubstitutePermutationPermutesColumns) {
  std::mt19937_64 rng(9);
  const Tensor f = RandomMatrix(5, 6, rng);
  const Tensor g = RandomMatrix(4, 6, rng);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  const Tensor p = SubstitutionProbsFromEmbeddings(f, g, 0.05);
  const Tensor q = SubstitutionProbsFromEmbeddings(f, g.Rows(perm), 0.05);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(q(r, j), p(r, perm[j]), 1e-15);
  }
}

TEST(SubstitutionProbs, EmbeddingScaleInvariance) {
  std::mt19937_64 rng(10);
  const Tensor f = RandomMatrix(5, 6, rng);
  const Tensor g = RandomMatrix(4, 6, rng);
  Tensor f_scaled = f;
  for (double& v : f_scaled.values()) v *= 37.5;
  const Tensor p = SubstitutionProbsFromEmbeddings(f, g, 0.01);
  const Tensor q = SubstitutionProbsFromEmbeddings(f_scaled, g, 0.01);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-9);
}

TEST(SubstitutionProbs, GradientsMatchFiniteDifferences) {
  const Dataset d = Eight();
  ModelConfig cfg;
  cfg.hidden = {6};
  cfg.embed_dim = 5;
  cfg.tau = 0.5;
  cfg.init_stddev = 0.5;
  const SubstitutionModel m = InitModel(cfg, d, SampleSubstitute(d, 8, 4), 4);
  Graph g;
  const SubstitutionGraph sg = BuildSubstitutionGraph(g, m);
  std::mt19937_64 rng(12);
  g.SetOutput(g.Sum(g.Mul(sg.probs, g.Input("w"))));
  Bindings b;
  BindParameters(m.params, b);
  b["x"] = m.standardization.Apply(d.features().Rows(std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  b["w"] = RandomMatrix(6, 8, rng);
  g.Forward(b);
  const Gradients grads = g.Backward();
  for (const auto& [name, t] : m.params) {
    EXPECT_TRUE(GradClose(grads.at(name), NumericGrad(g, b, name))) << name;
  }
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const Dataset d = Eight();
  const SubstitutionModel m = SmallModel(d, 16);
  const std::string path =
      (std::filesystem::temp_directory_path() / "pass_model_test_ckpt.json").string();
  SaveCheckpoint(path, m, {"pass", "abc123", 77});
  RunStamp stamp;
  const SubstitutionModel back = LoadCheckpoint(path, d, &stamp);
  EXPECT_EQ(back.params, m.params);
  EXPECT_EQ(back.substitute.indices, m.substitute.indices);
  EXPECT_EQ(back.standardization.mean, m.standardization.mean);
  EXPECT_EQ(back.config.tau, m.config.tau);
  EXPECT_EQ(stamp.config_hash, "abc123");
  EXPECT_EQ(stamp.seed, 77u);
  EXPECT_EQ(SubstitutionProbs(back, d.features()), SubstitutionProbs(m, d.features()));
  std::filesystem::remove(path);
}

TEST(Checkpoint, MalformedFileRejected) {
  const Dataset d = Eight();
  const std::string path =
      (std::filesystem::temp_directory_path() / "pass_model_test_bad.json").string();
  std::ofstream(path) << "{\"format\": \"pass-checkpoint\", \"version\": 1}";
  EXPECT_THROW(LoadCheckpoint(path, d), ValidationError);
  EXPECT_THROW(LoadCheckpoint(path + ".missing", d), ValidationError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace pass
