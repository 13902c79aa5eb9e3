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

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "pass/infotheory.h"
#include "pass/synthetic.h"

namespace pass {
namespace {

TrainTestSplit Task(std::size_t n = 1000, double noise = 0.3) {
  SyntheticSpec spec;
  spec.n_samples = n;
  spec.schema = {{"s", 2, Role::kPrivate}, {"u", 4, Role::kUseful}};
  spec.noise_scale = noise;
  spec.seed = 12;
  return SplitTrainTest(GenerateSynthetic(spec), 0.25, 1);
}

AdvConfig Quick() {
  AdvConfig c;
  c.epochs = 5;
  c.batch_size = 128;
  c.seed = 3;
  return c;
}

TEST(Obfuscate, UntrainedIsIdentity) {
  const auto split = Task(200);
  const AdvObfuscator adv = InitAdv(Quick(), split.train);
  const Tensor out = Obfuscate(adv, split.test.features());
  ASSERT_EQ(out.shape(), split.test.features().shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_NEAR(out[i], split.test.features()[i], 1e-12 * (1.0 + std::abs(out[i])));
  }
}

TEST(Obfuscate, ShapeAndDeterminism) {
  const auto split = Task(400);
  const auto trained = TrainAdv(split.train, Quick()).model;
  const Tensor a = Obfuscate(trained, split.test.features());
  EXPECT_EQ(a.shape(), split.test.features().shape());
  EXPECT_EQ(a, Obfuscate(trained, split.test.features()));
  EXPECT_THROW(Obfuscate(trained, Tensor::Matrix(3, 2)), ShapeError);
  // Each repeat of a deterministic release is the same row.
  const Tensor rel = AdvRelease(trained).Release(split.test.features(), 3, 0);
  EXPECT_EQ(rel.rows(), 3 * split.test.num_samples());
  for (std::size_t c = 0; c < rel.cols(); ++c) EXPECT_EQ(rel(0, c), rel(2, c));
}

TEST(TrainAdv, SameSeedSameParameters) {
  const auto split = Task(400);
  const auto a = TrainAdv(split.train, Quick()).model;
  const auto b = TrainAdv(split.train, Quick()).model;
  EXPECT_EQ(a.params, b.params);
  AdvConfig other = Quick();
  other.seed = 4;
  EXPECT_NE(a.params, TrainAdv(split.train, other).model.params);
}

TEST(TrainAdv, ZeroAdversaryWeightPreservesUtility) {
  const auto split = Task(1200);
  AdvConfig c = Quick();
  c.epochs = 30;
  c.adversary_weight = 0.0;
  const auto adv = TrainAdv(split.train, c).model;
  EvalConfig ec;
  ec.budget.repeats = 1;
  ec.budget.seed = 2;
  ec.unfinetuned = false;
  ec.budget.probe.epochs = 15;
  ec.budget.probe.batch_size = 64;
  ec.budget.probe.learning_rate = 1e-2;
  const auto report = Evaluate(AdvRelease(adv), split.train, split.test, ec);
  const auto& u = report.Find("u");
  EXPECT_GT(u.acc, u.acc_no_suppr - 0.05);
}

TEST(TrainAdv, LogsAndRejectsBadInput) {
  const auto split = Task(400);
  AdvConfig c = Quick();
  c.log_every = 4;
  std::size_t seen = 0;
  const auto res = TrainAdv(split.train, c, [&](const AdvRecord&) { ++seen; });
  EXPECT_EQ(seen, res.log.size());
  EXPECT_EQ(res.log.front().step, 0u);
  EXPECT_EQ(res.log.back().step, 5u * 3u - 1u);  // 300 rows, batches of 128
  c.adversary_weight = -1.0;
  EXPECT_THROW(TrainAdv(split.train, c), ValidationError);
  const Dataset no_useful(split.train.features(), {{"s", 2, Role::kPrivate}, {"u", 4, Role::kHidden}},
                          split.train.labels());
  EXPECT_THROW(TrainAdv(no_useful, Quick()), ValidationError);
}

TEST(TrainAdv, DivergenceAborts) {
  const auto split = Task(400);
  AdvConfig c = Quick();
  c.learning_rate = 1e300;
  c.init_stddev = 1e150;
  try {
    TrainAdv(split.train, c);
    FAIL() << "expected an abort";
  } catch (const AdvTrainingAborted& e) {
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
  } catch (const OverflowError&) {
    // A non-finite forward pass names the node instead.
  }
}

TEST(AdvCheckpoint, RoundTrip) {
  const auto split = Task(400);
  const auto adv = TrainAdv(split.train, Quick()).model;
  const std::string path =
      (std::filesystem::temp_directory_path() / "pass_adv_ckpt.json").string();
  SaveAdvCheckpoint(path, adv, {kAdvMethod, "cafe", 3});
  RunStamp stamp;
  const auto back = LoadAdvCheckpoint(path, &stamp);
  EXPECT_EQ(stamp.method, "generic-adv");
  EXPECT_EQ(back.params, adv.params);
  EXPECT_EQ(Obfuscate(back, split.test.features()), Obfuscate(adv, split.test.features()));
  std::filesystem::remove(path);
}

// Deterministic releases make X' a function of the state, so P(S | x') is
// one-hot and the gap equals the adversary's cross-entropy: positive unless
// the adversary is certain and right everywhere.
TEST(AdversaryGap, TrainedAdversaryLeavesLeakage) {
  const auto split = Task(800, 0.0);
  const auto adv = TrainAdv(split.train, Quick()).model;
  const EnumerableInstance inst = MakeEnumerable(split.train);
  Tensor identity = Tensor::Matrix(inst.num_states(), inst.num_states());
  for (std::size_t i = 0; i < inst.num_states(); ++i) identity(i, i) = 1.0;
  const Tensor q = AdversaryProba(adv, Obfuscate(adv, inst.states), "s");
  EXPECT_GT(AdversaryGap(inst, identity, "s", q), 0.0);
  EXPECT_THROW(AdversaryProba(adv, inst.states, "u"), SchemaError);
}

}  // namespace
}  // namespace pass
