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

#include "pass/experiment.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace pass {
namespace {

namespace fs = std::filesystem;

// Tiny but complete: every stage runs in a couple of seconds.
constexpr const char* kSmall = R"(
[run]
seed = 3

[data]
attributes = s:2:private,u:3:useful
n_samples = 240
noise_scale = 0.3

[model]
substitutes = 16
hidden = 8
embed_dim = 4

[train]
epochs = 3
batch_size = 64

[attack]
repeats = 1
probe_hidden = 8
probe_epochs = 3
probe_batch_size = 64
probe_learning_rate = 0.01

[adv]
enabled = true
hidden = 8
head_hidden = 8
epochs = 2
batch_size = 64

[diagnostics]
theorem1_batches = 20
bias_batches = 20
)";

fs::path TempDir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("pass_experiment_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::set<std::string> Listing(const fs::path& dir) {
  std::set<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out.insert(e.path().filename().string());
  return out;
}

RunOptions Into(const fs::path& dir) {
  RunOptions o;
  o.out_dir = dir.string();
  return o;
}

TEST(ConfigTest, ParsesSectionsAndDefaults) {
  const ExperimentConfig c = ParseConfig(kSmall);
  EXPECT_EQ(c.seed, 3u);
  ASSERT_EQ(c.data.attributes.size(), 2u);
  EXPECT_EQ(c.data.attributes[1].name, "u");
  EXPECT_EQ(c.data.attributes[1].cardinality, 3);
  EXPECT_EQ(c.data.attributes[0].role, Role::kPrivate);
  EXPECT_EQ(c.model.hidden, (std::vector<std::size_t>{8}));
  EXPECT_FALSE(c.train.lambda.has_value());
  EXPECT_TRUE(c.run_adv);
  EXPECT_DOUBLE_EQ(c.model.tau, 0.01);  // untouched default
}

TEST(ConfigTest, ListsEveryViolationWithItsPath) {
  const std::string text = R"(
[data]
attributes = s:2:private,u:3:useful
noise_scale = loud
colour = blue

[model]
tau = -1

[train]
epochs = 0

[extra]
x = 1
)";
  try {
    ParseConfig(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string all = e.what();
    EXPECT_NE(all.find("data.noise_scale"), std::string::npos) << all;
    EXPECT_NE(all.find("data.colour: unknown key"), std::string::npos) << all;
    EXPECT_NE(all.find("extra.x: unknown key"), std::string::npos) << all;
    EXPECT_EQ(e.violations().size(), 3u);
  }
  // Value errors clear, semantic errors surface together.
  try {
    ParseConfig("[data]\nattributes = s:2:private,u:3:useful\n[model]\ntau = -1\n"
                "[attack]\nrepeats = 0\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    ASSERT_EQ(e.violations().size(), 2u);
    EXPECT_EQ(e.violations()[0].rfind("model.tau", 0), 0u);
    EXPECT_EQ(e.violations()[1].rfind("attack", 0), 0u);
  }
}

TEST(ConfigTest, RejectsBadSchemas) {
  EXPECT_THROW(ParseConfig("[data]\nattributes = s:2:private\n"), ConfigError);  // no useful
  EXPECT_THROW(ParseConfig("[data]\nattributes = s:2:secret,u:2:useful\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[data]\nattributes = s:1:private,u:2:useful\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[data]\nattributes = s/x:2:private,u:2:useful\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[data]\nattributes = s:2:private,u:2:useful\n"
                           "train_path = a.csv\n"),
               ConfigError);
  EXPECT_THROW(ParseConfig("[data]\nsource = csv\nattributes = s:2:private,u:2:useful\n"),
               ConfigError);
}

TEST(ConfigTest, CanonicalFormRoundTrips) {
  const ExperimentConfig c = ParseConfig(kSmall);
  const std::string canon = CanonicalConfig(c);
  EXPECT_EQ(CanonicalConfig(ParseConfig(canon)), canon);
  EXPECT_EQ(ConfigHash(ParseConfig(canon)), ConfigHash(c));
}

TEST(ConfigTest, HashIgnoresSeedAndOutputOnly) {
  ExperimentConfig a = ParseConfig(kSmall);
  ExperimentConfig b = a;
  b.seed = 99;
  b.out_dir = "elsewhere";
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  b.train.epochs += 1;
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  EXPECT_EQ(ConfigHash(a).size(), 16u);
}

TEST(ConfigTest, BuildDataIsSeeded) {
  ExperimentConfig c = ParseConfig(kSmall);
  const TrainTestSplit a = BuildData(c);
  const TrainTestSplit b = BuildData(c);
  EXPECT_EQ(a.train.features(), b.train.features());
  EXPECT_EQ(a.test.num_samples(), 48u);
  c.seed = 4;
  EXPECT_FALSE(BuildData(c).train.features() == a.train.features());
}

TEST(ExperimentTest, FullRunWritesEveryStageFile) {
  const fs::path dir = TempDir("full");
  std::ostringstream log;
  const RunSummary s = RunExperiment(ParseConfig(kSmall), Into(dir), log);
  EXPECT_EQ(s.code, ExitCode::kOk) << log.str();
  const std::set<std::string> files = Listing(dir);
  for (const char* f :
       {"checkpoint.json", "train_log.ndjson", "substitutions.csv", "confusion_s.csv",
        "confusion_u.csv", "metrics.json", "metrics.csv", "summary.txt", "bounds.ndjson",
        "ldp.json", "bias_demo.json", "adv_checkpoint.json", "adv_train_log.ndjson",
        "adv_metrics.json", "adv_metrics.csv"}) {
    EXPECT_TRUE(files.count(f)) << f;
  }
  EXPECT_NE(log.str().find("pass mnag="), std::string::npos) << log.str();
  EXPECT_NE(Slurp(dir / "summary.txt").find("\nmnag="), std::string::npos);
  // Every artifact names the run.
  for (const std::string& f : files) {
    EXPECT_NE(Slurp(dir / f).find(s.config_hash), std::string::npos) << f;
  }
  ASSERT_TRUE(s.pass_metrics.has_value());
  ASSERT_TRUE(s.adv_metrics.has_value());
  EXPECT_FALSE(s.bounds.empty());
  fs::remove_all(dir);
}

TEST(ExperimentTest, DiagnosticsOffEmitsOnlyCheckpointAndMetrics) {
  ExperimentConfig c = ParseConfig(kSmall);
  c.run_adv = false;
  DiagnosticsSection& d = c.diagnostics;
  d.train_log = d.substitutions = d.confusion = false;
  d.theorem1 = d.theorem2 = d.ldp = d.bias_demo = false;
  const fs::path dir = TempDir("off");
  std::ostringstream log;
  EXPECT_EQ(RunExperiment(c, Into(dir), log).code, ExitCode::kOk) << log.str();
  EXPECT_EQ(Listing(dir), (std::set<std::string>{"checkpoint.json", "metrics.json",
                                                  "metrics.csv", "summary.txt"}));
  fs::remove_all(dir);
}

TEST(ExperimentTest, SameSeedGivesByteIdenticalMetrics) {
  ExperimentConfig c = ParseConfig(kSmall);
  c.run_adv = false;
  c.diagnostics = {false, false, false, false, false, false, false, 20, 4, 20};
  const fs::path a = TempDir("det_a");
  const fs::path b = TempDir("det_b");
  std::ostringstream log;
  RunExperiment(c, Into(a), log);
  RunExperiment(c, Into(b), log);
  const std::string csv = Slurp(a / "metrics.csv");
  EXPECT_FALSE(csv.empty());
  EXPECT_EQ(csv, Slurp(b / "metrics.csv"));
  EXPECT_EQ(Slurp(a / "checkpoint.json"), Slurp(b / "checkpoint.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(ExperimentTest, RefusesToOverwriteADifferentRun) {
  ExperimentConfig c = ParseConfig(kSmall);
  c.run_adv = false;
  c.diagnostics = {false, false, false, false, false, false, false, 20, 4, 20};
  const fs::path dir = TempDir("refuse");
  std::ostringstream log;
  ASSERT_EQ(RunExperiment(c, Into(dir), log).code, ExitCode::kOk);
  const std::string before = Slurp(dir / "metrics.csv");

  // Same config and seed: a plain rerun is allowed.
  EXPECT_EQ(RunExperiment(c, Into(dir), log).code, ExitCode::kOk);

  ExperimentConfig changed = c;
  changed.train.epochs = 4;
  std::ostringstream refused;
  EXPECT_EQ(RunExperiment(changed, Into(dir), refused).code, ExitCode::kRefused);
  EXPECT_NE(refused.str().find("--force"), std::string::npos);
  EXPECT_EQ(Slurp(dir / "metrics.csv"), before);

  RunOptions other_seed = Into(dir);
  other_seed.seed = 11;
  EXPECT_EQ(RunExperiment(c, other_seed, log).code, ExitCode::kRefused);

  RunOptions forced = Into(dir);
  forced.force = true;
  EXPECT_EQ(RunExperiment(changed, forced, log).code, ExitCode::kOk);
  EXPECT_NE(Slurp(dir / "metrics.csv"), before);
  fs::remove_all(dir);
}

TEST(ExperimentTest, EvalOnlyAndDiagnoseReuseTheCheckpoint) {
  ExperimentConfig c = ParseConfig(kSmall);
  c.run_adv = false;
  const fs::path dir = TempDir("reuse");
  std::ostringstream log;
  ASSERT_EQ(RunExperiment(c, Into(dir), log).code, ExitCode::kOk);
  const std::string metrics = Slurp(dir / "metrics.csv");
  fs::remove(dir / "metrics.csv");
  EXPECT_EQ(EvalOnly(c, Into(dir), log).code, ExitCode::kOk);
  EXPECT_EQ(Slurp(dir / "metrics.csv"), metrics);

  const RunSummary d = Diagnose(c, Into(dir), log);
  EXPECT_EQ(d.code, ExitCode::kOk);
  EXPECT_FALSE(d.bounds.empty());
  EXPECT_TRUE(fs::exists(dir / "diagnose_summary.txt"));

  const fs::path empty = TempDir("reuse_empty");
  EXPECT_EQ(EvalOnly(c, Into(empty), log).code, ExitCode::kRefused);
  fs::remove_all(dir);
}

TEST(ExperimentTest, SkipsDiagnosticsThatCannotApply) {
  // mu above the useful-attribute count voids the Theorem 1 check.
  ExperimentConfig c = ParseConfig(kSmall);
  c.run_adv = false;
  c.train.mu = 2.0;
  const fs::path dir = TempDir("skip");
  std::ostringstream log;
  const RunSummary s = RunExperiment(c, Into(dir), log);
  EXPECT_EQ(s.code, ExitCode::kOk);
  EXPECT_NE(log.str().find("theorem1 skipped"), std::string::npos) << log.str();
  fs::remove_all(dir);
}

}  // namespace
}  // namespace pass
