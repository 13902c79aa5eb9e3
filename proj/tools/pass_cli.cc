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

// Command-line runner for PASS experiments.
//
//   pass_cli run       --config quickstart.cfg [--out DIR] [--seed N] [--force]
//   pass_cli eval-only --config quickstart.cfg [--out DIR]
//   pass_cli diagnose  --config quickstart.cfg [--out DIR]

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pass/experiment.h"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool force = false;
};

void AddFlags(CLI::App* cmd, Flags* flags) {
  cmd->add_option("--config", flags->config, "Experiment config (INI)")->required();
  cmd->add_option("--out", flags->out, "Output directory (overrides run.out_dir)");
  cmd->add_option("--seed", flags->seed, "Global seed (overrides run.seed)");
  cmd->add_flag("--force", flags->force, "Overwrite a directory holding a different run");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PASS: stochastic data substitution for private-attribute protection"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* run = app.add_subcommand("run", "Train, release, evaluate, and check bounds");
  CLI::App* eval = app.add_subcommand("eval-only", "Evaluate the checkpoint in the output dir");
  CLI::App* diagnose = app.add_subcommand("diagnose", "Bound checks on the checkpoint");
  for (CLI::App* cmd : {run, eval, diagnose}) AddFlags(cmd, &flags);
  CLI11_PARSE(app, argc, argv);

  try {
    const pass::ExperimentConfig config = pass::LoadConfig(flags.config);
    pass::RunOptions options;
    options.force = flags.force;
    for (CLI::App* cmd : {run, eval, diagnose}) {
      if (cmd->count("--seed") > 0) options.seed = flags.seed;
      if (cmd->count("--out") > 0) options.out_dir = flags.out;
    }
    pass::RunSummary summary;
    if (run->parsed()) {
      summary = pass::RunExperiment(config, options, std::cout);
    } else if (eval->parsed()) {
      summary = pass::EvalOnly(config, options, std::cout);
    } else {
      summary = pass::Diagnose(config, options, std::cout);
    }
    return static_cast<int>(summary.code);
  } catch (const pass::ConfigError& e) {
    std::cerr << "config errors:\n";
    for (const std::string& v : e.violations()) std::cerr << "  " << v << "\n";
    return static_cast<int>(pass::ExitCode::kConfig);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(pass::ExitCode::kError);
  }
}
