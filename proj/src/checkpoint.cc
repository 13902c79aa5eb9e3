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

#include "pass/checkpoint.h"

#include <fstream>
#include <json.hpp>

#include "pass/error.h"

namespace pass {

using nlohmann::json;

void SaveCheckpoint(const std::string& path, const SubstitutionModel& model, const RunStamp& stamp) {
  json j;
  j["format"] = "pass-checkpoint";
  j["version"] = kCheckpointVersion;
  j["method"] = stamp.method;
  j["config_hash"] = stamp.config_hash;
  j["seed"] = stamp.seed;
  j["input_dim"] = model.input_dim;
  j["hidden"] = model.config.hidden;
  j["embed_dim"] = model.config.embed_dim;
  j["tau"] = model.config.tau;
  j["init_stddev"] = model.config.init_stddev;
  j["substitute_indices"] = model.substitute.indices;
  j["standardization"] = {{"mean", model.standardization.mean},
                          {"scale", model.standardization.scale}};
  json params = json::object();
  for (const auto& [name, t] : model.params) {
    params[name] = {{"shape", t.shape()}, {"values", t.values()}};
  }
  j["parameters"] = std::move(params);
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write checkpoint '" + path + "'");
  out << j.dump(1) << '\n';
}

SubstitutionModel LoadCheckpoint(const std::string& path, const Dataset& train, RunStamp* stamp) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open checkpoint '" + path + "'");
  json j;
  try {
    in >> j;
    if (j.at("format") != "pass-checkpoint") throw ValidationError(path + ": not a checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw ValidationError(path + ": unsupported checkpoint version");
    }
    SubstitutionModel model;
    model.input_dim = j.at("input_dim").get<std::size_t>();
    model.config.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    model.config.embed_dim = j.at("embed_dim").get<std::size_t>();
    model.config.tau = j.at("tau").get<double>();
    model.config.init_stddev = j.value("init_stddev", 0.02);
    model.standardization.mean = j.at("standardization").at("mean").get<std::vector<double>>();
    model.standardization.scale = j.at("standardization").at("scale").get<std::vector<double>>();
    if (train.feature_dim() != model.input_dim) {
      throw ValidationError(path + ": checkpoint expects " + std::to_string(model.input_dim) +
                            " features, training data has " + std::to_string(train.feature_dim()));
    }
    model.substitute =
        MakeSubstitute(train, j.at("substitute_indices").get<std::vector<std::size_t>>());
    for (const auto& [name, p] : j.at("parameters").items()) {
      model.params[name] = Tensor(p.at("shape").get<std::vector<std::size_t>>(),
                                  p.at("values").get<std::vector<double>>());
    }
    if (stamp != nullptr) {
      stamp->method = j.at("method").get<std::string>();
      stamp->config_hash = j.at("config_hash").get<std::string>();
      stamp->seed = j.at("seed").get<std::uint64_t>();
    }
    ValidateModel(model);
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": malformed checkpoint: " + e.what());
  }
}

}  // namespace pass
