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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "pass/checkpoint.h"
#include "pass/csv_io.h"
#include "pass/infer.h"
#include "pass/infotheory.h"
#include "pass/rng.h"

namespace pass {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (const std::string& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

// ---- value codecs ----------------------------------------------------------

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::uint64_t ToU64(const std::string& s) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::size_t ToSize(const std::string& s) { return static_cast<std::size_t>(ToU64(s)); }

double ToDouble(const std::string& s) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("expected a finite number, got '" + s + "'");
  }
  return v;
}

bool ToBool(const std::string& s) {
  if (s == "true" || s == "on" || s == "1") return true;
  if (s == "false" || s == "off" || s == "0") return false;
  throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::string Bool(bool b) { return b ? "true" : "false"; }

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return out;
}

// "64,32"; "none" for no hidden layer.
std::vector<std::size_t> ToWidths(const std::string& s) {
  if (s == "none") return {};
  std::vector<std::size_t> out;
  for (const std::string& w : SplitList(s)) out.push_back(ToSize(w));
  if (out.empty()) throw std::invalid_argument("expected widths like 64,32 or none");
  return out;
}

std::string Widths(const std::vector<std::size_t>& w) {
  if (w.empty()) return "none";
  std::string out;
  for (std::size_t v : w) out += (out.empty() ? "" : ",") + std::to_string(v);
  return out;
}

// "name:cardinality:role", comma separated.
std::vector<AttributeSchema> ToAttributes(const std::string& s) {
  std::vector<AttributeSchema> out;
  for (const std::string& item : SplitList(s)) {
    const auto a = item.find(':');
    const auto b = a == std::string::npos ? a : item.find(':', a + 1);
    if (b == std::string::npos) {
      throw std::invalid_argument("expected name:cardinality:role, got '" + item + "'");
    }
    AttributeSchema attr;
    attr.name = item.substr(0, a);
    attr.cardinality = static_cast<int>(ToU64(item.substr(a + 1, b - a - 1)));
    try {
      attr.role = ParseRole(item.substr(b + 1));
    } catch (const Error& e) {
      throw std::invalid_argument(e.what());
    }
    out.push_back(attr);
  }
  return out;
}

std::string Attributes(const std::vector<AttributeSchema>& schema) {
  std::string out;
  for (const AttributeSchema& a : schema) {
    out += (out.empty() ? "" : ",") + a.name + ":" + std::to_string(a.cardinality) + ":" +
           RoleName(a.role);
  }
  return out;
}

std::string OptionalNum(const std::optional<double>& v) { return v ? Num(*v) : "auto"; }
std::optional<double> ToOptional(const std::string& s) {
  if (s == "auto") return std::nullopt;
  return ToDouble(s);
}

// ---- field table -----------------------------------------------------------

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define PASS_FIELD(section, key, member, to, from)                          \
  Field {                                                                   \
    section, key, [](const ExperimentConfig& c) { return from(c.member); }, \
        [](ExperimentConfig& c, const std::string& v) { c.member = to(v); } \
  }

std::string Str(const std::string& s) { return s; }
std::string Size(std::size_t v) { return std::to_string(v); }
std::string U64(std::uint64_t v) { return std::to_string(v); }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      PASS_FIELD("run", "seed", seed, ToU64, U64),
      PASS_FIELD("run", "out_dir", out_dir, Str, Str),
      PASS_FIELD("data", "source", data.source, Str, Str),
      PASS_FIELD("data", "attributes", data.attributes, ToAttributes, Attributes),
      PASS_FIELD("data", "n_samples", data.n_samples, ToSize, Size),
      PASS_FIELD("data", "feature_dim", data.feature_dim, ToSize, Size),
      PASS_FIELD("data", "noise_scale", data.noise_scale, ToDouble, Num),
      PASS_FIELD("data", "prototype_scale", data.prototype_scale, ToDouble, Num),
      PASS_FIELD("data", "rho", data.rho, ToDouble, Num),
      PASS_FIELD("data", "train_path", data.train_path, Str, Str),
      PASS_FIELD("data", "test_path", data.test_path, Str, Str),
      PASS_FIELD("data", "test_fraction", data.test_fraction, ToDouble, Num),
      PASS_FIELD("model", "substitutes", substitutes, ToSize, Size),
      PASS_FIELD("model", "hidden", model.hidden, ToWidths, Widths),
      PASS_FIELD("model", "embed_dim", model.embed_dim, ToSize, Size),
      PASS_FIELD("model", "tau", model.tau, ToDouble, Num),
      PASS_FIELD("model", "init_stddev", model.init_stddev, ToDouble, Num),
      PASS_FIELD("train", "epochs", train.epochs, ToSize, Size),
      PASS_FIELD("train", "batch_size", train.batch_size, ToSize, Size),
      PASS_FIELD("train", "learning_rate", train.learning_rate, ToDouble, Num),
      PASS_FIELD("train", "weight_decay", train.weight_decay, ToDouble, Num),
      PASS_FIELD("train", "lambda", train.lambda, ToOptional, OptionalNum),
      PASS_FIELD("train", "mu", train.mu, ToOptional, OptionalNum),
      PASS_FIELD("train", "log_every", train.log_every, ToSize, Size),
      PASS_FIELD("attack", "data_fraction", eval.budget.data_fraction, ToDouble, Num),
      PASS_FIELD("attack", "repeats", eval.budget.repeats, ToSize, Size),
      PASS_FIELD("attack", "unfinetuned", eval.unfinetuned, ToBool, Bool),
      PASS_FIELD("attack", "probe_hidden", eval.budget.probe.hidden, ToWidths, Widths),
      PASS_FIELD("attack", "probe_epochs", eval.budget.probe.epochs, ToSize, Size),
      PASS_FIELD("attack", "probe_batch_size", eval.budget.probe.batch_size, ToSize, Size),
      PASS_FIELD("attack", "probe_learning_rate", eval.budget.probe.learning_rate, ToDouble, Num),
      PASS_FIELD("attack", "probe_weight_decay", eval.budget.probe.weight_decay, ToDouble, Num),
      PASS_FIELD("attack", "probe_init_stddev", eval.budget.probe.init_stddev, ToDouble, Num),
      PASS_FIELD("adv", "enabled", run_adv, ToBool, Bool),
      PASS_FIELD("adv", "hidden", adv.hidden, ToWidths, Widths),
      PASS_FIELD("adv", "head_hidden", adv.head_hidden, ToWidths, Widths),
      PASS_FIELD("adv", "epochs", adv.epochs, ToSize, Size),
      PASS_FIELD("adv", "batch_size", adv.batch_size, ToSize, Size),
      PASS_FIELD("adv", "learning_rate", adv.learning_rate, ToDouble, Num),
      PASS_FIELD("adv", "weight_decay", adv.weight_decay, ToDouble, Num),
      PASS_FIELD("adv", "adversary_weight", adv.adversary_weight, ToDouble, Num),
      PASS_FIELD("adv", "init_stddev", adv.init_stddev, ToDouble, Num),
      PASS_FIELD("adv", "log_every", adv.log_every, ToSize, Size),
      PASS_FIELD("diagnostics", "train_log", diagnostics.train_log, ToBool, Bool),
      PASS_FIELD("diagnostics", "substitutions", diagnostics.substitutions, ToBool, Bool),
      PASS_FIELD("diagnostics", "confusion", diagnostics.confusion, ToBool, Bool),
      PASS_FIELD("diagnostics", "theorem1", diagnostics.theorem1, ToBool, Bool),
      PASS_FIELD("diagnostics", "theorem2", diagnostics.theorem2, ToBool, Bool),
      PASS_FIELD("diagnostics", "ldp", diagnostics.ldp, ToBool, Bool),
      PASS_FIELD("diagnostics", "bias_demo", diagnostics.bias_demo, ToBool, Bool),
      PASS_FIELD("diagnostics", "theorem1_batches", diagnostics.theorem1_batches, ToSize, Size),
      PASS_FIELD("diagnostics", "bias_batch_size", diagnostics.bias_batch_size, ToSize, Size),
      PASS_FIELD("diagnostics", "bias_batches", diagnostics.bias_batches, ToSize, Size),
  };
  return fields;
}

#undef PASS_FIELD

std::string Render(const ExperimentConfig& config, bool include_run) {
  std::string out;
  std::string section;
  for (const Field& f : Fields()) {
    if (!include_run && f.section == "run") continue;
    if (f.section != section) {
      out += (out.empty() ? "[" : "\n[") + f.section + "]\n";
      section = f.section;
    }
    out += f.key + " = " + f.get(config) + "\n";
  }
  return out;
}

// ---- run plumbing ----------------------------------------------------------

bool FileSafe(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

// Stamp of a previous run in `dir`, if any.
std::optional<RunStamp> ExistingStamp(const fs::path& dir) {
  const fs::path ckpt = dir / "checkpoint.json";
  if (fs::exists(ckpt)) {
    std::ifstream in(ckpt);
    const Json j = Json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_object() && j.contains("config_hash") && j.contains("seed")) {
      RunStamp s;
      s.config_hash = j["config_hash"].get<std::string>();
      s.seed = j["seed"].get<std::uint64_t>();
      return s;
    }
    return RunStamp{"unknown", "", 0};
  }
  const fs::path metrics = dir / "metrics.csv";
  if (fs::exists(metrics)) {
    std::ifstream in(metrics);
    std::string line;
    std::getline(in, line);
    RunStamp s{"unknown", "", 0};
    std::istringstream words(line);
    std::string w;
    while (words >> w) {
      if (w.rfind("config_hash=", 0) == 0) s.config_hash = w.substr(12);
      if (w.rfind("seed=", 0) == 0) s.seed = std::strtoull(w.c_str() + 5, nullptr, 10);
    }
    return s;
  }
  return std::nullopt;
}

struct Run {
  ExperimentConfig config;  // seeds and out_dir resolved
  RunStamp stamp;
  fs::path dir;
  std::ostream* log = nullptr;
  RunSummary summary;
  std::vector<std::string> notes;  // skipped diagnostics

  std::string Path(const std::string& name) {
    summary.files.push_back(name);
    return (dir / name).string();
  }
};

Run MakeRun(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  ValidateConfig(config);
  Run run;
  run.config = config;
  if (options.seed) run.config.seed = *options.seed;
  if (options.out_dir) run.config.out_dir = *options.out_dir;
  run.config.train.seed = run.config.seed;
  run.config.adv.seed = run.config.seed;
  run.config.eval.budget.seed = DeriveSeed(run.config.seed, Stream::kAttack);
  run.stamp = RunStamp{"pass", ConfigHash(run.config), run.config.seed};
  run.dir = run.config.out_dir;
  run.log = &log;
  run.summary.config_hash = run.stamp.config_hash;
  run.summary.seed = run.stamp.seed;
  return run;
}

// False (and logs why) when `dir` holds a different run.
bool CheckIdentity(Run& run, bool force, bool require_existing) {
  const std::optional<RunStamp> prev = ExistingStamp(run.dir);
  if (!prev) {
    if (!require_existing) return true;
    *run.log << "error: no checkpoint.json in " << run.dir.string() << "\n";
    return false;
  }
  if (prev->config_hash == run.stamp.config_hash && prev->seed == run.stamp.seed) return true;
  if (force) {
    *run.log << "warning: replacing run config_hash=" << prev->config_hash
             << " seed=" << prev->seed << " (forced)\n";
    return true;
  }
  *run.log << "refusing: " << run.dir.string() << " holds config_hash=" << prev->config_hash
           << " seed=" << prev->seed << ", this run is config_hash=" << run.stamp.config_hash
           << " seed=" << run.stamp.seed << "; pass --force to overwrite\n";
  return false;
}

void Fail(Run& run, ExitCode code) {
  if (run.summary.code == ExitCode::kOk) run.summary.code = code;
}

void WriteOutputs(Run& run, const SubstitutionModel& model, const TrainTestSplit& data) {
  const DiagnosticsSection& diag = run.config.diagnostics;
  if (diag.substitutions || diag.confusion) {
    const std::vector<SubstitutionRecord> records = SubstituteBatch(
        model, data.test.features(), run.config.eval.budget.repeats,
        DeriveSeed(run.config.seed, Stream::kInference));
    if (diag.substitutions) WriteSubstitutions(run.Path("substitutions.csv"), records, run.stamp);
    if (diag.confusion) {
      for (const AttributeSchema& a : data.test.schema()) {
        const ConfusionMatrix cm = Confusion(records, data.test, model.substitute, a.name);
        WriteConfusion(run.Path("confusion_" + a.name + ".csv"), cm, run.stamp);
      }
    }
  }
}

MetricsReport EvaluateAndWrite(Run& run, const Obfuscator& obfuscator,
                               const TrainTestSplit& data, const std::string& prefix) {
  MetricsReport report = Evaluate(obfuscator, data.train, data.test, run.config.eval);
  report.config_hash = run.stamp.config_hash;
  report.seed = run.stamp.seed;
  WriteMetricsJson(run.Path(prefix + "metrics.json"), report);
  WriteMetricsCsv(run.Path(prefix + "metrics.csv"), report);
  *run.log << report.method << " mnag=" << Short(report.mnag);
  if (report.mnag_unfinetuned) *run.log << " mnag_unfinetuned=" << Short(*report.mnag_unfinetuned);
  *run.log << " config_hash=" << run.stamp.config_hash << " seed=" << run.stamp.seed << "\n";
  return report;
}

// Advisory checks: a precondition that does not hold skips the check with a
// note, numeric trouble aborts the stage.
template <typename F>
void Guard(Run& run, const std::string& stage, F&& body) {
  try {
    body();
  } catch (const ResourceError& e) {
    run.notes.push_back(stage + " skipped: " + e.what());
  } catch (const ValidationError& e) {
    run.notes.push_back(stage + " skipped: " + e.what());
  } catch (const Error& e) {
    *run.log << "error: " << stage << " aborted: " << e.what() << "\n";
    Fail(run, ExitCode::kAborted);
  }
}

void RunDiagnostics(Run& run, const SubstitutionModel& model, const Dataset& train) {
  const DiagnosticsSection& diag = run.config.diagnostics;
  if (!(diag.theorem1 || diag.theorem2 || diag.ldp || diag.bias_demo)) return;
  std::optional<EnumerableInstance> inst;
  Guard(run, "diagnostics", [&] { inst = MakeEnumerable(train); });
  if (!inst) return;
  const Channel channel = ModelChannel(model, *inst);
  const LossWeights w = ResolveWeights(run.config.train, train.schema());
  std::vector<BoundReport>& bounds = run.summary.bounds;

  if (diag.theorem1) {
    Guard(run, "theorem1", [&] {
      Theorem1Options opt;
      opt.lambda = w.lambda;
      opt.mu = w.mu;
      opt.num_batches = diag.theorem1_batches;
      opt.batch_size = std::min<std::size_t>(run.config.train.batch_size, inst->num_rows());
      opt.seed = DeriveSeed(run.config.seed, Stream::kDiagnostics, {1});
      bounds.push_back(CheckTheorem1(*inst, channel, opt));
    });
  }
  if (diag.theorem2) {
    Guard(run, "theorem2", [&] {
      for (BoundReport& b : CheckTheorem2(*inst, channel.probs)) bounds.push_back(std::move(b));
    });
  }
  if (diag.ldp) {
    Json ldp = Json::array();
    for (const AttributeSchema& a : train.schema()) {
      if (a.role != Role::kPrivate) continue;
      Guard(run, "ldp[" + a.name + "]", [&] {
        const LdpReport r = LdpBound(*inst, channel.probs, a.name);
        bounds.push_back(r.bound);
        ldp.push_back({{"attribute", a.name}, {"gamma", r.gamma}, {"delta", r.delta},
                       {"empirical_sup", r.empirical_sup}});
      });
    }
    std::ofstream(run.Path("ldp.json"))
        << Json{{"method", run.stamp.method}, {"config_hash", run.stamp.config_hash},
                {"seed", run.stamp.seed}, {"attributes", ldp}}.dump(2)
        << "\n";
  }
  if (diag.bias_demo) {
    Guard(run, "bias_demo", [&] {
      const BiasReport r =
          MinibatchBiasDemo(*inst, channel.probs, w.lambda, w.mu, diag.bias_batch_size,
                            diag.bias_batches, DeriveSeed(run.config.seed, Stream::kDiagnostics, {2}));
      std::ofstream(run.Path("bias_demo.json"))
          << Json{{"method", run.stamp.method}, {"config_hash", run.stamp.config_hash},
                  {"seed", run.stamp.seed}, {"batch_size", diag.bias_batch_size},
                  {"num_batches", diag.bias_batches}, {"expected_batch", r.expected_batch},
                  {"exact", r.exact}, {"bias", r.bias}, {"standard_error", r.standard_error}}
                 .dump(2)
          << "\n";
    });
  }
  if (!bounds.empty()) WriteBoundReports(run.Path("bounds.ndjson"), bounds, run.stamp);
  std::size_t held = 0;
  for (const BoundReport& b : bounds) held += b.holds ? 1 : 0;
  *run.log << "bounds held " << held << "/" << bounds.size() << "\n";
  for (const std::string& n : run.notes) *run.log << "note: " << n << "\n";
}

void WriteSummary(Run& run, const std::string& name) {
  std::ofstream out(run.Path(name));
  out << "# method=" << run.stamp.method << " config_hash=" << run.stamp.config_hash
      << " seed=" << run.stamp.seed << "\n";
  if (const auto& m = run.summary.pass_metrics) {
    out << "mnag=" << Num(m->mnag) << "\n";
    if (m->mnag_unfinetuned) out << "mnag_unfinetuned=" << Num(*m->mnag_unfinetuned) << "\n";
  }
  if (const auto& m = run.summary.adv_metrics) {
    out << "adv_mnag=" << Num(m->mnag) << "\n";
    if (run.summary.protector_accuracy) {
      out << "adv_protector_accuracy=" << Num(*run.summary.protector_accuracy) << "\n";
    }
  }
  if (!run.summary.bounds.empty()) {
    std::size_t held = 0;
    for (const BoundReport& b : run.summary.bounds) held += b.holds ? 1 : 0;
    out << "bounds_held=" << held << "/" << run.summary.bounds.size() << "\n";
  }
  for (const std::string& n : run.notes) out << "note=" << n << "\n";
  out << "exit_code=" << static_cast<int>(run.summary.code) << "\n";
}

void RunAdv(Run& run, const TrainTestSplit& data, bool train_fresh) {
  const std::string ckpt = (run.dir / "adv_checkpoint.json").string();
  std::optional<AdvObfuscator> adv;
  if (train_fresh) {
    try {
      AdvTrainResult r = TrainAdv(data.train, run.config.adv);
      if (run.config.diagnostics.train_log) {
        WriteAdvTrainLog(run.Path("adv_train_log.ndjson"), r.log, run.stamp);
      }
      SaveAdvCheckpoint(run.Path("adv_checkpoint.json"), r.model, run.stamp);
      adv = std::move(r.model);
    } catch (const AdvTrainingAborted& e) {
      *run.log << "error: adversarial baseline aborted at step " << e.step() << ": " << e.what()
               << "\n";
      Fail(run, ExitCode::kAborted);
      return;
    }
  } else {
    if (!fs::exists(ckpt)) {
      run.notes.push_back("adv skipped: no adv_checkpoint.json");
      return;
    }
    adv = LoadAdvCheckpoint(ckpt);
  }
  run.summary.adv_metrics = EvaluateAndWrite(run, AdvRelease(*adv), data, "adv_");
  for (const AttributeSchema& a : data.train.schema()) {
    if (a.role == Role::kPrivate) {
      run.summary.protector_accuracy = ProtectorAccuracy(*adv, data.test, a.name);
      break;
    }
  }
}

template <typename F>
RunSummary Execute(Run& run, const std::string& summary_name, F&& body) {
  try {
    body();
  } catch (const TrainingAborted& e) {
    *run.log << "error: training aborted at step " << e.step() << ": " << e.what() << "\n";
    Fail(run, ExitCode::kAborted);
  }
  if (run.summary.code != ExitCode::kRefused) WriteSummary(run, summary_name);
  return run.summary;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : ValidationError("invalid config: " + Join(violations)), violations_(std::move(violations)) {}

ExperimentConfig ParseConfig(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({"line " + std::to_string(e.line()) + ": " + e.message()});
  }
  std::map<std::string, const Field*> known;
  for (const Field& f : Fields()) known[f.section + "." + f.key] = &f;

  ExperimentConfig config;
  std::vector<std::string> violations;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) {
      violations.push_back(section + ": key outside a section");
      continue;
    }
    for (const auto& [key, value] : body) {
      const std::string path = section + "." + key;
      const auto it = known.find(path);
      if (it == known.end()) {
        violations.push_back(path + ": unknown key");
        continue;
      }
      try {
        it->second->set(config, value.data());
      } catch (const std::exception& e) {
        violations.push_back(path + ": " + e.what());
      }
    }
  }
  if (!violations.empty()) throw ConfigError(std::move(violations));
  ValidateConfig(config);
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::stringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

void ValidateConfig(const ExperimentConfig& c) {
  std::vector<std::string> v;
  auto check = [&](bool ok, const std::string& path, const std::string& what) {
    if (!ok) v.push_back(path + ": " + what);
  };
  auto wrap = [&](const std::string& path, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const Error& e) {
      v.push_back(path + ": " + e.what());
    }
  };

  const DataSection& d = c.data;
  check(!c.out_dir.empty(), "run.out_dir", "must not be empty");
  check(d.source == "synthetic" || d.source == "csv", "data.source",
        "must be synthetic or csv, got '" + d.source + "'");
  check(!d.attributes.empty(), "data.attributes", "at least one attribute is required");
  if (!d.attributes.empty()) {
    wrap("data.attributes", [&] {
      ValidateSchema(d.attributes);
      RequirePassRoles(d.attributes);
    });
    for (const AttributeSchema& a : d.attributes) {
      check(FileSafe(a.name), "data.attributes",
            "name '" + a.name + "' may only use letters, digits, '_' and '-'");
    }
  }
  if (d.source == "synthetic") {
    check(d.train_path.empty() && d.test_path.empty(), "data.train_path",
          "CSV paths are set but data.source is synthetic");
    check(d.n_samples >= 10, "data.n_samples", "must be at least 10");
    check(d.noise_scale >= 0.0, "data.noise_scale", "must be non-negative");
    check(d.prototype_scale > 0.0, "data.prototype_scale", "must be positive");
    check(d.rho > -1.0 && d.rho < 1.0, "data.rho", "must lie in (-1, 1)");
  } else if (d.source == "csv") {
    check(!d.train_path.empty(), "data.train_path", "required when data.source is csv");
  }
  check(d.test_fraction > 0.0 && d.test_fraction < 1.0, "data.test_fraction",
        "must lie in (0, 1)");

  check(c.substitutes >= 2, "model.substitutes", "must be at least 2");
  check(c.model.embed_dim >= 1, "model.embed_dim", "must be positive");
  check(c.model.tau > 0.0, "model.tau", "must be positive");
  check(c.model.init_stddev > 0.0, "model.init_stddev", "must be positive");
  for (std::size_t w : c.model.hidden) check(w >= 1, "model.hidden", "widths must be positive");

  wrap("train", [&] { ValidateTrainConfig(c.train); });
  wrap("attack", [&] { ValidateBudget(c.eval.budget); });
  if (c.run_adv) wrap("adv", [&] { ValidateAdvConfig(c.adv); });

  const DiagnosticsSection& g = c.diagnostics;
  check(g.theorem1_batches >= 2, "diagnostics.theorem1_batches", "must be at least 2");
  check(g.bias_batches >= 2, "diagnostics.bias_batches", "must be at least 2");
  check(g.bias_batch_size >= 1, "diagnostics.bias_batch_size", "must be positive");

  if (!v.empty()) throw ConfigError(std::move(v));
}

std::string CanonicalConfig(const ExperimentConfig& config) { return Render(config, true); }

std::string ConfigHash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : Render(config, false)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TrainTestSplit BuildData(const ExperimentConfig& config) {
  const DataSection& d = config.data;
  const std::uint64_t split_seed = DeriveSeed(config.seed, Stream::kData, {1});
  if (d.source == "csv") {
    Dataset train = LoadCsv(d.train_path, d.attributes);
    if (!d.test_path.empty()) return {std::move(train), LoadCsv(d.test_path, d.attributes)};
    return SplitTrainTest(train, d.test_fraction, split_seed);
  }
  SyntheticSpec spec;
  spec.n_samples = d.n_samples;
  spec.feature_dim = d.feature_dim;
  spec.schema = d.attributes;
  spec.noise_scale = d.noise_scale;
  spec.prototype_scale = d.prototype_scale;
  spec.seed = DeriveSeed(config.seed, Stream::kData, {0});
  if (d.rho != 0.0) {
    const std::size_t n = d.attributes.size();
    spec.correlation.assign(n, std::vector<double>(n, d.rho));
    for (std::size_t i = 0; i < n; ++i) spec.correlation[i][i] = 1.0;
  }
  return SplitTrainTest(GenerateSynthetic(spec), d.test_fraction, split_seed);
}

RunSummary RunExperiment(const ExperimentConfig& config, const RunOptions& options,
                         std::ostream& log) {
  Run run = MakeRun(config, options, log);
  if (!CheckIdentity(run, options.force, /*require_existing=*/false)) {
    run.summary.code = ExitCode::kRefused;
    return run.summary;
  }
  fs::create_directories(run.dir);
  return Execute(run, "summary.txt", [&] {
    const ExperimentConfig& c = run.config;
    const TrainTestSplit data = BuildData(c);
    SubstitutionModel init =
        InitModel(c.model, data.train, SampleSubstitute(data.train, c.substitutes, c.seed), c.seed);
    TrainResult trained = Train(std::move(init), data.train, c.train);
    for (const std::string& w : trained.log.warnings) log << "warning: " << w << "\n";
    SaveCheckpoint(run.Path("checkpoint.json"), trained.model, run.stamp);
    if (c.diagnostics.train_log) {
      WriteTrainLog(run.Path("train_log.ndjson"), trained.log, run.stamp);
    }
    WriteOutputs(run, trained.model, data);
    run.summary.pass_metrics = EvaluateAndWrite(run, PassObfuscator(trained.model), data, "");
    if (c.run_adv) RunAdv(run, data, /*train_fresh=*/true);
    RunDiagnostics(run, trained.model, data.train);
  });
}

RunSummary EvalOnly(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  Run run = MakeRun(config, options, log);
  if (!CheckIdentity(run, options.force, /*require_existing=*/true)) {
    run.summary.code = ExitCode::kRefused;
    return run.summary;
  }
  return Execute(run, "summary.txt", [&] {
    const TrainTestSplit data = BuildData(run.config);
    const SubstitutionModel model =
        LoadCheckpoint((run.dir / "checkpoint.json").string(), data.train);
    WriteOutputs(run, model, data);
    run.summary.pass_metrics = EvaluateAndWrite(run, PassObfuscator(model), data, "");
    if (run.config.run_adv) RunAdv(run, data, /*train_fresh=*/false);
  });
}

RunSummary Diagnose(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  Run run = MakeRun(config, options, log);
  if (!CheckIdentity(run, options.force, /*require_existing=*/true)) {
    run.summary.code = ExitCode::kRefused;
    return run.summary;
  }
  return Execute(run, "diagnose_summary.txt", [&] {
    const TrainTestSplit data = BuildData(run.config);
    const SubstitutionModel model =
        LoadCheckpoint((run.dir / "checkpoint.json").string(), data.train);
    RunDiagnostics(run, model, data.train);
  });
}

}  // namespace pass
