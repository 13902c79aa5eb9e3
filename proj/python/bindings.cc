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

// Python bindings for the core library. Matrices cross the boundary as
// float64 numpy arrays (copied).

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pass/checkpoint.h"
#include "pass/eval.h"
#include "pass/experiment.h"
#include "pass/infer.h"
#include "pass/infotheory.h"
#include "pass/substitution_model.h"
#include "pass/synthetic.h"
#include "pass/train.h"

namespace py = pybind11;

namespace pass {
namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor ToTensor(const Array& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-d array");
  Tensor t = Tensor::Matrix(static_cast<std::size_t>(a.shape(0)),
                            static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), t.values().begin());
  return t;
}

Array ToArray(const Tensor& t) {
  Array a({t.rows(), t.cols()});
  std::copy(t.values().begin(), t.values().end(), a.mutable_data());
  return a;
}

// Model plus the training split its substitute indices refer to.
struct Model {
  SubstitutionModel model;
};

py::dict ReportDict(const MetricsReport& r) {
  py::list attrs;
  for (const AttributeMetrics& a : r.attributes) {
    py::dict d;
    d["attribute"] = a.attribute;
    d["role"] = std::string(RoleName(a.role));
    d["acc"] = a.acc;
    d["acc_guessing"] = a.acc_guessing;
    d["acc_no_suppr"] = a.acc_no_suppr;
    d["nag"] = a.nag;
    d["acc_unfinetuned"] = a.acc_unfinetuned;
    d["nag_unfinetuned"] = a.nag_unfinetuned;
    attrs.append(d);
  }
  py::dict out;
  out["method"] = r.method;
  out["mnag"] = r.mnag;
  out["mnag_unfinetuned"] = r.mnag_unfinetuned;
  out["attributes"] = attrs;
  return out;
}

}  // namespace
}  // namespace pass

PYBIND11_MODULE(_pass_core, m) {
  using namespace pass;
  m.doc() = "PASS: stochastic data substitution for private-attribute protection";

  // Most derived last: pybind11 tries translators newest first.
  static py::exception<Error> error(m, "PassError", PyExc_RuntimeError);
  static py::exception<ValidationError> validation(m, "ValidationError", error.ptr());
  static py::exception<ConfigError> config_error(m, "ConfigError", validation.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const ValidationError& e) {
      py::set_error(validation, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::enum_<Role>(m, "Role")
      .value("PRIVATE", Role::kPrivate)
      .value("USEFUL", Role::kUseful)
      .value("HIDDEN", Role::kHidden);

  py::class_<AttributeSchema>(m, "Attribute")
      .def(py::init([](std::string name, int cardinality, Role role) {
             return AttributeSchema{std::move(name), cardinality, role};
           }),
           py::arg("name"), py::arg("cardinality"), py::arg("role"))
      .def_readonly("name", &AttributeSchema::name)
      .def_readonly("cardinality", &AttributeSchema::cardinality)
      .def_readonly("role", &AttributeSchema::role)
      .def("__repr__", [](const AttributeSchema& a) {
        return "Attribute(" + a.name + ", " + std::to_string(a.cardinality) + ", " +
               RoleName(a.role) + ")";
      });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](const Array& features, std::vector<AttributeSchema> schema,
                       std::vector<std::vector<int>> labels) {
             return Dataset(ToTensor(features), std::move(schema), std::move(labels));
           }),
           py::arg("features"), py::arg("schema"), py::arg("labels"))
      .def_property_readonly("features", [](const Dataset& d) { return ToArray(d.features()); })
      .def_property_readonly("schema", &Dataset::schema)
      .def_property_readonly("num_samples", &Dataset::num_samples)
      .def_property_readonly("feature_dim", &Dataset::feature_dim)
      .def("labels", &Dataset::Labels, py::arg("attribute"));

  m.def(
      "generate_synthetic",
      [](std::vector<AttributeSchema> schema, std::size_t n_samples, double noise_scale,
         std::vector<std::vector<double>> correlation, std::size_t feature_dim,
         double prototype_scale, std::uint64_t seed) {
        SyntheticSpec spec;
        spec.schema = std::move(schema);
        spec.n_samples = n_samples;
        spec.noise_scale = noise_scale;
        spec.correlation = std::move(correlation);
        spec.feature_dim = feature_dim;
        spec.prototype_scale = prototype_scale;
        spec.seed = seed;
        return GenerateSynthetic(spec);
      },
      py::arg("schema"), py::arg("n_samples"), py::arg("noise_scale") = 0.0,
      py::arg("correlation") = std::vector<std::vector<double>>{}, py::arg("feature_dim") = 0,
      py::arg("prototype_scale") = 1.0, py::arg("seed") = 0);

  m.def(
      "split_train_test",
      [](const Dataset& d, double test_fraction, std::uint64_t seed) {
        TrainTestSplit s = SplitTrainTest(d, test_fraction, seed);
        return py::make_tuple(std::move(s.train), std::move(s.test));
      },
      py::arg("data"), py::arg("test_fraction"), py::arg("seed"));

  py::class_<Model>(m, "Model")
      .def_property_readonly("substitute_indices",
                             [](const Model& mdl) { return mdl.model.substitute.indices; })
      .def_property_readonly("tau", [](const Model& mdl) { return mdl.model.config.tau; })
      .def(
          "substitution_probs",
          [](const Model& mdl, const Array& x) {
            return ToArray(SubstitutionProbs(mdl.model, ToTensor(x)));
          },
          py::arg("x"))
      .def(
          "substitute",
          [](const Model& mdl, const Array& x, std::size_t repeats, std::uint64_t seed) {
            std::vector<std::size_t> picks;
            for (const SubstitutionRecord& r : SubstituteBatch(mdl.model, ToTensor(x), repeats, seed)) {
              picks.push_back(r.substitute);
            }
            return picks;
          },
          py::arg("x"), py::arg("repeats") = 1, py::arg("seed") = 0,
          "Substitute-set positions, ordered by row then repeat.")
      .def(
          "release",
          [](const Model& mdl, const Array& x, std::size_t repeats, std::uint64_t seed) {
            return ToArray(PassObfuscator(mdl.model).Release(ToTensor(x), repeats, seed));
          },
          py::arg("x"), py::arg("repeats") = 1, py::arg("seed") = 0)
      .def(
          "save",
          [](const Model& mdl, const std::string& path, const std::string& config_hash,
             std::uint64_t seed) {
            SaveCheckpoint(path, mdl.model, RunStamp{"pass", config_hash, seed});
          },
          py::arg("path"), py::arg("config_hash") = "", py::arg("seed") = 0);

  m.def(
      "load_checkpoint",
      [](const std::string& path, const Dataset& train) {
        return Model{LoadCheckpoint(path, train)};
      },
      py::arg("path"), py::arg("train"));

  m.def(
      "train_pass",
      [](const Dataset& train, std::size_t substitutes, std::vector<std::size_t> hidden,
         std::size_t embed_dim, double tau, std::size_t epochs, std::size_t batch_size,
         double learning_rate, std::optional<double> lambda, std::optional<double> mu,
         std::uint64_t seed) {
        ModelConfig mc;
        mc.hidden = std::move(hidden);
        mc.embed_dim = embed_dim;
        mc.tau = tau;
        TrainConfig tc;
        tc.epochs = epochs;
        tc.batch_size = batch_size;
        tc.learning_rate = learning_rate;
        tc.lambda = lambda;
        tc.mu = mu;
        tc.seed = seed;
        py::gil_scoped_release unlocked;
        SubstitutionModel init =
            InitModel(mc, train, SampleSubstitute(train, substitutes, seed), seed);
        return Model{Train(std::move(init), train, tc).model};
      },
      py::arg("train"), py::arg("substitutes") = 256, py::arg("hidden") = std::vector<std::size_t>{64},
      py::arg("embed_dim") = 32, py::arg("tau") = 0.01, py::arg("epochs") = 200,
      py::arg("batch_size") = 256, py::arg("learning_rate") = 1e-3,
      py::arg("lambda_") = py::none(), py::arg("mu") = py::none(), py::arg("seed") = 0);

  m.def(
      "evaluate",
      [](const Model& mdl, const Dataset& train, const Dataset& test, std::size_t repeats,
         bool unfinetuned, std::uint64_t seed) {
        EvalConfig ec;
        ec.budget.repeats = repeats;
        ec.budget.seed = seed;
        ec.unfinetuned = unfinetuned;
        MetricsReport r;
        {
          py::gil_scoped_release unlocked;
          r = Evaluate(PassObfuscator(mdl.model), train, test, ec);
        }
        return ReportDict(r);
      },
      py::arg("model"), py::arg("train"), py::arg("test"), py::arg("repeats") = 4,
      py::arg("unfinetuned") = true, py::arg("seed") = 0);

  m.def("nag", &Nag, py::arg("acc"), py::arg("acc_guessing"), py::arg("acc_no_suppr"));
  m.def(
      "entropy", [](std::vector<double> p) { return Entropy(p); }, py::arg("p"));

  m.def(
      "config_hash", [](const std::string& text) { return ConfigHash(ParseConfig(text)); },
      py::arg("text"));
  m.def(
      "canonical_config",
      [](const std::string& text) { return CanonicalConfig(ParseConfig(text)); },
      py::arg("text"));

  m.def(
      "run",
      [](const std::string& config_path, std::optional<std::string> out_dir,
         std::optional<std::uint64_t> seed, bool force) {
        const ExperimentConfig config = LoadConfig(config_path);
        RunOptions opt;
        opt.out_dir = std::move(out_dir);
        opt.seed = seed;
        opt.force = force;
        std::ostringstream log;
        RunSummary s;
        {
          py::gil_scoped_release unlocked;
          s = RunExperiment(config, opt, log);
        }
        py::dict out;
        out["code"] = static_cast<int>(s.code);
        out["config_hash"] = s.config_hash;
        out["seed"] = s.seed;
        out["files"] = s.files;
        out["log"] = log.str();
        if (s.pass_metrics) out["pass"] = ReportDict(*s.pass_metrics);
        if (s.adv_metrics) out["adv"] = ReportDict(*s.adv_metrics);
        return out;
      },
      py::arg("config_path"), py::arg("out_dir") = py::none(), py::arg("seed") = py::none(),
      py::arg("force") = false,
      "Full pipeline from a config file; returns the summary and the run log.");
}
