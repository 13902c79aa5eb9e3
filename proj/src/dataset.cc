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

#include "pass/dataset.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pass/error.h"
#include "pass/rng.h"

namespace pass {

const char* RoleName(Role role) {
  switch (role) {
    case Role::kPrivate: return "private";
    case Role::kUseful: return "useful";
    case Role::kHidden: return "hidden";
  }
  return "unknown";
}

Role ParseRole(const std::string& name) {
  if (name == "private") return Role::kPrivate;
  if (name == "useful") return Role::kUseful;
  if (name == "hidden") return Role::kHidden;
  throw ValidationError("unknown attribute role '" + name + "'");
}

void ValidateSchema(const std::vector<AttributeSchema>& schema) {
  std::set<std::string> names;
  for (const AttributeSchema& a : schema) {
    if (a.name.empty()) throw ValidationError("attribute name must not be empty");
    if (a.cardinality < 2) {
      throw ValidationError("attribute '" + a.name + "' needs cardinality >= 2");
    }
    if (!names.insert(a.name).second) {
      throw ValidationError("duplicate attribute name '" + a.name + "'");
    }
  }
}

void RequirePassRoles(const std::vector<AttributeSchema>& schema) {
  const bool has_private = std::any_of(schema.begin(), schema.end(),
                                       [](const auto& a) { return a.role == Role::kPrivate; });
  const bool has_useful = std::any_of(schema.begin(), schema.end(),
                                      [](const auto& a) { return a.role == Role::kUseful; });
  if (!has_private || !has_useful) {
    throw ValidationError("a substitution run needs at least one private and one useful attribute");
  }
}

Dataset::Dataset(Tensor features, std::vector<AttributeSchema> schema,
                 std::vector<std::vector<int>> labels)
    : features_(std::move(features)), schema_(std::move(schema)), labels_(std::move(labels)) {
  if (features_.rank() != 2) throw ShapeError("dataset features must be a matrix");
  ValidateSchema(schema_);
  if (labels_.size() != schema_.size()) {
    throw SchemaError("label vectors (" + std::to_string(labels_.size()) +
                      ") do not match schema size (" + std::to_string(schema_.size()) + ")");
  }
  for (std::size_t a = 0; a < schema_.size(); ++a) {
    if (labels_[a].size() != features_.rows()) {
      throw SchemaError("attribute '" + schema_[a].name + "' has " +
                        std::to_string(labels_[a].size()) + " labels for " +
                        std::to_string(features_.rows()) + " rows");
    }
    for (int v : labels_[a]) {
      if (v < 0 || v >= schema_[a].cardinality) {
        throw SchemaError("attribute '" + schema_[a].name + "' label " + std::to_string(v) +
                          " outside [0, " + std::to_string(schema_[a].cardinality) + ")");
      }
    }
  }
}

std::size_t Dataset::AttributeIndex(const std::string& name) const {
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].name == name) return i;
  }
  throw SchemaError("unknown attribute '" + name + "'");
}

bool Dataset::HasAttribute(const std::string& name) const {
  return std::any_of(schema_.begin(), schema_.end(), [&](const auto& a) { return a.name == name; });
}

const AttributeSchema& Dataset::Attribute(const std::string& name) const {
  return schema_[AttributeIndex(name)];
}

const std::vector<int>& Dataset::Labels(const std::string& name) const {
  return labels_[AttributeIndex(name)];
}

std::vector<std::size_t> Dataset::AttributesWithRole(Role role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].role == role) out.push_back(i);
  }
  return out;
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  std::vector<std::vector<int>> labels(schema_.size());
  for (std::size_t a = 0; a < schema_.size(); ++a) {
    labels[a].reserve(indices.size());
    for (std::size_t i : indices) labels[a].push_back(labels_[a].at(i));
  }
  return Dataset(features_.Rows(indices), schema_, std::move(labels));
}

TrainTestSplit SplitTrainTest(const Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test_fraction must lie in (0, 1)");
  }
  const std::size_t n = data.num_samples();
  const auto n_test = static_cast<std::size_t>(std::llround(n * test_fraction));
  if (n_test == 0 || n_test >= n) throw ValidationError("split leaves an empty train or test part");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(DeriveSeed(seed, Stream::kData, {0x73706c6974ULL}));
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> test(perm.begin(), perm.begin() + n_test);
  std::vector<std::size_t> train(perm.begin() + n_test, perm.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {data.Subset(train), data.Subset(test)};
}

SubstituteSet MakeSubstitute(const Dataset& train, std::vector<std::size_t> indices) {
  if (indices.empty()) throw ValidationError("substitute set must not be empty");
  std::set<std::size_t> seen;
  for (std::size_t i : indices) {
    if (i >= train.num_samples()) throw ValidationError("substitute index out of range");
    if (!seen.insert(i).second) throw ValidationError("substitute indices must be unique");
  }
  SubstituteSet sub;
  sub.features = train.features().Rows(indices);
  sub.labels.resize(train.schema().size());
  for (std::size_t a = 0; a < train.schema().size(); ++a) {
    for (std::size_t i : indices) sub.labels[a].push_back(train.labels()[a][i]);
  }
  sub.indices = std::move(indices);
  return sub;
}

SubstituteSet SampleSubstitute(const Dataset& train, std::size_t k, std::uint64_t seed) {
  const std::size_t n = train.num_samples();
  if (k < 1 || k > n) {
    throw ValidationError("substitute size " + std::to_string(k) + " outside [1, " +
                          std::to_string(n) + "]");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(DeriveSeed(seed, Stream::kSubstitute));
  std::shuffle(perm.begin(), perm.end(), rng);
  perm.resize(k);
  return MakeSubstitute(train, std::move(perm));
}

std::vector<std::vector<std::size_t>> Batches(std::size_t n, std::size_t batch_size,
                                              std::uint64_t seed, std::uint64_t epoch) {
  if (batch_size < 2) throw ValidationError("batch_size must be at least 2");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(DeriveSeed(seed, Stream::kBatching, {epoch}));
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    out.emplace_back(perm.begin() + start, perm.begin() + end);
  }
  return out;
}

Standardization Standardization::Fit(const Tensor& features) {
  const std::size_t n = features.rows(), d = features.cols();
  Standardization s{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += features(i, j);
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += (features(i, j) - mean) * (features(i, j) - mean);
    const double sd = std::sqrt(sq / static_cast<double>(n));
    s.mean[j] = mean;
    // Constant columns pass through centered but unscaled.
    s.scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Standardization Standardization::Identity(std::size_t dim) {
  return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

Tensor Standardization::Apply(const Tensor& features) const {
  if (features.cols() != mean.size()) {
    throw ShapeError("standardization expects " + std::to_string(mean.size()) +
                     " features, got " + std::to_string(features.cols()));
  }
  Tensor out = features;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = (out(i, j) - mean[j]) / scale[j];
  }
  return out;
}

std::vector<double> ClassFrequencies(std::span<const int> labels, int cardinality) {
  std::vector<double> f(static_cast<std::size_t>(cardinality), 0.0);
  for (int v : labels) f.at(static_cast<std::size_t>(v)) += 1.0;
  for (double& v : f) v /= static_cast<double>(labels.size());
  return f;
}

}  // namespace pass
