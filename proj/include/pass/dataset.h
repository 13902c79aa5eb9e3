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

#include "pass/tensor.h"

namespace pass {

enum class Role { kPrivate, kUseful, kHidden };

const char* RoleName(Role role);
Role ParseRole(const std::string& name);

struct AttributeSchema {
  std::string name;
  int cardinality = 2;
  Role role = Role::kUseful;

  friend bool operator==(const AttributeSchema&, const AttributeSchema&) = default;
};

// Throws ValidationError on duplicate names or cardinality < 2.
void ValidateSchema(const std::vector<AttributeSchema>& schema);

// Throws ValidationError unless the schema has at least one private and one
// useful attribute.
void RequirePassRoles(const std::vector<AttributeSchema>& schema);

// Feature matrix plus one categorical label vector per attribute. Labels are
// fixed per row, i.e. every attribute is a deterministic function of the
// sample. Immutable after construction.
class Dataset {
 public:
  Dataset(Tensor features, std::vector<AttributeSchema> schema,
          std::vector<std::vector<int>> labels);

  std::size_t num_samples() const { return features_.rows(); }
  std::size_t feature_dim() const { return features_.cols(); }
  const Tensor& features() const { return features_; }
  const std::vector<AttributeSchema>& schema() const { return schema_; }
  const std::vector<std::vector<int>>& labels() const { return labels_; }

  std::size_t AttributeIndex(const std::string& name) const;  // SchemaError if absent
  bool HasAttribute(const std::string& name) const;
  const AttributeSchema& Attribute(const std::string& name) const;
  const std::vector<int>& Labels(const std::string& name) const;
  std::vector<std::size_t> AttributesWithRole(Role role) const;

  Dataset Subset(std::span<const std::size_t> indices) const;

 private:
  Tensor features_;
  std::vector<AttributeSchema> schema_;
  std::vector<std::vector<int>> labels_;
};

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Random split; the test part receives round(n * test_fraction) rows.
TrainTestSplit SplitTrainTest(const Dataset& data, double test_fraction, std::uint64_t seed);

// Rows of a training set that act as the pool of released samples.
struct SubstituteSet {
  std::vector<std::size_t> indices;  // into the source dataset
  Tensor features;                   // cached rows, |indices| x d
  std::vector<std::vector<int>> labels;  // per attribute, in source schema order

  std::size_t size() const { return indices.size(); }
};

// k distinct indices drawn uniformly from `train`; deterministic given seed.
SubstituteSet SampleSubstitute(const Dataset& train, std::size_t k, std::uint64_t seed);

// Rebuilds the cached rows of a substitute set from explicit indices.
SubstituteSet MakeSubstitute(const Dataset& train, std::vector<std::size_t> indices);

// One epoch of mini-batches: a fresh uniform permutation of [0, n) chunked into
// batch_size pieces; the final short chunk is kept.
std::vector<std::vector<std::size_t>> Batches(std::size_t n, std::size_t batch_size,
                                              std::uint64_t seed, std::uint64_t epoch);

// Per-feature standardization fitted on one dataset and applied unchanged to
// every later input.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardization Fit(const Tensor& features);
  static Standardization Identity(std::size_t dim);
  Tensor Apply(const Tensor& features) const;
};

// Empirical class marginal of a label vector.
std::vector<double> ClassFrequencies(std::span<const int> labels, int cardinality);

}  // namespace pass
