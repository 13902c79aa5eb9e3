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
#include <vector>

#include "pass/dataset.h"

namespace pass {

// Parameters of a correlated categorical dataset.
//
// Attributes are drawn through a Gaussian copula: a latent vector
// z ~ N(0, correlation) is pushed through the standard normal CDF and each
// coordinate is cut into classes at the cumulative class marginals. The
// correlation entries are therefore latent (copula) correlations; the Pearson
// correlation of the resulting integer labels is generally smaller in
// magnitude.
//
// Features concatenate one block per attribute (a one-hot of the class, scaled
// by `prototype_scale`), zero-pad up to `feature_dim`, and add isotropic
// Gaussian noise with standard deviation `noise_scale`.
struct SyntheticSpec {
  std::size_t n_samples = 1000;
  std::size_t feature_dim = 0;  // 0 selects the sum of cardinalities
  std::vector<AttributeSchema> schema;
  std::vector<std::vector<double>> correlation;  // empty selects the identity
  std::vector<std::vector<double>> marginals;    // empty entry selects uniform
  double noise_scale = 0.0;
  double prototype_scale = 1.0;
  std::uint64_t seed = 0;
};

// Throws ValidationError when the settings are malformed or the correlation matrix
// is not positive semi-definite.
void ValidateSyntheticSpec(const SyntheticSpec& spec);

Dataset GenerateSynthetic(const SyntheticSpec& spec);

double StandardNormalCdf(double x);

}  // namespace pass
