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

#include "pass/synthetic.h"

#include <cmath>
#include <random>
#include <string>

#include "pass/error.h"
#include "pass/rng.h"

namespace pass {
namespace {

constexpr double kPsdTolerance = 1e-10;

std::vector<double> MarginalOf(const SyntheticSpec& spec, std::size_t a) {
  const auto c = static_cast<std::size_t>(spec.schema[a].cardinality);
  if (a < spec.marginals.size() && !spec.marginals[a].empty()) return spec.marginals[a];
  return std::vector<double>(c, 1.0 / static_cast<double>(c));
}

std::vector<std::vector<double>> CorrelationOf(const SyntheticSpec& spec) {
  const std::size_t m = spec.schema.size();
  if (!spec.correlation.empty()) return spec.correlation;
  std::vector<std::vector<double>> id(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) id[i][i] = 1.0;
  return id;
}

// Lower-triangular factor of a positive semi-definite matrix. Zero pivots
// (within tolerance) produce zero columns, so perfectly correlated
// attributes share a latent coordinate.
std::vector<std::vector<double>> SemiDefiniteCholesky(const std::vector<std::vector<double>>& a) {
  const std::size_t m = a.size();
  std::vector<std::vector<double>> l(m, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (d < -kPsdTolerance) {
      throw ValidationError("correlation matrix is not positive semi-definite (pivot " +
                            std::to_string(j) + ")");
    }
    const double ljj = d > kPsdTolerance ? std::sqrt(d) : 0.0;
    l[j][j] = ljj;
    for (std::size_t i = j + 1; i < m; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (ljj > 0.0) {
        l[i][j] = s / ljj;
      } else if (std::abs(s) > 1e-8) {
        throw ValidationError("correlation matrix is not positive semi-definite");
      }
    }
  }
  return l;
}

}  // namespace

double StandardNormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void ValidateSyntheticSpec(const SyntheticSpec& spec) {
  ValidateSchema(spec.schema);
  const std::size_t m = spec.schema.size();
  if (m == 0) throw ValidationError("synthetic data needs at least one attribute");
  if (spec.n_samples == 0) throw ValidationError("n_samples must be positive");
  if (!(spec.noise_scale >= 0.0)) throw ValidationError("noise_scale must be >= 0");
  std::size_t blocks = 0;
  for (const auto& a : spec.schema) blocks += static_cast<std::size_t>(a.cardinality);
  if (spec.feature_dim != 0 && spec.feature_dim < blocks) {
    throw ValidationError("feature_dim " + std::to_string(spec.feature_dim) +
                          " is smaller than the prototype blocks (" + std::to_string(blocks) + ")");
  }
  if (!spec.marginals.empty() && spec.marginals.size() != m) {
    throw ValidationError("marginals must list one distribution per attribute");
  }
  for (std::size_t a = 0; a < m; ++a) {
    const auto p = MarginalOf(spec, a);
    if (p.size() != static_cast<std::size_t>(spec.schema[a].cardinality)) {
      throw ValidationError("marginal of '" + spec.schema[a].name + "' has wrong length");
    }
    double total = 0.0;
    for (double v : p) {
      if (!(v >= 0.0)) throw ValidationError("marginal of '" + spec.schema[a].name + "' is negative");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw ValidationError("marginal of '" + spec.schema[a].name + "' does not sum to 1");
    }
  }
  const auto rho = CorrelationOf(spec);
  if (rho.size() != m) throw ValidationError("correlation matrix must be m x m");
  for (std::size_t i = 0; i < m; ++i) {
    if (rho[i].size() != m) throw ValidationError("correlation matrix must be m x m");
    if (std::abs(rho[i][i] - 1.0) > 1e-12) {
      throw ValidationError("correlation matrix needs a unit diagonal");
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (rho[i][j] < -1.0 || rho[i][j] > 1.0) {
        throw ValidationError("correlation entries must lie in [-1, 1]");
      }
      if (std::abs(rho[i][j] - rho[j][i]) > 1e-12) {
        throw ValidationError("correlation matrix must be symmetric");
      }
    }
  }
  SemiDefiniteCholesky(rho);
}

Dataset GenerateSynthetic(const SyntheticSpec& spec) {
  ValidateSyntheticSpec(spec);
  const std::size_t m = spec.schema.size();
  const std::size_t n = spec.n_samples;
  std::size_t blocks = 0;
  for (const auto& a : spec.schema) blocks += static_cast<std::size_t>(a.cardinality);
  const std::size_t d = spec.feature_dim == 0 ? blocks : spec.feature_dim;

  const auto chol = SemiDefiniteCholesky(CorrelationOf(spec));
  std::vector<std::vector<double>> cumulative(m);
  for (std::size_t a = 0; a < m; ++a) {
    double acc = 0.0;
    for (double p : MarginalOf(spec, a)) cumulative[a].push_back(acc += p);
  }

  Rng latent_rng(DeriveSeed(spec.seed, Stream::kData, {1}));
  Rng noise_rng(DeriveSeed(spec.seed, Stream::kData, {2}));
  // One distribution object per engine: normal_distribution caches draws.
  std::normal_distribution<double> latent_normal(0.0, 1.0);
  std::normal_distribution<double> noise_normal(0.0, 1.0);

  std::vector<std::vector<int>> labels(m, std::vector<int>(n, 0));
  Tensor features = Tensor::Matrix(n, d);
  std::vector<double> z(m), latent(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : z) v = latent_normal(latent_rng);
    for (std::size_t a = 0; a < m; ++a) {
      double s = 0.0;
      for (std::size_t k = 0; k <= a; ++k) s += chol[a][k] * z[k];
      latent[a] = s;
    }
    std::size_t offset = 0;
    for (std::size_t a = 0; a < m; ++a) {
      const double u = StandardNormalCdf(latent[a]);
      const auto& cum = cumulative[a];
      int cls = static_cast<int>(cum.size()) - 1;
      for (std::size_t c = 0; c + 1 < cum.size(); ++c) {
        if (u < cum[c]) {
          cls = static_cast<int>(c);
          break;
        }
      }
      labels[a][i] = cls;
      features(i, offset + static_cast<std::size_t>(cls)) = spec.prototype_scale;
      offset += static_cast<std::size_t>(spec.schema[a].cardinality);
    }
    if (spec.noise_scale > 0.0) {
      for (std::size_t j = 0; j < d; ++j) features(i, j) += spec.noise_scale * noise_normal(noise_rng);
    }
  }
  return Dataset(std::move(features), spec.schema, std::move(labels));
}

}  // namespace pass
