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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "pass/csv_io.h"
#include "pass/dataset.h"
#include "pass/error.h"
#include "pass/synthetic.h"

namespace pass {
namespace {

double Pearson(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

SyntheticSpec TwoBinary(double rho, std::size_t n) {
  SyntheticSpec spec;
  spec.n_samples = n;
  spec.schema = {{"s", 2, Role::kPrivate}, {"u", 2, Role::kUseful}};
  spec.correlation = {{1.0, rho}, {rho, 1.0}};
  spec.seed = 42;
  return spec;
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("pass_data_test_" + name)).string();
}

TEST(Synthetic, IndependentAttributesAreUncorrelated) {
  const Dataset d = GenerateSynthetic(TwoBinary(0.0, 10000));
  EXPECT_LT(std::abs(Pearson(d.Labels("s"), d.Labels("u"))), 0.05);
}

TEST(Synthetic, PerfectCorrelationGivesIdenticalLabels) {
  const Dataset d = GenerateSynthetic(TwoBinary(1.0, 2000));
  EXPECT_EQ(d.Labels("s"), d.Labels("u"));
}

TEST(Synthetic, CopulaCorrelationOfBinaryLabels) {
  // Median-split Gaussians with latent correlation r agree in sign with
  // probability 1/2 + asin(r)/pi, so the label correlation is 2 asin(r)/pi.
  const double oracle = 2.0 * std::asin(0.5) / std::numbers::pi;
  EXPECT_NEAR(oracle, 1.0 / 3.0, 1e-12);
  const Dataset d = GenerateSynthetic(TwoBinary(0.5, 10000));
  EXPECT_NEAR(Pearson(d.Labels("s"), d.Labels("u")), oracle, 0.03);
}

TEST(Synthetic, MarginalsAreHonoured) {
  SyntheticSpec spec = TwoBinary(0.3, 20000);
  spec.schema[1].cardinality = 3;
  spec.marginals = {{0.7, 0.3}, {0.2, 0.5, 0.3}};
  const Dataset d = GenerateSynthetic(spec);
  const auto fs = ClassFrequencies(d.Labels("s"), 2);
  const auto fu = ClassFrequencies(d.Labels("u"), 3);
  EXPECT_NEAR(fs[0], 0.7, 0.015);
  EXPECT_NEAR(fu[0], 0.2, 0.015);
  EXPECT_NEAR(fu[1], 0.5, 0.015);
}

TEST(Synthetic, NoiselessFeaturesAreNearestPrototypeSeparable) {
  SyntheticSpec spec = TwoBinary(0.4, 500);
  spec.schema.push_back({"h", 3, Role::kHidden});
  spec.correlation.clear();
  const Dataset d = GenerateSynthetic(spec);
  ASSERT_EQ(d.feature_dim(), 7u);
  // Within each attribute block the class is the argmax coordinate.
  std::size_t offset = 0;
  for (std::size_t a = 0; a < spec.schema.size(); ++a) {
    const int c = spec.schema[a].cardinality;
    for (std::size_t i = 0; i < d.num_samples(); ++i) {
      int best = 0;
      for (int k = 1; k < c; ++k) {
        if (d.features()(i, offset + k) > d.features()(i, offset + best)) best = k;
      }
      ASSERT_EQ(best, d.labels()[a][i]);
    }
    offset += static_cast<std::size_t>(c);
  }
}

TEST(Synthetic, DeterministicGivenSeed) {
  SyntheticSpec spec = TwoBinary(0.2, 300);
  spec.noise_scale = 0.5;
  spec.feature_dim = 10;
  const Dataset a = GenerateSynthetic(spec);
  const Dataset b = GenerateSynthetic(spec);
  EXPECT_EQ(a.features(), b.features());
  EXPECT_EQ(a.labels(), b.labels());
  spec.seed += 1;
  EXPECT_NE(GenerateSynthetic(spec).features(), a.features());
}

TEST(Synthetic, InfeasibleSpecsRejected) {
  SyntheticSpec bad_psd;
  bad_psd.schema = {{"a", 2, Role::kPrivate}, {"b", 2, Role::kUseful}, {"c", 2, Role::kHidden}};
  bad_psd.correlation = {{1.0, 0.9, -0.9}, {0.9, 1.0, 0.9}, {-0.9, 0.9, 1.0}};
  EXPECT_THROW(GenerateSynthetic(bad_psd), ValidationError);

  SyntheticSpec bad_marginal = TwoBinary(0.0, 10);
  bad_marginal.marginals = {{0.5, 0.6}, {}};
  EXPECT_THROW(GenerateSynthetic(bad_marginal), ValidationError);

  SyntheticSpec asym = TwoBinary(0.0, 10);
  asym.correlation = {{1.0, 0.2}, {0.3, 1.0}};
  EXPECT_THROW(GenerateSynthetic(asym), ValidationError);

  SyntheticSpec small_dim = TwoBinary(0.0, 10);
  small_dim.feature_dim = 3;
  EXPECT_THROW(GenerateSynthetic(small_dim), ValidationError);
}

TEST(Csv, MinimalFile) {
  const std::string path = TempPath("minimal.csv");
  std::ofstream(path) << "f_0,f_1,gender\n0.5,1.5,0\n-1,2,1\n3,4e-2,1\n";
  const Dataset d = LoadCsv(path, {{"gender", 2, Role::kPrivate}});
  EXPECT_EQ(d.num_samples(), 3u);
  EXPECT_EQ(d.feature_dim(), 2u);
  EXPECT_EQ(d.features()(2, 1), 0.04);
  EXPECT_EQ(d.Labels("gender"), (std::vector<int>{0, 1, 1}));
  std::remove(path.c_str());
}

TEST(Csv, OutOfRangeLabelReportsLine) {
  const std::string path = TempPath("range.csv");
  std::ofstream(path) << "f_0,gender\n0.5,0\n0.1,2\n";
  try {
    LoadCsv(path, {{"gender", 2, Role::kPrivate}});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  std::remove(path.c_str());
}

TEST(Csv, MissingValueAndColumn) {
  const std::string path = TempPath("missing.csv");
  std::ofstream(path) << "f_0,gender\n,0\n";
  EXPECT_THROW(LoadCsv(path, {{"gender", 2, Role::kPrivate}}), ValidationError);
  EXPECT_THROW(LoadCsv(path, {{"age", 3, Role::kUseful}}), SchemaError);
  std::remove(path.c_str());
}

TEST(Csv, RoundTripIsExact) {
  SyntheticSpec spec = TwoBinary(0.3, 50);
  spec.noise_scale = 0.7;
  const Dataset d = GenerateSynthetic(spec);
  const std::string path = TempPath("roundtrip.csv");
  WriteCsv(path, d);
  const Dataset back = LoadCsv(path, d.schema());
  EXPECT_EQ(back.features(), d.features());
  EXPECT_EQ(back.labels(), d.labels());
  std::remove(path.c_str());
}

Dataset Small(std::size_t n) {
  SyntheticSpec spec = TwoBinary(0.0, n);
  spec.noise_scale = 0.1;
  return GenerateSynthetic(spec);
}

TEST(SampleSubstitute, WholeTrainingSet) {
  const Dataset d = Small(20);
  const SubstituteSet s = SampleSubstitute(d, 20, 3);
  std::set<std::size_t> seen(s.indices.begin(), s.indices.end());
  EXPECT_EQ(seen.size(), 20u);
  EXPECT_EQ(*seen.rbegin(), 19u);
}

TEST(SampleSubstitute, SingleIndexInRange) {
  const Dataset d = Small(20);
  const SubstituteSet s = SampleSubstitute(d, 1, 3);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_LT(s.indices[0], 20u);
  EXPECT_EQ(s.features.rows(), 1u);
  EXPECT_EQ(s.labels[0][0], d.labels()[0][s.indices[0]]);
}

TEST(SampleSubstitute, DeterministicAndUnique) {
  const Dataset d = Small(64);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (std::size_t k : {1u, 7u, 32u, 64u}) {
      const SubstituteSet s = SampleSubstitute(d, k, seed);
      EXPECT_EQ(s.indices, SampleSubstitute(d, k, seed).indices);
      std::set<std::size_t> seen(s.indices.begin(), s.indices.end());
      EXPECT_EQ(seen.size(), k);
      EXPECT_LT(*seen.rbegin(), 64u);
    }
  }
}

TEST(SampleSubstitute, OutOfRangeRejected) {
  const Dataset d = Small(10);
  EXPECT_THROW(SampleSubstitute(d, 0, 1), ValidationError);
  EXPECT_THROW(SampleSubstitute(d, 11, 1), ValidationError);
  EXPECT_THROW(MakeSubstitute(d, {1, 1}), ValidationError);
}

TEST(Batches, EvenPartition) {
  const auto b = Batches(4, 2, 1, 0);
  ASSERT_EQ(b.size(), 2u);
  std::set<std::size_t> seen;
  for (const auto& chunk : b) seen.insert(chunk.begin(), chunk.end());
  EXPECT_EQ(seen, (std::set<std::size_t>{0, 1, 2, 3}));
}

TEST(Batches, ShortFinalChunkKept) {
  const auto b = Batches(5, 2, 1, 0);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].size(), 2u);
  EXPECT_EQ(b[1].size(), 2u);
  EXPECT_EQ(b[2].size(), 1u);
}

TEST(Batches, EpochIsAPermutation) {
  for (std::uint64_t epoch = 0; epoch < 10; ++epoch) {
    std::vector<std::size_t> all;
    for (const auto& chunk : Batches(103, 8, 9, epoch)) all.insert(all.end(), chunk.begin(), chunk.end());
    ASSERT_EQ(all.size(), 103u);
    std::set<std::size_t> seen(all.begin(), all.end());
    EXPECT_EQ(seen.size(), 103u);
  }
  EXPECT_NE(Batches(103, 8, 9, 0), Batches(103, 8, 9, 1));
  EXPECT_THROW(Batches(10, 1, 0, 0), ValidationError);
}

TEST(Split, SizesAndDisjointness) {
  const Dataset d = Small(100);
  const TrainTestSplit s = SplitTrainTest(d, 0.25, 5);
  EXPECT_EQ(s.test.num_samples(), 25u);
  EXPECT_EQ(s.train.num_samples(), 75u);
}

TEST(Schema, Validation) {
  EXPECT_THROW(ValidateSchema({{"a", 1, Role::kPrivate}}), ValidationError);
  EXPECT_THROW(ValidateSchema({{"a", 2, Role::kPrivate}, {"a", 2, Role::kUseful}}), ValidationError);
  EXPECT_THROW(RequirePassRoles({{"a", 2, Role::kPrivate}, {"b", 2, Role::kHidden}}),
               ValidationError);
  EXPECT_EQ(ParseRole("hidden"), Role::kHidden);
  EXPECT_THROW(ParseRole("secret"), ValidationError);
}

TEST(Standardization, FitAndApply) {
  const Tensor x = Tensor::FromRows({{1.0, 5.0}, {3.0, 5.0}});
  const Standardization st = Standardization::Fit(x);
  const Tensor z = st.Apply(x);
  EXPECT_DOUBLE_EQ(z(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(z(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(z(0, 1), 0.0);  // constant column keeps unit scale
}

}  // namespace
}  // namespace pass
