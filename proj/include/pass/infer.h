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

#include "pass/checkpoint.h"
#include "pass/dataset.h"
#include "pass/substitution_model.h"

namespace pass {

struct SubstitutionRecord {
  std::size_t original = 0;    // row of the input batch or dataset
  std::size_t repeat = 0;
  std::size_t substitute = 0;  // index into the substitute set
  std::uint64_t seed = 0;      // seed of this draw
  std::vector<double> row;     // probability row, kept only when auditing
};

// Inverse-CDF lookup: the first index whose running sum exceeds u, with the
// last index as a floor-proof fallback.
std::size_t SampleFromRow(std::span<const double> row, double u);

// Draws one substitute for a single raw feature row.
SubstitutionRecord Substitute(const SubstitutionModel& model, std::span<const double> x,
                              std::uint64_t seed, bool keep_row = false);

// `repeats` independent draws per row of `x`. The draw for (row i, repeat r)
// uses DeriveSeed(seed, kInference, {i, r}); records are ordered by row, then
// repeat.
std::vector<SubstitutionRecord> SubstituteBatch(const SubstitutionModel& model, const Tensor& x,
                                                std::size_t repeats, std::uint64_t seed,
                                                bool keep_rows = false);

// Feature rows released for each record, in record order.
Tensor ReleasedFeatures(const SubstituteSet& substitute,
                        const std::vector<SubstitutionRecord>& records);

struct ConfusionMatrix {
  std::string attribute;
  Tensor matrix;                  // c x c, row i = original class i
  std::vector<std::size_t> counts;  // records per original class
  std::vector<int> empty_rows;      // classes with no originals; their rows are zero
};

ConfusionMatrix Confusion(const std::vector<SubstitutionRecord>& records, const Dataset& originals,
                          const SubstituteSet& substitute, const std::string& attribute);

// Largest total-variation distance between a row of `cm` and `target`,
// ignoring empty rows.
double MaxRowTv(const ConfusionMatrix& cm, std::span<const double> target);

// CSV with a stamp comment line, then original,substitute,repeat.
void WriteSubstitutions(const std::string& path, const std::vector<SubstitutionRecord>& records,
                        const RunStamp& stamp);
// Optional audit dump: original,repeat,p_0..p_{K-1}.
void WriteSubstitutionRows(const std::string& path,
                           const std::vector<SubstitutionRecord>& records, const RunStamp& stamp);
void WriteConfusion(const std::string& path, const ConfusionMatrix& cm, const RunStamp& stamp);

}  // namespace pass
