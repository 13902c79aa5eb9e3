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

#include "pass/infer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "pass/error.h"
#include "pass/rng.h"

namespace pass {
namespace {

constexpr std::size_t kChunk = 1024;

std::string Stamp(const RunStamp& stamp) {
  return "# method=" + stamp.method + " config_hash=" + stamp.config_hash +
         " seed=" + std::to_string(stamp.seed) + "\n";
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream Open(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  return out;
}

void CheckRow(std::span<const double> row) {
  for (double v : row) {
    if (!std::isfinite(v)) throw OverflowError("substitution row contains non-finite entries");
  }
}

}  // namespace

std::size_t SampleFromRow(std::span<const double> row, double u) {
  if (row.empty()) throw ValidationError("cannot sample from an empty row");
  double cum = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    cum += row[j];
    if (u < cum) return j;
  }
  return row.size() - 1;
}

SubstitutionRecord Substitute(const SubstitutionModel& model, std::span<const double> x,
                              std::uint64_t seed, bool keep_row) {
  const Tensor probs =
      SubstitutionProbs(model, Tensor({1, x.size()}, std::vector<double>(x.begin(), x.end())));
  CheckRow(probs.row(0));
  Rng rng(seed);
  SubstitutionRecord rec;
  rec.seed = seed;
  rec.substitute = SampleFromRow(probs.row(0), UniformUnit(rng));
  if (keep_row) rec.row.assign(probs.row(0).begin(), probs.row(0).end());
  return rec;
}

std::vector<SubstitutionRecord> SubstituteBatch(const SubstitutionModel& model, const Tensor& x,
                                                std::size_t repeats, std::uint64_t seed,
                                                bool keep_rows) {
  if (repeats < 1) throw ValidationError("repeats must be >= 1");
  std::vector<SubstitutionRecord> out;
  out.reserve(x.rows() * repeats);
  for (std::size_t start = 0; start < x.rows(); start += kChunk) {
    const std::size_t stop = std::min(x.rows(), start + kChunk);
    std::vector<std::size_t> idx(stop - start);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = start + i;
    const Tensor probs = SubstitutionProbs(model, x.Rows(idx));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto row = probs.row(i);
      CheckRow(row);
      for (std::size_t r = 0; r < repeats; ++r) {
        SubstitutionRecord rec;
        rec.original = idx[i];
        rec.repeat = r;
        rec.seed = DeriveSeed(seed, Stream::kInference, {idx[i], r});
        Rng rng(rec.seed);
        rec.substitute = SampleFromRow(row, UniformUnit(rng));
        if (keep_rows) rec.row.assign(row.begin(), row.end());
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

Tensor ReleasedFeatures(const SubstituteSet& substitute,
                        const std::vector<SubstitutionRecord>& records) {
  std::vector<std::size_t> idx;
  idx.reserve(records.size());
  for (const auto& r : records) {
    if (r.substitute >= substitute.size()) {
      throw ValidationError("substitute index " + std::to_string(r.substitute) + " out of range");
    }
    idx.push_back(r.substitute);
  }
  return substitute.features.Rows(idx);
}

ConfusionMatrix Confusion(const std::vector<SubstitutionRecord>& records, const Dataset& originals,
                          const SubstituteSet& substitute, const std::string& attribute) {
  const std::size_t a = originals.AttributeIndex(attribute);
  const int c = originals.schema()[a].cardinality;
  const auto& orig = originals.labels()[a];
  const auto& sub = substitute.labels.at(a);
  ConfusionMatrix cm;
  cm.attribute = attribute;
  cm.matrix = Tensor::Matrix(static_cast<std::size_t>(c), static_cast<std::size_t>(c));
  cm.counts.assign(static_cast<std::size_t>(c), 0);
  for (const auto& r : records) {
    if (r.original >= orig.size() || r.substitute >= sub.size()) {
      throw ValidationError("substitution record out of range");
    }
    const auto i = static_cast<std::size_t>(orig[r.original]);
    const auto j = static_cast<std::size_t>(sub[r.substitute]);
    cm.matrix(i, j) += 1.0;
    ++cm.counts[i];
  }
  for (std::size_t i = 0; i < cm.counts.size(); ++i) {
    if (cm.counts[i] == 0) {
      cm.empty_rows.push_back(static_cast<int>(i));
      continue;
    }
    for (double& v : cm.matrix.row(i)) v /= static_cast<double>(cm.counts[i]);
  }
  return cm;
}

double MaxRowTv(const ConfusionMatrix& cm, std::span<const double> target) {
  if (target.size() != cm.matrix.cols()) throw ShapeError("target width != class count");
  double worst = 0.0;
  for (std::size_t i = 0; i < cm.matrix.rows(); ++i) {
    if (cm.counts[i] == 0) continue;
    double tv = 0.0;
    for (std::size_t j = 0; j < target.size(); ++j) tv += std::abs(cm.matrix(i, j) - target[j]);
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

void WriteSubstitutions(const std::string& path, const std::vector<SubstitutionRecord>& records,
                        const RunStamp& stamp) {
  std::ofstream out = Open(path);
  out << Stamp(stamp) << "original,substitute,repeat\n";
  for (const auto& r : records) {
    out << r.original << ',' << r.substitute << ',' << r.repeat << '\n';
  }
}

void WriteSubstitutionRows(const std::string& path,
                           const std::vector<SubstitutionRecord>& records, const RunStamp& stamp) {
  std::ofstream out = Open(path);
  out << Stamp(stamp) << "original,repeat";
  const std::size_t k = records.empty() ? 0 : records.front().row.size();
  for (std::size_t j = 0; j < k; ++j) out << ",p_" << j;
  out << '\n';
  for (const auto& r : records) {
    out << r.original << ',' << r.repeat;
    for (double v : r.row) out << ',' << Num(v);
    out << '\n';
  }
}

void WriteConfusion(const std::string& path, const ConfusionMatrix& cm, const RunStamp& stamp) {
  std::ofstream out = Open(path);
  out << Stamp(stamp) << "original_class,count";
  for (std::size_t j = 0; j < cm.matrix.cols(); ++j) out << ",to_" << j;
  out << '\n';
  for (std::size_t i = 0; i < cm.matrix.rows(); ++i) {
    out << i << ',' << cm.counts[i];
    for (double v : cm.matrix.row(i)) out << ',' << Num(v);
    out << '\n';
  }
}

}  // namespace pass
