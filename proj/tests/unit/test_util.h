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

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "pass/graph.h"
#include "pass/tensor.h"

namespace pass::testing {

inline Tensor RandomMatrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                           double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t = Tensor::Matrix(rows, cols);
  for (double& v : t.values()) v = u(rng);
  return t;
}

// Entries with small magnitude are compared absolutely.
inline ::testing::AssertionResult GradClose(const Tensor& analytic, const Tensor& numeric,
                                            double rel_tol = 1e-4, double abs_tol = 1e-7) {
  if (!analytic.SameShape(numeric)) {
    return ::testing::AssertionFailure()
           << "shape " << analytic.ShapeString() << " vs " << numeric.ShapeString();
  }
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i];
    const double n = numeric[i];
    const double scale = std::max(std::abs(a), std::abs(n));
    const bool ok = scale < 1e-6 ? std::abs(a - n) < abs_tol : std::abs(a - n) / scale < rel_tol;
    if (!ok) {
      return ::testing::AssertionFailure() << "entry " << i << ": analytic " << a << " numeric " << n;
    }
  }
  return ::testing::AssertionSuccess();
}

// Finite-difference gradient of the graph output with respect to one bound
// leaf, every other binding held fixed.
inline Tensor NumericGrad(Graph& graph, Bindings bindings, const std::string& leaf,
                          double step = 1e-5) {
  const Tensor point = bindings.at(leaf);
  return FiniteDiff(
      [&](const Tensor& p) {
        bindings[leaf] = p;
        return graph.Forward(bindings).item();
      },
      point, step);
}

}  // namespace pass::testing
