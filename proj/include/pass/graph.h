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
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pass/tensor.h"

namespace pass {

using NodeId = std::size_t;

// Leaf name -> value. Every Input and Parameter leaf must be bound before
// Forward.
using Bindings = std::map<std::string, Tensor>;

// Gradients keyed by parameter name.
using Gradients = std::map<std::string, Tensor>;

enum class OpKind {
  kInput,
  kParameter,
  kMatMul,            // a (m x k) * b (k x n)
  kMatMulTransposeB,  // a (m x k) * b^T, b is (n x k)
  kAddRowBias,        // x (m x n) + bias (1 x n) broadcast over rows
  kAdd,
  kMul,               // elementwise, same shape
  kScale,             // c * a
  kTanh,
  kRelu,
  kExp,
  kLog,
  kClampMin,          // max(a, floor); gradient passes where a > floor
  kXLogX,             // a * log(max(a, floor))
  kRowSoftmax,
  kRowL2Normalize,    // a_i / (||a_i|| + eps)
  kSum,               // -> 1x1
  kMean,              // -> 1x1
  kRowSum,            // m x n -> m x 1
  kCombine,           // sum_i c_i * s_i over 1x1 operands
};

const char* OpName(OpKind kind);

// Static computation graph with reverse-mode differentiation.
//
// Nodes are appended in topological order: every operation's inputs already
// exist when it is created, so a forward sweep in id order is valid. The graph
// is built once and evaluated many times with different leaf bindings; leaf
// shapes may change between evaluations as long as every op stays
// well-formed.
//
// Evaluation is single-threaded and every reduction sums left to right, so
// identical bindings yield bit-identical values.
class Graph {
 public:
  NodeId Input(const std::string& name);
  NodeId Parameter(const std::string& name);

  NodeId MatMul(NodeId a, NodeId b);
  NodeId MatMulTransposeB(NodeId a, NodeId b);
  NodeId AddRowBias(NodeId x, NodeId bias);
  NodeId Add(NodeId a, NodeId b);
  NodeId Mul(NodeId a, NodeId b);
  NodeId Scale(NodeId a, double c);
  NodeId Tanh(NodeId a);
  NodeId Relu(NodeId a);
  NodeId Exp(NodeId a);
  NodeId Log(NodeId a);
  NodeId ClampMin(NodeId a, double floor);
  NodeId XLogX(NodeId a, double floor);
  NodeId RowSoftmax(NodeId a);
  NodeId RowL2Normalize(NodeId a, double eps);
  NodeId Sum(NodeId a);
  NodeId Mean(NodeId a);
  NodeId RowSum(NodeId a);
  NodeId Combine(std::vector<std::pair<NodeId, double>> terms);

  // Human-readable label used in error messages; defaults to "<op>#<id>".
  void SetLabel(NodeId node, std::string label);
  const std::string& Label(NodeId node) const;

  void SetOutput(NodeId node);
  NodeId output() const;

  // Evaluates every node. Throws ShapeError (naming the node) on incompatible
  // operands and OverflowError (naming the node) on a non-finite result.
  const Tensor& Forward(const Bindings& bindings);

  // Gradient of the scalar output (or of `root`) with respect to every
  // parameter leaf. Parameters the root does not depend on get zeros.
  Gradients Backward();
  Gradients Backward(NodeId root);

  const Tensor& Value(NodeId node) const;
  std::size_t size() const { return nodes_.size(); }
  std::vector<std::string> ParameterNames() const;
  std::vector<std::string> InputNames() const;

 private:
  struct Node {
    OpKind kind = OpKind::kInput;
    std::vector<NodeId> inputs = {};
    double scalar = 0.0;              // Scale factor, clamp floor, or norm guard.
    std::vector<double> coeffs = {};  // Combine coefficients.
    std::string name = {};            // Leaf binding name.
    std::string label = {};
    Tensor value = {};
    Tensor adjoint = {};
    bool needs_grad = false;
  };

  NodeId Append(Node node);
  void Check(NodeId id) const;
  void Evaluate(Node& node);
  void Propagate(const Node& node);

  std::vector<Node> nodes_;
  NodeId output_ = static_cast<NodeId>(-1);
  bool evaluated_ = false;
};

// Central-difference gradient of `f` at `point`, one coordinate at a time:
// (f(x + h e_i) - f(x - h e_i)) / (2h).
Tensor FiniteDiff(const std::function<double(const Tensor&)>& f, const Tensor& point,
                  double step);

}  // namespace pass
