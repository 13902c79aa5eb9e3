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

#include "pass/graph.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pass/error.h"

namespace pass {
namespace {

Tensor ZerosLike(const Tensor& t) { return Tensor(t.shape(), 0.0); }

void RequireRank2(const std::string& label, const Tensor& t) {
  if (t.rank() != 2) {
    throw ShapeError(label + ": expected a matrix operand, got shape " + t.ShapeString());
  }
}

void RequireSameShape(const std::string& label, const Tensor& a, const Tensor& b) {
  if (!a.SameShape(b)) {
    throw ShapeError(label + ": operand shapes differ, " + a.ShapeString() + " vs " +
                     b.ShapeString());
  }
}

template <typename F>
Tensor Map(const Tensor& a, F f) {
  Tensor out = ZerosLike(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
  return out;
}

}  // namespace

const char* OpName(OpKind kind) {
  switch (kind) {
    case OpKind::kInput: return "input";
    case OpKind::kParameter: return "parameter";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kMatMulTransposeB: return "matmul_tb";
    case OpKind::kAddRowBias: return "add_row_bias";
    case OpKind::kAdd: return "add";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kTanh: return "tanh";
    case OpKind::kRelu: return "relu";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kClampMin: return "clamp_min";
    case OpKind::kXLogX: return "xlogx";
    case OpKind::kRowSoftmax: return "row_softmax";
    case OpKind::kRowL2Normalize: return "row_l2_normalize";
    case OpKind::kSum: return "sum";
    case OpKind::kMean: return "mean";
    case OpKind::kRowSum: return "row_sum";
    case OpKind::kCombine: return "combine";
  }
  return "unknown";
}

NodeId Graph::Append(Node node) {
  for (NodeId in : node.inputs) Check(in);
  const NodeId id = nodes_.size();
  if (node.label.empty()) node.label = std::string(OpName(node.kind)) + "#" + std::to_string(id);
  nodes_.push_back(std::move(node));
  evaluated_ = false;
  return id;
}

void Graph::Check(NodeId id) const {
  if (id >= nodes_.size()) throw ValidationError("unknown node id " + std::to_string(id));
}

NodeId Graph::Input(const std::string& name) {
  return Append({.kind = OpKind::kInput, .name = name, .label = name});
}

NodeId Graph::Parameter(const std::string& name) {
  for (const Node& n : nodes_) {
    if ((n.kind == OpKind::kParameter || n.kind == OpKind::kInput) && n.name == name) {
      throw ValidationError("duplicate leaf name '" + name + "'");
    }
  }
  return Append({.kind = OpKind::kParameter, .name = name, .label = name});
}

NodeId Graph::MatMul(NodeId a, NodeId b) { return Append({.kind = OpKind::kMatMul, .inputs = {a, b}}); }
NodeId Graph::MatMulTransposeB(NodeId a, NodeId b) {
  return Append({.kind = OpKind::kMatMulTransposeB, .inputs = {a, b}});
}
NodeId Graph::AddRowBias(NodeId x, NodeId bias) {
  return Append({.kind = OpKind::kAddRowBias, .inputs = {x, bias}});
}
NodeId Graph::Add(NodeId a, NodeId b) { return Append({.kind = OpKind::kAdd, .inputs = {a, b}}); }
NodeId Graph::Mul(NodeId a, NodeId b) { return Append({.kind = OpKind::kMul, .inputs = {a, b}}); }
NodeId Graph::Scale(NodeId a, double c) {
  return Append({.kind = OpKind::kScale, .inputs = {a}, .scalar = c});
}
NodeId Graph::Tanh(NodeId a) { return Append({.kind = OpKind::kTanh, .inputs = {a}}); }
NodeId Graph::Relu(NodeId a) { return Append({.kind = OpKind::kRelu, .inputs = {a}}); }
NodeId Graph::Exp(NodeId a) { return Append({.kind = OpKind::kExp, .inputs = {a}}); }
NodeId Graph::Log(NodeId a) { return Append({.kind = OpKind::kLog, .inputs = {a}}); }
NodeId Graph::ClampMin(NodeId a, double floor) {
  return Append({.kind = OpKind::kClampMin, .inputs = {a}, .scalar = floor});
}
NodeId Graph::XLogX(NodeId a, double floor) {
  if (!(floor > 0.0)) throw ValidationError("xlogx floor must be positive");
  return Append({.kind = OpKind::kXLogX, .inputs = {a}, .scalar = floor});
}
NodeId Graph::RowSoftmax(NodeId a) { return Append({.kind = OpKind::kRowSoftmax, .inputs = {a}}); }
NodeId Graph::RowL2Normalize(NodeId a, double eps) {
  return Append({.kind = OpKind::kRowL2Normalize, .inputs = {a}, .scalar = eps});
}
NodeId Graph::Sum(NodeId a) { return Append({.kind = OpKind::kSum, .inputs = {a}}); }
NodeId Graph::Mean(NodeId a) { return Append({.kind = OpKind::kMean, .inputs = {a}}); }
NodeId Graph::RowSum(NodeId a) { return Append({.kind = OpKind::kRowSum, .inputs = {a}}); }

NodeId Graph::Combine(std::vector<std::pair<NodeId, double>> terms) {
  if (terms.empty()) throw ValidationError("combine needs at least one term");
  Node node{.kind = OpKind::kCombine};
  for (auto [id, c] : terms) {
    node.inputs.push_back(id);
    node.coeffs.push_back(c);
  }
  return Append(std::move(node));
}

void Graph::SetLabel(NodeId node, std::string label) {
  Check(node);
  nodes_[node].label = std::move(label);
}

const std::string& Graph::Label(NodeId node) const {
  Check(node);
  return nodes_[node].label;
}

void Graph::SetOutput(NodeId node) {
  Check(node);
  output_ = node;
}

NodeId Graph::output() const {
  if (output_ >= nodes_.size()) throw StateError("graph output not set");
  return output_;
}

const Tensor& Graph::Value(NodeId node) const {
  Check(node);
  if (!evaluated_) throw StateError("graph has not been evaluated");
  return nodes_[node].value;
}

std::vector<std::string> Graph::ParameterNames() const {
  std::vector<std::string> names;
  for (const Node& n : nodes_) {
    if (n.kind == OpKind::kParameter) names.push_back(n.name);
  }
  return names;
}

std::vector<std::string> Graph::InputNames() const {
  std::vector<std::string> names;
  for (const Node& n : nodes_) {
    if (n.kind == OpKind::kInput) names.push_back(n.name);
  }
  return names;
}

const Tensor& Graph::Forward(const Bindings& bindings) {
  const NodeId out = output();
  evaluated_ = false;
  for (Node& node : nodes_) {
    if (node.kind == OpKind::kInput || node.kind == OpKind::kParameter) {
      auto it = bindings.find(node.name);
      if (it == bindings.end()) throw ValidationError("leaf '" + node.name + "' is not bound");
      node.value = it->second;
      node.needs_grad = node.kind == OpKind::kParameter;
      if (!node.value.AllFinite()) {
        throw OverflowError(node.label + ": bound value contains non-finite entries");
      }
      continue;
    }
    node.needs_grad = false;
    for (NodeId in : node.inputs) node.needs_grad = node.needs_grad || nodes_[in].needs_grad;
    Evaluate(node);
    if (!node.value.AllFinite()) {
      throw OverflowError(node.label + ": non-finite value produced by " + OpName(node.kind));
    }
  }
  evaluated_ = true;
  return nodes_[out].value;
}

void Graph::Evaluate(Node& node) {
  const std::string& label = node.label;
  auto in = [&](std::size_t i) -> const Tensor& { return nodes_[node.inputs[i]].value; };

  switch (node.kind) {
    case OpKind::kInput:
    case OpKind::kParameter:
      return;

    case OpKind::kMatMul: {
      const Tensor& a = in(0);
      const Tensor& b = in(1);
      RequireRank2(label, a);
      RequireRank2(label, b);
      if (a.cols() != b.rows()) {
        throw ShapeError(label + ": cannot multiply " + a.ShapeString() + " by " + b.ShapeString());
      }
      const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
      Tensor c = Tensor::Matrix(m, n);
      const double* pa = a.values().data();
      const double* pb = b.values().data();
      double* pc = c.values().data();
      for (std::size_t i = 0; i < m; ++i) {
        double* ci = pc + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = pa[i * k + p];
          if (aip == 0.0) continue;
          const double* bp = pb + p * n;
          for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
      }
      node.value = std::move(c);
      return;
    }

    case OpKind::kMatMulTransposeB: {
      const Tensor& a = in(0);
      const Tensor& b = in(1);
      RequireRank2(label, a);
      RequireRank2(label, b);
      if (a.cols() != b.cols()) {
        throw ShapeError(label + ": cannot multiply " + a.ShapeString() + " by transpose of " +
                         b.ShapeString());
      }
      const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
      Tensor c = Tensor::Matrix(m, n);
      const double* pa = a.values().data();
      const double* pb = b.values().data();
      double* pc = c.values().data();
      for (std::size_t i = 0; i < m; ++i) {
        const double* ai = pa + i * k;
        for (std::size_t j = 0; j < n; ++j) {
          const double* bj = pb + j * k;
          double s = 0.0;
          for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
          pc[i * n + j] = s;
        }
      }
      node.value = std::move(c);
      return;
    }

    case OpKind::kAddRowBias: {
      const Tensor& x = in(0);
      const Tensor& bias = in(1);
      RequireRank2(label, x);
      if (bias.size() != x.cols() || bias.rows() != 1) {
        throw ShapeError(label + ": bias " + bias.ShapeString() + " does not match rows of " +
                         x.ShapeString());
      }
      Tensor y = x;
      for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) y(i, j) += bias[j];
      }
      node.value = std::move(y);
      return;
    }

    case OpKind::kAdd:
    case OpKind::kMul: {
      const Tensor& a = in(0);
      const Tensor& b = in(1);
      RequireSameShape(label, a, b);
      Tensor y = a;
      if (node.kind == OpKind::kAdd) {
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += b[i];
      } else {
        for (std::size_t i = 0; i < y.size(); ++i) y[i] *= b[i];
      }
      node.value = std::move(y);
      return;
    }

    case OpKind::kScale: {
      const double c = node.scalar;
      node.value = Map(in(0), [c](double v) { return c * v; });
      return;
    }
    case OpKind::kTanh:
      node.value = Map(in(0), [](double v) { return std::tanh(v); });
      return;
    case OpKind::kRelu:
      node.value = Map(in(0), [](double v) { return v > 0.0 ? v : 0.0; });
      return;
    case OpKind::kExp:
      node.value = Map(in(0), [](double v) { return std::exp(v); });
      return;
    case OpKind::kLog:
      node.value = Map(in(0), [](double v) { return std::log(v); });
      return;
    case OpKind::kClampMin: {
      const double f = node.scalar;
      node.value = Map(in(0), [f](double v) { return v > f ? v : f; });
      return;
    }
    case OpKind::kXLogX: {
      const double f = node.scalar;
      node.value = Map(in(0), [f](double v) { return v == 0.0 ? 0.0 : v * std::log(v > f ? v : f); });
      return;
    }

    case OpKind::kRowSoftmax: {
      const Tensor& x = in(0);
      RequireRank2(label, x);
      Tensor y = ZerosLike(x);
      for (std::size_t i = 0; i < x.rows(); ++i) {
        auto xi = x.row(i);
        auto yi = y.row(i);
        const double mx = *std::max_element(xi.begin(), xi.end());
        double z = 0.0;
        for (std::size_t j = 0; j < xi.size(); ++j) {
          yi[j] = std::exp(xi[j] - mx);
          z += yi[j];
        }
        for (double& v : yi) v /= z;
      }
      node.value = std::move(y);
      return;
    }

    case OpKind::kRowL2Normalize: {
      const Tensor& x = in(0);
      RequireRank2(label, x);
      Tensor y = ZerosLike(x);
      for (std::size_t i = 0; i < x.rows(); ++i) {
        auto xi = x.row(i);
        double sq = 0.0;
        for (double v : xi) sq += v * v;
        const double d = std::sqrt(sq) + node.scalar;
        auto yi = y.row(i);
        for (std::size_t j = 0; j < xi.size(); ++j) yi[j] = xi[j] / d;
      }
      node.value = std::move(y);
      return;
    }

    case OpKind::kSum:
    case OpKind::kMean: {
      const Tensor& x = in(0);
      double s = 0.0;
      for (double v : x.values()) s += v;
      if (node.kind == OpKind::kMean) s /= static_cast<double>(x.size());
      node.value = Tensor::Scalar(s);
      return;
    }

    case OpKind::kRowSum: {
      const Tensor& x = in(0);
      RequireRank2(label, x);
      Tensor y = Tensor::Matrix(x.rows(), 1);
      for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (double v : x.row(i)) s += v;
        y[i] = s;
      }
      node.value = std::move(y);
      return;
    }

    case OpKind::kCombine: {
      double s = 0.0;
      for (std::size_t i = 0; i < node.inputs.size(); ++i) {
        const Tensor& t = in(i);
        if (t.size() != 1) {
          throw ShapeError(label + ": combine operand " + nodes_[node.inputs[i]].label +
                           " is not scalar, shape " + t.ShapeString());
        }
        s += node.coeffs[i] * t[0];
      }
      node.value = Tensor::Scalar(s);
      return;
    }
  }
}

Gradients Graph::Backward() { return Backward(output()); }

Gradients Graph::Backward(NodeId root) {
  Check(root);
  if (!evaluated_) throw StateError("backward called before forward");
  if (nodes_[root].value.size() != 1) {
    throw StateError("backward requires a scalar root, " + nodes_[root].label + " has shape " +
                     nodes_[root].value.ShapeString());
  }
  for (Node& n : nodes_) n.adjoint = n.needs_grad ? ZerosLike(n.value) : Tensor();
  if (nodes_[root].needs_grad) {
    nodes_[root].adjoint[0] = 1.0;
    for (NodeId id = root + 1; id-- > 0;) {
      const Node& n = nodes_[id];
      if (n.needs_grad && n.kind != OpKind::kParameter && n.kind != OpKind::kInput) Propagate(n);
    }
  }
  Gradients grads;
  for (Node& n : nodes_) {
    if (n.kind != OpKind::kParameter) continue;
    grads[n.name] = n.adjoint.empty() ? ZerosLike(n.value) : n.adjoint;
  }
  return grads;
}

void Graph::Propagate(const Node& node) {
  const Tensor& dy = node.adjoint;
  const Tensor& y = node.value;
  auto in = [&](std::size_t i) -> Node& { return nodes_[node.inputs[i]]; };

  switch (node.kind) {
    case OpKind::kInput:
    case OpKind::kParameter:
      return;

    case OpKind::kMatMul: {
      Node& na = in(0);
      Node& nb = in(1);
      const Tensor& a = na.value;
      const Tensor& b = nb.value;
      const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
      const double* pa = a.values().data();
      const double* pb = b.values().data();
      const double* pg = dy.values().data();
      if (na.needs_grad) {
        double* da = na.adjoint.values().data();
        for (std::size_t i = 0; i < m; ++i) {
          const double* gi = pg + i * n;
          for (std::size_t p = 0; p < k; ++p) {
            const double* bp = pb + p * n;
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += gi[j] * bp[j];
            da[i * k + p] += s;
          }
        }
      }
      if (nb.needs_grad) {
        double* db = nb.adjoint.values().data();
        for (std::size_t i = 0; i < m; ++i) {
          const double* gi = pg + i * n;
          for (std::size_t p = 0; p < k; ++p) {
            const double aip = pa[i * k + p];
            if (aip == 0.0) continue;
            double* dbp = db + p * n;
            for (std::size_t j = 0; j < n; ++j) dbp[j] += aip * gi[j];
          }
        }
      }
      return;
    }

    case OpKind::kMatMulTransposeB: {
      Node& na = in(0);
      Node& nb = in(1);
      const Tensor& a = na.value;
      const Tensor& b = nb.value;
      const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
      const double* pa = a.values().data();
      const double* pb = b.values().data();
      const double* pg = dy.values().data();
      double* da = na.needs_grad ? na.adjoint.values().data() : nullptr;
      double* db = nb.needs_grad ? nb.adjoint.values().data() : nullptr;
      for (std::size_t i = 0; i < m; ++i) {
        const double* ai = pa + i * k;
        for (std::size_t j = 0; j < n; ++j) {
          const double g = pg[i * n + j];
          if (g == 0.0) continue;
          const double* bj = pb + j * k;
          if (da != nullptr) {
            double* dai = da + i * k;
            for (std::size_t p = 0; p < k; ++p) dai[p] += g * bj[p];
          }
          if (db != nullptr) {
            double* dbj = db + j * k;
            for (std::size_t p = 0; p < k; ++p) dbj[p] += g * ai[p];
          }
        }
      }
      return;
    }

    case OpKind::kAddRowBias: {
      Node& nx = in(0);
      Node& nb = in(1);
      if (nx.needs_grad) {
        for (std::size_t i = 0; i < dy.size(); ++i) nx.adjoint[i] += dy[i];
      }
      if (nb.needs_grad) {
        for (std::size_t i = 0; i < dy.rows(); ++i) {
          for (std::size_t j = 0; j < dy.cols(); ++j) nb.adjoint[j] += dy(i, j);
        }
      }
      return;
    }

    case OpKind::kAdd: {
      for (std::size_t k = 0; k < 2; ++k) {
        Node& n = in(k);
        if (!n.needs_grad) continue;
        for (std::size_t i = 0; i < dy.size(); ++i) n.adjoint[i] += dy[i];
      }
      return;
    }

    case OpKind::kMul: {
      Node& na = in(0);
      Node& nb = in(1);
      if (na.needs_grad) {
        for (std::size_t i = 0; i < dy.size(); ++i) na.adjoint[i] += dy[i] * nb.value[i];
      }
      if (nb.needs_grad) {
        for (std::size_t i = 0; i < dy.size(); ++i) nb.adjoint[i] += dy[i] * na.value[i];
      }
      return;
    }

    case OpKind::kScale: {
      Node& na = in(0);
      for (std::size_t i = 0; i < dy.size(); ++i) na.adjoint[i] += node.scalar * dy[i];
      return;
    }
    case OpKind::kTanh: {
      Node& na = in(0);
      for (std::size_t i = 0; i < dy.size(); ++i) na.adjoint[i] += dy[i] * (1.0 - y[i] * y[i]);
      return;
    }
    case OpKind::kRelu: {
      Node& na = in(0);
      for (std::size_t i = 0; i < dy.size(); ++i) {
        if (na.value[i] > 0.0) na.adjoint[i] += dy[i];
      }
      return;
    }
    case OpKind::kExp: {
      Node& na = in(0);
      for (std::size_t i = 0; i < dy.size(); ++i) na.adjoint[i] += dy[i] * y[i];
      return;
    }
    case OpKind::kLog: {
      Node& na = in(0);
      for (std::size_t i = 0; i < dy.size(); ++i) na.adjoint[i] += dy[i] / na.value[i];
      return;
    }
    case OpKind::kClampMin: {
      Node& na = in(0);
      for (std::size_t i = 0; i < dy.size(); ++i) {
        if (na.value[i] > node.scalar) na.adjoint[i] += dy[i];
      }
      return;
    }
    case OpKind::kXLogX: {
      Node& na = in(0);
      const double f = node.scalar;
      for (std::size_t i = 0; i < dy.size(); ++i) {
        const double v = na.value[i];
        na.adjoint[i] += dy[i] * (v > f ? std::log(v) + 1.0 : std::log(f));
      }
      return;
    }

    case OpKind::kRowSoftmax: {
      Node& na = in(0);
      for (std::size_t i = 0; i < y.rows(); ++i) {
        auto yi = y.row(i);
        auto gi = dy.row(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < yi.size(); ++j) dot += gi[j] * yi[j];
        for (std::size_t j = 0; j < yi.size(); ++j) na.adjoint(i, j) += yi[j] * (gi[j] - dot);
      }
      return;
    }

    case OpKind::kRowL2Normalize: {
      Node& na = in(0);
      const Tensor& x = na.value;
      for (std::size_t i = 0; i < x.rows(); ++i) {
        auto xi = x.row(i);
        auto gi = dy.row(i);
        double sq = 0.0;
        for (double v : xi) sq += v * v;
        const double norm = std::sqrt(sq);
        const double d = norm + node.scalar;
        double dot = 0.0;
        for (std::size_t j = 0; j < xi.size(); ++j) dot += gi[j] * xi[j];
        const double coef = norm > 0.0 ? dot / (norm * d * d) : 0.0;
        for (std::size_t j = 0; j < xi.size(); ++j) na.adjoint(i, j) += gi[j] / d - coef * xi[j];
      }
      return;
    }

    case OpKind::kSum:
    case OpKind::kMean: {
      Node& na = in(0);
      const double g = node.kind == OpKind::kMean ? dy[0] / static_cast<double>(na.value.size())
                                                  : dy[0];
      for (double& v : na.adjoint.values()) v += g;
      return;
    }

    case OpKind::kRowSum: {
      Node& na = in(0);
      for (std::size_t i = 0; i < na.value.rows(); ++i) {
        for (double& v : na.adjoint.row(i)) v += dy[i];
      }
      return;
    }

    case OpKind::kCombine: {
      for (std::size_t k = 0; k < node.inputs.size(); ++k) {
        Node& n = in(k);
        if (n.needs_grad) n.adjoint[0] += node.coeffs[k] * dy[0];
      }
      return;
    }
  }
}

Tensor FiniteDiff(const std::function<double(const Tensor&)>& f, const Tensor& point,
                  double step) {
  if (!(step > 0.0)) throw ValidationError("finite difference step must be positive");
  Tensor grad(point.shape(), 0.0);
  Tensor probe = point;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double x0 = point[i];
    probe[i] = x0 + step;
    const double fp = f(probe);
    probe[i] = x0 - step;
    const double fm = f(probe);
    probe[i] = x0;
    grad[i] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

}  // namespace pass
