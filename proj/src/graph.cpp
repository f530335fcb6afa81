// Copyright 2026 The dlc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dlc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "dlc/error.hpp"

namespace dlc {

const char* op_name(Op op) {
  switch (op) {
    case Op::kConst: return "const";
    case Op::kInput: return "input";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kDiv: return "div";
    case Op::kNeg: return "neg";
    case Op::kMin: return "min";
    case Op::kMax: return "max";
    case Op::kAbs: return "abs";
    case Op::kExp: return "exp";
    case Op::kLn: return "ln";
    case Op::kPow: return "pow";
    case Op::kSigmoid: return "sigmoid";
    case Op::kClamp01: return "clamp01";
    case Op::kIndicatorEq: return "indicator-eq";
    case Op::kSelectLt: return "select-lt";
    case Op::kSelectLe: return "select-le";
  }
  return "?";
}

NodeId Graph::push(Op op, std::initializer_list<NodeId> children, double constant) {
  Node node{op, {0, 0, 0, 0}, static_cast<std::uint8_t>(children.size()), constant};
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  std::uint8_t i = 0;
  for (NodeId child : children) {
    if (child.index >= id) throw Error("graph: child id out of range");
    node.child[i++] = child.index;
  }
  nodes_.push_back(node);
  values_.push_back(0.0);
  adjoints_.push_back(0.0);
  live_.push_back(0);
  violation_.push_back(0);
  evaluated_ = false;
  return NodeId{id};
}

NodeId Graph::constant(double value) { return push(Op::kConst, {}, value); }

NodeId Graph::input(std::string name) {
  NodeId id = push(Op::kInput, {});
  nodes_.back().child[0] = static_cast<std::uint32_t>(inputs_.size());
  inputs_.push_back(id);
  input_names_.push_back(std::move(name));
  return id;
}

NodeId Graph::add(NodeId a, NodeId b) { return push(Op::kAdd, {a, b}); }
NodeId Graph::sub(NodeId a, NodeId b) { return push(Op::kSub, {a, b}); }
NodeId Graph::mul(NodeId a, NodeId b) { return push(Op::kMul, {a, b}); }
NodeId Graph::div(NodeId a, NodeId b) { return push(Op::kDiv, {a, b}); }
NodeId Graph::neg(NodeId a) { return push(Op::kNeg, {a}); }
NodeId Graph::min(NodeId a, NodeId b) { return push(Op::kMin, {a, b}); }
NodeId Graph::max(NodeId a, NodeId b) { return push(Op::kMax, {a, b}); }
NodeId Graph::abs(NodeId a) { return push(Op::kAbs, {a}); }
NodeId Graph::exp(NodeId a) { return push(Op::kExp, {a}); }
NodeId Graph::ln(NodeId a) { return push(Op::kLn, {a}); }
NodeId Graph::pow(NodeId base, NodeId exponent) { return push(Op::kPow, {base, exponent}); }
NodeId Graph::sigmoid(NodeId a) { return push(Op::kSigmoid, {a}); }
NodeId Graph::clamp01(NodeId a) { return push(Op::kClamp01, {a}); }
NodeId Graph::indicator_eq(NodeId a, NodeId b) { return push(Op::kIndicatorEq, {a, b}); }
NodeId Graph::select_lt(NodeId a, NodeId b, NodeId then, NodeId otherwise) {
  return push(Op::kSelectLt, {a, b, then, otherwise});
}
NodeId Graph::select_le(NodeId a, NodeId b, NodeId then, NodeId otherwise) {
  return push(Op::kSelectLe, {a, b, then, otherwise});
}

std::size_t Graph::find_input(const std::string& name) const {
  auto it = std::find(input_names_.begin(), input_names_.end(), name);
  return static_cast<std::size_t>(it - input_names_.begin());
}

double Graph::eval(NodeId root, std::span<const double> inputs) {
  if (root.index >= nodes_.size()) throw Error("graph: root id out of range");
  if (inputs.size() < inputs_.size()) {
    throw UnboundError("graph: input '" + input_names_[inputs.size()] + "' is unbound");
  }
  bool any_violation = false;
  for (std::uint32_t i = 0; i <= root.index; ++i) {
    const Node& n = nodes_[i];
    const double a = n.arity > 0 ? values_[n.child[0]] : 0.0;
    const double b = n.arity > 1 ? values_[n.child[1]] : 0.0;
    double v = 0.0;
    std::uint8_t bad = 0;
    switch (n.op) {
      case Op::kConst: v = n.constant; break;
      case Op::kInput: v = inputs[n.child[0]]; break;
      case Op::kAdd: v = a + b; break;
      case Op::kSub: v = a - b; break;
      case Op::kMul: v = a * b; break;
      case Op::kDiv:
        bad = b == 0.0;
        v = a / b;
        break;
      case Op::kNeg: v = -a; break;
      case Op::kMin: v = a <= b ? a : b; break;
      case Op::kMax: v = a >= b ? a : b; break;
      case Op::kAbs: v = std::fabs(a); break;
      case Op::kExp: v = std::exp(a); break;
      case Op::kLn:
        bad = !(a > 0.0);
        v = std::log(a);
        break;
      case Op::kPow:
        bad = a < 0.0 || (a == 0.0 && b < 0.0);
        v = std::pow(a, b);
        break;
      case Op::kSigmoid: v = 1.0 / (1.0 + std::exp(-a)); break;
      case Op::kClamp01: v = std::clamp(a, 0.0, 1.0); break;
      case Op::kIndicatorEq: v = a == b ? 1.0 : 0.0; break;
      case Op::kSelectLt: v = a < b ? values_[n.child[2]] : values_[n.child[3]]; break;
      case Op::kSelectLe: v = a <= b ? values_[n.child[2]] : values_[n.child[3]]; break;
    }
    values_[i] = v;
    violation_[i] = bad;
    any_violation |= bad != 0;
  }
  root_ = root.index;
  evaluated_ = true;
  if (any_violation) {
    mark_live(root_);
    for (std::uint32_t i = 0; i <= root_; ++i) {
      if (live_[i] && violation_[i]) {
        evaluated_ = false;
        throw DomainError("graph: domain violation at node " + std::to_string(i) + " (" + op_name(nodes_[i].op) +
                          ")");
      }
    }
  }
  return values_[root_];
}

void Graph::eval_batch(NodeId root, std::span<const double* const> columns, std::size_t lanes, double* out) {
  if (root.index >= nodes_.size()) throw Error("graph: root id out of range");
  if (columns.size() < inputs_.size()) {
    throw UnboundError("graph: input '" + input_names_[columns.size()] + "' is unbound");
  }
  batch_.resize((static_cast<std::size_t>(root.index) + 1) * lanes);
  for (std::uint32_t i = 0; i <= root.index; ++i) {
    const Node& n = nodes_[i];
    double* v = batch_.data() + i * lanes;
    const double* a = n.arity > 0 ? batch_.data() + n.child[0] * lanes : nullptr;
    const double* b = n.arity > 1 ? batch_.data() + n.child[1] * lanes : nullptr;
    const std::size_t m = lanes;
    switch (n.op) {
      case Op::kConst: std::fill(v, v + m, n.constant); break;
      case Op::kInput: std::copy(columns[n.child[0]], columns[n.child[0]] + m, v); break;
      case Op::kAdd: for (std::size_t k = 0; k < m; ++k) v[k] = a[k] + b[k]; break;
      case Op::kSub: for (std::size_t k = 0; k < m; ++k) v[k] = a[k] - b[k]; break;
      case Op::kMul: for (std::size_t k = 0; k < m; ++k) v[k] = a[k] * b[k]; break;
      case Op::kDiv: for (std::size_t k = 0; k < m; ++k) v[k] = a[k] / b[k]; break;
      case Op::kNeg: for (std::size_t k = 0; k < m; ++k) v[k] = -a[k]; break;
      case Op::kMin: for (std::size_t k = 0; k < m; ++k) v[k] = a[k] <= b[k] ? a[k] : b[k]; break;
      case Op::kMax: for (std::size_t k = 0; k < m; ++k) v[k] = a[k] >= b[k] ? a[k] : b[k]; break;
      case Op::kAbs: for (std::size_t k = 0; k < m; ++k) v[k] = std::fabs(a[k]); break;
      case Op::kExp: for (std::size_t k = 0; k < m; ++k) v[k] = std::exp(a[k]); break;
      case Op::kLn: for (std::size_t k = 0; k < m; ++k) v[k] = std::log(a[k]); break;
      case Op::kPow: for (std::size_t k = 0; k < m; ++k) v[k] = std::pow(a[k], b[k]); break;
      case Op::kSigmoid: for (std::size_t k = 0; k < m; ++k) v[k] = 1.0 / (1.0 + std::exp(-a[k])); break;
      case Op::kClamp01: for (std::size_t k = 0; k < m; ++k) v[k] = std::clamp(a[k], 0.0, 1.0); break;
      case Op::kIndicatorEq: for (std::size_t k = 0; k < m; ++k) v[k] = a[k] == b[k] ? 1.0 : 0.0; break;
      case Op::kSelectLt:
      case Op::kSelectLe: {
        const double* t = batch_.data() + n.child[2] * lanes;
        const double* e = batch_.data() + n.child[3] * lanes;
        if (n.op == Op::kSelectLt) {
          for (std::size_t k = 0; k < m; ++k) v[k] = a[k] < b[k] ? t[k] : e[k];
        } else {
          for (std::size_t k = 0; k < m; ++k) v[k] = a[k] <= b[k] ? t[k] : e[k];
        }
        break;
      }
    }
  }
  const double* r = batch_.data() + static_cast<std::size_t>(root.index) * lanes;
  std::copy(r, r + lanes, out);
}

void Graph::mark_live(std::uint32_t root) {
  std::fill(live_.begin(), live_.begin() + root + 1, std::uint8_t{0});
  live_[root] = 1;
  for (std::uint32_t i = root + 1; i-- > 0;) {
    if (!live_[i]) continue;
    const Node& n = nodes_[i];
    if (n.op == Op::kSelectLt || n.op == Op::kSelectLe) {
      live_[n.child[0]] = 1;
      live_[n.child[1]] = 1;
      const double a = values_[n.child[0]];
      const double b = values_[n.child[1]];
      const bool take = n.op == Op::kSelectLt ? a < b : a <= b;
      live_[take ? n.child[2] : n.child[3]] = 1;
      continue;
    }
    for (std::uint8_t c = 0; c < n.arity; ++c) live_[n.child[c]] = 1;
  }
}

std::vector<double> Graph::backward() {
  if (!evaluated_) throw Error("graph: backward() requires a successful eval()");
  mark_live(root_);
  std::fill(adjoints_.begin(), adjoints_.end(), 0.0);
  adjoints_[root_] = 1.0;
  std::vector<double> grad(inputs_.size(), 0.0);
  for (std::uint32_t i = root_ + 1; i-- > 0;) {
    if (!live_[i]) continue;
    const Node& n = nodes_[i];
    const double g = adjoints_[i];
    const double v = values_[i];
    const std::uint32_t ca = n.child[0];
    const std::uint32_t cb = n.child[1];
    const double a = n.arity > 0 ? values_[ca] : 0.0;
    const double b = n.arity > 1 ? values_[cb] : 0.0;
    switch (n.op) {
      case Op::kConst: break;
      case Op::kInput: grad[n.child[0]] += g; break;
      case Op::kAdd:
        adjoints_[ca] += g;
        adjoints_[cb] += g;
        break;
      case Op::kSub:
        adjoints_[ca] += g;
        adjoints_[cb] -= g;
        break;
      case Op::kMul:
        adjoints_[ca] += g * b;
        adjoints_[cb] += g * a;
        break;
      case Op::kDiv:
        adjoints_[ca] += g / b;
        adjoints_[cb] -= g * a / (b * b);
        break;
      case Op::kNeg: adjoints_[ca] -= g; break;
      case Op::kMin: adjoints_[a <= b ? ca : cb] += g; break;
      case Op::kMax: adjoints_[a >= b ? ca : cb] += g; break;
      case Op::kAbs: adjoints_[ca] += a > 0.0 ? g : (a < 0.0 ? -g : 0.0); break;
      case Op::kExp: adjoints_[ca] += g * v; break;
      case Op::kLn: adjoints_[ca] += g / a; break;
      case Op::kPow: {
        double d_base = 0.0;
        if (b == 1.0) {
          d_base = 1.0;
        } else if (a != 0.0 || b > 1.0) {
          d_base = b * std::pow(a, b - 1.0);
        } else {
          d_base = std::numeric_limits<double>::infinity();
        }
        adjoints_[ca] += g * d_base;
        if (a > 0.0) adjoints_[cb] += g * v * std::log(a);
        break;
      }
      case Op::kSigmoid: adjoints_[ca] += g * v * (1.0 - v); break;
      case Op::kClamp01:
        if (a >= 0.0 && a <= 1.0) adjoints_[ca] += g;
        break;
      case Op::kIndicatorEq: break;
      case Op::kSelectLt:
        adjoints_[a < b ? n.child[2] : n.child[3]] += g;
        break;
      case Op::kSelectLe:
        adjoints_[a <= b ? n.child[2] : n.child[3]] += g;
        break;
    }
  }
  return grad;
}

std::string Graph::dump() const {
  std::ostringstream out;
  char buf[64];
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    out << i << ' ' << op_name(n.op) << ' ';
    if (n.op == Op::kInput) {
      out << '@' << input_names_[n.child[0]];
    } else if (n.arity == 0) {
      out << '-';
    } else {
      for (std::uint8_t c = 0; c < n.arity; ++c) out << (c ? "," : "") << n.child[c];
    }
    std::snprintf(buf, sizeof buf, " %.17g %.17g", values_[i], adjoints_[i]);
    out << buf << '\n';
  }
  return out.str();
}

std::vector<double> finite_diff(Graph& graph, NodeId root, std::span<const double> inputs, double h) {
  if (!(h > 0.0)) throw DomainError("finite_diff: step must be positive");
  std::vector<double> x(inputs.begin(), inputs.end());
  std::vector<double> grad(graph.input_count(), 0.0);
  for (std::size_t slot = 0; slot < grad.size(); ++slot) {
    const double saved = x[slot];
    x[slot] = saved + h;
    const double up = graph.eval(root, x);
    x[slot] = saved - h;
    const double down = graph.eval(root, x);
    x[slot] = saved;
    grad[slot] = (up - down) / (2.0 * h);
  }
  graph.eval(root, x);
  return grad;
}

}  // namespace dlc
