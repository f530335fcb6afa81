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

#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dlc {

/// Handle to a node of a Graph. Only meaningful for the graph that issued it.
struct NodeId {
  std::uint32_t index = 0;
  auto operator<=>(const NodeId&) const = default;
};

enum class Op : std::uint8_t {
  kConst,
  kInput,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kMin,
  kMax,
  kAbs,
  kExp,
  kLn,
  kPow,
  kSigmoid,
  kClamp01,
  kIndicatorEq,
  // select(a, b, then, otherwise): `then` if a < b (kSelectLt) or a <= b
  // (kSelectLe), `otherwise` else. Only the chosen branch is live.
  kSelectLt,
  kSelectLe,
};

const char* op_name(Op op);

/// Append-only scalar computation graph with forward evaluation and
/// reverse-mode adjoints.
///
/// Evaluation is eager over node ids, followed by a liveness sweep from the
/// root: nodes on an untaken select branch are computed but neither reported
/// for domain violations nor given adjoints. Subgradient conventions at kinks:
/// min/max ties send the full gradient to the first argument, |x|' = 0 at 0,
/// indicator-eq has derivative 0, clamp01 passes gradient on [0, 1].
class Graph {
 public:
  NodeId constant(double value);
  /// Declares a new input; its slot is input_count() - 1 after the call.
  NodeId input(std::string name);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId div(NodeId a, NodeId b);
  NodeId neg(NodeId a);
  NodeId min(NodeId a, NodeId b);
  NodeId max(NodeId a, NodeId b);
  NodeId abs(NodeId a);
  NodeId exp(NodeId a);
  NodeId ln(NodeId a);
  NodeId pow(NodeId base, NodeId exponent);
  NodeId sigmoid(NodeId a);
  NodeId clamp01(NodeId a);
  NodeId indicator_eq(NodeId a, NodeId b);
  NodeId select_lt(NodeId a, NodeId b, NodeId then, NodeId otherwise);
  NodeId select_le(NodeId a, NodeId b, NodeId then, NodeId otherwise);

  std::size_t size() const { return nodes_.size(); }
  std::size_t input_count() const { return inputs_.size(); }
  NodeId input_node(std::size_t slot) const { return inputs_.at(slot); }
  const std::string& input_name(std::size_t slot) const { return input_names_.at(slot); }
  /// Slot of a named input, or input_count() when absent.
  std::size_t find_input(const std::string& name) const;

  /// Forward value of `root`, with `inputs[slot]` bound to each input.
  /// Throws UnboundError when fewer values than inputs are supplied and
  /// DomainError (naming the node) on a live ln/div/pow domain violation.
  double eval(NodeId root, std::span<const double> inputs);

  /// Evaluates `root` at `lanes` points at once; `columns[slot]` points at
  /// `lanes` values for that input. Domain checks are skipped, so a violation
  /// on a live path shows up as a non-finite result.
  void eval_batch(NodeId root, std::span<const double* const> columns, std::size_t lanes, double* out);

  /// Gradient of the last evaluated root with respect to every input slot.
  std::vector<double> backward();

  double value(NodeId id) const { return values_.at(id.index); }
  double adjoint(NodeId id) const { return adjoints_.at(id.index); }
  bool live(NodeId id) const { return live_.at(id.index) != 0; }
  Op op(NodeId id) const { return nodes_.at(id.index).op; }

  /// One line per node: "id op child-ids value adjoint".
  std::string dump() const;

 private:
  struct Node {
    Op op;
    std::uint32_t child[4];
    std::uint8_t arity;
    double constant;
  };

  NodeId push(Op op, std::initializer_list<NodeId> children, double constant = 0.0);
  void mark_live(std::uint32_t root);

  std::vector<Node> nodes_;
  std::vector<NodeId> inputs_;
  std::vector<std::uint32_t> input_slot_;  // node index -> slot
  std::vector<std::string> input_names_;
  std::vector<double> values_;
  std::vector<double> adjoints_;
  std::vector<std::uint8_t> live_;
  std::vector<std::uint8_t> violation_;
  std::vector<double> batch_;
  std::uint32_t root_ = 0;
  bool evaluated_ = false;
};

/// Central differences (f(x+h) - f(x-h)) / 2h of `root` for every input slot.
std::vector<double> finite_diff(Graph& graph, NodeId root, std::span<const double> inputs, double h);

}  // namespace dlc
