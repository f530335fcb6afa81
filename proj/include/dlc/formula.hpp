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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dlc/graph.hpp"
#include "dlc/logic.hpp"

namespace dlc {

enum class Which { kX0, kXAdv };
enum class CmpOp { kLe, kLt, kGe, kGt, kEq, kNe };

struct TermNode;

/// Immutable arithmetic term over network outputs, inputs and constants.
class Term {
 public:
  struct Const {
    double value;
  };
  struct InputRef {
    Which which;
    std::size_t index;
  };
  struct NetOut {
    Which which;
    std::size_t k;
  };
  /// Sum of N(xadv) over the classes of a named group.
  struct GroupProb {
    std::string group;
  };
  /// max_k |N(xadv)_k - N(x0)_k|
  struct InfNormDiff {};
  struct Negate;
  struct Binary;
  using Node = std::variant<Const, InputRef, NetOut, GroupProb, InfNormDiff, Negate, Binary>;

  static Term constant(double value);
  static Term input(Which which, std::size_t index);
  static Term net_out(Which which, std::size_t k);
  static Term group(std::string name);
  static Term inf_norm_diff();
  static Term negate(Term operand);
  static Term binary(char op, Term lhs, Term rhs);

  const Node& node() const;
  bool is_leaf() const;

  friend bool operator==(const Term& a, const Term& b);

 private:
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const TermNode> node_;
};

struct Term::Negate {
  Term operand;
};
struct Term::Binary {
  char op;  // one of + - * /
  Term lhs;
  Term rhs;
};

struct FormulaNode;

/// Immutable formula tree. Trainer formulas are comparison-atomic; tautologies
/// for the analyzers are built over propositional variables.
class Formula {
 public:
  struct Compare {
    CmpOp op;
    Term lhs;
    Term rhs;
  };
  struct And;
  struct Or;
  struct Not;
  struct Implies;
  struct Iff;
  struct BigAnd;
  struct BigOr;
  struct PropVar {
    std::string name;
  };
  struct ForallBall;
  using Node = std::variant<Compare, And, Or, Not, Implies, Iff, BigAnd, BigOr, PropVar, ForallBall>;

  static Formula compare(CmpOp op, Term lhs, Term rhs);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula negate(Formula a);
  static Formula implies(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  static Formula big_and(std::vector<Formula> items);
  static Formula big_or(std::vector<Formula> items);
  static Formula prop(std::string name);
  static Formula forall_ball(double epsilon, Formula body);

  const Node& node() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const FormulaNode> node_;
};

struct Formula::And {
  Formula lhs, rhs;
};
struct Formula::Or {
  Formula lhs, rhs;
};
struct Formula::Not {
  Formula operand;
};
struct Formula::Implies {
  Formula lhs, rhs;
};
struct Formula::Iff {
  Formula lhs, rhs;
};
/// Instantiated conjuncts of a group conjunction; never empty.
struct Formula::BigAnd {
  std::vector<Formula> items;
};
struct Formula::BigOr {
  std::vector<Formula> items;
};
/// forall x in B_eps(x0): body. Only valid at the top level.
struct Formula::ForallBall {
  double epsilon;
  Formula body;
};

struct TermNode {
  Term::Node node;
};
struct FormulaNode {
  Formula::Node node;
};

/// Parses the ASCII constraint language (Unicode connective synonyms such as
/// "∧ ∨ ¬ ⇒ ⇔ ≤ ≥ ≠" are accepted). Throws SyntaxError.
Formula parse_formula(std::string_view text);
Term parse_term(std::string_view text);

/// ASCII rendering that parses back to an equal tree.
std::string to_string(const Formula& f);
std::string to_string(const Term& t);
std::string_view cmp_symbol(CmpOp op);

/// Negation-normal form: eliminates every Not by De Morgan, implication
/// rewriting and comparison flipping. Throws SemanticsError on PropVar.
Formula push_negation(const Formula& f);

/// Radius of the top-level bounded quantifier, if any.
std::optional<double> ball_radius(const Formula& f);
/// The formula with a top-level bounded quantifier removed.
const Formula& strip_quantifier(const Formula& f);

/// Canonical key under which a leaf term (or a propositional variable name) is
/// bound, e.g. "N(xadv)[3]", "group(g0)", "P".
std::string leaf_key(const Term& leaf);

/// Maps leaf keys to graph nodes for lowering.
using Bindings = std::unordered_map<std::string, NodeId>;

/// Lowers `f` into `graph` under `logic`; returns the truth-value node. DL2
/// requires negation-normal form (no Not nodes). A top-level quantifier is
/// stripped. Throws UnboundError for leaves missing from `bindings`.
NodeId lower(const Formula& f, const LogicConfig& logic, const Bindings& bindings, Graph& graph);
NodeId lower(const Term& t, const Bindings& bindings, Graph& graph);

/// Leaf resolver for exact evaluation.
using LeafValue = std::function<double(const Term& leaf)>;
using PropValue = std::function<bool(const std::string& name)>;

double evaluate(const Term& t, const LeafValue& leaf);
/// Classical two-valued truth of `f`.
bool holds(const Formula& f, const LeafValue& leaf, const PropValue& prop = {});

/// Every distinct leaf term and propositional variable name occurring in `f`.
struct Leaves {
  std::vector<Term> terms;
  std::vector<std::string> props;
};
Leaves collect_leaves(const Formula& f);

}  // namespace dlc
