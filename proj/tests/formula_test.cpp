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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "dlc/error.hpp"
#include "dlc/formula.hpp"

using namespace dlc;

namespace {

Formula cmp(CmpOp op, Term a, Term b) { return Formula::compare(op, std::move(a), std::move(b)); }

// Graph with one input per leaf of `f`, bound under its key.
struct Lowered {
  Graph graph;
  Bindings bindings;
  std::vector<std::string> keys;
};

Lowered bind_leaves(const Formula& f) {
  Lowered out;
  Leaves leaves = collect_leaves(f);
  for (const Term& t : leaves.terms) out.keys.push_back(leaf_key(t));
  for (const std::string& p : leaves.props) out.keys.push_back(p);
  for (const std::string& k : out.keys) out.bindings[k] = out.graph.input(k);
  return out;
}

double eval_lowered(Lowered& l, NodeId root, const std::map<std::string, double>& values) {
  std::vector<double> in;
  for (const std::string& k : l.keys) in.push_back(values.at(k));
  return l.graph.eval(root, in);
}

class RandomFormula {
 public:
  explicit RandomFormula(std::uint64_t seed, bool props = false) : rng_(seed), props_(props) {}

  Formula formula(int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 0 : 7);
    switch (pick(rng_)) {
      case 0:
      case 1: return atom();
      case 2: return Formula::conj(formula(depth - 1), formula(depth - 1));
      case 3: return Formula::disj(formula(depth - 1), formula(depth - 1));
      case 4: return Formula::negate(formula(depth - 1));
      case 5: return Formula::implies(formula(depth - 1), formula(depth - 1));
      case 6: return Formula::iff(formula(depth - 1), formula(depth - 1));
      default: {
        std::vector<Formula> items;
        const int n = std::uniform_int_distribution<int>(1, 3)(rng_);
        for (int i = 0; i < n; ++i) items.push_back(formula(depth - 1));
        return (rng_() & 1) ? Formula::big_and(std::move(items)) : Formula::big_or(std::move(items));
      }
    }
  }

  Term term() {
    std::uniform_int_distribution<int> pick(0, 4);
    const int c = pick(rng_);
    if (c == 0) return Term::constant(0.25 * std::uniform_int_distribution<int>(0, 4)(rng_));
    return Term::net_out(Which::kXAdv, static_cast<std::size_t>(c - 1));
  }

  Formula atom() {
    if (props_) {
      static const char* names[] = {"P", "Q", "R"};
      return Formula::prop(names[std::uniform_int_distribution<int>(0, 2)(rng_)]);
    }
    const auto op = static_cast<CmpOp>(std::uniform_int_distribution<int>(0, 5)(rng_));
    return cmp(op, term(), term());
  }

  std::map<std::string, double> values(const std::vector<std::string>& keys) {
    std::map<std::string, double> out;
    for (const std::string& k : keys) {
      out[k] = props_ ? static_cast<double>(rng_() & 1) : 0.25 * std::uniform_int_distribution<int>(0, 4)(rng_);
    }
    return out;
  }

 private:
  std::mt19937_64 rng_;
  bool props_;
};

LeafValue from_map(const std::map<std::string, double>& m) {
  return [&m](const Term& t) { return m.at(leaf_key(t)); };
}

}  // namespace

TEST_CASE("parse examples") {
  Formula f = parse_formula("N(xadv)[3] >= 0.52");
  CHECK(f == cmp(CmpOp::kGe, Term::net_out(Which::kXAdv, 3), Term::constant(0.52)));

  Formula r = parse_formula("forall_ball(0.4): inf_norm_diff() <= 0.01");
  REQUIRE(ball_radius(r).has_value());
  CHECK(*ball_radius(r) == 0.4);
  CHECK(strip_quantifier(r) == cmp(CmpOp::kLe, Term::inf_norm_diff(), Term::constant(0.01)));

  Formula a = parse_formula("P -> (Q -> P)");
  CHECK(a == Formula::implies(Formula::prop("P"), Formula::implies(Formula::prop("Q"), Formula::prop("P"))));
}

TEST_CASE("precedence and associativity") {
  const Formula P = Formula::prop("P"), Q = Formula::prop("Q"), R = Formula::prop("R");
  CHECK(parse_formula("P -> Q -> R") == Formula::implies(P, Formula::implies(Q, R)));
  CHECK(parse_formula("P & Q | R") == Formula::disj(Formula::conj(P, Q), R));
  CHECK(parse_formula("P <-> Q <-> R") == Formula::iff(Formula::iff(P, Q), R));
  CHECK(parse_formula("!P & Q") == Formula::conj(Formula::negate(P), Q));
  CHECK(parse_formula("P | Q -> R <-> P") ==
        Formula::iff(Formula::implies(Formula::disj(P, Q), R), P));
  CHECK(parse_term("1 - 2 - 3") ==
        Term::binary('-', Term::binary('-', Term::constant(1), Term::constant(2)), Term::constant(3)));
  CHECK(parse_term("1 + 2 * 3") ==
        Term::binary('+', Term::constant(1), Term::binary('*', Term::constant(2), Term::constant(3))));
  CHECK(parse_term("-3") == Term::constant(-3));
  CHECK(parse_term("-N(x0)[1]") == Term::negate(Term::net_out(Which::kX0, 1)));
}

TEST_CASE("parenthesised terms and formulas") {
  Formula f = parse_formula("(N(xadv)[0] + N(xadv)[1]) * 2 <= 1 & (P | Q)");
  const auto* conj = std::get_if<Formula::And>(&f.node());
  REQUIRE(conj != nullptr);
  CHECK(std::holds_alternative<Formula::Compare>(conj->lhs.node()));
  CHECK(std::holds_alternative<Formula::Or>(conj->rhs.node()));
  CHECK(parse_formula("((P))") == Formula::prop("P"));
  CHECK(parse_formula("!(x0[2] < xadv[2])") ==
        Formula::negate(cmp(CmpOp::kLt, Term::input(Which::kX0, 2), Term::input(Which::kXAdv, 2))));
}

TEST_CASE("group terms and big connectives") {
  Formula f = parse_formula("all(group(g0) <= 0.1 | group(g0) >= 0.9, group(g1) <= 0.1 | group(g1) >= 0.9)");
  const auto* big = std::get_if<Formula::BigAnd>(&f.node());
  REQUIRE(big != nullptr);
  CHECK(big->items.size() == 2);
  CHECK(std::holds_alternative<Formula::BigOr>(parse_formula("any(P, Q)").node()));
}

TEST_CASE("unicode synonyms") {
  CHECK(parse_formula("P ∧ ¬Q ⇒ R") == parse_formula("P & !Q -> R"));
  CHECK(parse_formula("P ∨ Q ⇔ Q → P ↔ R") == parse_formula("P | Q <-> Q -> P <-> R"));
  CHECK(parse_formula("N(x0)[0] ≤ 1 ∧ N(x0)[1] ≥ 0 ∧ N(x0)[2] ≠ 0.5") ==
        parse_formula("N(x0)[0] <= 1 & N(x0)[1] >= 0 & N(x0)[2] != 0.5"));
  CHECK(to_string(parse_formula("P ∧ Q")) == "P & Q");
}

TEST_CASE("printing") {
  CHECK(to_string(parse_formula("N(xadv)[3] >= 0.52")) == "N(xadv)[3] >= 0.52");
  CHECK(to_string(parse_formula("forall_ball(0.4): inf_norm_diff() <= 0.01")) ==
        "forall_ball(0.4): inf_norm_diff() <= 0.01");
  CHECK(to_string(parse_formula("P -> (Q -> P)")) == "P -> Q -> P");
  CHECK(to_string(parse_formula("(P -> Q) -> P")) == "(P -> Q) -> P");
  CHECK(to_string(parse_formula("P & (Q & R)")) == "P & (Q & R)");
  CHECK(to_string(parse_formula("!(P | Q)")) == "!(P | Q)");
  CHECK(to_string(Term::negate(Term::constant(3))) == "-(3)");
  CHECK(parse_term(to_string(Term::negate(Term::constant(3)))) == Term::negate(Term::constant(3)));
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_formula("P &\n  & Q");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  CHECK_THROWS_AS(parse_formula("N(xadv)[3] >="), SyntaxError);
  CHECK_THROWS_AS(parse_formula("P Q"), SyntaxError);
  CHECK_THROWS_AS(parse_formula("N(z)[0] <= 1"), SyntaxError);
  CHECK_THROWS_AS(parse_formula("N(x0)[1.5] <= 1"), SyntaxError);
  CHECK_THROWS_AS(parse_formula("P # Q"), SyntaxError);
  CHECK_THROWS_AS(parse_formula("all()"), SyntaxError);
  CHECK_THROWS_AS(parse_formula("forall_ball(-1): P"), SyntaxError);
  CHECK_THROWS_AS(parse_formula("P & forall_ball(1): Q"), SyntaxError);
  try {
    parse_formula("foo(1) <= 2");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(std::string(e.what()).find("unknown identifier 'foo'") != std::string::npos);
  }
}

TEST_CASE("print/parse round trip on random formulas") {
  RandomFormula gen(99);
  for (int i = 0; i < 500; ++i) {
    Formula f = gen.formula(4);
    const std::string text = to_string(f);
    CAPTURE(text);
    CHECK(parse_formula(text) == f);
  }
  RandomFormula props(17, true);
  for (int i = 0; i < 200; ++i) {
    Formula f = props.formula(5);
    CHECK(parse_formula(to_string(f)) == f);
  }
}

TEST_CASE("push_negation examples") {
  const Term a = Term::net_out(Which::kXAdv, 0), b = Term::constant(0.5);
  CHECK(push_negation(Formula::negate(cmp(CmpOp::kLe, a, b))) == cmp(CmpOp::kLt, b, a));
  const Formula p = cmp(CmpOp::kLe, a, b), q = cmp(CmpOp::kGe, a, Term::constant(0.1));
  CHECK(push_negation(Formula::negate(Formula::conj(p, q))) ==
        Formula::disj(cmp(CmpOp::kLt, b, a), cmp(CmpOp::kLt, a, Term::constant(0.1))));
  CHECK(push_negation(Formula::negate(Formula::negate(p))) == p);
  CHECK(push_negation(Formula::negate(Formula::implies(p, q))) ==
        Formula::conj(p, push_negation(Formula::negate(q))));
  CHECK_THROWS_AS(push_negation(Formula::negate(Formula::prop("P"))), SemanticsError);
}

TEST_CASE("push_negation preserves two-valued semantics") {
  RandomFormula gen(1234);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    Formula f = gen.formula(4);
    Formula n = push_negation(f);
    Leaves leaves = collect_leaves(f);
    std::vector<std::string> keys;
    for (const Term& t : leaves.terms) keys.push_back(leaf_key(t));
    auto values = gen.values(keys);
    CAPTURE(to_string(f));
    REQUIRE(holds(n, from_map(values)) == holds(f, from_map(values)));
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("lowering examples") {
  const LogicConfig dl2 = make_logic(LogicKind::kDL2);
  {
    Formula f = parse_formula("N(xadv)[0] <= N(xadv)[1] & N(xadv)[2] <= 1");
    Lowered l = bind_leaves(f);
    NodeId root = lower(f, dl2, l.bindings, l.graph);
    CHECK(eval_lowered(l, root, {{"N(xadv)[0]", 0.1}, {"N(xadv)[1]", 0.2}, {"N(xadv)[2]", 0.5}}) == 0.0);
    CHECK(eval_lowered(l, root, {{"N(xadv)[0]", 0.4}, {"N(xadv)[1]", 0.2}, {"N(xadv)[2]", 1.5}}) ==
          doctest::Approx(0.7));
  }
  {
    Formula f = parse_formula("P | Q");
    Lowered l = bind_leaves(f);
    NodeId root = lower(f, make_logic(LogicKind::kGodel), l.bindings, l.graph);
    CHECK(eval_lowered(l, root, {{"P", 0.2}, {"Q", 0.9}}) == 0.9);
  }
  {
    // Material implication: [[!a]] * [[b]].
    Formula f = parse_formula("N(xadv)[0] <= 0.5 -> N(xadv)[1] <= 0.25");
    Lowered l = bind_leaves(f);
    NodeId root = lower(f, dl2, l.bindings, l.graph);
    const double x = 0.3, y = 0.75;
    const double not_a = dl2_leq(0.5, x) + dl2_neq(0.5, x, 1.0);
    const double bv = dl2_leq(y, 0.25);
    CHECK(eval_lowered(l, root, {{"N(xadv)[0]", x}, {"N(xadv)[1]", y}}) == doctest::Approx(not_a * bv));
    CHECK(eval_lowered(l, root, {{"N(xadv)[0]", 0.75}, {"N(xadv)[1]", 0.75}}) == 0.0);
  }
  {
    // Strict comparisons: DL2 adds the != penalty, fuzzy treats < like <=.
    Formula f = parse_formula("N(x0)[0] < N(x0)[1]");
    Lowered l = bind_leaves(f);
    NodeId d = lower(f, dl2, l.bindings, l.graph);
    CHECK(eval_lowered(l, d, {{"N(x0)[0]", 0.5}, {"N(x0)[1]", 0.5}}) == 1.0);
    NodeId z = lower(f, make_logic(LogicKind::kGodel), l.bindings, l.graph);
    CHECK(eval_lowered(l, z, {{"N(x0)[0]", 0.5}, {"N(x0)[1]", 0.5}}) == 1.0);
  }
}

TEST_CASE("lowering errors") {
  const LogicConfig dl2 = make_logic(LogicKind::kDL2);
  Formula f = parse_formula("!(N(x0)[0] <= 1)");
  Lowered l = bind_leaves(f);
  CHECK_THROWS_AS(lower(f, dl2, l.bindings, l.graph), SemanticsError);
  CHECK_NOTHROW(lower(push_negation(f), dl2, l.bindings, l.graph));
  Bindings empty;
  CHECK_THROWS_AS(lower(f, make_logic(LogicKind::kGodel), empty, l.graph), UnboundError);
  CHECK_THROWS_AS(lower(parse_formula("P"), make_logic(LogicKind::kGodel), empty, l.graph), UnboundError);
}

TEST_CASE("classical inputs agree with two-valued evaluation") {
  // Propositional formulas under the fuzzy logics. Godel is excluded: its
  // strict implication maps 0 -> 0 to 0.
  RandomFormula props(55, true);
  for (int i = 0; i < 300; ++i) {
    Formula f = props.formula(4);
    Lowered l = bind_leaves(f);
    auto values = props.values(l.keys);
    const bool truth = holds(f, {}, [&](const std::string& name) { return values.at(name) == 1.0; });
    for (LogicKind kind : table_logic_kinds()) {
      if (kind == LogicKind::kGodel) continue;
      NodeId root = lower(f, make_logic(kind), l.bindings, l.graph);
      CAPTURE(to_string(f));
      CAPTURE(logic_name(kind));
      CHECK(eval_lowered(l, root, values) == doctest::Approx(truth ? 1.0 : 0.0).epsilon(1e-12));
    }
  }
  // Comparison formulas under DL2: zero exactly when the formula holds.
  RandomFormula gen(77);
  const LogicConfig dl2 = make_logic(LogicKind::kDL2);
  for (int i = 0; i < 1000; ++i) {
    Formula f = push_negation(gen.formula(3));
    Lowered l = bind_leaves(f);
    auto values = gen.values(l.keys);
    NodeId root = lower(f, dl2, l.bindings, l.graph);
    const double v = eval_lowered(l, root, values);
    CAPTURE(to_string(f));
    CHECK(v >= 0.0);
    CHECK((v == 0.0) == holds(f, from_map(values)));
  }
}

TEST_CASE("lowering is compositional") {
  RandomFormula gen(31);
  for (int i = 0; i < 300; ++i) {
    Formula lhs = push_negation(gen.formula(3));
    Formula rhs = push_negation(gen.formula(3));
    Formula whole = Formula::disj(Formula::conj(lhs, rhs), lhs);
    for (LogicKind kind : all_logic_kinds()) {
      const LogicConfig logic = make_logic(kind);
      Lowered l = bind_leaves(whole);
      auto values = gen.values(l.keys);
      NodeId w = lower(whole, logic, l.bindings, l.graph);
      NodeId a = lower(lhs, logic, l.bindings, l.graph);
      NodeId b = lower(rhs, logic, l.bindings, l.graph);
      NodeId spliced = ops::disjunction(l.graph, logic, ops::conjunction(l.graph, logic, a, b), a);
      const double direct = eval_lowered(l, w, values);
      CHECK(std::fabs(direct - eval_lowered(l, spliced, values)) <= 1e-12);
    }
  }
}

TEST_CASE("big connectives fold left") {
  Formula f = parse_formula("all(P, Q, R)");
  Lowered l = bind_leaves(f);
  const LogicConfig luk = make_logic(LogicKind::kLukasiewicz);
  NodeId root = lower(f, luk, l.bindings, l.graph);
  const double v = eval_lowered(l, root, {{"P", 0.9}, {"Q", 0.8}, {"R", 0.7}});
  CHECK(v == doctest::Approx(tnorm(luk, tnorm(luk, 0.9, 0.8), 0.7)));
  CHECK_THROWS_AS(Formula::big_and({}), Error);
}
