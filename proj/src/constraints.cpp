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

#include "dlc/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "dlc/error.hpp"
#include "dlc/parallel.hpp"

namespace dlc {

namespace {

std::string prob_key(Which which, std::size_t k) { return leaf_key(Term::net_out(which, k)); }

}  // namespace

Formula robustness_formula(double epsilon, double delta) {
  return Formula::forall_ball(epsilon, Formula::compare(CmpOp::kLe, Term::inf_norm_diff(), Term::constant(delta)));
}

Formula groups_formula(double epsilon, double delta, const Groups& groups) {
  if (groups.empty()) throw DomainError("groups constraint needs at least one group");
  std::vector<Formula> items;
  for (const auto& [name, members] : groups) {
    items.push_back(Formula::disj(Formula::compare(CmpOp::kLe, Term::group(name), Term::constant(delta)),
                                  Formula::compare(CmpOp::kGe, Term::group(name), Term::constant(1.0 - delta))));
  }
  return Formula::forall_ball(epsilon, Formula::big_and(std::move(items)));
}

Formula class_similarity_formula(double epsilon, const std::vector<Triple>& triples, std::size_t classes) {
  if (triples.empty()) throw DomainError("class similarity constraint needs at least one triple");
  if (classes == 0) throw DomainError("class similarity constraint needs a class count");
  std::vector<Formula> items;
  const double premise = 1.0 / static_cast<double>(classes);
  for (const Triple& t : triples) {
    items.push_back(Formula::implies(
        Formula::compare(CmpOp::kGe, Term::net_out(Which::kXAdv, t.a), Term::constant(premise)),
        Formula::compare(CmpOp::kGe, Term::net_out(Which::kXAdv, t.b), Term::net_out(Which::kXAdv, t.c))));
  }
  return Formula::forall_ball(epsilon, Formula::big_and(std::move(items)));
}

CompiledConstraint::CompiledConstraint(const Formula& formula, const LogicConfig& logic, const Groups& groups,
                                       std::size_t classes, std::size_t input_dim)
    : body_(strip_quantifier(formula)),
      logic_(logic),
      groups_(groups),
      epsilon_(ball_radius(formula)),
      classes_(classes),
      input_dim_(input_dim) {
  logic_.validate();
  Bindings bindings;
  std::vector<NodeId> p0(classes), pa(classes);
  for (std::size_t k = 0; k < classes; ++k) {
    p0[k] = graph_.input(prob_key(Which::kX0, k));
    slots_.emplace_back(Slot::kProbX0, k);
    bindings[prob_key(Which::kX0, k)] = p0[k];
  }
  for (std::size_t k = 0; k < classes; ++k) {
    pa[k] = graph_.input(prob_key(Which::kXAdv, k));
    slots_.emplace_back(Slot::kProbAdv, k);
    bindings[prob_key(Which::kXAdv, k)] = pa[k];
  }
  Leaves leaves = collect_leaves(body_);
  if (!leaves.props.empty()) {
    throw UnboundError("constraint: propositional variable '" + leaves.props.front() + "' has no value in a sample");
  }
  for (const Term& t : leaves.terms) {
    const std::string key = leaf_key(t);
    if (bindings.count(key)) continue;
    if (const auto* n = std::get_if<Term::NetOut>(&t.node())) {
      throw UnboundError("constraint: output " + std::to_string(n->k) + " does not exist for " +
                         std::to_string(classes) + " classes");
    } else if (const auto* in = std::get_if<Term::InputRef>(&t.node())) {
      if (in->index >= input_dim) {
        throw UnboundError("constraint: input " + std::to_string(in->index) + " does not exist for width " +
                           std::to_string(input_dim));
      }
      bindings[key] = graph_.input(key);
      slots_.emplace_back(in->which == Which::kX0 ? Slot::kX0 : Slot::kAdv, in->index);
    } else if (const auto* g = std::get_if<Term::GroupProb>(&t.node())) {
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& e) { return e.first == g->group; });
      if (it == groups.end() || it->second.empty()) throw UnboundError("constraint: unknown group '" + g->group + "'");
      NodeId sum = graph_.constant(0.0);
      bool first = true;
      for (std::size_t k : it->second) {
        if (k >= classes) throw UnboundError("constraint: group '" + g->group + "' names a missing class");
        sum = first ? pa[k] : graph_.add(sum, pa[k]);
        first = false;
      }
      bindings[key] = sum;
    } else if (std::holds_alternative<Term::InfNormDiff>(t.node())) {
      NodeId m = graph_.abs(graph_.sub(pa[0], p0[0]));
      for (std::size_t k = 1; k < classes; ++k) m = graph_.max(m, graph_.abs(graph_.sub(pa[k], p0[k])));
      bindings[key] = m;
    }
  }
  const Formula lowered = logic_.is_fuzzy() ? body_ : push_negation(body_);
  loss_ = ops::constraint_loss(graph_, logic_, lower(lowered, logic_, bindings, graph_));
}

CompiledConstraint::Result CompiledConstraint::eval(std::span<const double> probs_x0, std::span<const double> probs_adv,
                                                    std::span<const double> x0, std::span<const double> xadv,
                                                    bool gradients) {
  if (probs_x0.size() != classes_ || probs_adv.size() != classes_) throw ShapeError("constraint: probability width");
  if (x0.size() != input_dim_ || xadv.size() != input_dim_) throw ShapeError("constraint: input width");
  std::vector<double> in(slots_.size());
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    const auto [slot, i] = slots_[s];
    switch (slot) {
      case Slot::kProbX0: in[s] = probs_x0[i]; break;
      case Slot::kProbAdv: in[s] = probs_adv[i]; break;
      case Slot::kX0: in[s] = x0[i]; break;
      case Slot::kAdv: in[s] = xadv[i]; break;
    }
  }
  Result r;
  r.loss = graph_.eval(loss_, in);
  LeafValue leaf = [&](const Term& t) -> double {
    if (const auto* n = std::get_if<Term::NetOut>(&t.node())) {
      return n->which == Which::kX0 ? probs_x0[n->k] : probs_adv[n->k];
    }
    if (const auto* i = std::get_if<Term::InputRef>(&t.node())) return i->which == Which::kX0 ? x0[i->index] : xadv[i->index];
    if (const auto* g = std::get_if<Term::GroupProb>(&t.node())) {
      auto it = std::find_if(groups_.begin(), groups_.end(), [&](const auto& e) { return e.first == g->group; });
      double s = 0.0;
      for (std::size_t k : it->second) s += probs_adv[k];
      return s;
    }
    double m = 0.0;
    for (std::size_t k = 0; k < classes_; ++k) m = std::max(m, std::fabs(probs_adv[k] - probs_x0[k]));
    return m;
  };
  r.satisfied = holds(body_, leaf);
  if (gradients) {
    std::vector<double> grad = graph_.backward();
    r.d_probs_x0.assign(classes_, 0.0);
    r.d_probs_adv.assign(classes_, 0.0);
    r.d_x0.assign(input_dim_, 0.0);
    r.d_adv.assign(input_dim_, 0.0);
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      const auto [slot, i] = slots_[s];
      switch (slot) {
        case Slot::kProbX0: r.d_probs_x0[i] += grad[s]; break;
        case Slot::kProbAdv: r.d_probs_adv[i] += grad[s]; break;
        case Slot::kX0: r.d_x0[i] += grad[s]; break;
        case Slot::kAdv: r.d_adv[i] += grad[s]; break;
      }
    }
  }
  return r;
}

CompiledConstraint::Result constraint_eval(CompiledConstraint& c, const Model& model, std::span<const double> x0,
                                           std::span<const double> xadv, Gradients* grads, double scale) {
  const Trace t0 = model.trace(x0);
  const Trace ta = model.trace(xadv);
  CompiledConstraint::Result r = c.eval(t0.probs, ta.probs, x0, xadv, grads != nullptr);
  if (grads != nullptr) {
    model.backward_probs(t0, r.d_probs_x0, *grads, scale, nullptr);
    model.backward_probs(ta, r.d_probs_adv, *grads, scale, nullptr);
  }
  return r;
}

CompiledConstraint::Result constraint_eval(const Formula& formula, const LogicConfig& logic, const Model& model,
                                           std::span<const double> x0, std::span<const double> xadv,
                                           const Groups& groups) {
  CompiledConstraint c(formula, logic, groups, model.classes(), model.input_size());
  return constraint_eval(c, model, x0, xadv);
}

Attack::Attack(const Formula& formula, const LogicConfig& logic, const Groups& groups, std::size_t classes,
               std::size_t input_dim)
    : positive_(formula, logic, groups, classes, input_dim),
      negative_(push_negation(Formula::negate(strip_quantifier(formula))), logic, groups, classes, input_dim) {}

std::vector<double> Attack::run(const Model& model, std::span<const double> x0, double epsilon, const PgdConfig& pgd,
                                std::mt19937_64& rng, const PgdObserver& observer) {
  if (!(epsilon >= 0.0)) throw DomainError("pgd: epsilon must be non-negative");
  const std::size_t m = x0.size();
  std::vector<double> best(x0.begin(), x0.end());
  if (observer) observer(best);
  if (pgd.steps == 0 || pgd.restarts == 0 || epsilon == 0.0) return best;

  const double alpha = pgd.step_size > 0.0 ? pgd.step_size : epsilon / 8.0;
  std::vector<double> lo(m), hi(m);
  for (std::size_t i = 0; i < m; ++i) {
    lo[i] = std::max(0.0, x0[i] - epsilon);
    hi[i] = std::max(lo[i], std::min(1.0, x0[i] + epsilon));
  }
  const Trace t0 = model.trace(x0);
  auto losses = [&](std::span<const double> x, bool grad, Trace* ta, CompiledConstraint::Result* pos,
                    CompiledConstraint::Result* neg) {
    *ta = model.trace(x);
    *pos = positive_.eval(t0.probs, ta->probs, x0, x, grad);
    *neg = negative_.eval(t0.probs, ta->probs, x0, x, grad);
  };
  Trace ta;
  CompiledConstraint::Result pos, neg;
  losses(best, false, &ta, &pos, &neg);
  double best_pos = pos.loss, best_neg = neg.loss;
  auto consider = [&](const std::vector<double>& x) {
    if (pos.loss > best_pos || (pos.loss == best_pos && neg.loss < best_neg)) {
      best = x;
      best_pos = pos.loss;
      best_neg = neg.loss;
    }
  };

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Gradients scratch = model.zero_gradients();
  std::vector<double> x(m), dx;
  for (std::size_t r = 0; r < pgd.restarts; ++r) {
    for (std::size_t i = 0; i < m; ++i) x[i] = std::clamp(x0[i] + epsilon * unit(rng), lo[i], hi[i]);
    for (std::size_t step = 0;; ++step) {
      if (observer) observer(x);
      const bool last = step == pgd.steps;
      losses(x, !last, &ta, &pos, &neg);
      consider(x);
      if (last) break;
      std::vector<double> dprobs(pos.d_probs_adv.size());
      for (std::size_t k = 0; k < dprobs.size(); ++k) dprobs[k] = pos.d_probs_adv[k] - neg.d_probs_adv[k];
      dx.assign(m, 0.0);
      model.backward_probs(ta, dprobs, scratch, 0.0, &dx);
      for (std::size_t i = 0; i < m; ++i) {
        const double g = dx[i] + pos.d_adv[i] - neg.d_adv[i];
        const double s = g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : 0.0);
        x[i] = std::clamp(x[i] + alpha * s, lo[i], hi[i]);
      }
    }
  }
  return best;
}

std::vector<double> pgd_attack(const Model& model, std::span<const double> x0, std::size_t label,
                               const Formula& formula, const LogicConfig& logic, double epsilon, const PgdConfig& pgd,
                               std::uint64_t seed, const Groups& groups) {
  if (label >= model.classes()) throw ShapeError("pgd: label out of range");
  Attack attack(formula, logic, groups, model.classes(), model.input_size());
  std::mt19937_64 rng(seed);
  return attack.run(model, x0, epsilon, pgd, rng);
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t epoch, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ epoch) ^ index);
}

double constraint_accuracy(const Model& model, const Dataset& test, const Formula& formula, const LogicConfig& logic,
                           double epsilon, const PgdConfig& pgd, std::uint64_t seed, const Groups& groups) {
  if (test.size() == 0) return 0.0;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), test.size()));
  std::vector<Attack> attacks(workers, Attack(formula, logic, groups, model.classes(), model.input_size()));
  std::vector<char> ok(test.size(), 0);
  parallel_for(test.size(), workers, [&](std::size_t i, unsigned w) {
    std::mt19937_64 rng(sample_seed(seed, 0, i));
    const auto x0 = test.x.row(i);
    const std::vector<double> xs = attacks[w].run(model, x0, epsilon, pgd, rng);
    ok[i] = constraint_eval(attacks[w].constraint(), model, x0, xs).satisfied;
  });
  std::size_t count = 0;
  for (char c : ok) count += c != 0;
  return static_cast<double>(count) / static_cast<double>(test.size());
}

}  // namespace dlc
