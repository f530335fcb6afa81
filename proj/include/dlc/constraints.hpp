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

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dlc/dataset.hpp"
#include "dlc/formula.hpp"
#include "dlc/graph.hpp"
#include "dlc/logic.hpp"
#include "dlc/model.hpp"

namespace dlc {

using Groups = std::vector<std::pair<std::string, std::vector<std::size_t>>>;

/// forall_ball(eps): inf_norm_diff() <= delta
Formula robustness_formula(double epsilon, double delta);
/// forall_ball(eps): all(group(G) <= delta | group(G) >= 1 - delta, ...)
Formula groups_formula(double epsilon, double delta, const Groups& groups);
/// forall_ball(eps): all(N(xadv)[a] >= 1/n -> N(xadv)[b] >= N(xadv)[c], ...)
Formula class_similarity_formula(double epsilon, const std::vector<Triple>& triples, std::size_t classes);

/// A formula lowered once for a logic, evaluated per sample. Graph inputs are
/// the class probabilities at x0 and xadv plus any referenced input pixels.
class CompiledConstraint {
 public:
  CompiledConstraint(const Formula& formula, const LogicConfig& logic, const Groups& groups, std::size_t classes,
                     std::size_t input_dim);

  struct Result {
    double loss = 0.0;
    bool satisfied = false;
    // Gradients of the loss, filled when requested.
    std::vector<double> d_probs_x0, d_probs_adv, d_x0, d_adv;
  };

  Result eval(std::span<const double> probs_x0, std::span<const double> probs_adv, std::span<const double> x0,
              std::span<const double> xadv, bool gradients);

  const Formula& formula() const { return body_; }
  const LogicConfig& logic() const { return logic_; }
  std::optional<double> epsilon() const { return epsilon_; }
  std::size_t classes() const { return classes_; }

 private:
  enum class Slot : std::uint8_t { kProbX0, kProbAdv, kX0, kAdv };
  Formula body_;
  LogicConfig logic_;
  Groups groups_;
  std::optional<double> epsilon_;
  std::size_t classes_;
  std::size_t input_dim_;
  Graph graph_;
  NodeId loss_;
  std::vector<std::pair<Slot, std::size_t>> slots_;
};

/// Loss and exact satisfaction of `formula` for one sample; the loss gradient
/// with respect to the model parameters is accumulated into `grads` (scaled
/// by `scale`) when non-null. Throws UnboundError for unresolvable leaves.
CompiledConstraint::Result constraint_eval(CompiledConstraint& c, const Model& model, std::span<const double> x0,
                                           std::span<const double> xadv, Gradients* grads = nullptr,
                                           double scale = 1.0);
CompiledConstraint::Result constraint_eval(const Formula& formula, const LogicConfig& logic, const Model& model,
                                           std::span<const double> x0, std::span<const double> xadv,
                                           const Groups& groups = {});

struct PgdConfig {
  std::size_t steps = 20;
  double step_size = 0.0;  // 0 selects epsilon / 8
  std::size_t restarts = 1;
};

/// Called with every iterate, including the random starts.
using PgdObserver = std::function<void(std::span<const double> x)>;

/// Searches B_eps(x0) intersected with [0, 1]^m for a counterexample by
/// sign-gradient ascent on L(phi) - L(!phi) from uniform random starts. The
/// returned point maximises (L(phi), -L(!phi)) lexicographically over x0 and
/// all iterates.
class Attack {
 public:
  Attack(const Formula& formula, const LogicConfig& logic, const Groups& groups, std::size_t classes,
         std::size_t input_dim);

  std::vector<double> run(const Model& model, std::span<const double> x0, double epsilon, const PgdConfig& pgd,
                          std::mt19937_64& rng, const PgdObserver& observer = {});

  CompiledConstraint& constraint() { return positive_; }

 private:
  CompiledConstraint positive_;
  CompiledConstraint negative_;
};

std::vector<double> pgd_attack(const Model& model, std::span<const double> x0, std::size_t label,
                               const Formula& formula, const LogicConfig& logic, double epsilon, const PgdConfig& pgd,
                               std::uint64_t seed, const Groups& groups = {});

/// Fraction of test points whose constraint holds exactly at the PGD point.
double constraint_accuracy(const Model& model, const Dataset& test, const Formula& formula, const LogicConfig& logic,
                           double epsilon, const PgdConfig& pgd, std::uint64_t seed, const Groups& groups = {});

/// Seed for the PGD random start of one sample.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t epoch, std::uint64_t index);

}  // namespace dlc
