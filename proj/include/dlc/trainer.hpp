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

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dlc/constraints.hpp"
#include "dlc/dataset.hpp"
#include "dlc/logic.hpp"
#include "dlc/model.hpp"

namespace dlc {

struct ConstraintConfig {
  std::string kind = "robustness";  // robustness | groups | class-similarity | custom
  std::string formula;              // DSL text for kind "custom"
  double epsilon = 0.1;
  double delta = 0.05;
  Groups groups;                    // empty selects default_groups()
  std::vector<Triple> triples;      // empty selects centroid_triples()
};

struct GradNormConfig {
  bool enabled = true;
  double alpha = 0.1;
  double weight_lr = 0.025;
  /// Epoch from which the weights stay frozen; 0 never freezes.
  std::size_t stop_epoch = 0;
};

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double learning_rate = 0.1;
  std::vector<std::size_t> hidden{32};
  LogicConfig logic;
  ConstraintConfig constraint;
  PgdConfig pgd;
  GradNormConfig gradnorm;
  /// Initial weights; fixed throughout when gradnorm is disabled.
  double lambda_ce = 1.0;
  double lambda_c = 1.0;
  std::uint64_t seed = 0;
  DataSource data;

  /// Throws DomainError on out-of-range fields.
  void validate() const;
};

/// Baseline arm: cross-entropy only, no counterexample search.
TrainConfig baseline_config(TrainConfig config);

struct GradNormState {
  double lambda_ce = 1.0;
  double lambda_c = 1.0;
  std::array<double, 2> initial_loss{0.0, 0.0};
  std::array<bool, 2> has_initial{false, false};
};

struct GradNormStep {
  GradNormState state;
  std::array<double, 2> norms{};    // G_i = lambda_i * |grad_shared L_i|
  std::array<double, 2> targets{};  // mean(G) * r_i^alpha
  bool applied = false;             // false when the input was non-finite
};

/// One weight update on sum_i |G_i - target_i| with targets held constant,
/// floor 1e-3 and renormalisation to lambda_ce + lambda_c = 2. Task order is
/// (cross-entropy, constraint); `grad_norms` are unweighted shared-layer norms.
GradNormStep gradnorm_update(const GradNormState& state, std::array<double, 2> losses,
                             std::array<double, 2> grad_norms, double alpha, double lr);

struct EpochRecord {
  std::size_t epoch = 0;
  double pred_acc = 0.0;
  double constraint_acc = 0.0;
  double lambda_ce = 0.0;
  double lambda_c = 0.0;
  double loss_ce = 0.0;
  double loss_c = 0.0;
  double wall_seconds = 0.0;  // not persisted
};

struct MetricsHistory {
  std::vector<EpochRecord> records;
  bool diverged = false;

  /// One JSON object per line with the persisted fields.
  std::string jsonl() const;
  static MetricsHistory parse_jsonl(const std::string& text);
};

struct TrainResult {
  Model model;
  MetricsHistory history;
};

/// Observes the weights after every batch (epoch, batch, state).
using BatchObserver = std::function<void(std::size_t, std::size_t, const GradNormState&)>;

/// The constraint formula the config describes, for a dataset.
Formula build_constraint(const ConstraintConfig& c, const Dataset& train);
Groups constraint_groups(const ConstraintConfig& c, std::size_t classes);

TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset& test_set,
                  const BatchObserver& observer = {});

double prediction_accuracy(const Model& model, const Dataset& data);

/// JSON with keys equal to the TrainConfig field names.
std::string config_to_json(const TrainConfig& config);
TrainConfig config_from_json(const std::string& text);

}  // namespace dlc
