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
#include <span>
#include <string>
#include <string_view>

#include "dlc/graph.hpp"

namespace dlc {

enum class LogicKind {
  kDL2,
  kGodel,
  kKleeneDienes,
  kLukasiewicz,
  kReichenbach,
  kSigmoidalReichenbach,
  kGoguen,
  kYager,
};

/// Selects the semantics a formula is lowered under.
///
/// DL2 maps into [0, inf) with 0 = absolute truth; every other kind is a
/// symmetric fuzzy configuration on [0, 1] with 1 = absolute truth and the
/// standard strong negation 1 - x.
struct LogicConfig {
  LogicKind kind = LogicKind::kGodel;
  double xi = 1.0;  // DL2 penalty for a violated !=
  double s = 9.0;   // steepness of the sigmoidal implication
  double p = 2.0;   // Yager exponent

  bool is_fuzzy() const { return kind != LogicKind::kDL2; }
  /// Throws DomainError unless xi > 0, s > 0 and p >= 1.
  void validate() const;
};

/// CLI/config spelling, e.g. "kleene-dienes".
std::string_view logic_name(LogicKind kind);
/// Display name used in tables, e.g. "Kleene-Dienes".
std::string_view logic_title(LogicKind kind);
LogicKind parse_logic_kind(std::string_view name);

/// All eight kinds, DL2 first.
std::span<const LogicKind> all_logic_kinds();
/// The seven fuzzy kinds in consistency-table column order.
std::span<const LogicKind> table_logic_kinds();

inline LogicConfig make_logic(LogicKind kind) {
  LogicConfig cfg;
  cfg.kind = kind;
  return cfg;
}

// Scalar operators. Fuzzy operators require inputs in [0, 1] (1e-9 slack) and
// throw DomainError otherwise; they throw SemanticsError for DL2.

double tnorm(const LogicConfig& logic, double x, double y);
double snorm(const LogicConfig& logic, double x, double y);
double negation(double x);
double implication(const LogicConfig& logic, double x, double y);
double sigmoidal_transform(double inner, double s);

double dl2_leq(double x, double y);
double dl2_neq(double x, double y, double xi);
/// 1 - max(x - y, 0) / (|x| + |y|); exactly 1 whenever x <= y, including 0/0.
double fuzzy_leq(double x, double y);

/// DL2 truth is already a loss; fuzzy truth t becomes 1 - t.
double constraint_loss(const LogicConfig& logic, double truth);

// Graph builders mirroring the scalar operators above. They emit the same
// arithmetic, so forward values agree with the scalar versions.
namespace ops {

NodeId tnorm(Graph& g, const LogicConfig& logic, NodeId x, NodeId y);
NodeId snorm(Graph& g, const LogicConfig& logic, NodeId x, NodeId y);
NodeId negation(Graph& g, NodeId x);
NodeId implication(Graph& g, const LogicConfig& logic, NodeId x, NodeId y);
NodeId sigmoidal_transform(Graph& g, NodeId inner, double s);

NodeId dl2_leq(Graph& g, NodeId x, NodeId y);
NodeId dl2_neq(Graph& g, NodeId x, NodeId y, double xi);
NodeId fuzzy_leq(Graph& g, NodeId x, NodeId y);

/// DL2: x + y; fuzzy: t-norm.
NodeId conjunction(Graph& g, const LogicConfig& logic, NodeId x, NodeId y);
/// DL2: x * y; fuzzy: s-norm.
NodeId disjunction(Graph& g, const LogicConfig& logic, NodeId x, NodeId y);

NodeId constraint_loss(Graph& g, const LogicConfig& logic, NodeId truth);

}  // namespace ops

}  // namespace dlc
