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

#include "dlc/logic.hpp"

#include <algorithm>
#include <cmath>

#include "dlc/error.hpp"

namespace dlc {
namespace {

constexpr double kDomainSlack = 1e-9;

constexpr std::array<LogicKind, 8> kAllKinds = {
    LogicKind::kDL2,         LogicKind::kGodel,
    LogicKind::kKleeneDienes, LogicKind::kLukasiewicz,
    LogicKind::kReichenbach, LogicKind::kSigmoidalReichenbach,
    LogicKind::kGoguen,      LogicKind::kYager,
};

constexpr std::array<LogicKind, 7> kTableKinds = {
    LogicKind::kGodel,  LogicKind::kKleeneDienes,          LogicKind::kLukasiewicz, LogicKind::kReichenbach,
    LogicKind::kGoguen, LogicKind::kSigmoidalReichenbach, LogicKind::kYager,
};

void require_fuzzy(const LogicConfig& logic, const char* op) {
  if (!logic.is_fuzzy()) throw SemanticsError(std::string(op) + " is not defined for DL2");
}

void require_unit(double v, const char* op) {
  if (!(v >= -kDomainSlack && v <= 1.0 + kDomainSlack)) {
    throw DomainError(std::string(op) + ": argument " + std::to_string(v) + " outside [0, 1]");
  }
}

void require_unit2(const LogicConfig& logic, double x, double y, const char* op) {
  require_fuzzy(logic, op);
  require_unit(x, op);
  require_unit(y, op);
}

enum class Family { kMinMax, kLukasiewicz, kProduct, kYager };

Family family(LogicKind kind) {
  switch (kind) {
    case LogicKind::kGodel:
    case LogicKind::kKleeneDienes: return Family::kMinMax;
    case LogicKind::kLukasiewicz: return Family::kLukasiewicz;
    case LogicKind::kReichenbach:
    case LogicKind::kSigmoidalReichenbach:
    case LogicKind::kGoguen: return Family::kProduct;
    case LogicKind::kYager: return Family::kYager;
    case LogicKind::kDL2: break;
  }
  throw SemanticsError("no t-norm family for DL2");
}

}  // namespace

void LogicConfig::validate() const {
  if (!(xi > 0.0)) throw DomainError("logic: xi must be positive");
  if (!(s > 0.0)) throw DomainError("logic: s must be positive");
  if (!(p >= 1.0)) throw DomainError("logic: p must be >= 1");
}

std::string_view logic_name(LogicKind kind) {
  switch (kind) {
    case LogicKind::kDL2: return "dl2";
    case LogicKind::kGodel: return "godel";
    case LogicKind::kKleeneDienes: return "kleene-dienes";
    case LogicKind::kLukasiewicz: return "lukasiewicz";
    case LogicKind::kReichenbach: return "reichenbach";
    case LogicKind::kSigmoidalReichenbach: return "sigmoidal-reichenbach";
    case LogicKind::kGoguen: return "goguen";
    case LogicKind::kYager: return "yager";
  }
  return "?";
}

std::string_view logic_title(LogicKind kind) {
  switch (kind) {
    case LogicKind::kDL2: return "DL2";
    case LogicKind::kGodel: return "Godel";
    case LogicKind::kKleeneDienes: return "Kleene-Dienes";
    case LogicKind::kLukasiewicz: return "Lukasiewicz";
    case LogicKind::kReichenbach: return "Reichenbach";
    case LogicKind::kSigmoidalReichenbach: return "sig. Reichenbach";
    case LogicKind::kGoguen: return "Goguen";
    case LogicKind::kYager: return "Yager";
  }
  return "?";
}

LogicKind parse_logic_kind(std::string_view name) {
  for (LogicKind kind : kAllKinds) {
    if (logic_name(kind) == name) return kind;
  }
  throw DomainError("unknown logic '" + std::string(name) + "'");
}

std::span<const LogicKind> all_logic_kinds() { return kAllKinds; }
std::span<const LogicKind> table_logic_kinds() { return kTableKinds; }

double tnorm(const LogicConfig& logic, double x, double y) {
  require_unit2(logic, x, y, "tnorm");
  switch (family(logic.kind)) {
    case Family::kMinMax: return std::min(x, y);
    case Family::kLukasiewicz: return std::max(0.0, x + y - 1.0);
    case Family::kProduct: return x * y;
    case Family::kYager:
      return std::max(1.0 - std::pow(std::pow(1.0 - x, logic.p) + std::pow(1.0 - y, logic.p), 1.0 / logic.p), 0.0);
  }
  return 0.0;
}

double snorm(const LogicConfig& logic, double x, double y) {
  require_unit2(logic, x, y, "snorm");
  switch (family(logic.kind)) {
    case Family::kMinMax: return std::max(x, y);
    case Family::kLukasiewicz: return std::min(1.0, x + y);
    case Family::kProduct: return x + y - x * y;
    case Family::kYager: return std::min(std::pow(std::pow(x, logic.p) + std::pow(y, logic.p), 1.0 / logic.p), 1.0);
  }
  return 0.0;
}

double negation(double x) {
  require_unit(x, "negation");
  return 1.0 - x;
}

double implication(const LogicConfig& logic, double x, double y) {
  require_unit2(logic, x, y, "implication");
  switch (logic.kind) {
    case LogicKind::kGodel: return x < y ? 1.0 : y;
    case LogicKind::kKleeneDienes: return std::max(1.0 - x, y);
    case LogicKind::kLukasiewicz: return std::min(1.0 - x + y, 1.0);
    case LogicKind::kReichenbach: return 1.0 - x + x * y;
    case LogicKind::kSigmoidalReichenbach: return sigmoidal_transform(1.0 - x + x * y, logic.s);
    case LogicKind::kGoguen: return x <= y ? 1.0 : y / x;
    case LogicKind::kYager: return (x == 0.0 && y == 0.0) ? 1.0 : std::pow(y, x);
    case LogicKind::kDL2: break;
  }
  throw SemanticsError("implication is not defined for DL2");
}

double sigmoidal_transform(double inner, double s) {
  require_unit(inner, "sigmoidal_transform");
  if (!(s > 0.0)) throw DomainError("sigmoidal_transform: s must be positive");
  const double e = std::exp(s / 2.0);
  const double sig = 1.0 / (1.0 + std::exp(-(s * inner - s / 2.0)));
  return ((1.0 + e) * sig - 1.0) / (e - 1.0);
}

double dl2_leq(double x, double y) { return std::max(x - y, 0.0); }

double dl2_neq(double x, double y, double xi) { return x == y ? xi : 0.0; }

double fuzzy_leq(double x, double y) {
  const double excess = std::max(x - y, 0.0);
  if (excess == 0.0) return 1.0;
  return 1.0 - excess / (std::fabs(x) + std::fabs(y));
}

double constraint_loss(const LogicConfig& logic, double truth) {
  return logic.is_fuzzy() ? 1.0 - truth : truth;
}

namespace ops {

NodeId tnorm(Graph& g, const LogicConfig& logic, NodeId x, NodeId y) {
  require_fuzzy(logic, "tnorm");
  switch (family(logic.kind)) {
    case Family::kMinMax: return g.min(x, y);
    case Family::kLukasiewicz: {
      NodeId sum = g.sub(g.add(x, y), g.constant(1.0));
      return g.max(g.constant(0.0), sum);
    }
    case Family::kProduct: return g.mul(x, y);
    case Family::kYager: {
      NodeId one = g.constant(1.0);
      NodeId p = g.constant(logic.p);
      NodeId sum = g.add(g.pow(g.sub(one, x), p), g.pow(g.sub(one, y), p));
      NodeId root = g.pow(sum, g.constant(1.0 / logic.p));
      return g.max(g.sub(one, root), g.constant(0.0));
    }
  }
  return x;
}

NodeId snorm(Graph& g, const LogicConfig& logic, NodeId x, NodeId y) {
  require_fuzzy(logic, "snorm");
  switch (family(logic.kind)) {
    case Family::kMinMax: return g.max(x, y);
    case Family::kLukasiewicz: return g.min(g.constant(1.0), g.add(x, y));
    case Family::kProduct: return g.sub(g.add(x, y), g.mul(x, y));
    case Family::kYager: {
      NodeId p = g.constant(logic.p);
      NodeId sum = g.add(g.pow(x, p), g.pow(y, p));
      return g.min(g.pow(sum, g.constant(1.0 / logic.p)), g.constant(1.0));
    }
  }
  return x;
}

NodeId negation(Graph& g, NodeId x) { return g.sub(g.constant(1.0), x); }

NodeId implication(Graph& g, const LogicConfig& logic, NodeId x, NodeId y) {
  require_fuzzy(logic, "implication");
  NodeId one = g.constant(1.0);
  switch (logic.kind) {
    case LogicKind::kGodel: return g.select_lt(x, y, one, y);
    case LogicKind::kKleeneDienes: return g.max(g.sub(one, x), y);
    case LogicKind::kLukasiewicz: return g.min(g.add(g.sub(one, x), y), one);
    case LogicKind::kReichenbach: return g.add(g.sub(one, x), g.mul(x, y));
    case LogicKind::kSigmoidalReichenbach:
      return sigmoidal_transform(g, g.add(g.sub(one, x), g.mul(x, y)), logic.s);
    case LogicKind::kGoguen: return g.select_le(x, y, one, g.div(y, x));
    case LogicKind::kYager: {
      // 1 when x = y = 0, i.e. when x + y <= 0 on the unit square.
      NodeId zero = g.constant(0.0);
      return g.select_le(g.add(x, y), zero, one, g.pow(y, x));
    }
    case LogicKind::kDL2: break;
  }
  throw SemanticsError("implication is not defined for DL2");
}

NodeId sigmoidal_transform(Graph& g, NodeId inner, double s) {
  const double e = std::exp(s / 2.0);
  NodeId arg = g.sub(g.mul(g.constant(s), inner), g.constant(s / 2.0));
  NodeId num = g.sub(g.mul(g.constant(1.0 + e), g.sigmoid(arg)), g.constant(1.0));
  return g.div(num, g.constant(e - 1.0));
}

NodeId dl2_leq(Graph& g, NodeId x, NodeId y) { return g.max(g.sub(x, y), g.constant(0.0)); }

NodeId dl2_neq(Graph& g, NodeId x, NodeId y, double xi) {
  return g.mul(g.constant(xi), g.indicator_eq(x, y));
}

NodeId fuzzy_leq(Graph& g, NodeId x, NodeId y) {
  NodeId one = g.constant(1.0);
  NodeId excess = g.max(g.sub(x, y), g.constant(0.0));
  NodeId violated = g.sub(one, g.div(excess, g.add(g.abs(x), g.abs(y))));
  return g.select_le(x, y, one, violated);
}

NodeId conjunction(Graph& g, const LogicConfig& logic, NodeId x, NodeId y) {
  return logic.is_fuzzy() ? tnorm(g, logic, x, y) : g.add(x, y);
}

NodeId disjunction(Graph& g, const LogicConfig& logic, NodeId x, NodeId y) {
  return logic.is_fuzzy() ? snorm(g, logic, x, y) : g.mul(x, y);
}

NodeId constraint_loss(Graph& g, const LogicConfig& logic, NodeId truth) {
  return logic.is_fuzzy() ? g.sub(g.constant(1.0), truth) : truth;
}

}  // namespace ops
}  // namespace dlc
