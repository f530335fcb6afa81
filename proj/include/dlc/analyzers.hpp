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
#include <string>
#include <vector>

#include "dlc/formula.hpp"
#include "dlc/logic.hpp"
#include "dlc/parallel.hpp"

namespace dlc {

struct Tautology {
  std::string group;  // e.g. "Law of excluded middle"
  std::string text;   // DSL source
  Formula formula;
};

/// The 22 classical tautologies of the consistency table, in row order.
class TautologySuite {
 public:
  static const TautologySuite& standard();
  explicit TautologySuite(std::vector<Tautology> rows);

  const std::vector<Tautology>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  const Tautology& operator[](std::size_t i) const { return rows_.at(i); }

 private:
  std::vector<Tautology> rows_;
};

enum class IntegrationMethod { kQuadrature, kMonteCarlo };

std::string_view method_name(IntegrationMethod method);
IntegrationMethod parse_method(std::string_view name);

struct ConsistencyOptions {
  IntegrationMethod method = IntegrationMethod::kQuadrature;
  /// Points per axis for quadrature (>= 200), total samples for monte-carlo (>= 100).
  std::size_t n = 200;
  std::uint64_t seed = 0;
};

struct ConsistencyValue {
  double value = 0.0;
  /// Quadrature: |Q(n) - Q(n/2)|. Monte-carlo: sample standard error.
  double error = 0.0;
  std::size_t evaluations = 0;
};

/// Mean truth of `tautology` over the unit cube of its variables (at most 3).
/// Throws SemanticsError for DL2 or non-propositional formulas and
/// DomainError for a budget below the minimum.
ConsistencyValue consistency(const LogicConfig& logic, const Formula& tautology, const ConsistencyOptions& options);

struct ConsistencyReport {
  std::vector<LogicConfig> logics;
  std::vector<std::string> rows;            // tautology texts
  std::vector<std::vector<ConsistencyValue>> cells;  // [row][logic]
  std::vector<double> averages;             // per logic
  ConsistencyOptions options;

  /// Table layout: header "tautology,<logic titles>", one row per tautology,
  /// then "Average Consistency".
  std::string csv(int decimals = 2) const;
  std::string errors_csv() const;
};

/// Cells are independent and computed on up to worker_count() threads.
ConsistencyReport consistency_table(const std::vector<LogicConfig>& logics, const TautologySuite& suite,
                                    const ConsistencyOptions& options);

struct ShadowLiftingResult {
  LogicConfig logic;
  bool holds = false;
  std::size_t samples = 0;
  struct Witness {
    double rho;
    double d1;
    double d2;
  };
  std::vector<Witness> witnesses;  // samples where a partial is not positive
};

/// Partials of x1 & x2 at x1 = x2 = rho for rho at stratified midpoints of (0, 1).
ShadowLiftingResult shadow_lifting_check(const LogicConfig& logic, std::size_t rho_samples = 100);

struct MpMtOptions {
  double spacing = 0.01;
  double tau = 0.05;
  double high = 0.9;  // antecedent confident: x > high
  double low = 0.1;   // antecedent doubtful: x < low; consequent rejected: y < low
  double mid = 0.5;   // consequent bound for the modus ponens regions: y < mid
};

struct DerivativeReport {
  LogicConfig logic;
  MpMtOptions options;
  struct Point {
    double x, y, value, dx, dy;
  };
  std::vector<Point> grid;
  double vanishing_dx = 0.0;    // fraction with |dI/dx| < 1e-9
  double vanishing_dy = 0.0;
  double vanishing_both = 0.0;
  double mp_min_dy_high = 0.0;  // min dI/dy over x > high, y < mid
  double mp_max_dy_low = 0.0;   // max dI/dy over x < low, y < mid
  double mt_max_dx = 0.0;       // max dI/dx over x > high, y < low
  bool mp_following = false;
  bool mt_following = false;
  bool shadow_lifting = false;
  /// DL2 is analysed on (1 - x) * y and reported without a verdict.
  bool descriptive = false;

  std::string text() const;
  std::string records() const;
  std::string grid_csv() const;
};

/// Implication partials on a grid of (0, 1)^2 offset from the kink lines
/// x = y and x + y = 1. Modus ponens: min dI/dy over the confident region is
/// at least tau and exceeds every dI/dy over the doubtful region. Modus
/// tollens: dI/dx <= -tau throughout the rejected-consequent region.
DerivativeReport mp_mt_analysis(const LogicConfig& logic, const MpMtOptions& options = {});

}  // namespace dlc
