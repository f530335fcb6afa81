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

#include "dlc/logic.hpp"

namespace dlc {

struct GradCheckRow {
  std::string name;      // e.g. "tnorm", "network robustness"
  std::size_t samples = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_error <= tolerance; }
};

struct GradCheckReport {
  LogicConfig logic;
  std::vector<GradCheckRow> rows;

  bool pass() const;
  double max_error() const;
  std::string text() const;
  std::string csv() const;
  std::string records() const;
};

/// Smallest distance from (x, y) to a line where some logic operator is not
/// differentiable (x = y, x + y = 1, the box faces and the Yager level sets
/// for p in {2, 3}).
double kink_distance(double x, double y);

/// Reverse-mode gradients against central differences. Operators are checked
/// at `samples` interior points at least 1e-3 away from every kink, with error
/// |ad - fd| / max(1, |fd|) and tolerance 1e-5. The lowered robustness, groups
/// and class-similarity losses are checked through a seeded two-layer model
/// on five random parameters each, with error |ad - fd| / max(|fd|, 1e-3) and
/// tolerance 1e-4.
GradCheckReport gradient_check(const LogicConfig& logic, std::size_t samples = 200, std::uint64_t seed = 0);

}  // namespace dlc
