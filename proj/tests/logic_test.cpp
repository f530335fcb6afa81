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
#include <random>

#include "dlc/error.hpp"
#include "dlc/logic.hpp"

using namespace dlc;

namespace {

LogicConfig yager(double p) {
  LogicConfig cfg = make_logic(LogicKind::kYager);
  cfg.p = p;
  return cfg;
}

std::vector<LogicConfig> fuzzy_logics() {
  std::vector<LogicConfig> out;
  for (LogicKind kind : table_logic_kinds()) out.push_back(make_logic(kind));
  out.push_back(yager(1.0));
  out.push_back(yager(3.5));
  return out;
}

}  // namespace

TEST_CASE("t-norm table values") {
  CHECK(tnorm(make_logic(LogicKind::kGodel), 0.3, 0.7) == 0.3);
  CHECK(tnorm(make_logic(LogicKind::kLukasiewicz), 0.3, 0.7) == 0.0);
  // 1 - sqrt(0.5), evaluated at 30 digits with mpmath.
  CHECK(tnorm(yager(2.0), 0.5, 0.5) == doctest::Approx(0.292893218813452475599).epsilon(1e-15));
  CHECK(tnorm(make_logic(LogicKind::kReichenbach), 0.4, 0.5) == doctest::Approx(0.2));
  for (const LogicConfig& logic : fuzzy_logics()) {
    for (double y : {0.0, 0.1, 0.37, 0.5, 0.99, 1.0}) {
      CHECK(tnorm(logic, 1.0, y) == doctest::Approx(y).epsilon(1e-15));
    }
  }
}

TEST_CASE("s-norm table values") {
  CHECK(snorm(make_logic(LogicKind::kReichenbach), 0.5, 0.5) == 0.75);
  CHECK(snorm(make_logic(LogicKind::kGodel), 0.2, 0.9) == 0.9);
  // sqrt(1.28) = 1.1313... > 1, so the clamp branch fires.
  CHECK(snorm(yager(2.0), 0.8, 0.8) == 1.0);
  CHECK(snorm(yager(2.0), 0.3, 0.4) == doctest::Approx(0.5));
  CHECK(snorm(make_logic(LogicKind::kLukasiewicz), 0.3, 0.4) == doctest::Approx(0.7));
}

TEST_CASE("implication table values") {
  CHECK(implication(make_logic(LogicKind::kReichenbach), 1.0, 0.0) == 0.0);
  CHECK(implication(make_logic(LogicKind::kGodel), 0.4, 0.6) == 1.0);
  CHECK(implication(make_logic(LogicKind::kGodel), 0.6, 0.4) == 0.4);
  CHECK(implication(make_logic(LogicKind::kGodel), 0.5, 0.5) == 0.5);
  CHECK(implication(make_logic(LogicKind::kKleeneDienes), 0.8, 0.3) == 0.3);
  CHECK(implication(make_logic(LogicKind::kLukasiewicz), 0.8, 0.3) == doctest::Approx(0.5));
  CHECK(implication(make_logic(LogicKind::kGoguen), 0.5, 0.25) == 0.5);
  CHECK(implication(make_logic(LogicKind::kGoguen), 0.25, 0.25) == 1.0);
  CHECK(implication(yager(2.0), 0.0, 0.0) == 1.0);
  CHECK(implication(yager(2.0), 0.5, 0.25) == 0.5);
  const LogicConfig sig = make_logic(LogicKind::kSigmoidalReichenbach);
  CHECK(implication(sig, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(implication(sig, 1.0, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("sigmoidal transform") {
  CHECK(sigmoidal_transform(0.0, 9.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::fabs(sigmoidal_transform(0.0, 9.0)) < 1e-15);
  CHECK(sigmoidal_transform(1.0, 9.0) == doctest::Approx(1.0).epsilon(1e-15));
  for (double s : {0.5, 1.0, 9.0, 25.0}) CHECK(sigmoidal_transform(0.5, s) == doctest::Approx(0.5).epsilon(1e-14));
  // mpmath reference values for s = 9.
  CHECK(sigmoidal_transform(0.25, 9.0) == doctest::Approx(0.0862579444425629805).epsilon(1e-13));
  CHECK(sigmoidal_transform(0.75, 9.0) == doctest::Approx(0.9137420555574370195).epsilon(1e-13));
  for (double s : {1.0, 9.0, 25.0}) {
    double prev = sigmoidal_transform(0.0, s);
    for (int i = 1; i <= 1000; ++i) {
      const double cur = sigmoidal_transform(i / 1000.0, s);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("comparisons") {
  CHECK(dl2_leq(3, 5) == 0.0);
  CHECK(dl2_leq(21, 20) == 1.0);
  CHECK(dl2_leq(21000, 20000) == 1000.0);
  CHECK(dl2_leq(0, 0) == 0.0);
  CHECK(dl2_neq(2, 2, 1) == 1.0);
  CHECK(dl2_neq(2, 3, 1) == 0.0);
  CHECK(dl2_neq(2, 2, 0.5) == 0.5);
  CHECK(fuzzy_leq(3, 5) == 1.0);
  CHECK(fuzzy_leq(21, 20) == doctest::Approx(1.0 - 1.0 / 41.0).epsilon(1e-15));
  CHECK(std::fabs(fuzzy_leq(21000, 20000) - fuzzy_leq(21, 20)) <= 1e-12);
  CHECK(fuzzy_leq(0, 0) == 1.0);
  CHECK(fuzzy_leq(-1, -1) == 1.0);
  CHECK(fuzzy_leq(1, -1) == 0.0);
}

TEST_CASE("constraint loss") {
  CHECK(constraint_loss(make_logic(LogicKind::kDL2), 0.0) == 0.0);
  CHECK(constraint_loss(make_logic(LogicKind::kDL2), 2.5) == 2.5);
  CHECK(constraint_loss(make_logic(LogicKind::kGodel), 1.0) == 0.0);
  CHECK(constraint_loss(make_logic(LogicKind::kGodel), 0.25) == 0.75);
}

TEST_CASE("errors") {
  const LogicConfig dl2 = make_logic(LogicKind::kDL2);
  CHECK_THROWS_AS(tnorm(dl2, 0.1, 0.2), SemanticsError);
  CHECK_THROWS_AS(implication(dl2, 0.1, 0.2), SemanticsError);
  CHECK_THROWS_AS(tnorm(make_logic(LogicKind::kGodel), 1.1, 0.2), DomainError);
  CHECK_THROWS_AS(snorm(make_logic(LogicKind::kGodel), 0.1, -0.01), DomainError);
  CHECK_NOTHROW(tnorm(make_logic(LogicKind::kGodel), 1.0 + 1e-10, 0.2));
  CHECK_THROWS_AS(sigmoidal_transform(0.5, 0.0), DomainError);
  LogicConfig bad = yager(0.5);
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(parse_logic_kind("product"), DomainError);
}

TEST_CASE("logic names round trip") {
  for (LogicKind kind : all_logic_kinds()) CHECK(parse_logic_kind(logic_name(kind)) == kind);
  CHECK(parse_logic_kind("kleene-dienes") == LogicKind::kKleeneDienes);
  CHECK(parse_logic_kind("sigmoidal-reichenbach") == LogicKind::kSigmoidalReichenbach);
}

TEST_CASE("duality and t-norm laws on a grid") {
  for (const LogicConfig& logic : fuzzy_logics()) {
    CAPTURE(logic_name(logic.kind));
    CAPTURE(logic.p);
    for (int i = 0; i <= 100; ++i) {
      for (int j = 0; j <= 100; ++j) {
        const double x = i / 100.0, y = j / 100.0;
        const double t = tnorm(logic, x, y);
        REQUIRE(t >= 0.0);
        REQUIRE(t <= 1.0);
        REQUIRE(t == doctest::Approx(tnorm(logic, y, x)).epsilon(1e-15));
        REQUIRE(std::fabs(snorm(logic, x, y) - (1.0 - tnorm(logic, 1.0 - x, 1.0 - y))) <= 1e-12);
        if (i < 100) REQUIRE(tnorm(logic, (i + 1) / 100.0, y) >= t - 1e-15);
        if (j < 100) REQUIRE(tnorm(logic, x, (j + 1) / 100.0) >= t - 1e-15);
      }
    }
  }
}

TEST_CASE("duality on random samples") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const LogicConfig& logic : fuzzy_logics()) {
    for (int n = 0; n < 2000; ++n) {
      const double x = u(rng), y = u(rng);
      REQUIRE(std::fabs(snorm(logic, x, y) - (1.0 - tnorm(logic, 1.0 - x, 1.0 - y))) <= 1e-12);
    }
  }
}

TEST_CASE("negation laws") {
  CHECK(negation(1.0) == 0.0);
  for (int i = 0; i <= 100; ++i) CHECK(negation(negation(i / 100.0)) >= i / 100.0 - 1e-15);
}

TEST_CASE("implications are classical on the corners") {
  for (const LogicConfig& logic : fuzzy_logics()) {
    CAPTURE(logic_name(logic.kind));
    for (int x = 0; x <= 1; ++x) {
      for (int y = 0; y <= 1; ++y) {
        double expected = (!x || y) ? 1.0 : 0.0;
        // The strict x < y test leaves the Godel implication at y when x = y,
        // so 0 -> 0 evaluates to 0.
        if (logic.kind == LogicKind::kGodel && x == 0 && y == 0) expected = 0.0;
        CHECK(implication(logic, x, y) == doctest::Approx(expected).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("comparison laws") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int n = 0; n < 2000; ++n) {
    const double x = u(rng), y = u(rng);
    CHECK((dl2_leq(x, y) == 0.0) == (x <= y));
    CHECK((fuzzy_leq(x, y) == 1.0) == (x <= y));
    CHECK(fuzzy_leq(x, y) >= 0.0);
    CHECK(fuzzy_leq(x, y) <= 1.0);
    const double ax = std::fabs(x) + 1e-3, ay = std::fabs(y) + 1e-3;
    for (double k : {2.0, 10.0, 1000.0}) {
      CHECK(std::fabs(fuzzy_leq(k * ax, k * ay) - fuzzy_leq(ax, ay)) <= 1e-12);
    }
  }
}
