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

#include "dlc/error.hpp"
#include "dlc/gradcheck.hpp"

using namespace dlc;

TEST_CASE("every logic passes the gradient check") {
  for (LogicKind k : all_logic_kinds()) {
    GradCheckReport r = gradient_check(make_logic(k), 200, 3);
    CAPTURE(r.text());
    CHECK(r.pass());
    CHECK(r.rows.size() == (k == LogicKind::kDL2 ? 7u : 8u));
    for (const GradCheckRow& row : r.rows) CHECK(row.samples > 0);
  }
  LogicConfig y3 = make_logic(LogicKind::kYager);
  y3.p = 3.0;
  CHECK(gradient_check(y3).pass());
}

TEST_CASE("gradient check output formats") {
  GradCheckReport r = gradient_check(make_logic(LogicKind::kReichenbach), 50, 1);
  CHECK(r.max_error() <= 1e-5);
  CHECK(r.csv().rfind("check,samples,max_error,tolerance,pass\n", 0) == 0);
  CHECK(r.records().find("network_robustness.pass=1\n") != std::string::npos);
  CHECK(r.text().find("PASS") != std::string::npos);
}

TEST_CASE("gradient check rejects an invalid logic") {
  LogicConfig bad = make_logic(LogicKind::kYager);
  bad.p = 0.5;
  CHECK_THROWS_AS(gradient_check(bad), DomainError);
}

TEST_CASE("kink distance") {
  CHECK(kink_distance(0.3, 0.3) == 0.0);
  CHECK(kink_distance(0.3, 0.7) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(kink_distance(0.0, 0.4) == 0.0);
  CHECK(kink_distance(0.2, 0.45) > 0.0);
}
