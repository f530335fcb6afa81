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

// One line per acceptance criterion; exit status 1 when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dlc/analyzers.hpp"
#include "dlc/cli.hpp"
#include "dlc/gradcheck.hpp"
#include "dlc/trainer.hpp"

using namespace dlc;

namespace {

// Printed two-decimal consistency values, rows in suite order, columns
// Godel, Kleene-Dienes, Lukasiewicz, Reichenbach, Goguen, sig. Reichenbach, Yager.
constexpr std::array<std::array<double, 7>, 22> kReference{{
    {0.67, 0.79, 1, 0.92, 1, 0.99, 0.89},
    {0.75, 0.75, 0.96, 0.87, 0.93, 0.97, 0.85},
    {0.79, 0.75, 1, 0.86, 0.90, 0.98, 0.82},
    {0.50, 0.75, 0.75, 0.75, 0.69, 0.88, 0.72},
    {0.83, 0.79, 1, 0.92, 1, 0.98, 0.90},
    {0.67, 0.75, 1, 0.86, 1, 0.96, 0.85},
    {0.75, 0.78, 1, 0.91, 1, 0.98, 0.91},
    {0.88, 0.76, 1, 0.90, 1, 0.99, 0.90},
    {0.75, 0.75, 1, 0.83, 0.83, 0.83, 0.81},
    {0.75, 0.75, 1, 0.83, 0.83, 0.83, 0.81},
    {0.50, 0.75, 1, 0.70, 1, 0.91, 0.69},
    {0.17, 0.67, 1, 0.61, 0.59, 0.93, 0.57},
    {0.51, 0.64, 0.67, 0.67, 0.65, 0.73, 0.64},
    {0.50, 0.75, 0.75, 0.69, 0.50, 0.87, 0.44},
    {0.50, 0.75, 0.75, 0.69, 0.69, 0.87, 0.69},
    {0.33, 0.71, 0.83, 0.66, 0.67, 0.94, 0.49},
    {0.33, 0.75, 1, 0.82, 1, 0.98, 0.57},
    {0.42, 0.72, 0.90, 0.69, 0.89, 0.90, 0.67},
    {0.58, 0.72, 0.90, 0.69, 0.90, 0.90, 0.69},
    {0.67, 0.75, 1, 0.75, 1, 0.93, 0.78},
    {0.33, 0.75, 1, 0.75, 1, 0.93, 0.73},
    {1, 0.83, 1, 0.97, 1, 1, 1},
}};
constexpr std::array<double, 7> kReferenceAverage{0.60, 0.75, 0.93, 0.79, 0.87, 0.92, 0.75};

constexpr double kCellTolerance = 0.015;
constexpr double kAverageTolerance = 0.01;

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

void consistency_criterion() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<LogicConfig> logics;
  for (LogicKind k : table_logic_kinds()) logics.push_back(make_logic(k));
  ConsistencyOptions o;
  o.n = 200;
  const ConsistencyReport r = consistency_table(logics, TautologySuite::standard(), o);
  const double elapsed = seconds_since(start);

  std::size_t within = 0;
  double worst = 0.0;
  std::vector<std::string> misses;
  for (std::size_t i = 0; i < 22; ++i) {
    for (std::size_t j = 0; j < 7; ++j) {
      const double d = std::abs(r.cells[i][j].value - kReference[i][j]);
      worst = std::max(worst, d);
      if (d <= kCellTolerance) {
        ++within;
      } else {
        misses.push_back("row " + std::to_string(i + 1) + " " + std::string(logic_title(logics[j].kind)) + " " +
                         fmt("%.3f", r.cells[i][j].value) + " vs " + fmt("%.2f", kReference[i][j]));
      }
    }
  }
  std::size_t avg_within = 0;
  std::string averages;
  for (std::size_t j = 0; j < 7; ++j) {
    const double d = std::abs(r.averages[j] - kReferenceAverage[j]);
    avg_within += d <= kAverageTolerance;
    averages += (j ? " " : "") + fmt("%.3f", r.averages[j]);
  }
  std::string detail = std::to_string(within) + "/154 cells within 0.015, " + std::to_string(avg_within) +
                       "/7 averages within 0.01 (" + averages + "), max deviation " + fmt("%.3f", worst) + ", " +
                       fmt("%.1f", elapsed) + " s";
  if (!misses.empty()) {
    detail += "; outside tolerance:";
    for (std::size_t k = 0; k < misses.size(); ++k) detail += (k ? ", " : " ") + misses[k];
  }
  report(within == 154 && avg_within == 7 && elapsed < 300.0, "consistency table", detail);
}

void spot_checks() {
  auto value = [](LogicKind k, const char* text, std::size_t n) {
    ConsistencyOptions o;
    o.n = n;
    return consistency(make_logic(k), parse_formula(text), o).value;
  };
  const double godel = value(LogicKind::kGodel, "P | !P", 2000);
  const double reich = value(LogicKind::kReichenbach, "P | !P", 2000);
  const double luk = value(LogicKind::kLukasiewicz, "P | !P", 200);
  const double mem = value(LogicKind::kGodel, "(P -> Q) | (Q -> P)", 200);
  const bool pass = std::abs(godel - 0.75) <= 1e-6 && std::abs(reich - 5.0 / 6.0) <= 1e-6 &&
                    std::abs(luk - 1.0) <= 1e-12 && std::abs(mem - 1.0) <= 1e-12;
  report(pass, "spot analytic checks",
         "Godel P|!P " + fmt("%.9f", godel) + ", Reichenbach P|!P " + fmt("%.9f", reich) + " (5/6 = 0.833333333)" +
             ", Lukasiewicz P|!P " + fmt("%.9f", luk) + ", Godel material excluded middle " + fmt("%.9f", mem));
}

void shadow_lifting_criterion() {
  const std::pair<LogicKind, bool> expected[] = {{LogicKind::kDL2, true},
                                                 {LogicKind::kGodel, false},
                                                 {LogicKind::kLukasiewicz, false},
                                                 {LogicKind::kReichenbach, true},
                                                 {LogicKind::kYager, false}};
  bool pass = true;
  std::string detail;
  for (auto [k, want] : expected) {
    const ShadowLiftingResult r = shadow_lifting_check(make_logic(k), 100);
    pass = pass && r.holds == want;
    detail += std::string(detail.empty() ? "" : ", ") + std::string(logic_title(k)) + " " + (r.holds ? "yes" : "no");
  }
  report(pass, "shadow-lifting verdicts", detail);
}

void implication_criterion() {
  struct Closed {
    LogicKind kind;
    std::function<std::pair<double, double>(double, double)> partials;
  };
  const Closed forms[] = {
      {LogicKind::kKleeneDienes,
       [](double x, double y) { return 1 - x > y ? std::pair{-1.0, 0.0} : std::pair{0.0, 1.0}; }},
      {LogicKind::kLukasiewicz,
       [](double x, double y) { return y < x ? std::pair{-1.0, 1.0} : std::pair{0.0, 0.0}; }},
      {LogicKind::kReichenbach, [](double x, double y) { return std::pair{y - 1.0, x}; }},
      {LogicKind::kGoguen,
       [](double x, double y) { return x <= y ? std::pair{0.0, 0.0} : std::pair{-y / (x * x), 1.0 / x}; }},
  };
  double worst = 0.0;
  std::size_t points = 0;
  for (const Closed& c : forms) {
    Graph g;
    NodeId a = g.input("x");
    NodeId b = g.input("y");
    NodeId root = ops::implication(g, make_logic(c.kind), a, b);
    points = 0;
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 20; ++j) {
        const double x = (i + 0.3) / 10.0, y = (j + 0.55) / 20.0;
        const double in[] = {x, y};
        g.eval(root, in);
        const auto ad = g.backward();
        const auto [dx, dy] = c.partials(x, y);
        worst = std::max({worst, std::abs(ad[0] - dx), std::abs(ad[1] - dy)});
        ++points;
      }
    }
  }
  const std::pair<LogicKind, std::pair<bool, bool>> asserted[] = {
      {LogicKind::kReichenbach, {true, true}},
      {LogicKind::kGodel, {false, false}},
      {LogicKind::kKleeneDienes, {false, false}},
  };
  bool labels = true;
  std::string detail = "max partial deviation " + fmt("%.2e", worst) + " over " + std::to_string(points) +
                       " points x 4 logics; MP/MT";
  for (auto [k, want] : asserted) {
    const DerivativeReport r = mp_mt_analysis(make_logic(k));
    labels = labels && r.mp_following == want.first && r.mt_following == want.second;
    detail += " " + std::string(logic_title(k)) + " " + (r.mp_following ? "yes" : "no") + "/" +
              (r.mt_following ? "yes" : "no");
  }
  detail += "; reported:";
  for (LogicKind k : {LogicKind::kLukasiewicz, LogicKind::kGoguen, LogicKind::kYager}) {
    const DerivativeReport r = mp_mt_analysis(make_logic(k));
    detail += " " + std::string(logic_title(k)) + " " + (r.mp_following ? "yes" : "no") + "/" +
              (r.mt_following ? "yes" : "no");
  }
  report(worst <= 1e-6 && labels, "implication derivatives", detail);
}

void gradient_criterion() {
  bool pass = true;
  double op_worst = 0.0, net_worst = 0.0;
  for (LogicKind k : all_logic_kinds()) {
    const GradCheckReport r = gradient_check(make_logic(k), 200, 0);
    pass = pass && r.pass();
    for (const GradCheckRow& row : r.rows) {
      double& worst = row.name.rfind("network", 0) == 0 ? net_worst : op_worst;
      worst = std::max(worst, row.max_error);
    }
  }
  report(pass, "gradient oracle",
         "8 logics, operator max error " + fmt("%.2e", op_worst) + " (<= 1e-5), network max error " +
             fmt("%.2e", net_worst) + " (<= 1e-4)");
}

void scale_invariance_criterion() {
  const double small = fuzzy_leq(21, 20), large = fuzzy_leq(21000, 20000);
  const double d_small = dl2_leq(21, 20), d_large = dl2_leq(21000, 20000);
  const bool pass = std::abs(small - large) <= 1e-12 && d_small == 1.0 && d_large == 1000.0;
  report(pass, "fuzzy comparison scale invariance",
         "fuzzy_leq(21,20) " + fmt("%.15f", small) + ", fuzzy_leq(21000,20000) " + fmt("%.15f", large) +
             ", DL2 " + fmt("%g", d_small) + " vs " + fmt("%g", d_large));
}

// Weight-sum violations seen by the batch observer during the training runs.
std::size_t weight_sum_violations = 0;
std::size_t observed_batches = 0;

void training_criterion() {
  int wins_dl2 = 0, wins_godel = 0;
  double slowest = 0.0;
  std::string detail;
  const BatchObserver observer = [](std::size_t, std::size_t, const GradNormState& s) {
    ++observed_batches;
    if (s.lambda_ce + s.lambda_c != 2.0) ++weight_sum_violations;
  };
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TrainConfig c;
    c.seed = seed;
    c.data.blobs.seed = seed;
    c.constraint.kind = "robustness";
    c.constraint.epsilon = 0.1;
    c.constraint.delta = 0.05;
    auto [train_set, test_set] = load_dataset(c.data);
    double acc[3];
    const TrainConfig arms[3] = {baseline_config(c), [&] {
                                   TrainConfig d = c;
                                   d.logic = make_logic(LogicKind::kDL2);
                                   return d;
                                 }(),
                                 [&] {
                                   TrainConfig d = c;
                                   d.logic = make_logic(LogicKind::kGodel);
                                   return d;
                                 }()};
    for (int a = 0; a < 3; ++a) {
      const auto start = std::chrono::steady_clock::now();
      const TrainResult r = train(arms[a], train_set, test_set, a == 0 ? BatchObserver{} : observer);
      slowest = std::max(slowest, seconds_since(start));
      acc[a] = r.history.diverged ? 0.0 : r.history.records.back().constraint_acc;
    }
    wins_dl2 += acc[1] >= acc[0] + 0.15;
    wins_godel += acc[2] >= acc[0] + 0.15;
    detail += (seed ? "; " : "") + std::string("seed ") + std::to_string(seed) + " " + fmt("%.3f", acc[0]) + "/" +
              fmt("%.3f", acc[1]) + "/" + fmt("%.3f", acc[2]);
  }
  report(wins_dl2 >= 4 && wins_godel >= 4 && slowest < 120.0, "training property",
         "constraint accuracy baseline/DL2/Godel: " + detail + "; wins DL2 " + std::to_string(wins_dl2) +
             "/5, Godel " + std::to_string(wins_godel) + "/5; slowest arm " + fmt("%.1f", slowest) + " s");
}

void gradnorm_criterion() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  bool equal_targets = true;
  for (int n = 0; n < 1000; ++n) {
    GradNormState s;
    s.lambda_ce = u(rng) * 0.6;
    s.lambda_c = 2.0 - s.lambda_ce;
    s.initial_loss = {u(rng), u(rng)};
    s.has_initial = {true, true};
    const GradNormStep step = gradnorm_update(s, {u(rng), u(rng)}, {u(rng), u(rng)}, 0.0, 0.025);
    equal_targets = equal_targets && step.targets[0] == step.targets[1];
  }
  GradNormState s;
  const GradNormStep first = gradnorm_update(s, {0.8, 0.8}, {1.3, 1.3}, 0.1, 0.025);
  const GradNormStep second = gradnorm_update(first.state, {0.5, 0.5}, {0.7, 0.7}, 0.1, 0.025);
  const bool fixed = second.state.lambda_ce == 1.0 && second.state.lambda_c == 1.0;
  report(weight_sum_violations == 0 && observed_batches > 0 && equal_targets && fixed, "GradNorm invariants",
         std::to_string(observed_batches) + " batches observed, " + std::to_string(weight_sum_violations) +
             " with lambda_ce + lambda_c != 2; alpha = 0 targets equal in 1000 cases: " +
             (equal_targets ? "yes" : "no") + "; equal-task fixed point: " + (fixed ? "yes" : "no"));
}

void pgd_criterion() {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t iterates = 0, outside = 0, lowered = 0;
  const double eps = 0.1;
  for (int n = 0; n < 100; ++n) {
    Model m = Model::create(3, {8, 8}, 3, 1000 + n);
    std::vector<double> x0(3);
    for (double& v : x0) v = u(gen);
    const LogicConfig logic = make_logic(n % 2 ? LogicKind::kDL2 : LogicKind::kGodel);
    const Formula f = robustness_formula(eps, 0.05);
    Attack attack(f, logic, {}, 3, 3);
    std::mt19937_64 rng(n);
    const auto best = attack.run(m, x0, eps, PgdConfig{}, rng, [&](std::span<const double> x) {
      ++iterates;
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (std::abs(x[j] - x0[j]) > eps + 1e-9 || x[j] < 0.0 || x[j] > 1.0) {
          ++outside;
          break;
        }
      }
    });
    const double at_x0 = constraint_eval(f, logic, m, x0, x0).loss;
    const double at_best = constraint_eval(f, logic, m, x0, best).loss;
    lowered += at_best < at_x0;
  }
  report(outside == 0 && lowered == 0, "PGD invariants",
         std::to_string(iterates) + " iterates over 100 cases, " + std::to_string(outside) +
             " outside the ball or box, " + std::to_string(lowered) + " cases with best loss below initial");
}

void determinism_criterion() {
  const auto dir = std::filesystem::temp_directory_path() / "dlc_acceptance";
  std::filesystem::create_directories(dir);
  std::string contents[2];
  bool ok = true;
  for (int run = 0; run < 2; ++run) {
    const auto path = dir / ("metrics" + std::to_string(run) + ".jsonl");
    std::ostringstream out, err;
    ok = ok && cli::run({"train", "--logic", "dl2", "--seed", "3", "--metrics", path.string()}, out, err) == 0;
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    contents[run] = ss.str();
  }
  const bool same = ok && !contents[0].empty() && contents[0] == contents[1];
  report(same, "determinism",
         "two train runs (seed 3) wrote " + std::to_string(contents[0].size()) + " and " +
             std::to_string(contents[1].size()) + " byte metrics files, " + (same ? "identical" : "different"));
}

}  // namespace

int main() {
  consistency_criterion();
  spot_checks();
  shadow_lifting_criterion();
  implication_criterion();
  gradient_criterion();
  scale_invariance_criterion();
  training_criterion();
  gradnorm_criterion();
  pgd_criterion();
  determinism_criterion();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
