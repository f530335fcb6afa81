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

#include "dlc/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "dlc/constraints.hpp"
#include "dlc/graph.hpp"

namespace dlc {
namespace {

constexpr double kStep = 1e-6;
constexpr double kOperatorTolerance = 1e-5;
constexpr double kNetworkTolerance = 1e-4;

using Builder = std::function<NodeId(Graph&, NodeId, NodeId)>;

GradCheckRow check_operator(const std::string& name, const Builder& build,
                            const std::vector<std::pair<double, double>>& points) {
  Graph g;
  NodeId a = g.input("x");
  NodeId b = g.input("y");
  NodeId root = build(g, a, b);
  GradCheckRow row{name, points.size(), 0.0, kOperatorTolerance};
  for (auto [x, y] : points) {
    const double in[] = {x, y};
    g.eval(root, in);
    const auto ad = g.backward();
    const auto fd = finite_diff(g, root, in, kStep);
    for (int i = 0; i < 2; ++i) {
      row.max_error = std::max(row.max_error, std::abs(ad[i] - fd[i]) / std::max(1.0, std::abs(fd[i])));
    }
  }
  return row;
}

std::vector<double> uniform_point(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(dim);
  for (double& v : x) v = u(rng);
  return x;
}

GradCheckRow check_network(const std::string& name, const Formula& f, const LogicConfig& logic,
                           const Groups& groups, std::uint64_t seed) {
  const std::size_t dim = 3, classes = 4;
  Model m = Model::create(dim, {8}, classes, seed);
  std::mt19937_64 rng(seed);
  const auto x0 = uniform_point(rng, dim);
  const auto xadv = uniform_point(rng, dim);
  CompiledConstraint c(f, logic, groups, classes, dim);
  Gradients g = m.zero_gradients();
  constraint_eval(c, m, x0, xadv, &g);
  std::uniform_int_distribution<std::size_t> pick(0, m.parameter_count() - 1);
  GradCheckRow row{name, 5, 0.0, kNetworkTolerance};
  for (std::size_t n = 0; n < row.samples; ++n) {
    const std::size_t i = pick(rng);
    const double theta = m.parameter(i);
    m.set_parameter(i, theta + kStep);
    const double up = constraint_eval(c, m, x0, xadv).loss;
    m.set_parameter(i, theta - kStep);
    const double down = constraint_eval(c, m, x0, xadv).loss;
    m.set_parameter(i, theta);
    const double fd = (up - down) / (2 * kStep);
    row.max_error = std::max(row.max_error, std::abs(Model::gradient(g, i) - fd) / std::max(std::abs(fd), 1e-3));
  }
  return row;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

double kink_distance(double x, double y) {
  double d = std::min({std::abs(x - y), std::abs(x + y - 1.0), x, 1.0 - x, y, 1.0 - y});
  for (double p : {2.0, 3.0}) {
    d = std::min(d, std::abs(std::pow(std::pow(1 - x, p) + std::pow(1 - y, p), 1 / p) - 1.0));
    d = std::min(d, std::abs(std::pow(std::pow(x, p) + std::pow(y, p), 1 / p) - 1.0));
  }
  return d;
}

GradCheckReport gradient_check(const LogicConfig& logic, std::size_t samples, std::uint64_t seed) {
  logic.validate();
  GradCheckReport report;
  report.logic = logic;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> wide(-5.0, 5.0);
  std::vector<std::pair<double, double>> interior, line;
  while (interior.size() < samples) {
    const double x = unit(rng), y = unit(rng);
    if (kink_distance(x, y) >= 1e-3) interior.emplace_back(x, y);
  }
  while (line.size() < samples) {
    const double x = wide(rng), y = wide(rng);
    if (std::min({std::abs(x - y), std::abs(x), std::abs(y)}) >= 1e-3) line.emplace_back(x, y);
  }

  auto& rows = report.rows;
  if (logic.is_fuzzy()) {
    rows.push_back(check_operator(
        "tnorm", [&](Graph& g, NodeId a, NodeId b) { return ops::tnorm(g, logic, a, b); }, interior));
    rows.push_back(check_operator(
        "snorm", [&](Graph& g, NodeId a, NodeId b) { return ops::snorm(g, logic, a, b); }, interior));
    rows.push_back(check_operator(
        "implication", [&](Graph& g, NodeId a, NodeId b) { return ops::implication(g, logic, a, b); }, interior));
    rows.push_back(check_operator(
        "negation", [](Graph& g, NodeId a, NodeId) { return ops::negation(g, a); }, interior));
    rows.push_back(check_operator(
        "leq", [](Graph& g, NodeId a, NodeId b) { return ops::fuzzy_leq(g, a, b); }, line));
  } else {
    rows.push_back(check_operator(
        "conjunction", [&](Graph& g, NodeId a, NodeId b) { return ops::conjunction(g, logic, a, b); }, line));
    rows.push_back(check_operator(
        "disjunction", [&](Graph& g, NodeId a, NodeId b) { return ops::disjunction(g, logic, a, b); }, line));
    rows.push_back(check_operator(
        "leq", [](Graph& g, NodeId a, NodeId b) { return ops::dl2_leq(g, a, b); }, line));
    rows.push_back(check_operator(
        "neq", [&](Graph& g, NodeId a, NodeId b) { return ops::dl2_neq(g, a, b, logic.xi); }, line));
  }

  const Groups groups = default_groups(4);
  const std::vector<Triple> triples{{0, 1, 3}, {2, 3, 0}};
  rows.push_back(check_network("network robustness", robustness_formula(0.1, 0.01), logic, {}, seed + 1));
  rows.push_back(check_network("network groups", groups_formula(0.1, 0.2, groups), logic, groups, seed + 2));
  rows.push_back(
      check_network("network class-similarity", class_similarity_formula(0.1, triples, 4), logic, {}, seed + 3));
  return report;
}

bool GradCheckReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const GradCheckRow& r) { return r.pass(); });
}

double GradCheckReport::max_error() const {
  double m = 0.0;
  for (const GradCheckRow& r : rows) m = std::max(m, r.max_error);
  return m;
}

std::string GradCheckReport::text() const {
  std::ostringstream os;
  os << "logic: " << logic_title(logic.kind) << '\n';
  for (const GradCheckRow& r : rows) {
    os << r.name << ": max error " << num(r.max_error) << " over " << r.samples << " samples (tolerance "
       << num(r.tolerance) << ") " << (r.pass() ? "ok" : "FAIL") << '\n';
  }
  os << "max error: " << num(max_error()) << '\n';
  os << (pass() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

std::string GradCheckReport::csv() const {
  std::string out = "check,samples,max_error,tolerance,pass\n";
  for (const GradCheckRow& r : rows) {
    out += r.name + "," + std::to_string(r.samples) + "," + num(r.max_error) + "," + num(r.tolerance) + "," +
           (r.pass() ? "1" : "0") + "\n";
  }
  return out;
}

std::string GradCheckReport::records() const {
  std::string out = "logic=" + std::string(logic_name(logic.kind)) + "\n";
  for (const GradCheckRow& r : rows) {
    std::string key = r.name;
    std::replace(key.begin(), key.end(), ' ', '_');
    out += key + ".max_error=" + num(r.max_error) + "\n";
    out += key + ".pass=" + (r.pass() ? "1" : "0") + "\n";
  }
  out += "max_error=" + num(max_error()) + "\n";
  out += std::string("pass=") + (pass() ? "1" : "0") + "\n";
  return out;
}

}  // namespace dlc
