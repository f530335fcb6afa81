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

#include "dlc/analyzers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "dlc/error.hpp"

namespace dlc {

namespace {

struct Row {
  const char* group;
  const char* text;
};

constexpr Row kRows[] = {
    {"Axiom schemata", "P -> (Q -> P)"},
    {"Axiom schemata", "(P -> (Q -> R)) -> ((P -> Q) -> (P -> R))"},
    {"Axiom schemata", "(!P -> !Q) -> (Q -> P)"},
    {"Primitive propositions", "(P | P) -> P"},
    {"Primitive propositions", "Q -> (P | Q)"},
    {"Primitive propositions", "(P | Q) -> (Q | P)"},
    {"Primitive propositions", "(P | (Q | R)) -> (Q | (P | R))"},
    {"Primitive propositions", "(Q -> R) -> ((P | Q) -> (P | R))"},
    {"Law of excluded middle", "P | !P"},
    {"Law of contradiction", "!(P & !P)"},
    {"Law of double negation", "P <-> !!P"},
    {"Principles of transposition", "(P <-> Q) <-> (!P <-> !Q)"},
    {"Principles of transposition", "((P & Q) -> R) <-> ((P & !R) -> !Q)"},
    {"Laws of tautology", "P <-> (P & P)"},
    {"Laws of tautology", "P <-> (P | P)"},
    {"Laws of absorption", "(P -> Q) <-> (P <-> (P & Q))"},
    {"Laws of absorption", "Q -> (P <-> (P & Q))"},
    {"Assoc., comm., dist. laws", "(P & (Q | R)) <-> ((P & Q) | (P & R))"},
    {"Assoc., comm., dist. laws", "(P | (Q & R)) <-> ((P | Q) & (P | R))"},
    {"De Morgan's laws", "!(P & Q) <-> (!P | !Q)"},
    {"De Morgan's laws", "!(P | Q) <-> (!P & !Q)"},
    {"Material excluded middle", "(P -> Q) | (Q -> P)"},
};

constexpr std::size_t kMinQuadrature = 200;
constexpr std::size_t kMinMonteCarlo = 100;
constexpr double kRangeSlack = 1e-9;

struct Compiled {
  Graph graph;
  NodeId root;
  std::size_t dims = 0;
};

Compiled compile(const LogicConfig& logic, const Formula& f) {
  if (!logic.is_fuzzy()) throw SemanticsError("consistency: DL2 has no general negation and cannot be integrated");
  Leaves leaves = collect_leaves(f);
  if (!leaves.terms.empty()) throw SemanticsError("consistency: tautology must be built from propositional variables");
  std::vector<std::string> props = leaves.props;
  std::sort(props.begin(), props.end());
  props.erase(std::unique(props.begin(), props.end()), props.end());
  if (props.size() > 3) throw SemanticsError("consistency: at most 3 propositional variables are supported");
  Compiled c;
  Bindings bindings;
  for (const std::string& p : props) bindings[p] = c.graph.input(p);
  c.root = lower(f, logic, bindings, c.graph);
  c.dims = props.size();
  return c;
}

void check_lanes(const double* v, std::size_t m) {
  for (std::size_t k = 0; k < m; ++k) {
    if (!(v[k] >= -kRangeSlack && v[k] <= 1.0 + kRangeSlack)) {
      throw DomainError("consistency: integrand left [0, 1]");
    }
  }
}

// Axis d carries base + d midpoints with an even base. Distinct even/odd
// counts never share a node between two axes, so the rule never samples the
// diagonals P = Q where strict implications jump.
double midpoint_rule(Compiled& c, std::size_t n, std::size_t& evaluations) {
  const std::size_t base = std::max<std::size_t>(2, n - n % 2);
  if (c.dims == 0) {
    double v = 0.0;
    c.graph.eval_batch(c.root, {}, 1, &v);
    check_lanes(&v, 1);
    ++evaluations;
    return v;
  }
  std::vector<std::vector<double>> axes(c.dims);
  for (std::size_t d = 0; d < c.dims; ++d) {
    const std::size_t m = base + d;
    axes[d].resize(m);
    for (std::size_t i = 0; i < m; ++i) axes[d][i] = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
  }
  const std::size_t lanes = axes.back().size();
  std::vector<std::vector<double>> cols(c.dims, std::vector<double>(lanes));
  cols.back() = axes.back();
  std::vector<const double*> ptrs;
  for (auto& col : cols) ptrs.push_back(col.data());
  std::vector<double> out(lanes);
  std::size_t outer = 1;
  for (std::size_t d = 0; d + 1 < c.dims; ++d) outer *= axes[d].size();
  double total = 0.0;
  for (std::size_t o = 0; o < outer; ++o) {
    std::size_t rest = o;
    for (std::size_t d = c.dims - 1; d-- > 0;) {
      std::fill(cols[d].begin(), cols[d].end(), axes[d][rest % axes[d].size()]);
      rest /= axes[d].size();
    }
    c.graph.eval_batch(c.root, ptrs, lanes, out.data());
    check_lanes(out.data(), lanes);
    double row = 0.0;
    for (double v : out) row += v;
    total += row;
  }
  evaluations += outer * lanes;
  return total / static_cast<double>(outer * lanes);
}

ConsistencyValue monte_carlo(Compiled& c, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr std::size_t kLanes = 1024;
  std::vector<std::vector<double>> cols(c.dims, std::vector<double>(kLanes));
  std::vector<const double*> ptrs;
  for (auto& col : cols) ptrs.push_back(col.data());
  std::vector<double> out(kLanes);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t done = 0; done < n;) {
    const std::size_t m = std::min(kLanes, n - done);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t d = 0; d < c.dims; ++d) cols[d][k] = unit(rng);
    }
    c.graph.eval_batch(c.root, ptrs, m, out.data());
    check_lanes(out.data(), m);
    for (std::size_t k = 0; k < m; ++k) {
      sum += out[k];
      sum_sq += out[k] * out[k];
    }
    done += m;
  }
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0));
  return {mean, std::sqrt(var / nn), n};
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

const TautologySuite& TautologySuite::standard() {
  static const TautologySuite suite = [] {
    std::vector<Tautology> rows;
    for (const Row& r : kRows) rows.push_back({r.group, r.text, parse_formula(r.text)});
    return TautologySuite(std::move(rows));
  }();
  return suite;
}

TautologySuite::TautologySuite(std::vector<Tautology> rows) : rows_(std::move(rows)) {
  for (const Tautology& t : rows_) {
    Leaves leaves = collect_leaves(t.formula);
    std::vector<std::string> props = leaves.props;
    std::sort(props.begin(), props.end());
    props.erase(std::unique(props.begin(), props.end()), props.end());
    if (!leaves.terms.empty() || props.size() > 3) {
      throw SemanticsError("tautology suite: '" + t.text + "' must use at most 3 propositional variables");
    }
  }
}

std::string_view method_name(IntegrationMethod method) {
  return method == IntegrationMethod::kQuadrature ? "quadrature" : "monte-carlo";
}

IntegrationMethod parse_method(std::string_view name) {
  if (name == "quadrature") return IntegrationMethod::kQuadrature;
  if (name == "monte-carlo") return IntegrationMethod::kMonteCarlo;
  throw DomainError("unknown integration method '" + std::string(name) + "'");
}

ConsistencyValue consistency(const LogicConfig& logic, const Formula& tautology, const ConsistencyOptions& options) {
  logic.validate();
  Compiled c = compile(logic, tautology);
  if (options.method == IntegrationMethod::kQuadrature) {
    if (options.n < kMinQuadrature) {
      throw DomainError("consistency: quadrature needs at least " + std::to_string(kMinQuadrature) + " points per axis");
    }
    ConsistencyValue r;
    r.value = midpoint_rule(c, options.n, r.evaluations);
    const std::size_t half = options.n / 2;
    r.error = std::fabs(r.value - midpoint_rule(c, half - half % 2, r.evaluations));
    return r;
  }
  if (options.n < kMinMonteCarlo) {
    throw DomainError("consistency: monte-carlo needs at least " + std::to_string(kMinMonteCarlo) + " samples");
  }
  return monte_carlo(c, options.n, options.seed);
}

ConsistencyReport consistency_table(const std::vector<LogicConfig>& logics, const TautologySuite& suite,
                                    const ConsistencyOptions& options) {
  ConsistencyReport report;
  report.logics = logics;
  report.options = options;
  for (const Tautology& t : suite.rows()) report.rows.push_back(t.text);
  const std::size_t rows = suite.size(), cols = logics.size();
  report.cells.assign(rows, std::vector<ConsistencyValue>(cols));

  parallel_for(rows * cols, worker_count(), [&](std::size_t cell, unsigned) {
    const std::size_t r = cell / cols, l = cell % cols;
    ConsistencyOptions o = options;
    o.seed = options.seed + cell;
    report.cells[r][l] = consistency(logics[l], suite[r].formula, o);
  });

  report.averages.assign(cols, 0.0);
  for (std::size_t l = 0; l < cols; ++l) {
    double sum = 0.0;
    for (std::size_t r = 0; r < rows; ++r) sum += report.cells[r][l].value;
    report.averages[l] = rows == 0 ? 0.0 : sum / static_cast<double>(rows);
  }
  return report;
}

std::string ConsistencyReport::csv(int decimals) const {
  std::string out = "tautology";
  for (const LogicConfig& l : logics) out += "," + std::string(logic_title(l.kind));
  out += '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += csv_field(rows[r]);
    for (const ConsistencyValue& v : cells[r]) out += "," + fixed(v.value, decimals);
    out += '\n';
  }
  out += "Average Consistency";
  for (double a : averages) out += "," + fixed(a, decimals);
  return out + '\n';
}

std::string ConsistencyReport::errors_csv() const {
  std::string out = "tautology,method,n";
  for (const LogicConfig& l : logics) out += "," + std::string(logic_title(l.kind));
  out += '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += csv_field(rows[r]) + "," + std::string(method_name(options.method)) + "," + std::to_string(options.n);
    for (const ConsistencyValue& v : cells[r]) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3e", v.error);
      out += std::string(",") + buf;
    }
    out += '\n';
  }
  return out;
}

ShadowLiftingResult shadow_lifting_check(const LogicConfig& logic, std::size_t rho_samples) {
  logic.validate();
  if (rho_samples < 100) throw DomainError("shadow-lifting: at least 100 rho samples are required");
  Graph g;
  NodeId x1 = g.input("x1"), x2 = g.input("x2");
  NodeId root = ops::conjunction(g, logic, x1, x2);
  ShadowLiftingResult result;
  result.logic = logic;
  result.samples = rho_samples;
  for (std::size_t i = 0; i < rho_samples; ++i) {
    const double rho = (static_cast<double>(i) + 0.5) / static_cast<double>(rho_samples);
    const double in[2] = {rho, rho};
    g.eval(root, in);
    std::vector<double> grad = g.backward();
    if (!(grad[0] > 0.0 && grad[1] > 0.0)) result.witnesses.push_back({rho, grad[0], grad[1]});
  }
  result.holds = result.witnesses.empty();
  return result;
}

DerivativeReport mp_mt_analysis(const LogicConfig& logic, const MpMtOptions& options) {
  logic.validate();
  if (!(options.spacing > 0.0 && options.spacing <= 0.1)) throw DomainError("mp/mt: spacing must lie in (0, 0.1]");
  if (!(options.tau >= 0.0)) throw DomainError("mp/mt: tau must be non-negative");
  const auto n = static_cast<std::size_t>(std::llround(1.0 / options.spacing));
  const double h = 1.0 / static_cast<double>(n);

  Graph g;
  NodeId x = g.input("x"), y = g.input("y");
  NodeId root;
  DerivativeReport report;
  report.logic = logic;
  report.options = options;
  if (logic.is_fuzzy()) {
    root = ops::implication(g, logic, x, y);
  } else {
    root = g.mul(g.sub(g.constant(1.0), x), y);
    report.descriptive = true;
  }

  constexpr double kVanish = 1e-9;
  const double inf = std::numeric_limits<double>::infinity();
  double min_high = inf, max_low = -inf, max_mt = -inf;
  std::size_t van_x = 0, van_y = 0, van_both = 0;
  report.grid.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double xv = (static_cast<double>(i) + 0.25) * h;
      const double yv = (static_cast<double>(j) + 0.5) * h;
      const double in[2] = {xv, yv};
      const double value = g.eval(root, in);
      std::vector<double> grad = g.backward();
      report.grid.push_back({xv, yv, value, grad[0], grad[1]});
      const bool zx = std::fabs(grad[0]) < kVanish, zy = std::fabs(grad[1]) < kVanish;
      van_x += zx;
      van_y += zy;
      van_both += zx && zy;
      if (xv > options.high && yv < options.mid) min_high = std::min(min_high, grad[1]);
      if (xv < options.low && yv < options.mid) max_low = std::max(max_low, grad[1]);
      if (xv > options.high && yv < options.low) max_mt = std::max(max_mt, grad[0]);
    }
  }
  if (min_high == inf || max_low == -inf || max_mt == -inf) throw DomainError("mp/mt: grid too coarse for the regions");
  const double total = static_cast<double>(n * n);
  report.vanishing_dx = static_cast<double>(van_x) / total;
  report.vanishing_dy = static_cast<double>(van_y) / total;
  report.vanishing_both = static_cast<double>(van_both) / total;
  report.mp_min_dy_high = min_high;
  report.mp_max_dy_low = max_low;
  report.mt_max_dx = max_mt;
  report.mp_following = min_high >= options.tau && max_low < min_high;
  report.mt_following = max_mt <= -options.tau;
  report.shadow_lifting = shadow_lifting_check(logic).holds;
  return report;
}

std::string DerivativeReport::text() const {
  std::ostringstream os;
  const auto mark = [this](bool b) { return descriptive ? std::string("n/a") : std::string(b ? "yes" : "no"); };
  os << "logic: " << logic_title(logic.kind) << '\n';
  os << "grid: " << static_cast<std::size_t>(std::sqrt(static_cast<double>(grid.size()))) << "x"
     << static_cast<std::size_t>(std::sqrt(static_cast<double>(grid.size()))) << " spacing " << options.spacing
     << '\n';
  os << "vanishing dI/dx: " << fixed(vanishing_dx, 4) << '\n';
  os << "vanishing dI/dy: " << fixed(vanishing_dy, 4) << '\n';
  os << "vanishing both: " << fixed(vanishing_both, 4) << '\n';
  os << "min dI/dy (x > " << options.high << ", y < " << options.mid << "): " << fixed(mp_min_dy_high, 6) << '\n';
  os << "max dI/dy (x < " << options.low << ", y < " << options.mid << "): " << fixed(mp_max_dy_low, 6) << '\n';
  os << "max dI/dx (x > " << options.high << ", y < " << options.low << "): " << fixed(mt_max_dx, 6) << '\n';
  os << "modus ponens: " << mark(mp_following) << '\n';
  os << "modus tollens: " << mark(mt_following) << '\n';
  os << "shadow-lifting: " << (shadow_lifting ? "yes" : "no") << '\n';
  return os.str();
}

std::string DerivativeReport::records() const {
  std::ostringstream os;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "logic=" << logic_name(logic.kind) << '\n';
  os << "spacing=" << num(options.spacing) << '\n';
  os << "tau=" << num(options.tau) << '\n';
  os << "points=" << grid.size() << '\n';
  os << "vanishing_dx=" << num(vanishing_dx) << '\n';
  os << "vanishing_dy=" << num(vanishing_dy) << '\n';
  os << "vanishing_both=" << num(vanishing_both) << '\n';
  os << "mp_min_dy_high=" << num(mp_min_dy_high) << '\n';
  os << "mp_max_dy_low=" << num(mp_max_dy_low) << '\n';
  os << "mt_max_dx=" << num(mt_max_dx) << '\n';
  os << "mp_following=" << mp_following << '\n';
  os << "mt_following=" << mt_following << '\n';
  os << "shadow_lifting=" << shadow_lifting << '\n';
  os << "descriptive=" << descriptive << '\n';
  return os.str();
}

std::string DerivativeReport::grid_csv() const {
  std::string out = "x,y,value,dx,dy\n";
  char buf[160];
  for (const Point& p : grid) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.x, p.y, p.value, p.dx, p.dy);
    out += buf;
  }
  return out;
}

}  // namespace dlc
