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

#include "dlc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "dlc/analyzers.hpp"
#include "dlc/constraints.hpp"
#include "dlc/error.hpp"
#include "dlc/gradcheck.hpp"
#include "dlc/trainer.hpp"

namespace dlc::cli {
namespace {

// Raised for flag combinations CLI11 cannot express; reported like a parse error.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v, const char* fmt = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot write '" + path + "'");
  f << content;
  if (!f) throw FormatError("cannot write '" + path + "'");
}

const std::vector<std::string> kLogicNames{"dl2",         "godel",  "kleene-dienes", "lukasiewicz",
                                           "reichenbach", "sigmoidal-reichenbach", "goguen", "yager"};

CLI::Validator parent_exists() {
  return CLI::Validator(
      [](std::string& path) -> std::string {
        const auto parent = std::filesystem::path(path).parent_path();
        if (!parent.empty() && !std::filesystem::is_directory(parent)) {
          return "parent directory of '" + path + "' does not exist";
        }
        return {};
      },
      "PATH", "ParentExists");
}

struct Shared {
  std::string logic = "godel";
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "text";
};

void add_shared(CLI::App* sub, Shared& s, const std::string& default_format) {
  s.format = default_format;
  sub->add_option("--logic", s.logic, "Logic semantics")->check(CLI::IsMember(kLogicNames));
  sub->add_option("--seed", s.seed, "Random seed");
  sub->add_option("--out", s.out, "Write the report to this file instead of stdout")->check(parent_exists());
  sub->add_option("--format", s.format, "Report format")->check(CLI::IsMember({"csv", "text", "records"}));
}

void emit(const Shared& s, const std::string& content, std::ostream& out) {
  if (s.out.empty()) {
    out << content;
  } else {
    write_file(s.out, content);
  }
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

// ---------------------------------------------------------------------------
// consistency

struct ConsistencyArgs {
  Shared shared;
  std::string logics = "all";
  std::string method = "quadrature";
  std::size_t n = 200;
  int decimals = 2;
};

std::vector<LogicConfig> parse_logic_list(const std::string& text) {
  std::vector<LogicConfig> out;
  if (text == "all") {
    for (LogicKind k : table_logic_kinds()) out.push_back(make_logic(k));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (std::find(kLogicNames.begin(), kLogicNames.end(), item) == kLogicNames.end()) {
      throw UsageError("--logics: unknown logic '" + item + "'");
    }
    out.push_back(make_logic(parse_logic_kind(item)));
  }
  if (out.empty()) throw UsageError("--logics: empty list");
  return out;
}

std::string errors_path(const std::string& out) {
  std::filesystem::path p(out);
  if (p.extension() == ".csv") return (p.parent_path() / (p.stem().string() + ".errors.csv")).string();
  return out + ".errors.csv";
}

int run_consistency(const ConsistencyArgs& a, std::ostream& out) {
  ConsistencyOptions o;
  o.method = parse_method(a.method);
  o.n = a.n;
  o.seed = a.shared.seed;
  const ConsistencyReport r = consistency_table(parse_logic_list(a.logics), TautologySuite::standard(), o);
  std::string content;
  if (a.shared.format == "csv") {
    content = r.csv(a.decimals);
  } else if (a.shared.format == "records") {
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      for (std::size_t j = 0; j < r.logics.size(); ++j) {
        const ConsistencyValue& v = r.cells[i][j];
        content += "row=" + std::to_string(i + 1) + " logic=" + std::string(logic_name(r.logics[j].kind)) +
                   " value=" + num(v.value, "%.17g") + " error=" + num(v.error, "%.17g") +
                   " evaluations=" + std::to_string(v.evaluations) + "\n";
      }
    }
    for (std::size_t j = 0; j < r.logics.size(); ++j) {
      content += "row=average logic=" + std::string(logic_name(r.logics[j].kind)) +
                 " value=" + num(r.averages[j], "%.17g") + "\n";
    }
  } else {
    std::size_t w = std::string("Average Consistency").size();
    for (const std::string& row : r.rows) w = std::max(w, row.size());
    std::vector<std::size_t> cw;
    content = pad("tautology", w + 2);
    for (const LogicConfig& l : r.logics) {
      const std::string t(logic_title(l.kind));
      cw.push_back(std::max<std::size_t>(t.size(), a.decimals + 2) + 2);
      content += pad(t, cw.back());
    }
    while (content.back() == ' ') content.pop_back();
    content += '\n';
    auto line = [&](const std::string& label, auto value_of) {
      std::string s = pad(label, w + 2);
      for (std::size_t j = 0; j < r.logics.size(); ++j) {
        s += pad(num(value_of(j), ("%." + std::to_string(a.decimals) + "f").c_str()), cw[j]);
      }
      while (!s.empty() && s.back() == ' ') s.pop_back();
      return s + '\n';
    };
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      content += line(r.rows[i], [&](std::size_t j) { return r.cells[i][j].value; });
    }
    content += line("Average Consistency", [&](std::size_t j) { return r.averages[j]; });
  }
  emit(a.shared, content, out);
  if (!a.shared.out.empty()) write_file(errors_path(a.shared.out), r.errors_csv());
  return kOk;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  Shared shared;
  std::string mode;
  std::size_t samples = 100;
  double spacing = 0.01;
  double tau = 0.05;
};

int run_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const LogicConfig logic = make_logic(parse_logic_kind(a.shared.logic));
  std::string content;
  if (a.mode == "shadow-lifting") {
    const ShadowLiftingResult r = shadow_lifting_check(logic, a.samples);
    if (a.shared.format == "csv") {
      content = "rho,d1,d2\n";
      for (const auto& w : r.witnesses) content += num(w.rho) + "," + num(w.d1) + "," + num(w.d2) + "\n";
    } else if (a.shared.format == "records") {
      content = "logic=" + std::string(logic_name(logic.kind)) + "\nholds=" + (r.holds ? "1" : "0") +
                "\nsamples=" + std::to_string(r.samples) + "\nwitnesses=" + std::to_string(r.witnesses.size()) + "\n";
      if (!r.witnesses.empty()) {
        const auto& w = r.witnesses.front();
        content += "witness.rho=" + num(w.rho) + "\nwitness.d1=" + num(w.d1) + "\nwitness.d2=" + num(w.d2) + "\n";
      }
    } else {
      content = "logic: " + std::string(logic_title(logic.kind)) + "\nshadow-lifting: " + (r.holds ? "yes" : "no") +
                "\nsamples: " + std::to_string(r.samples) + "\nwitnesses: " + std::to_string(r.witnesses.size()) +
                "\n";
      if (!r.witnesses.empty()) {
        const auto& w = r.witnesses.front();
        content += "first witness: rho=" + num(w.rho) + " d1=" + num(w.d1) + " d2=" + num(w.d2) + "\n";
      }
    }
  } else {
    MpMtOptions o;
    o.spacing = a.spacing;
    o.tau = a.tau;
    if (!(o.spacing > 0.0 && o.spacing <= 0.5)) throw DomainError("--spacing must lie in (0, 0.5]");
    const DerivativeReport r = mp_mt_analysis(logic, o);
    content = a.shared.format == "csv" ? r.grid_csv() : a.shared.format == "records" ? r.records() : r.text();
  }
  emit(a.shared, content, out);
  return kOk;
}

// ---------------------------------------------------------------------------
// gradcheck

struct GradcheckArgs {
  Shared shared;
  std::size_t samples = 200;
};

int run_gradcheck(const GradcheckArgs& a, std::ostream& out) {
  const GradCheckReport r = gradient_check(make_logic(parse_logic_kind(a.shared.logic)), a.samples, a.shared.seed);
  emit(a.shared, a.shared.format == "csv" ? r.csv() : a.shared.format == "records" ? r.records() : r.text(), out);
  return r.pass() ? kOk : kDomainError;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  Shared shared;
  std::string formula;
  std::vector<std::string> assign;
};

int run_eval(const EvalArgs& a, std::ostream& out) {
  const LogicConfig logic = make_logic(parse_logic_kind(a.shared.logic));
  std::map<std::string, double> values;
  for (const std::string& item : a.assign) {
    const auto eq = item.rfind('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--assign expects NAME=VALUE, got '" + item + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--assign: bad value in '" + item + "'");
    }
    values[item.substr(0, eq)] = v;
  }

  Formula f = parse_formula(a.formula);
  if (!logic.is_fuzzy()) f = push_negation(f);
  const Leaves leaves = collect_leaves(f);
  Graph g;
  Bindings bindings;
  std::vector<double> inputs;
  auto bind = [&](const std::string& key) {
    if (bindings.count(key)) return;
    auto it = values.find(key);
    if (it == values.end()) throw UnboundError("no value assigned to '" + key + "'");
    bindings[key] = g.input(key);
    inputs.push_back(it->second);
  };
  for (const Term& t : leaves.terms) bind(leaf_key(t));
  for (const std::string& p : leaves.props) {
    bind(p);
    const double v = values.at(p);
    if (logic.is_fuzzy() && !(v >= 0.0 && v <= 1.0)) {
      throw DomainError("truth value of '" + p + "' must lie in [0, 1]");
    }
  }
  for (const auto& [key, v] : values) {
    if (!bindings.count(key)) throw UnboundError("formula has no leaf '" + key + "'");
  }
  const NodeId truth = lower(f, logic, bindings, g);
  const NodeId loss = ops::constraint_loss(g, logic, truth);
  const double loss_value = g.eval(loss, inputs);
  const double truth_value = g.value(truth);

  std::string content;
  if (a.shared.format == "csv") {
    content = "truth,loss\n" + num(truth_value) + "," + num(loss_value) + "\n";
  } else if (a.shared.format == "records") {
    content = "logic=" + std::string(logic_name(logic.kind)) + "\ntruth=" + num(truth_value) +
              "\nloss=" + num(loss_value) + "\n";
  } else {
    content = num(truth_value) + "\n";
  }
  emit(a.shared, content, out);
  return kOk;
}

// ---------------------------------------------------------------------------
// attack and train share constraint and data flags

struct ConstraintFlags {
  std::string config;
  std::string constraint;
  std::string formula_file;
  double epsilon = 0.1;
  double delta = 0.05;
  std::size_t steps = 20;
  std::size_t restarts = 1;
};

void add_constraint_flags(CLI::App* sub, ConstraintFlags& c) {
  sub->add_option("--config", c.config, "TrainConfig JSON file supplying defaults")->check(CLI::ExistingFile);
  sub->add_option("--constraint", c.constraint, "Constraint kind")
      ->check(CLI::IsMember({"robustness", "groups", "class-similarity"}));
  sub->add_option("--formula-file", c.formula_file, "Custom constraint in the formula language")
      ->check(CLI::ExistingFile);
  sub->add_option("--epsilon", c.epsilon, "Radius of the input ball");
  sub->add_option("--delta", c.delta, "Constraint tolerance");
  sub->add_option("--steps", c.steps, "PGD steps");
  sub->add_option("--restarts", c.restarts, "PGD restarts");
}

TrainConfig resolve_config(CLI::App* sub, const Shared& s, const ConstraintFlags& c) {
  TrainConfig cfg;
  if (!c.config.empty()) cfg = config_from_json(read_file(c.config));
  auto given = [&](const char* name) { return sub->get_option(name)->count() > 0; };
  if (given("--constraint") && given("--formula-file")) {
    throw UsageError("--constraint and --formula-file are mutually exclusive");
  }
  if (given("--logic")) cfg.logic = make_logic(parse_logic_kind(s.logic));
  if (given("--seed")) cfg.seed = s.seed;
  if (given("--constraint")) cfg.constraint.kind = c.constraint;
  if (given("--formula-file")) {
    cfg.constraint.kind = "custom";
    cfg.constraint.formula = read_file(c.formula_file);
  }
  if (given("--epsilon")) cfg.constraint.epsilon = c.epsilon;
  if (given("--delta")) cfg.constraint.delta = c.delta;
  if (given("--steps")) cfg.pgd.steps = c.steps;
  if (given("--restarts")) cfg.pgd.restarts = c.restarts;
  return cfg;
}

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i], "%.6f");
  return s;
}

struct AttackArgs {
  Shared shared;
  ConstraintFlags constraint;
  std::string model;
  long long index = -1;
};

int run_attack(CLI::App* sub, const AttackArgs& a, std::ostream& out) {
  const TrainConfig cfg = resolve_config(sub, a.shared, a.constraint);
  cfg.validate();
  const Model model = Model::load(a.model);
  auto [train_set, test_set] = load_dataset(cfg.data);
  const std::size_t classes = std::max(train_set.classes, test_set.classes);
  if (model.input_size() != test_set.dim() || model.classes() != classes) {
    throw ShapeError("attack: model shape does not match the dataset");
  }
  const Groups groups = constraint_groups(cfg.constraint, classes);
  const Formula formula = build_constraint(cfg.constraint, train_set);
  const double epsilon = ball_radius(formula).value_or(cfg.constraint.epsilon);

  std::string content;
  if (a.index < 0) {
    const double acc = constraint_accuracy(model, test_set, formula, cfg.logic, epsilon, cfg.pgd, cfg.seed, groups);
    const double pred = prediction_accuracy(model, test_set);
    if (a.shared.format == "csv") {
      content = "samples,pred_acc,constraint_acc\n" + std::to_string(test_set.size()) + "," + num(pred) + "," +
                num(acc) + "\n";
    } else if (a.shared.format == "records") {
      content = "samples=" + std::to_string(test_set.size()) + "\npred_acc=" + num(pred) +
                "\nconstraint_acc=" + num(acc) + "\n";
    } else {
      content = "samples: " + std::to_string(test_set.size()) + "\nprediction accuracy: " + num(pred) +
                "\nconstraint accuracy: " + num(acc) + "\n";
    }
  } else {
    const std::size_t i = static_cast<std::size_t>(a.index);
    if (i >= test_set.size()) throw DomainError("attack: --index out of range");
    const auto x0 = test_set.x.row(i);
    Attack attack(formula, cfg.logic, groups, classes, test_set.dim());
    std::mt19937_64 rng(sample_seed(cfg.seed, 0, i));
    const std::vector<double> adv = attack.run(model, x0, epsilon, cfg.pgd, rng);
    const auto at_x0 = constraint_eval(attack.constraint(), model, x0, x0);
    const auto at_adv = constraint_eval(attack.constraint(), model, x0, adv);
    if (a.shared.format == "csv") {
      content = "feature,x0,xadv\n";
      for (std::size_t j = 0; j < adv.size(); ++j) {
        content += std::to_string(j) + "," + num(x0[j]) + "," + num(adv[j]) + "\n";
      }
    } else if (a.shared.format == "records") {
      content = "index=" + std::to_string(i) + "\nlabel=" + std::to_string(test_set.y[i]) +
                "\nloss_x0=" + num(at_x0.loss) + "\nloss_xadv=" + num(at_adv.loss) +
                "\nsatisfied_x0=" + (at_x0.satisfied ? "1" : "0") + "\nsatisfied_xadv=" +
                (at_adv.satisfied ? "1" : "0") + "\n";
    } else {
      content = "sample " + std::to_string(i) + " (label " + std::to_string(test_set.y[i]) + ")\n";
      content += "x0:   " + join(x0) + "\nxadv: " + join(adv) + "\n";
      content += "loss at x0: " + num(at_x0.loss) + (at_x0.satisfied ? " (satisfied)" : " (violated)") + "\n";
      content += "loss at xadv: " + num(at_adv.loss) + (at_adv.satisfied ? " (satisfied)" : " (violated)") + "\n";
    }
  }
  emit(a.shared, content, out);
  return kOk;
}

struct TrainArgs {
  Shared shared;
  ConstraintFlags constraint;
  std::size_t epochs = 30;
  double lambda_c = 1.0;
  bool baseline = false;
  bool no_gradnorm = false;
  std::string metrics;
  std::string checkpoint;
};

int run_train(CLI::App* sub, const TrainArgs& a, std::ostream& out) {
  TrainConfig cfg = resolve_config(sub, a.shared, a.constraint);
  if (sub->get_option("--epochs")->count()) cfg.epochs = a.epochs;
  if (sub->get_option("--lambda-c")->count()) cfg.lambda_c = a.lambda_c;
  if (a.no_gradnorm) cfg.gradnorm.enabled = false;
  if (a.baseline) cfg = baseline_config(cfg);
  cfg.validate();
  auto [train_set, test_set] = load_dataset(cfg.data);
  const TrainResult r = train(cfg, train_set, test_set);

  std::string content;
  const auto& recs = r.history.records;
  if (a.shared.format == "csv") {
    content = "epoch,pred_acc,constraint_acc,lambda_ce,lambda_c,loss_ce,loss_c\n";
    for (const EpochRecord& e : recs) {
      content += std::to_string(e.epoch) + "," + num(e.pred_acc) + "," + num(e.constraint_acc) + "," +
                 num(e.lambda_ce) + "," + num(e.lambda_c) + "," + num(e.loss_ce) + "," + num(e.loss_c) + "\n";
    }
  } else if (a.shared.format == "records") {
    for (const EpochRecord& e : recs) {
      content += "epoch=" + std::to_string(e.epoch) + " pred_acc=" + num(e.pred_acc) +
                 " constraint_acc=" + num(e.constraint_acc) + " lambda_ce=" + num(e.lambda_ce) +
                 " lambda_c=" + num(e.lambda_c) + " loss_ce=" + num(e.loss_ce) + " loss_c=" + num(e.loss_c) + "\n";
    }
  } else {
    content = "epoch  pred_acc  constraint_acc  lambda_ce  lambda_c  loss_ce   loss_c\n";
    for (const EpochRecord& e : recs) {
      content += pad(std::to_string(e.epoch), 7) + pad(num(e.pred_acc, "%.4f"), 10) +
                 pad(num(e.constraint_acc, "%.4f"), 16) + pad(num(e.lambda_ce, "%.4f"), 11) +
                 pad(num(e.lambda_c, "%.4f"), 10) + pad(num(e.loss_ce, "%.5f"), 10) + num(e.loss_c, "%.5f") + "\n";
    }
    if (r.history.diverged) content += "diverged after " + std::to_string(recs.size()) + " epochs\n";
  }
  emit(a.shared, content, out);
  if (!a.metrics.empty()) write_file(a.metrics, r.history.jsonl());
  if (!a.checkpoint.empty()) r.model.save(a.checkpoint);
  if (r.history.diverged) throw DomainError("training diverged (non-finite loss)");
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differentiable logics for constraint learning", "dlc"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  ConsistencyArgs ca;
  auto* consistency = app.add_subcommand("consistency", "Mean truth of the classical tautology suite per logic");
  add_shared(consistency, ca.shared, "csv");
  consistency->add_option("--logics", ca.logics, "Comma-separated fuzzy logics, or all");
  consistency->add_option("--method", ca.method, "Integration method")
      ->check(CLI::IsMember({"quadrature", "monte-carlo"}));
  consistency->add_option("--n", ca.n, "Points per axis (quadrature) or samples (monte-carlo)");
  consistency->add_option("--decimals", ca.decimals, "Decimals in csv and text tables")->check(CLI::Range(0, 17));

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Derivative analysis of conjunction or implication");
  add_shared(analyze, aa.shared, "text");
  analyze->add_option("mode", aa.mode, "shadow-lifting or implication")
      ->required()
      ->check(CLI::IsMember({"shadow-lifting", "implication"}));
  analyze->add_option("--samples", aa.samples, "Number of rho samples (shadow-lifting)");
  analyze->add_option("--spacing", aa.spacing, "Grid spacing (implication)");
  analyze->add_option("--tau", aa.tau, "Gradient threshold (implication)");

  GradcheckArgs ga;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare reverse-mode gradients with finite differences");
  add_shared(gradcheck, ga.shared, "text");
  gradcheck->add_option("--samples", ga.samples, "Interior sample points per operator");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate a formula under a logic");
  add_shared(eval, ea.shared, "text");
  eval->add_option("--formula", ea.formula, "Formula text")->required();
  eval->add_option("--assign", ea.assign, "Leaf value NAME=VALUE (repeatable)");

  AttackArgs ka;
  auto* attack = app.add_subcommand("attack", "Search counterexamples for a trained model");
  add_shared(attack, ka.shared, "text");
  add_constraint_flags(attack, ka.constraint);
  attack->add_option("--model", ka.model, "Model checkpoint")->required()->check(CLI::ExistingFile);
  attack->add_option("--index", ka.index, "Test sample to attack; negative attacks the whole test set");

  TrainArgs ta;
  auto* trainer = app.add_subcommand("train", "Train a classifier with a logical constraint");
  add_shared(trainer, ta.shared, "text");
  add_constraint_flags(trainer, ta.constraint);
  trainer->add_option("--epochs", ta.epochs, "Training epochs")->check(CLI::PositiveNumber);
  trainer->add_option("--lambda-c", ta.lambda_c, "Initial constraint weight");
  trainer->add_flag("--baseline", ta.baseline, "Cross-entropy only (lambda_c = 0, no GradNorm)");
  trainer->add_flag("--no-gradnorm", ta.no_gradnorm, "Keep the loss weights fixed");
  trainer->add_option("--metrics", ta.metrics, "Write the metrics history (JSON lines)")->check(parent_exists());
  trainer->add_option("--checkpoint", ta.checkpoint, "Write the trained model")->check(parent_exists());

  auto usage = [&](const std::string& message) {
    const auto selected = app.get_subcommands();
    err << "error: " << message << "\n\n" << (selected.empty() ? app.help() : selected.back()->help("dlc"));
    return kUsageError;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    return usage(e.what());
  }

  try {
    if (consistency->parsed()) return run_consistency(ca, out);
    if (analyze->parsed()) return run_analyze(aa, out);
    if (gradcheck->parsed()) return run_gradcheck(ga, out);
    if (eval->parsed()) return run_eval(ea, out);
    if (attack->parsed()) return run_attack(attack, ka, out);
    return run_train(trainer, ta, out);
  } catch (const UsageError& e) {
    return usage(e.what());
  } catch (const SyntaxError& e) {
    err << "error: syntax error at " << e.what() << '\n';
    return kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
}

}  // namespace dlc::cli
