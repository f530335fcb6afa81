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

#include "dlc/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dlc/error.hpp"
#include "dlc/parallel.hpp"

namespace dlc {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kLambdaFloor = 1e-3;

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError("config: " + what);
}

}  // namespace

void TrainConfig::validate() const {
  logic.validate();
  require(epochs > 0, "epochs must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate must be positive");
  require(constraint.epsilon > 0.0, "constraint.epsilon must be positive");
  require(constraint.delta > 0.0 && constraint.delta < 1.0, "constraint.delta must lie in (0, 1)");
  require(pgd.step_size >= 0.0, "pgd.step_size must be non-negative");
  require(gradnorm.alpha >= 0.0, "gradnorm.alpha must be non-negative");
  require(gradnorm.weight_lr >= 0.0, "gradnorm.weight_lr must be non-negative");
  require(lambda_ce >= 0.0 && lambda_c >= 0.0, "loss weights must be non-negative");
  for (std::size_t h : hidden) require(h > 0, "hidden widths must be positive");
  const std::string& k = constraint.kind;
  require(k == "robustness" || k == "groups" || k == "class-similarity" || k == "custom",
          "unknown constraint kind '" + k + "'");
  require(k != "custom" || !constraint.formula.empty(), "custom constraint needs a formula");
}

TrainConfig baseline_config(TrainConfig config) {
  config.gradnorm.enabled = false;
  config.lambda_ce = 1.0;
  config.lambda_c = 0.0;
  return config;
}

GradNormStep gradnorm_update(const GradNormState& state, std::array<double, 2> losses,
                             std::array<double, 2> grad_norms, double alpha, double lr) {
  GradNormStep step;
  step.state = state;
  for (int i = 0; i < 2; ++i) {
    if (!std::isfinite(losses[i]) || !std::isfinite(grad_norms[i])) return step;
  }
  GradNormState& s = step.state;
  for (int i = 0; i < 2; ++i) {
    if (!s.has_initial[i] && losses[i] > 0.0) {
      s.initial_loss[i] = losses[i];
      s.has_initial[i] = true;
    }
  }
  const std::array<double, 2> lambda{s.lambda_ce, s.lambda_c};
  std::array<double, 2> ratio{};
  for (int i = 0; i < 2; ++i) ratio[i] = s.has_initial[i] ? losses[i] / s.initial_loss[i] : 1.0;
  const double mean_ratio = 0.5 * (ratio[0] + ratio[1]);
  for (int i = 0; i < 2; ++i) step.norms[i] = lambda[i] * grad_norms[i];
  const double mean_norm = 0.5 * (step.norms[0] + step.norms[1]);
  for (int i = 0; i < 2; ++i) {
    const double r = mean_ratio > 0.0 ? ratio[i] / mean_ratio : 1.0;
    step.targets[i] = mean_norm * std::pow(r, alpha);
  }
  std::array<double, 2> next{};
  for (int i = 0; i < 2; ++i) {
    const double diff = step.norms[i] - step.targets[i];
    const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    next[i] = std::max(kLambdaFloor, lambda[i] - lr * sign * grad_norms[i]);
  }
  s.lambda_ce = 2.0 * next[0] / (next[0] + next[1]);
  s.lambda_ce = std::clamp(s.lambda_ce, kLambdaFloor, 2.0 - kLambdaFloor);
  s.lambda_c = 2.0 - s.lambda_ce;
  step.applied = true;
  return step;
}

std::string MetricsHistory::jsonl() const {
  std::string out;
  for (const EpochRecord& r : records) {
    ojson j;
    j["epoch"] = r.epoch;
    j["pred_acc"] = r.pred_acc;
    j["constraint_acc"] = r.constraint_acc;
    j["lambda_ce"] = r.lambda_ce;
    j["lambda_c"] = r.lambda_c;
    j["loss_ce"] = r.loss_ce;
    j["loss_c"] = r.loss_c;
    out += j.dump() + '\n';
  }
  return out;
}

MetricsHistory MetricsHistory::parse_jsonl(const std::string& text) {
  MetricsHistory h;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const ojson j = ojson::parse(line);
      EpochRecord r;
      r.epoch = j.at("epoch").get<std::size_t>();
      r.pred_acc = j.at("pred_acc").get<double>();
      r.constraint_acc = j.at("constraint_acc").get<double>();
      r.lambda_ce = j.at("lambda_ce").get<double>();
      r.lambda_c = j.at("lambda_c").get<double>();
      r.loss_ce = j.at("loss_ce").get<double>();
      r.loss_c = j.at("loss_c").get<double>();
      h.records.push_back(r);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("metrics: ") + e.what());
    }
  }
  return h;
}

Groups constraint_groups(const ConstraintConfig& c, std::size_t classes) {
  return c.groups.empty() ? default_groups(classes) : c.groups;
}

Formula build_constraint(const ConstraintConfig& c, const Dataset& train) {
  if (c.kind == "robustness") return robustness_formula(c.epsilon, c.delta);
  if (c.kind == "groups") return groups_formula(c.epsilon, c.delta, constraint_groups(c, train.classes));
  if (c.kind == "class-similarity") {
    return class_similarity_formula(c.epsilon, c.triples.empty() ? centroid_triples(train) : c.triples, train.classes);
  }
  if (c.kind == "custom") {
    Formula f = parse_formula(c.formula);
    return ball_radius(f) ? f : Formula::forall_ball(c.epsilon, f);
  }
  throw DomainError("unknown constraint kind '" + c.kind + "'");
}

double prediction_accuracy(const Model& model, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::vector<double> p = model.probs(data.x.row(i));
    hits += static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin()) == data.y[i];
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

namespace {

bool parameters_finite(const Model& model) {
  for (const Dense& d : model.layers()) {
    for (double v : d.w) if (!std::isfinite(v)) return false;
    for (double v : d.b) if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset& test_set,
                  const BatchObserver& observer) {
  config.validate();
  if (train_set.size() == 0) throw DomainError("train: empty training set");
  if (test_set.dim() != train_set.dim() && test_set.size() > 0) throw ShapeError("train: test width differs");
  const std::size_t classes = std::max(train_set.classes, test_set.classes);
  const Groups groups = constraint_groups(config.constraint, classes);
  const Formula formula = build_constraint(config.constraint, train_set);
  const double epsilon = ball_radius(formula).value_or(config.constraint.epsilon);

  TrainResult result;
  result.model = Model::create(train_set.dim(), config.hidden, classes, config.seed);
  Model& model = result.model;
  const bool use_constraint = config.gradnorm.enabled || config.lambda_c != 0.0;

  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), config.batch_size));
  std::vector<Attack> attacks;
  std::optional<CompiledConstraint> constraint;
  if (use_constraint) {
    attacks.assign(workers, Attack(formula, config.logic, groups, classes, train_set.dim()));
    constraint.emplace(formula, config.logic, groups, classes, train_set.dim());
  }

  GradNormState state;
  state.lambda_ce = config.lambda_ce;
  state.lambda_c = use_constraint ? config.lambda_c : 0.0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(sample_seed(config.seed, 0, 0x5eed));
  const auto start = std::chrono::steady_clock::now();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double sum_ce = 0.0, sum_c = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0, batch = 0; begin < order.size(); begin += config.batch_size, ++batch) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const std::size_t b = end - begin;
      const double inv = 1.0 / static_cast<double>(b);

      std::vector<std::vector<double>> adv(b);
      if (use_constraint) {
        parallel_for(b, workers, [&](std::size_t j, unsigned w) {
          const std::size_t i = order[begin + j];
          std::mt19937_64 rng(sample_seed(config.seed, epoch, i));
          adv[j] = attacks[w].run(model, train_set.x.row(i), epsilon, config.pgd, rng);
        });
      }

      Gradients g_ce = model.zero_gradients();
      Gradients g_c = model.zero_gradients();
      double loss_ce = 0.0, loss_c = 0.0;
      for (std::size_t j = 0; j < b; ++j) {
        const std::size_t i = order[begin + j];
        const auto x0 = train_set.x.row(i);
        const Trace t = model.trace(x0);
        loss_ce -= std::log(std::max(t.probs[train_set.y[i]], 1e-12)) * inv;
        model.backward_logits(t, cross_entropy_logit_grad(t.probs, train_set.y[i]), g_ce, inv, nullptr);
        if (use_constraint) loss_c += constraint_eval(*constraint, model, x0, adv[j], &g_c, inv).loss * inv;
      }
      if (!std::isfinite(loss_ce) || !std::isfinite(loss_c) || !g_ce.all_finite() || !g_c.all_finite()) {
        result.history.diverged = true;
        return result;
      }
      Gradients total = model.zero_gradients();
      total.add(g_ce, state.lambda_ce);
      if (use_constraint) total.add(g_c, state.lambda_c);
      model.apply(total, config.learning_rate);
      if (!parameters_finite(model)) {
        result.history.diverged = true;
        return result;
      }

      const bool frozen = config.gradnorm.stop_epoch > 0 && epoch >= config.gradnorm.stop_epoch;
      if (config.gradnorm.enabled && !frozen) {
        state = gradnorm_update(state, {loss_ce, loss_c}, {g_ce.last_layer_norm(), g_c.last_layer_norm()},
                                config.gradnorm.alpha, config.gradnorm.weight_lr)
                    .state;
      }
      if (observer) observer(epoch, batch, state);
      sum_ce += loss_ce;
      sum_c += loss_c;
      ++batches;
    }

    EpochRecord r;
    r.epoch = epoch;
    r.pred_acc = prediction_accuracy(model, test_set);
    r.constraint_acc = constraint_accuracy(model, test_set, formula, config.logic, epsilon, config.pgd,
                                           sample_seed(config.seed, epoch, 0xacc), groups);
    r.lambda_ce = state.lambda_ce;
    r.lambda_c = state.lambda_c;
    r.loss_ce = sum_ce / static_cast<double>(batches);
    r.loss_c = sum_c / static_cast<double>(batches);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.records.push_back(r);
  }
  return result;
}

namespace {

template <typename T>
void read(const ojson& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const ojson& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw FormatError("config: " + where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* s) { return k == s; }) == keys.end()) {
      throw FormatError("config: unknown field '" + where + (where.empty() ? "" : ".") + k + "'");
    }
  }
}

}  // namespace

std::string config_to_json(const TrainConfig& c) {
  ojson j;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["hidden"] = c.hidden;
  j["logic"] = {{"kind", std::string(logic_name(c.logic.kind))}, {"xi", c.logic.xi}, {"s", c.logic.s}, {"p", c.logic.p}};
  ojson groups = ojson::array();
  for (const auto& [name, members] : c.constraint.groups) groups.push_back({{"name", name}, {"classes", members}});
  ojson triples = ojson::array();
  for (const Triple& t : c.constraint.triples) triples.push_back({t.a, t.b, t.c});
  j["constraint"] = {{"kind", c.constraint.kind},       {"formula", c.constraint.formula},
                     {"epsilon", c.constraint.epsilon}, {"delta", c.constraint.delta},
                     {"groups", groups},                {"triples", triples}};
  j["pgd"] = {{"steps", c.pgd.steps}, {"step_size", c.pgd.step_size}, {"restarts", c.pgd.restarts}};
  j["gradnorm"] = {{"enabled", c.gradnorm.enabled},
                   {"alpha", c.gradnorm.alpha},
                   {"weight_lr", c.gradnorm.weight_lr},
                   {"stop_epoch", c.gradnorm.stop_epoch}};
  j["lambda_ce"] = c.lambda_ce;
  j["lambda_c"] = c.lambda_c;
  j["seed"] = c.seed;
  const BlobsSpec& b = c.data.blobs;
  j["data"] = {{"kind", c.data.kind},
               {"blobs",
                {{"classes", b.classes},
                 {"train_per_class", b.train_per_class},
                 {"test_per_class", b.test_per_class},
                 {"dim", b.dim},
                 {"spread", b.spread},
                 {"seed", b.seed}}},
               {"train_csv", c.data.train_csv},
               {"test_csv", c.data.test_csv},
               {"train_images", c.data.train_images},
               {"train_labels", c.data.train_labels},
               {"test_images", c.data.test_images},
               {"test_labels", c.data.test_labels},
               {"classes", c.data.classes}};
  return j.dump(2) + '\n';
}

TrainConfig config_from_json(const std::string& text) {
  TrainConfig c;
  try {
    const ojson j = ojson::parse(text);
    reject_unknown(j,
                   {"epochs", "batch_size", "learning_rate", "hidden", "logic", "constraint", "pgd", "gradnorm",
                    "lambda_ce", "lambda_c", "seed", "data"},
                   "");
    read(j, "epochs", c.epochs);
    read(j, "batch_size", c.batch_size);
    read(j, "learning_rate", c.learning_rate);
    read(j, "hidden", c.hidden);
    read(j, "lambda_ce", c.lambda_ce);
    read(j, "lambda_c", c.lambda_c);
    read(j, "seed", c.seed);
    if (j.contains("logic")) {
      const ojson& l = j.at("logic");
      if (l.is_string()) {
        c.logic.kind = parse_logic_kind(l.get<std::string>());
      } else {
        reject_unknown(l, {"kind", "xi", "s", "p"}, "logic");
        if (l.contains("kind")) c.logic.kind = parse_logic_kind(l.at("kind").get<std::string>());
        read(l, "xi", c.logic.xi);
        read(l, "s", c.logic.s);
        read(l, "p", c.logic.p);
      }
    }
    if (j.contains("constraint")) {
      const ojson& k = j.at("constraint");
      reject_unknown(k, {"kind", "formula", "epsilon", "delta", "groups", "triples"}, "constraint");
      read(k, "kind", c.constraint.kind);
      read(k, "formula", c.constraint.formula);
      read(k, "epsilon", c.constraint.epsilon);
      read(k, "delta", c.constraint.delta);
      if (k.contains("groups")) {
        for (const ojson& g : k.at("groups")) {
          reject_unknown(g, {"name", "classes"}, "constraint.groups");
          c.constraint.groups.emplace_back(g.at("name").get<std::string>(),
                                           g.at("classes").get<std::vector<std::size_t>>());
        }
      }
      if (k.contains("triples")) {
        for (const ojson& t : k.at("triples")) {
          const auto v = t.get<std::vector<std::size_t>>();
          if (v.size() != 3) throw FormatError("config: each triple needs three classes");
          c.constraint.triples.push_back({v[0], v[1], v[2]});
        }
      }
    }
    if (j.contains("pgd")) {
      const ojson& p = j.at("pgd");
      reject_unknown(p, {"steps", "step_size", "restarts"}, "pgd");
      read(p, "steps", c.pgd.steps);
      read(p, "step_size", c.pgd.step_size);
      read(p, "restarts", c.pgd.restarts);
    }
    if (j.contains("gradnorm")) {
      const ojson& g = j.at("gradnorm");
      reject_unknown(g, {"enabled", "alpha", "weight_lr", "stop_epoch"}, "gradnorm");
      read(g, "enabled", c.gradnorm.enabled);
      read(g, "alpha", c.gradnorm.alpha);
      read(g, "weight_lr", c.gradnorm.weight_lr);
      read(g, "stop_epoch", c.gradnorm.stop_epoch);
    }
    if (j.contains("data")) {
      const ojson& d = j.at("data");
      reject_unknown(d,
                     {"kind", "blobs", "train_csv", "test_csv", "train_images", "train_labels", "test_images",
                      "test_labels", "classes"},
                     "data");
      read(d, "kind", c.data.kind);
      read(d, "train_csv", c.data.train_csv);
      read(d, "test_csv", c.data.test_csv);
      read(d, "train_images", c.data.train_images);
      read(d, "train_labels", c.data.train_labels);
      read(d, "test_images", c.data.test_images);
      read(d, "test_labels", c.data.test_labels);
      read(d, "classes", c.data.classes);
      if (d.contains("blobs")) {
        const ojson& b = d.at("blobs");
        reject_unknown(b, {"classes", "train_per_class", "test_per_class", "dim", "spread", "seed"}, "data.blobs");
        read(b, "classes", c.data.blobs.classes);
        read(b, "train_per_class", c.data.blobs.train_per_class);
        read(b, "test_per_class", c.data.blobs.test_per_class);
        read(b, "dim", c.data.blobs.dim);
        read(b, "spread", c.data.blobs.spread);
        read(b, "seed", c.data.blobs.seed);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return c;
}

}  // namespace dlc
