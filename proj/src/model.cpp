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

#include "dlc/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>

#include "dlc/error.hpp"

namespace dlc {

namespace {

constexpr char kMagic[4] = {'D', 'L', 'C', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("checkpoint: truncated header");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw FormatError("checkpoint: truncated parameters");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return std::bit_cast<double>(v);
}

void softmax(std::span<const double> logits, std::vector<double>& out) {
  out.resize(logits.size());
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - m);
    sum += out[k];
  }
  for (double& v : out) v /= sum;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> dims) : shape(std::move(dims)) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  data.assign(n, 0.0);
}

Tensor::Tensor(std::vector<std::size_t> dims, std::vector<double> values) : shape(std::move(dims)), data(std::move(values)) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  if (n != data.size()) throw ShapeError("tensor: data length does not match shape");
}

bool Tensor::all_finite() const {
  return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

void Gradients::add(const Gradients& other, double s) {
  for (std::size_t l = 0; l < w.size(); ++l) {
    for (std::size_t i = 0; i < w[l].size(); ++i) w[l][i] += s * other.w[l][i];
    for (std::size_t i = 0; i < b[l].size(); ++i) b[l][i] += s * other.b[l][i];
  }
}

void Gradients::scale(double factor) {
  for (auto& v : w) {
    for (double& x : v) x *= factor;
  }
  for (auto& v : b) {
    for (double& x : v) x *= factor;
  }
}

double Gradients::last_layer_norm() const {
  if (w.empty()) return 0.0;
  double s = 0.0;
  for (double x : w.back()) s += x * x;
  return std::sqrt(s);
}

bool Gradients::all_finite() const {
  auto ok = [](const std::vector<std::vector<double>>& vv) {
    for (const auto& v : vv) {
      for (double x : v) {
        if (!std::isfinite(x)) return false;
      }
    }
    return true;
  };
  return ok(w) && ok(b);
}

Model::Model(std::vector<Dense> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ShapeError("model: at least one layer is required");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Dense& d = layers_[l];
    if (d.in == 0 || d.out == 0 || d.w.size() != d.in * d.out || d.b.size() != d.out) {
      throw ShapeError("model: layer " + std::to_string(l) + " has inconsistent shape");
    }
    if (l > 0 && layers_[l - 1].out != d.in) throw ShapeError("model: layer widths do not chain");
  }
}

Model Model::create(std::size_t inputs, const std::vector<std::size_t>& hidden, std::size_t classes,
                    std::uint64_t seed) {
  if (inputs == 0 || classes < 2) throw ShapeError("model: need inputs > 0 and at least 2 classes");
  std::mt19937_64 rng(seed);
  std::vector<Dense> layers;
  std::size_t in = inputs;
  std::vector<std::size_t> widths = hidden;
  widths.push_back(classes);
  for (std::size_t l = 0; l < widths.size(); ++l) {
    Dense d;
    d.in = in;
    d.out = widths[l];
    d.act = l + 1 == widths.size() ? Activation::kIdentity : Activation::kReLU;
    const double limit = std::sqrt(6.0 / static_cast<double>(in));
    std::uniform_real_distribution<double> u(-limit, limit);
    d.w.resize(d.in * d.out);
    for (double& v : d.w) v = u(rng);
    d.b.assign(d.out, 0.0);
    layers.push_back(std::move(d));
    in = widths[l];
  }
  return Model(std::move(layers));
}

std::size_t Model::input_size() const { return layers_.empty() ? 0 : layers_.front().in; }
std::size_t Model::classes() const { return layers_.empty() ? 0 : layers_.back().out; }

Trace Model::trace(std::span<const double> x) const {
  if (x.size() != input_size()) throw ShapeError("model: input width " + std::to_string(x.size()) + ", expected " +
                                                 std::to_string(input_size()));
  Trace t;
  t.pre.resize(layers_.size());
  t.post.resize(layers_.size() + 1);
  t.post[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Dense& d = layers_[l];
    const std::vector<double>& a = t.post[l];
    std::vector<double>& z = t.pre[l];
    z.assign(d.b.begin(), d.b.end());
    for (std::size_t o = 0; o < d.out; ++o) {
      const double* wr = d.w.data() + o * d.in;
      double s = 0.0;
      for (std::size_t i = 0; i < d.in; ++i) s += wr[i] * a[i];
      z[o] += s;
    }
    std::vector<double>& h = t.post[l + 1];
    h = z;
    if (d.act == Activation::kReLU) {
      for (double& v : h) if (v < 0.0) v = 0.0;
    }
  }
  softmax(t.post.back(), t.probs);
  return t;
}

std::vector<double> Model::probs(std::span<const double> x) const { return trace(x).probs; }

Tensor Model::forward(const Tensor& batch) const {
  if (batch.shape.size() != 2 || batch.cols() != input_size()) {
    throw ShapeError("model: batch must be m x " + std::to_string(input_size()));
  }
  Tensor out({batch.rows(), classes()});
  for (std::size_t i = 0; i < batch.rows(); ++i) {
    std::vector<double> p = probs(batch.row(i));
    std::copy(p.begin(), p.end(), out.row(i).begin());
  }
  return out;
}

void Model::backward_logits(const Trace& t, std::span<const double> dlogits, Gradients& grads, double scale,
                            std::vector<double>* dinput) const {
  std::vector<double> delta(dlogits.begin(), dlogits.end());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Dense& d = layers_[l];
    if (d.act == Activation::kReLU) {
      for (std::size_t o = 0; o < d.out; ++o) {
        if (!(t.pre[l][o] > 0.0)) delta[o] = 0.0;
      }
    }
    const std::vector<double>& a = t.post[l];
    std::vector<double>& gw = grads.w[l];
    std::vector<double>& gb = grads.b[l];
    for (std::size_t o = 0; o < d.out; ++o) {
      const double g = scale * delta[o];
      if (g == 0.0) continue;
      gb[o] += g;
      double* row = gw.data() + o * d.in;
      for (std::size_t i = 0; i < d.in; ++i) row[i] += g * a[i];
    }
    if (l == 0 && dinput == nullptr) break;
    std::vector<double> prev(d.in, 0.0);
    for (std::size_t o = 0; o < d.out; ++o) {
      if (delta[o] == 0.0) continue;
      const double* wr = d.w.data() + o * d.in;
      for (std::size_t i = 0; i < d.in; ++i) prev[i] += wr[i] * delta[o];
    }
    if (l == 0) {
      dinput->resize(d.in, 0.0);
      for (std::size_t i = 0; i < d.in; ++i) (*dinput)[i] += scale * prev[i];
    }
    delta = std::move(prev);
  }
}

void Model::backward_probs(const Trace& t, std::span<const double> dprobs, Gradients& grads, double scale,
                           std::vector<double>* dinput) const {
  const std::vector<double>& p = t.probs;
  double dot = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) dot += dprobs[k] * p[k];
  std::vector<double> dlogits(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) dlogits[k] = p[k] * (dprobs[k] - dot);
  backward_logits(t, dlogits, grads, scale, dinput);
}

Gradients Model::zero_gradients() const {
  Gradients g;
  for (const Dense& d : layers_) {
    g.w.emplace_back(d.w.size(), 0.0);
    g.b.emplace_back(d.b.size(), 0.0);
  }
  return g;
}

void Model::apply(const Gradients& grads, double lr) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    for (std::size_t i = 0; i < layers_[l].w.size(); ++i) layers_[l].w[i] -= lr * grads.w[l][i];
    for (std::size_t i = 0; i < layers_[l].b.size(); ++i) layers_[l].b[i] -= lr * grads.b[l][i];
  }
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const Dense& d : layers_) n += d.w.size() + d.b.size();
  return n;
}

double* Model::locate(std::size_t i) {
  for (Dense& d : layers_) {
    if (i < d.w.size()) return &d.w[i];
    i -= d.w.size();
    if (i < d.b.size()) return &d.b[i];
    i -= d.b.size();
  }
  throw ShapeError("model: parameter index out of range");
}

double Model::parameter(std::size_t i) const { return *const_cast<Model*>(this)->locate(i); }
void Model::set_parameter(std::size_t i, double value) { *locate(i) = value; }

double Model::gradient(const Gradients& g, std::size_t i) {
  for (std::size_t l = 0; l < g.w.size(); ++l) {
    if (i < g.w[l].size()) return g.w[l][i];
    i -= g.w[l].size();
    if (i < g.b[l].size()) return g.b[l][i];
    i -= g.b[l].size();
  }
  throw ShapeError("gradients: parameter index out of range");
}

void Model::save(std::ostream& out) const {
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(layers_.size()));
  for (const Dense& d : layers_) {
    put_u32(out, static_cast<std::uint32_t>(d.in));
    put_u32(out, static_cast<std::uint32_t>(d.out));
    put_u32(out, static_cast<std::uint32_t>(d.act));
  }
  for (const Dense& d : layers_) {
    for (double v : d.w) put_f64(out, v);
    for (double v : d.b) put_f64(out, v);
  }
  if (!out) throw FormatError("checkpoint: write failed");
}

Model Model::load(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) throw FormatError("checkpoint: bad magic");
  if (get_u32(in) != kVersion) throw FormatError("checkpoint: unsupported version");
  const std::uint32_t count = get_u32(in);
  if (count == 0 || count > 1024) throw FormatError("checkpoint: implausible layer count");
  std::vector<Dense> layers(count);
  for (Dense& d : layers) {
    d.in = get_u32(in);
    d.out = get_u32(in);
    const std::uint32_t act = get_u32(in);
    if (act > 1) throw FormatError("checkpoint: unknown activation");
    d.act = static_cast<Activation>(act);
  }
  for (Dense& d : layers) {
    d.w.resize(d.in * d.out);
    for (double& v : d.w) v = get_f64(in);
    d.b.resize(d.out);
    for (double& v : d.b) v = get_f64(in);
  }
  try {
    return Model(std::move(layers));
  } catch (const ShapeError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

void Model::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("checkpoint: cannot open '" + path + "' for writing");
  save(out);
}

Model Model::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("checkpoint: cannot open '" + path + "'");
  return load(in);
}

bool operator==(const Model& a, const Model& b) {
  if (a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    const Dense &x = a.layers_[l], &y = b.layers_[l];
    if (x.in != y.in || x.out != y.out || x.act != y.act || x.w != y.w || x.b != y.b) return false;
  }
  return true;
}

double cross_entropy(const Tensor& probs, std::span<const std::size_t> labels) {
  if (probs.rows() != labels.size()) throw ShapeError("cross_entropy: label count does not match batch");
  if (labels.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= probs.cols()) throw ShapeError("cross_entropy: label out of range");
    sum -= std::log(std::max(probs.at(i, labels[i]), 1e-12));
  }
  return sum / static_cast<double>(labels.size());
}

std::vector<double> cross_entropy_logit_grad(std::span<const double> probs, std::size_t label) {
  if (label >= probs.size()) throw ShapeError("cross_entropy: label out of range");
  std::vector<double> g(probs.begin(), probs.end());
  g[label] -= 1.0;
  return g;
}

}  // namespace dlc
