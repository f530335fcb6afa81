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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dlc {

/// Row-major dense buffer.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  /// Zero-filled tensor of the given shape.
  explicit Tensor(std::vector<std::size_t> dims);
  Tensor(std::vector<std::size_t> dims, std::vector<double> values);

  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols(), cols()}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols(), cols()}; }
  double& at(std::size_t i, std::size_t j) { return data[i * cols() + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols() + j]; }
  bool all_finite() const;
};

enum class Activation : std::uint8_t { kReLU, kIdentity };

struct Dense {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> w;  // out x in, row-major
  std::vector<double> b;  // out
  Activation act = Activation::kReLU;
};

/// Parameter-shaped gradient buffer.
struct Gradients {
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> b;

  void add(const Gradients& other, double scale);
  void scale(double factor);
  /// L2 norm of the last layer's weight gradient.
  double last_layer_norm() const;
  bool all_finite() const;
};

/// Activations of one forward pass, kept for backpropagation.
struct Trace {
  std::vector<std::vector<double>> pre;   // per layer, before activation
  std::vector<std::vector<double>> post;  // per layer, after activation (post[0] is the input)
  std::vector<double> probs;
};

/// Feed-forward classifier: dense layers followed by a softmax.
class Model {
 public:
  Model() = default;
  explicit Model(std::vector<Dense> layers);

  /// ReLU hidden layers and an identity output layer, He-uniform weights,
  /// zero biases.
  static Model create(std::size_t inputs, const std::vector<std::size_t>& hidden, std::size_t classes,
                      std::uint64_t seed);

  std::size_t input_size() const;
  std::size_t classes() const;
  const std::vector<Dense>& layers() const { return layers_; }
  std::vector<Dense>& layers() { return layers_; }

  /// Softmax probabilities for each row. Throws ShapeError on width mismatch.
  Tensor forward(const Tensor& batch) const;
  std::vector<double> probs(std::span<const double> x) const;
  Trace trace(std::span<const double> x) const;

  /// Backpropagates dL/dlogits of a traced sample, accumulating into `grads`
  /// (scaled by `scale`) and, when non-null, into `dinput`.
  void backward_logits(const Trace& t, std::span<const double> dlogits, Gradients& grads, double scale,
                       std::vector<double>* dinput) const;
  /// Same, starting from dL/dprobs.
  void backward_probs(const Trace& t, std::span<const double> dprobs, Gradients& grads, double scale,
                      std::vector<double>* dinput) const;

  Gradients zero_gradients() const;
  /// theta -= lr * grads
  void apply(const Gradients& grads, double lr);

  std::size_t parameter_count() const;
  /// Flat parameter view in layer order, weights before biases.
  double parameter(std::size_t i) const;
  void set_parameter(std::size_t i, double value);
  static double gradient(const Gradients& g, std::size_t i);

  void save(std::ostream& out) const;
  static Model load(std::istream& in);
  void save(const std::string& path) const;
  static Model load(const std::string& path);

  friend bool operator==(const Model& a, const Model& b);

 private:
  double* locate(std::size_t i);
  std::vector<Dense> layers_;
};

/// Mean of -ln p_true (floored at 1e-12). Throws ShapeError on a label out of range.
double cross_entropy(const Tensor& probs, std::span<const std::size_t> labels);

/// dL/dlogits of -ln p_y for a softmax output: p - onehot(y).
std::vector<double> cross_entropy_logit_grad(std::span<const double> probs, std::size_t label);

}  // namespace dlc
