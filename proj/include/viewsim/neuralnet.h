// Copyright 2026 The viewsim Authors
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

#ifndef VIEWSIM_NEURALNET_H_
#define VIEWSIM_NEURALNET_H_

// A small fully connected network with exact reverse-mode gradients, an Adam
// optimizer, Polyak target updates and a finite-difference checker. Batches
// are column-major: one column per sample.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace viewsim {

enum class Activation { kRelu, kTanh, kIdentity };

const char* ActivationName(Activation a);
Activation ParseActivation(const std::string& name);

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
  Activation activation = Activation::kIdentity;
};

struct LayerGradient {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

using MlpGradients = std::vector<LayerGradient>;

// Per-layer inputs and activated outputs from the last batched forward pass.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> outputs;
};

class Mlp {
 public:
  Mlp() = default;

  // layer_sizes = {input, hidden..., output}; one activation per layer
  // transition. Weights and biases are drawn from
  // U(-1/sqrt(fan_in), 1/sqrt(fan_in)) with the given seed.
  Mlp(std::vector<int> layer_sizes, std::vector<Activation> activations,
      uint64_t seed);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  Eigen::VectorXd Forward(const Eigen::VectorXd& input) const;
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& batch,
                          ForwardCache* cache = nullptr) const;

  // Gradients of sum_j <upstream_j, output_j> over the batch columns, from a
  // cache filled by Forward. Optionally returns d/d(input).
  MlpGradients Backward(const ForwardCache& cache,
                        const Eigen::MatrixXd& upstream,
                        Eigen::MatrixXd* input_gradient = nullptr) const;

  MlpGradients ZeroGradients() const;

  size_t ParameterCount() const;
  // Layer by layer: weight (row-major) then bias.
  std::vector<double> Parameters() const;
  void SetParameters(std::span<const double> params);

  bool SameShape(const Mlp& other) const;

 private:
  std::vector<int> sizes_;
  std::vector<DenseLayer> layers_;
};

// Bias-corrected adaptive moment estimation.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(const Mlp& net, double learning_rate, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);

  void Step(Mlp& net, const MlpGradients& grads);

  int64_t step_count() const { return step_; }
  double learning_rate() const { return lr_; }

 private:
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  int64_t step_ = 0;
  MlpGradients m_;
  MlpGradients v_;
};

// target <- (1 - tau) target + tau source. tau in (0, 1].
void SoftUpdate(Mlp& target, const Mlp& source, double tau);

struct ScalarLoss {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

// 0.5 * |output - target|^2
ScalarLoss SquaredErrorLoss(Eigen::VectorXd target);

// Largest scaled error |analytic - numeric| / max(1, |analytic|, |numeric|)
// over every parameter, using central differences. eps in (0, 1e-2).
double GradientCheck(const Mlp& net, const Eigen::VectorXd& input,
                     const ScalarLoss& loss, double eps);

// Three CSV lines: layer_sizes,..., activations,..., parameters,...
void WriteMlp(const Mlp& net, std::ostream& out);
Mlp ReadMlp(std::istream& in);

}  // namespace viewsim

#endif  // VIEWSIM_NEURALNET_H_
