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

#include "viewsim/neuralnet.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "viewsim/csv_util.h"
#include "viewsim/errors.h"
#include "viewsim/rng.h"

namespace viewsim {

namespace {

void Activate(Activation a, Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::kRelu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::kTanh:
      z = z.array().tanh().matrix();
      break;
    case Activation::kIdentity:
      break;
  }
}

// Multiplies `grad` in place by the activation derivative, expressed through
// the activated output.
void ApplyActivationDerivative(Activation a, const Eigen::MatrixXd& output,
                               Eigen::MatrixXd& grad) {
  switch (a) {
    case Activation::kRelu:
      grad = (output.array() > 0.0).select(grad, 0.0);
      break;
    case Activation::kTanh:
      grad.array() *= 1.0 - output.array().square();
      break;
    case Activation::kIdentity:
      break;
  }
}

double ScaledError(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

const char* ActivationName(Activation a) {
  switch (a) {
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
    case Activation::kIdentity:
      return "identity";
  }
  return "identity";
}

Activation ParseActivation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw FormatError("unknown activation '" + name + "'");
}

Mlp::Mlp(std::vector<int> layer_sizes, std::vector<Activation> activations,
         uint64_t seed)
    : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) {
    throw InvalidArgumentError("an MLP needs at least input and output sizes");
  }
  if (activations.size() != sizes_.size() - 1) {
    throw InvalidArgumentError("need one activation per layer");
  }
  for (int s : sizes_) {
    if (s <= 0) throw InvalidArgumentError("layer sizes must be positive");
  }
  Rng rng(seed);
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    DenseLayer layer;
    layer.activation = activations[l];
    layer.weight.resize(out, in);
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) layer.weight(r, c) = rng.Uniform(-bound, bound);
    }
    layer.bias.resize(out);
    for (int r = 0; r < out; ++r) layer.bias(r) = rng.Uniform(-bound, bound);
    layers_.push_back(std::move(layer));
  }
}

Eigen::VectorXd Mlp::Forward(const Eigen::VectorXd& input) const {
  Eigen::MatrixXd batch = input;
  return Forward(batch, nullptr).col(0);
}

Eigen::MatrixXd Mlp::Forward(const Eigen::MatrixXd& batch,
                             ForwardCache* cache) const {
  if (batch.rows() != input_size()) {
    throw InvalidArgumentError("input has " + std::to_string(batch.rows()) +
                               " rows, network expects " +
                               std::to_string(input_size()));
  }
  if (cache) {
    cache->inputs.clear();
    cache->outputs.clear();
  }
  Eigen::MatrixXd x = batch;
  for (const auto& layer : layers_) {
    Eigen::MatrixXd z = layer.weight * x;
    z.colwise() += layer.bias;
    Activate(layer.activation, z);
    if (cache) {
      cache->inputs.push_back(std::move(x));
      cache->outputs.push_back(z);
    }
    x = std::move(z);
  }
  return x;
}

MlpGradients Mlp::Backward(const ForwardCache& cache,
                           const Eigen::MatrixXd& upstream,
                           Eigen::MatrixXd* input_gradient) const {
  if (cache.outputs.size() != layers_.size()) {
    throw InvalidArgumentError("backward needs a cache from Forward");
  }
  const auto& last = cache.outputs.back();
  if (upstream.rows() != last.rows() || upstream.cols() != last.cols()) {
    throw InvalidArgumentError("upstream gradient shape mismatch");
  }
  MlpGradients grads(layers_.size());
  Eigen::MatrixXd g = upstream;
  for (size_t k = layers_.size(); k-- > 0;) {
    const auto& layer = layers_[k];
    ApplyActivationDerivative(layer.activation, cache.outputs[k], g);
    grads[k].weight = g * cache.inputs[k].transpose();
    grads[k].bias = g.rowwise().sum();
    if (k > 0 || input_gradient) g = layer.weight.transpose() * g;
  }
  if (input_gradient) *input_gradient = std::move(g);
  return grads;
}

MlpGradients Mlp::ZeroGradients() const {
  MlpGradients grads;
  for (const auto& layer : layers_) {
    grads.push_back(LayerGradient{
        Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()),
        Eigen::VectorXd::Zero(layer.bias.size())});
  }
  return grads;
}

size_t Mlp::ParameterCount() const {
  size_t n = 0;
  for (const auto& layer : layers_) {
    n += static_cast<size_t>(layer.weight.size() + layer.bias.size());
  }
  return n;
}

std::vector<double> Mlp::Parameters() const {
  std::vector<double> out;
  out.reserve(ParameterCount());
  for (const auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        out.push_back(layer.weight(r, c));
      }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
      out.push_back(layer.bias(r));
    }
  }
  return out;
}

void Mlp::SetParameters(std::span<const double> params) {
  if (params.size() != ParameterCount()) {
    throw InvalidArgumentError("parameter count mismatch");
  }
  size_t i = 0;
  for (auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = params[i++];
      }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
      layer.bias(r) = params[i++];
    }
  }
}

bool Mlp::SameShape(const Mlp& other) const {
  if (sizes_ != other.sizes_) return false;
  for (size_t k = 0; k < layers_.size(); ++k) {
    if (layers_[k].activation != other.layers_[k].activation) return false;
  }
  return true;
}

AdamOptimizer::AdamOptimizer(const Mlp& net, double learning_rate,
                             double beta1, double beta2, double eps)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(net.ZeroGradients()),
      v_(net.ZeroGradients()) {
  if (!(learning_rate > 0.0)) {
    throw InvalidArgumentError("learning rate must be positive");
  }
}

void AdamOptimizer::Step(Mlp& net, const MlpGradients& grads) {
  auto& layers = net.layers();
  if (grads.size() != layers.size() || m_.size() != layers.size()) {
    throw InvalidArgumentError("gradient shape mismatch");
  }
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    param.array() -=
        lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  };
  for (size_t k = 0; k < layers.size(); ++k) {
    update(layers[k].weight, grads[k].weight, m_[k].weight, v_[k].weight);
    update(layers[k].bias, grads[k].bias, m_[k].bias, v_[k].bias);
  }
}

void SoftUpdate(Mlp& target, const Mlp& source, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw InvalidArgumentError("tau must lie in (0, 1]");
  }
  if (!target.SameShape(source)) {
    throw InvalidArgumentError("soft update between different shapes");
  }
  auto& t = target.layers();
  const auto& s = source.layers();
  for (size_t k = 0; k < t.size(); ++k) {
    t[k].weight = (1.0 - tau) * t[k].weight + tau * s[k].weight;
    t[k].bias = (1.0 - tau) * t[k].bias + tau * s[k].bias;
  }
}

ScalarLoss SquaredErrorLoss(Eigen::VectorXd target) {
  return ScalarLoss{
      [target](const Eigen::VectorXd& y) {
        return 0.5 * (y - target).squaredNorm();
      },
      [target](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return y - target;
      }};
}

double GradientCheck(const Mlp& net, const Eigen::VectorXd& input,
                     const ScalarLoss& loss, double eps) {
  if (!(eps > 0.0 && eps < 1e-2)) {
    throw InvalidArgumentError("gradient check eps must lie in (0, 1e-2)");
  }
  ForwardCache cache;
  const Eigen::MatrixXd batch = input;
  const Eigen::MatrixXd out = net.Forward(batch, &cache);
  const Eigen::MatrixXd upstream = loss.gradient(out.col(0));
  const MlpGradients grads = net.Backward(cache, upstream);

  std::vector<double> analytic;
  for (const auto& g : grads) {
    for (Eigen::Index r = 0; r < g.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < g.weight.cols(); ++c) {
        analytic.push_back(g.weight(r, c));
      }
    }
    for (Eigen::Index r = 0; r < g.bias.size(); ++r) analytic.push_back(g.bias(r));
  }

  Mlp probe = net;
  std::vector<double> params = net.Parameters();
  double worst = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + eps;
    probe.SetParameters(params);
    const double up = loss.value(probe.Forward(input));
    params[i] = saved - eps;
    probe.SetParameters(params);
    const double down = loss.value(probe.Forward(input));
    params[i] = saved;
    worst = std::max(worst, ScaledError(analytic[i], (up - down) / (2.0 * eps)));
  }
  return worst;
}

void WriteMlp(const Mlp& net, std::ostream& out) {
  out << "layer_sizes";
  for (int s : net.layer_sizes()) out << ',' << s;
  out << "\nactivations";
  for (const auto& layer : net.layers()) {
    out << ',' << ActivationName(layer.activation);
  }
  out << "\nparameters";
  for (double p : net.Parameters()) out << ',' << csv::FormatDouble(p);
  out << '\n';
}

Mlp ReadMlp(std::istream& in) {
  std::string line;
  auto next_fields = [&](const char* tag) {
    if (!std::getline(in, line)) {
      throw FormatError(std::string("network: missing '") + tag + "' line");
    }
    auto fields = csv::SplitLine(line);
    if (fields.empty() || fields[0] != tag) {
      throw FormatError(std::string("network: expected '") + tag + "' line");
    }
    fields.erase(fields.begin());
    return fields;
  };
  std::vector<int> sizes;
  for (auto f : next_fields("layer_sizes")) {
    sizes.push_back(static_cast<int>(csv::ParseInt(f, "layer_sizes", 1)));
  }
  std::vector<Activation> acts;
  for (auto f : next_fields("activations")) {
    acts.push_back(ParseActivation(std::string(f)));
  }
  Mlp net(sizes, acts, 0);
  std::vector<double> params;
  for (auto f : next_fields("parameters")) {
    params.push_back(csv::ParseDouble(f, "parameters", 3));
  }
  net.SetParameters(params);
  return net;
}

}  // namespace viewsim
