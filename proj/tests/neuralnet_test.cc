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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "viewsim/errors.h"
#include "viewsim/rng.h"

namespace viewsim {
namespace {

Eigen::VectorXd RandomVector(int n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.Uniform(lo, hi);
  return x;
}

// Smallest |pre-activation| over all relu units for this input.
double KinkDistance(const Mlp& net, const Eigen::VectorXd& input) {
  double dist = INFINITY;
  Eigen::VectorXd x = input;
  for (const auto& layer : net.layers()) {
    Eigen::VectorXd z = layer.weight * x + layer.bias;
    if (layer.activation == Activation::kRelu) {
      dist = std::min(dist, z.cwiseAbs().minCoeff());
      z = z.cwiseMax(0.0);
    } else if (layer.activation == Activation::kTanh) {
      z = z.array().tanh();
    }
    x = z;
  }
  return dist;
}

TEST(MlpTest, ZeroParametersGiveZeroOutput) {
  Mlp net({3, 4, 2}, {Activation::kTanh, Activation::kIdentity}, 1);
  net.SetParameters(std::vector<double>(net.ParameterCount(), 0.0));
  const Eigen::VectorXd y = net.Forward(Eigen::VectorXd(Eigen::Vector3d(0.3, -2.0, 5.0)));
  EXPECT_EQ(y, Eigen::VectorXd::Zero(2));
}

TEST(MlpTest, SingleIdentityLayerIsAffine) {
  Mlp net({3, 2}, {Activation::kIdentity}, 4);
  const Eigen::Vector3d x(0.5, -1.5, 2.0);
  const auto& layer = net.layers()[0];
  const Eigen::VectorXd expected = layer.weight * x + layer.bias;
  EXPECT_EQ(net.Forward(Eigen::VectorXd(x)), expected);
}

TEST(MlpTest, PinnedTanhNetScalar) {
  Mlp net({2, 3, 1}, {Activation::kTanh, Activation::kTanh}, 0);
  net.SetParameters(std::vector<double>{0.1, -0.2, 0.3, 0.4, -0.5, 0.6,  // W1
                                        0.05, -0.05, 0.1,               // b1
                                        0.7, -0.8, 0.9,                 // W2
                                        -0.1});                         // b2
  const double x0 = 0.25, x1 = -0.75;
  const double h0 = std::tanh(0.1 * x0 - 0.2 * x1 + 0.05);
  const double h1 = std::tanh(0.3 * x0 + 0.4 * x1 - 0.05);
  const double h2 = std::tanh(-0.5 * x0 + 0.6 * x1 + 0.1);
  const double expected = std::tanh(0.7 * h0 - 0.8 * h1 + 0.9 * h2 - 0.1);
  EXPECT_NEAR(net.Forward(Eigen::VectorXd(Eigen::Vector2d(x0, x1)))(0), expected, 1e-12);
}

TEST(MlpTest, DimensionMismatchThrows) {
  Mlp net({3, 2}, {Activation::kIdentity}, 1);
  EXPECT_THROW(net.Forward(Eigen::VectorXd(Eigen::Vector2d(1, 2))), InvalidArgumentError);
  EXPECT_THROW(Mlp({3}, {}, 1), InvalidArgumentError);
  EXPECT_THROW(Mlp({3, 2}, {}, 1), InvalidArgumentError);
}

TEST(MlpTest, InitWithinFanInBounds) {
  Mlp net({16, 64, 4}, {Activation::kRelu, Activation::kIdentity}, 9);
  for (const auto& layer : net.layers()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    EXPECT_LE(layer.weight.cwiseAbs().maxCoeff(), bound);
    EXPECT_LE(layer.bias.cwiseAbs().maxCoeff(), bound);
  }
  Mlp same({16, 64, 4}, {Activation::kRelu, Activation::kIdentity}, 9);
  EXPECT_EQ(net.Parameters(), same.Parameters());
  Mlp other({16, 64, 4}, {Activation::kRelu, Activation::kIdentity}, 10);
  EXPECT_NE(net.Parameters(), other.Parameters());
}

TEST(MlpTest, ReluNetIsPositivelyHomogeneous) {
  Rng rng(2);
  Mlp net({4, 16, 2}, {Activation::kRelu, Activation::kIdentity}, 3);
  for (auto& layer : net.layers()) layer.bias.setZero();
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd x = RandomVector(4, rng);
    const double c = rng.Uniform(0.1, 10.0);
    EXPECT_TRUE((net.Forward(Eigen::VectorXd(c * x)) - c * net.Forward(x))
                    .cwiseAbs()
                    .maxCoeff() < 1e-12);
  }
}

TEST(BackwardTest, LinearSquaredLossMatchesResidualForm) {
  Rng rng(8);
  Mlp net({3, 1}, {Activation::kIdentity}, 5);
  const int n = 10;
  Eigen::MatrixXd x(3, n);
  for (int j = 0; j < n; ++j) x.col(j) = RandomVector(3, rng);
  const Eigen::RowVectorXd y = RandomVector(n, rng).transpose();
  ForwardCache cache;
  const Eigen::MatrixXd pred = net.Forward(x, &cache);
  const Eigen::MatrixXd residual = pred - y;
  const MlpGradients g = net.Backward(cache, residual);
  // d/dw of 0.5 * sum (Xw + b - y)^2 = X^T r, d/db = sum r.
  const Eigen::RowVectorXd expected_w = residual * x.transpose();
  EXPECT_LT((g[0].weight - expected_w).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(g[0].bias(0), residual.sum(), 1e-12);
}

TEST(BackwardTest, ZeroUpstreamGivesZeroGradients) {
  Mlp net({3, 8, 2}, {Activation::kTanh, Activation::kIdentity}, 5);
  ForwardCache cache;
  net.Forward(Eigen::MatrixXd::Ones(3, 4), &cache);
  Eigen::MatrixXd dx;
  const auto g = net.Backward(cache, Eigen::MatrixXd::Zero(2, 4), &dx);
  for (const auto& layer : g) {
    EXPECT_EQ(layer.weight.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(layer.bias.cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ(dx.cwiseAbs().maxCoeff(), 0.0);
}

TEST(BackwardTest, InputGradientMatchesFiniteDifferences) {
  Rng rng(12);
  Mlp net({3, 8, 1}, {Activation::kTanh, Activation::kIdentity}, 6);
  const Eigen::VectorXd x = RandomVector(3, rng);
  ForwardCache cache;
  net.Forward(Eigen::MatrixXd(x), &cache);
  Eigen::MatrixXd dx;
  net.Backward(cache, Eigen::MatrixXd::Ones(1, 1), &dx);
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd up = x, down = x;
    up(i) += 1e-6;
    down(i) -= 1e-6;
    const double fd = (net.Forward(up)(0) - net.Forward(down)(0)) / 2e-6;
    EXPECT_NEAR(dx(i, 0), fd, 1e-7);
  }
}

TEST(BackwardTest, RejectsMismatchedUpstream) {
  Mlp net({3, 2}, {Activation::kIdentity}, 1);
  ForwardCache cache;
  net.Forward(Eigen::MatrixXd::Ones(3, 2), &cache);
  EXPECT_THROW(net.Backward(cache, Eigen::MatrixXd::Ones(2, 3)),
               InvalidArgumentError);
  EXPECT_THROW(net.Backward(ForwardCache{}, Eigen::MatrixXd::Ones(2, 2)),
               InvalidArgumentError);
}

TEST(GradientCheckTest, ReluNetsAwayFromKinks) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    for (int depth = 1; depth <= 3; ++depth) {
      std::vector<int> sizes = {5};
      std::vector<Activation> acts;
      for (int d = 0; d < depth; ++d) {
        sizes.push_back(64);
        acts.push_back(Activation::kRelu);
      }
      sizes.push_back(2);
      acts.push_back(Activation::kIdentity);
      const Mlp net(sizes, acts, seed * 10 + depth);
      Eigen::VectorXd x = RandomVector(5, rng);
      for (int tries = 0; KinkDistance(net, x) < 1e-3; ++tries) {
        ASSERT_LT(tries, 1000);
        x = RandomVector(5, rng);
      }
      const auto loss = SquaredErrorLoss(RandomVector(2, rng));
      EXPECT_LT(GradientCheck(net, x, loss, 1e-6), 1e-4)
          << "seed " << seed << " depth " << depth;
    }
  }
}

TEST(GradientCheckTest, TanhNetsAnywhere) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed + 100);
    const Mlp net({4, 32, 32, 3},
                  {Activation::kTanh, Activation::kTanh, Activation::kTanh},
                  seed);
    const auto loss = SquaredErrorLoss(RandomVector(3, rng));
    EXPECT_LT(GradientCheck(net, RandomVector(4, rng, -3.0, 3.0), loss, 1e-5),
              1e-5);
  }
}

TEST(GradientCheckTest, RejectsEps) {
  const Mlp net({2, 1}, {Activation::kIdentity}, 1);
  const auto loss = SquaredErrorLoss(Eigen::VectorXd::Zero(1));
  EXPECT_THROW(GradientCheck(net, Eigen::Vector2d(1, 1), loss, 0.0),
               InvalidArgumentError);
  EXPECT_THROW(GradientCheck(net, Eigen::Vector2d(1, 1), loss, 0.02),
               InvalidArgumentError);
}

TEST(AdamTest, ZeroGradientLeavesParameters) {
  Mlp net({3, 4, 1}, {Activation::kTanh, Activation::kIdentity}, 2);
  const auto before = net.Parameters();
  AdamOptimizer opt(net, 1e-2);
  opt.Step(net, net.ZeroGradients());
  EXPECT_EQ(net.Parameters(), before);
  EXPECT_EQ(opt.step_count(), 1);
}

TEST(AdamTest, FirstStepClosedForm) {
  Mlp net({1, 1}, {Activation::kIdentity}, 2);
  const auto before = net.Parameters();
  const double lr = 0.01, eps = 1e-8;
  AdamOptimizer opt(net, lr, 0.9, 0.999, eps);
  MlpGradients g = net.ZeroGradients();
  g[0].weight(0, 0) = 0.3;
  g[0].bias(0) = -2.0;
  opt.Step(net, g);
  const auto after = net.Parameters();
  EXPECT_NEAR(after[0] - before[0], -lr * 0.3 / (0.3 + eps), 1e-15);
  EXPECT_NEAR(after[1] - before[1], lr * 2.0 / (2.0 + eps), 1e-15);
}

TEST(AdamTest, FullBatchTrajectoryIgnoresSeed) {
  const Mlp init({2, 8, 1}, {Activation::kTanh, Activation::kIdentity}, 1);
  Mlp a({2, 8, 1}, {Activation::kTanh, Activation::kIdentity}, 2);
  Mlp b({2, 8, 1}, {Activation::kTanh, Activation::kIdentity}, 3);
  a.SetParameters(init.Parameters());
  b.SetParameters(init.Parameters());
  Eigen::MatrixXd x(2, 4);
  x << 0, 1, 0, 1, 0, 0, 1, 1;
  Eigen::MatrixXd y(1, 4);
  y << 0, 1, 1, 0;
  AdamOptimizer oa(a, 1e-2), ob(b, 1e-2);
  for (int step = 0; step < 50; ++step) {
    ForwardCache ca, cb;
    const auto ga = a.Backward(ca, a.Forward(x, &ca) - y);
    const auto gb = b.Backward(cb, b.Forward(x, &cb) - y);
    oa.Step(a, ga);
    ob.Step(b, gb);
  }
  EXPECT_EQ(a.Parameters(), b.Parameters());
}

TEST(SoftUpdateTest, TauOneCopies) {
  Mlp target({3, 2}, {Activation::kIdentity}, 1);
  const Mlp source({3, 2}, {Activation::kIdentity}, 2);
  SoftUpdate(target, source, 1.0);
  EXPECT_EQ(target.Parameters(), source.Parameters());
}

TEST(SoftUpdateTest, HalfTwice) {
  Mlp target({1, 1}, {Activation::kIdentity}, 1);
  Mlp source({1, 1}, {Activation::kIdentity}, 1);
  target.SetParameters(std::vector<double>{0.0, 0.0});
  source.SetParameters(std::vector<double>{1.0, 1.0});
  SoftUpdate(target, source, 0.5);
  SoftUpdate(target, source, 0.5);
  EXPECT_EQ(target.Parameters(), (std::vector<double>{0.75, 0.75}));
}

TEST(SoftUpdateTest, SmallTauMovesProportionally) {
  Mlp target({3, 4, 1}, {Activation::kRelu, Activation::kIdentity}, 1);
  const Mlp source({3, 4, 1}, {Activation::kRelu, Activation::kIdentity}, 2);
  const auto before = target.Parameters();
  SoftUpdate(target, source, 0.005);
  const auto after = target.Parameters();
  const auto src = source.Parameters();
  for (size_t i = 0; i < before.size(); ++i) {
    EXPECT_LE(std::abs(after[i] - before[i]),
              0.005 * std::abs(src[i] - before[i]) + 1e-15);
  }
}

TEST(SoftUpdateTest, RejectsBadArguments) {
  Mlp target({3, 2}, {Activation::kIdentity}, 1);
  const Mlp other({3, 3}, {Activation::kIdentity}, 1);
  EXPECT_THROW(SoftUpdate(target, other, 0.5), InvalidArgumentError);
  EXPECT_THROW(SoftUpdate(target, target, 0.0), InvalidArgumentError);
}

TEST(MlpIoTest, RoundTripIsBitExact) {
  const Mlp net({3, 64, 64, 2},
                {Activation::kRelu, Activation::kTanh, Activation::kIdentity}, 7);
  std::stringstream buf;
  WriteMlp(net, buf);
  const Mlp back = ReadMlp(buf);
  ASSERT_TRUE(back.SameShape(net));
  EXPECT_EQ(back.Parameters(), net.Parameters());
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd x = RandomVector(3, rng);
    EXPECT_EQ(back.Forward(x), net.Forward(x));
  }
}

TEST(MlpIoTest, RejectsGarbage) {
  std::istringstream in("layer_sizes,2,1\nactivations,sigmoid\nparameters,1,2,3\n");
  EXPECT_THROW(ReadMlp(in), FormatError);
}

}  // namespace
}  // namespace viewsim
