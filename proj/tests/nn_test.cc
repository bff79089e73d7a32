// Copyright 2026 The krq Authors.
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

#include "krq/nn.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "krq/error.h"

namespace krq {
namespace {

double Loss(const NetworkParams& params, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd r = Predict(params, BatchView(x.data(), x.rows(), x.cols()), Mode::kTrain) - y;
  return r.squaredNorm() / static_cast<double>(r.size());
}

// Max over all trainable entries of |analytic - central difference| divided
// by max(|analytic|, |fd|, 1e-6).
double MaxGradientError(NetworkParams params, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  ForwardCache cache;
  NetworkParams scratch = params;
  const Eigen::VectorXd pred =
      Forward(scratch, BatchView(x.data(), x.rows(), x.cols()), Mode::kTrain, &cache);
  const ParamBlock grads = Backward(cache, params, pred - y);
  const auto g = grads.Views();
  auto theta = params.trainable.Views();
  const double h = 1e-4;
  double worst = 0.0;
  for (std::size_t t = 0; t < theta.size(); ++t) {
    for (std::size_t i = 0; i < theta[t].size(); ++i) {
      const double saved = theta[t][i];
      theta[t][i] = saved + h;
      const double up = Loss(params, x, y);
      theta[t][i] = saved - h;
      const double down = Loss(params, x, y);
      theta[t][i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double denom = std::max({std::abs(fd), std::abs(g[t][i]), 1e-6});
      worst = std::max(worst, std::abs(fd - g[t][i]) / denom);
    }
  }
  return worst;
}

NetworkParams RandomizedNet(const std::vector<int>& widths, bool bn, uint64_t seed) {
  NetworkParams p = XavierInit({widths, bn, seed});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  // Move batch-norm affine and biases away from their trivial init values.
  for (auto& layer : p.trainable.dense) {
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = unif(rng);
  }
  for (auto& site : p.trainable.norm) {
    for (Eigen::Index i = 0; i < site.scale.size(); ++i) {
      site.scale[i] = 1.0 + unif(rng);
      site.shift[i] = unif(rng);
    }
  }
  return p;
}

TEST(XavierInitTest, WithinBoundsAndDeterministic) {
  const NetworkSpec spec{{3, 12, 12, 1}, true, 9};
  const NetworkParams a = XavierInit(spec);
  const NetworkParams b = XavierInit(spec);
  for (std::size_t l = 0; l < a.trainable.dense.size(); ++l) {
    const auto& w = a.trainable.dense[l].weight;
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    EXPECT_LE(w.cwiseAbs().maxCoeff(), bound);
    EXPECT_TRUE(w == b.trainable.dense[l].weight);
    EXPECT_TRUE(a.trainable.dense[l].bias.isZero(0.0));
  }
  for (const auto& site : a.trainable.norm) {
    EXPECT_TRUE(site.scale.isOnes(0.0));
    EXPECT_TRUE(site.shift.isZero(0.0));
  }
  for (const auto& r : a.running) {
    EXPECT_TRUE(r.mean.isZero(0.0));
    EXPECT_TRUE(r.var.isOnes(0.0));
  }
  EXPECT_FALSE(XavierInit({{3, 12, 12, 1}, true, 10}).trainable.dense[0].weight == a.trainable.dense[0].weight);
}

TEST(XavierInitTest, VarianceOfSquareLayer) {
  const NetworkParams p = XavierInit({{80, 80, 1}, false, 3});
  const auto& w = p.trainable.dense[0].weight;
  const double mean = w.mean();
  const double var = (w.array() - mean).square().sum() / static_cast<double>(w.size() - 1);
  EXPECT_NEAR(var / (2.0 / 160.0), 1.0, 0.2);
}

TEST(SwishTest, Values) {
  EXPECT_EQ(Swish(0.0), 0.0);
  EXPECT_DOUBLE_EQ(SwishGrad(0.0), 0.5);
  EXPECT_LT(std::abs(Swish(30.0) - 30.0), 1e-11);
  EXPECT_TRUE(std::isfinite(Swish(-800.0)));
  EXPECT_TRUE(std::isfinite(SwishGrad(-800.0)));
  EXPECT_EQ(Swish(-800.0), -0.0);
  for (double x : {-3.0, -0.4, 0.7, 5.0}) {
    EXPECT_NEAR(Swish(x), x / (1.0 + std::exp(-x)), 1e-15);
    const double fd = (Swish(x + 1e-6) - Swish(x - 1e-6)) / 2e-6;
    EXPECT_NEAR(SwishGrad(x), fd, 1e-8);
  }
}

TEST(ForwardTest, ZeroWeightsGiveFinalBias) {
  NetworkParams p = XavierInit({{2, 6, 6, 1}, true, 1});
  for (auto& layer : p.trainable.dense) layer.weight.setZero();
  p.trainable.dense.back().bias[0] = 0.375;
  const std::vector<double> x = {0.1, 0.2, 0.9, 0.4, 0.3, 0.3};
  const Eigen::VectorXd y = Predict(p, AsBatch(x, 2));
  for (Eigen::Index i = 0; i < y.size(); ++i) EXPECT_EQ(y[i], 0.375);
}

TEST(ForwardTest, EvalModeIsPure) {
  NetworkParams p = RandomizedNet({3, 7, 7, 1}, true, 4);
  const std::vector<double> x = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const NetworkParams before = p;
  const Eigen::VectorXd a = Forward(p, AsBatch(x, 3), Mode::kEval);
  const Eigen::VectorXd b = Forward(p, AsBatch(x, 3), Mode::kEval);
  EXPECT_TRUE(a == b);
  for (std::size_t l = 0; l < p.running.size(); ++l) {
    EXPECT_TRUE(p.running[l].mean == before.running[l].mean);
    EXPECT_TRUE(p.running[l].var == before.running[l].var);
  }
}

TEST(ForwardTest, TrainModeUpdatesRunningStatistics) {
  NetworkParams p = RandomizedNet({2, 4, 1}, true, 2);
  const std::vector<double> x = {0.1, 0.2, 0.9, 0.4, 0.3, 0.8, 0.5, 0.5};
  Forward(p, AsBatch(x, 2), Mode::kTrain);
  // Oracle: first-layer pre-activations by hand.
  const auto& l0 = p.trainable.dense[0];
  for (int k = 0; k < 4; ++k) {
    std::vector<double> z;
    for (int i = 0; i < 4; ++i) {
      z.push_back(l0.weight(k, 0) * x[2 * i] + l0.weight(k, 1) * x[2 * i + 1] + l0.bias[k]);
    }
    const double mean = (z[0] + z[1] + z[2] + z[3]) / 4.0;
    double ss = 0.0;
    for (double v : z) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(p.running[0].mean[k], 0.1 * mean, 1e-14);
    EXPECT_NEAR(p.running[0].var[k], 0.9 + 0.1 * ss / 3.0, 1e-14);
  }
}

TEST(ForwardTest, HandComputedSingleHiddenLayer) {
  NetworkParams p = XavierInit({{2, 2, 1}, false, 0});
  p.trainable.dense[0].weight << 1.0, 2.0, -1.0, 0.5;
  p.trainable.dense[0].bias << 0.1, -0.2;
  p.trainable.dense[1].weight << 0.3, -0.7;
  p.trainable.dense[1].bias << 0.05;
  const std::vector<double> x = {0.5, -1.0};
  const double z1 = 0.5 * 1.0 + -1.0 * 2.0 + 0.1;
  const double z2 = 0.5 * -1.0 + -1.0 * 0.5 - 0.2;
  const double expected = 0.3 * z1 / (1.0 + std::exp(-z1)) - 0.7 * z2 / (1.0 + std::exp(-z2)) + 0.05;
  EXPECT_NEAR(Predict(p, AsBatch(x, 2))[0], expected, 1e-12);
}

TEST(ForwardTest, Errors) {
  NetworkParams p = XavierInit({{2, 4, 1}, true, 0});
  const std::vector<double> one = {0.1, 0.2};
  EXPECT_THROW(Forward(p, AsBatch(one, 2), Mode::kTrain), DomainError);
  EXPECT_NO_THROW(Forward(p, AsBatch(one, 2), Mode::kEval));
  const std::vector<double> three = {0.1, 0.2, 0.3};
  EXPECT_THROW(Predict(p, AsBatch(three, 3)), ShapeError);
  EXPECT_THROW(NetworkSpec({{2}, false, 0}).Validate(), Error);
  EXPECT_THROW(NetworkSpec({{2, 3, 2}, false, 0}).Validate(), Error);
}

TEST(BackwardTest, ZeroResidualsGiveZeroGradients) {
  NetworkParams p = RandomizedNet({2, 5, 5, 1}, true, 8);
  std::vector<double> x(2 * 6);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.1 * static_cast<double>(i);
  ForwardCache cache;
  NetworkParams scratch = p;
  Forward(scratch, AsBatch(x, 2), Mode::kTrain, &cache);
  const ParamBlock g = Backward(cache, p, Eigen::VectorXd::Zero(6));
  for (const auto& v : g.Views()) {
    for (double e : v) EXPECT_EQ(e, 0.0);
  }
}

TEST(BackwardTest, ShapeMismatch) {
  NetworkParams p = XavierInit({{2, 5, 1}, false, 0});
  const std::vector<double> x = {0.1, 0.2, 0.3, 0.4};
  ForwardCache cache;
  Forward(p, AsBatch(x, 2), Mode::kTrain, &cache);
  EXPECT_THROW(Backward(cache, p, Eigen::VectorXd::Zero(3)), ShapeError);
  const NetworkParams other = XavierInit({{2, 6, 1}, false, 0});
  EXPECT_THROW(Backward(cache, other, Eigen::VectorXd::Zero(2)), ShapeError);
}

class GradientCheck : public ::testing::TestWithParam<bool> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const bool bn = GetParam();
  std::mt19937_64 rng(bn ? 21 : 12);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (uint64_t trial = 0; trial < 3; ++trial) {
    const NetworkParams p = RandomizedNet({2, 8, 8, 1}, bn, trial);
    Eigen::MatrixXd x(2, 16);
    Eigen::VectorXd y(16);
    for (Eigen::Index i = 0; i < 16; ++i) {
      x(0, i) = unif(rng);
      x(1, i) = unif(rng);
      y[i] = x(0, i) * x(0, i) + x(1, i) * x(1, i) + 4.0 * unif(rng);
    }
    EXPECT_LT(MaxGradientError(p, x, y), bn ? 1e-4 : 1e-5) << "trial " << trial;
  }
}

INSTANTIATE_TEST_SUITE_P(BatchNorm, GradientCheck, ::testing::Bool());

TEST(BackwardTest, EvalModeGradientMatchesDifferences) {
  NetworkParams p = RandomizedNet({3, 6, 1}, true, 5);
  p.running[0].mean.setConstant(0.2);
  p.running[0].var.setConstant(0.7);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 9);
  Eigen::VectorXd y = Eigen::VectorXd::Random(9);
  ForwardCache cache;
  NetworkParams scratch = p;
  const Eigen::VectorXd pred =
      Forward(scratch, BatchView(x.data(), 3, 9), Mode::kEval, &cache);
  const ParamBlock g = Backward(cache, p, pred - y);
  auto theta = p.trainable.Views();
  const auto gv = g.Views();
  for (std::size_t t = 0; t < theta.size(); ++t) {
    for (std::size_t i = 0; i < theta[t].size(); ++i) {
      const double saved = theta[t][i];
      auto loss = [&] {
        const Eigen::VectorXd r = Predict(p, BatchView(x.data(), 3, 9), Mode::kEval) - y;
        return r.squaredNorm() / 9.0;
      };
      theta[t][i] = saved + 1e-5;
      const double up = loss();
      theta[t][i] = saved - 1e-5;
      const double down = loss();
      theta[t][i] = saved;
      EXPECT_NEAR(gv[t][i], (up - down) / 2e-5, 1e-7 * std::max(1.0, std::abs(gv[t][i])));
    }
  }
}

TEST(NetworkParamsTest, ParameterCount) {
  const NetworkSpec spec = NetworkSpec::ForInputDim(5, 4, 6, true, 0);
  ASSERT_EQ(spec.widths, (std::vector<int>{5, 20, 20, 20, 20, 20, 1}));
  const NetworkParams p = XavierInit(spec);
  // sum(N_l N_{l-1} + N_l) plus four batch-norm slots per hidden unit
  const std::size_t dense = (20 * 5 + 20) + 4 * (20 * 20 + 20) + (1 * 20 + 1);
  EXPECT_EQ(p.ParameterCount(), dense + 4 * 100);
  EXPECT_EQ(p.trainable.size(), dense + 2 * 100);
  EXPECT_EQ(XavierInit(NetworkSpec::ForInputDim(5, 4, 6, false, 0)).ParameterCount(), dense);
}

}  // namespace
}  // namespace krq
