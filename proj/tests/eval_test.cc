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

#include "krq/eval.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <vector>

#include "krq/error.h"

namespace krq {
namespace {

NetworkParams FreshNet(int d, uint64_t seed = 0) {
  return XavierInit(NetworkSpec::ForInputDim(d, 4, 6, true, seed));
}

NetworkParams ZeroNet(int d) {
  NetworkParams p = FreshNet(d);
  for (auto& layer : p.trainable.dense) {
    layer.weight.setZero();
    layer.bias.setZero();
  }
  return p;
}

std::vector<double> Predictions(const NetworkParams& p, const EvaluationSet& set) {
  const Eigen::VectorXd v = Predict(p, AsBatch(set.x, set.d));
  return {v.data(), v.data() + v.size()};
}

TEST(EvaluationSetTest, PointsAreUniformInBox) {
  const EvaluationSet set = BuildEvaluationSet(HeatProblem(3), 4096, 1);
  ASSERT_EQ(set.x.size(), 3u * 4096u);
  EXPECT_FALSE(set.from_oracle);
  EXPECT_TRUE(set.exact_std_error.empty());
  double mean = 0.0;
  for (double x : set.x) {
    EXPECT_GT(x, 0.0);
    EXPECT_LT(x, 1.0);
    mean += x;
  }
  mean /= static_cast<double>(set.x.size());
  EXPECT_NEAR(mean, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / set.x.size()));
  for (std::size_t i = 0; i < set.m; ++i) {
    const std::span<const double> x(set.x.data() + 3 * i, 3);
    EXPECT_DOUBLE_EQ(set.exact[i], HeatExact(1.0, x));
  }
  EXPECT_EQ(BuildEvaluationSet(HeatProblem(3), 4096, 1).x, set.x);
  EXPECT_NE(BuildEvaluationSet(HeatProblem(3), 4096, 2).x, set.x);
  EXPECT_THROW(BuildEvaluationSet(HeatProblem(3), 0, 1), DomainError);
}

TEST(RelativeL2Test, PerfectAndZeroPredictions) {
  const NetworkParams net = FreshNet(5);
  EvaluationSet set = BuildEvaluationSet(HeatProblem(5), 1024, 1);
  EXPECT_EQ(RelativeL2(ZeroNet(5), set).rel_l2, 1.0);

  set.exact = Predictions(net, set);
  const EvalReport perfect = RelativeL2(net, set);
  EXPECT_EQ(perfect.rel_l2, 0.0);
  EXPECT_EQ(perfect.m, 1024u);
  EXPECT_EQ(perfect.seed, 1u);
  EXPECT_FALSE(perfect.oracle_std_error.has_value());
}

TEST(RelativeL2Test, MatchesDirectFormula) {
  const NetworkParams net = FreshNet(2, 3);
  const EvaluationSet set = BuildEvaluationSet(HeatProblem(2), 512, 4);
  const std::vector<double> pred = Predictions(net, set);
  long double num = 0.0L, den = 0.0L;
  for (std::size_t i = 0; i < set.m; ++i) {
    num += (long double)(pred[i] - set.exact[i]) * (pred[i] - set.exact[i]);
    den += (long double)set.exact[i] * set.exact[i];
  }
  EXPECT_NEAR(RelativeL2(net, set).rel_l2, std::sqrt(static_cast<double>(num / den)), 1e-14);
}

TEST(RelativeL2Test, ZeroDenominator) {
  EvaluationSet set = BuildEvaluationSet(HeatProblem(2), 16, 1);
  std::fill(set.exact.begin(), set.exact.end(), 0.0);
  EXPECT_THROW(RelativeL2(FreshNet(2), set), DomainError);
}

TEST(RelativeL2Test, ReorderInvariance) {
  const NetworkParams net = FreshNet(5, 1);
  const EvaluationSet set = BuildEvaluationSet(HeatProblem(5), 2048, 7);
  std::vector<std::size_t> perm(set.m);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(5));
  EvaluationSet shuffled = set;
  for (std::size_t i = 0; i < set.m; ++i) {
    for (int k = 0; k < 5; ++k) shuffled.x[5 * i + k] = set.x[5 * perm[i] + k];
    shuffled.exact[i] = set.exact[perm[i]];
  }
  const double a = RelativeL2(net, set).rel_l2;
  EXPECT_NEAR(RelativeL2(net, shuffled).rel_l2, a, 1e-13 * a);
  EXPECT_EQ(RelativeL2(net, set).rel_l2, a);
}

TEST(RelativeL2Test, DoublingMStaysWithinSamplingError) {
  // Delta-method standard error of sqrt(mean(a) / mean(b)) with
  // a = (f - u)^2 and b = u^2, computed from the evaluation points.
  const NetworkParams net = FreshNet(5, 2);
  auto rel_and_se = [&](std::size_t m) {
    const EvaluationSet set = BuildEvaluationSet(HeatProblem(5), m, 11);
    const std::vector<double> pred = Predictions(net, set);
    double ma = 0.0, mb = 0.0;
    std::vector<double> a(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = (pred[i] - set.exact[i]) * (pred[i] - set.exact[i]);
      b[i] = set.exact[i] * set.exact[i];
      ma += a[i] / m;
      mb += b[i] / m;
    }
    const double r2 = ma / mb;
    double v = 0.0;
    for (std::size_t i = 0; i < m; ++i) v += std::pow(a[i] - r2 * b[i], 2) / (m - 1);
    const double se_r2 = std::sqrt(v / m) / mb;
    return std::pair{RelativeL2(net, set).rel_l2, se_r2 / (2.0 * std::sqrt(r2))};
  };
  const auto [r1, se1] = rel_and_se(std::size_t{1} << 14);
  const auto [r2, se2] = rel_and_se(std::size_t{1} << 15);
  EXPECT_GT(se1, 0.0);
  EXPECT_LT(std::abs(r2 - r1), 3.0 * std::hypot(se1, se2));
}

TEST(RelativeL2Test, HeatExactAgreesWithOracle) {
  const ProblemSpec heat = HeatProblem(2);
  const NetworkParams net = FreshNet(2, 4);
  const EvaluationSet set = BuildEvaluationSet(heat, 32, 3);
  const auto est = SolutionOracleBatch(set.x, heat, std::size_t{1} << 20,
                                       {SamplerMethod::kOwen, heat.label_dim(), 99}, 16);
  EvaluationSet oracle_set = set;
  oracle_set.from_oracle = true;
  oracle_set.exact_std_error.resize(set.m);
  for (std::size_t i = 0; i < set.m; ++i) {
    oracle_set.exact[i] = est[i].estimate;
    oracle_set.exact_std_error[i] = est[i].std_error;
  }
  const double r_exact = RelativeL2(net, set).rel_l2;
  const EvalReport r_oracle = RelativeL2(net, oracle_set);
  ASSERT_TRUE(r_oracle.oracle_std_error.has_value());

  // First-order propagation of the per-point errors. Paths are shared across
  // points, so the errors are summed in absolute value.
  const std::vector<double> pred = Predictions(net, set);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < set.m; ++i) {
    num += std::pow(pred[i] - set.exact[i], 2);
    den += set.exact[i] * set.exact[i];
  }
  double se = 0.0;
  for (std::size_t i = 0; i < set.m; ++i) {
    const double dr = (-(pred[i] - set.exact[i]) / den - num * set.exact[i] / (den * den)) /
                      std::sqrt(num / den);
    se += std::abs(dr) * est[i].std_error;
  }
  EXPECT_GT(se, 0.0);
  EXPECT_LT(std::abs(r_oracle.rel_l2 - r_exact), 3.0 * se);
}

TEST(ProjectionGridTest, HeatCoordinatesAndExactValues) {
  const ProblemSpec heat = HeatProblem(3);
  const ProjectionGrid g = MakeProjectionGrid(FreshNet(3), heat, {std::nullopt, std::nullopt, 0.5});
  ASSERT_EQ(g.cells.size(), 2500u);
  EXPECT_EQ(g.resolution, 50);
  EXPECT_EQ(g.free_first, 0);
  EXPECT_EQ(g.free_second, 1);
  EXPECT_FALSE(g.from_oracle);
  EXPECT_EQ(g.cells.front().x1, 0.0);
  EXPECT_EQ(g.cells.back().x1, 1.0);
  EXPECT_EQ(g.cells.back().x2, 1.0);
  EXPECT_NEAR(g.cells[51].x1, 1.0 / 49.0, 1e-16);
  EXPECT_NEAR(g.cells[51].x2, 1.0 / 49.0, 1e-16);
  int differs = 0;
  for (const GridCell& c : g.cells) {
    EXPECT_NEAR(c.exact, c.x1 * c.x1 + c.x2 * c.x2 + 0.25 + 2.0 * 3.0 * 1.0, 1e-12);
    EXPECT_NEAR(c.rel_err, std::abs(c.prediction - c.exact) / c.exact, 1e-15);
    EXPECT_EQ(c.exact_std_error, 0.0);
    if (std::abs(c.prediction - c.exact) > 1e-3) ++differs;
  }
  EXPECT_EQ(differs, 2500);
}

TEST(ProjectionGridTest, OtherFreePair) {
  const ProjectionGrid g =
      MakeProjectionGrid(FreshNet(4), HeatProblem(4), {0.1, std::nullopt, 0.2, std::nullopt}, 5);
  EXPECT_EQ(g.free_first, 1);
  EXPECT_EQ(g.free_second, 3);
  ASSERT_EQ(g.cells.size(), 25u);
  EXPECT_NEAR(g.cells[7].exact, 0.01 + 0.25 * 0.25 + 0.04 + 0.5 * 0.5 + 8.0, 1e-12);
}

TEST(ProjectionGridTest, BlackScholesUsesOracle) {
  const ProblemSpec bs = BlackScholesProblem(5);
  std::vector<std::optional<double>> fixed(5, 5.0);
  fixed[0].reset();
  fixed[1].reset();
  const ProjectionGrid g = MakeProjectionGrid(FreshNet(5), bs, fixed, 4);
  EXPECT_TRUE(g.from_oracle);
  EXPECT_EQ(g.oracle_samples, std::size_t{1} << 18);
  ASSERT_EQ(g.cells.size(), 16u);
  EXPECT_EQ(g.cells[0].x1, 4.5);
  EXPECT_EQ(g.cells[15].x2, 5.5);
  for (const GridCell& c : g.cells) {
    EXPECT_GT(c.exact_std_error, 0.0);
    EXPECT_LT(c.exact_std_error, 1e-2 * c.exact);
  }
  // Independent estimate at one cell with a different seed.
  const std::vector<double> x = {g.cells[5].x1, g.cells[5].x2, 5.0, 5.0, 5.0};
  const OracleEstimate e = BsOracle(x, bs, std::size_t{1} << 18, {SamplerMethod::kIid, 5, 12345});
  EXPECT_LT(std::abs(e.estimate - g.cells[5].exact),
            4.0 * std::hypot(e.std_error, g.cells[5].exact_std_error));
}

TEST(ProjectionGridTest, Errors) {
  const NetworkParams net = FreshNet(3);
  EXPECT_THROW(MakeProjectionGrid(net, HeatProblem(3), {std::nullopt, 0.5, 0.5}), ConfigError);
  EXPECT_THROW(MakeProjectionGrid(net, HeatProblem(3), {std::nullopt, std::nullopt}), ShapeError);
  EXPECT_THROW(MakeProjectionGrid(net, HeatProblem(3), {std::nullopt, std::nullopt, 0.5}, 1),
               DomainError);
}

TEST(OracleCacheTest, SecondBuildReadsCache) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "krq_oracle_cache_test";
  std::filesystem::remove_all(dir);
  OracleConfig oracle;
  oracle.log2n = 12;
  oracle.cache_dir = dir;
  const ProblemSpec bs = BlackScholesProblem(2);
  const EvaluationSet a = BuildEvaluationSet(bs, 8, 5, oracle);
  ASSERT_TRUE(a.from_oracle);
  ASSERT_EQ(a.exact_std_error.size(), 8u);
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files.push_back(e.path());
  ASSERT_EQ(files.size(), 1u);

  // Overwrite the cached values; a cache hit must return them verbatim.
  EvaluationSet tampered = a;
  for (double& v : tampered.exact) v += 1.0;
  {
    std::ofstream out(files[0], std::ios::binary | std::ios::trunc);
    const uint64_t m = 8;
    out.write(reinterpret_cast<const char*>(&m), sizeof(m));
    out.write(reinterpret_cast<const char*>(tampered.exact.data()), 8 * sizeof(double));
    out.write(reinterpret_cast<const char*>(a.exact_std_error.data()), 8 * sizeof(double));
  }
  const EvaluationSet b = BuildEvaluationSet(bs, 8, 5, oracle);
  EXPECT_EQ(b.exact, tampered.exact);
  EXPECT_EQ(b.x, a.x);

  // A different request misses and computes fresh values.
  oracle.seed += 1;
  const EvaluationSet c = BuildEvaluationSet(bs, 8, 5, oracle);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_LT(std::abs(c.exact[i] - a.exact[i]), 5.0 * std::hypot(c.exact_std_error[i], a.exact_std_error[i]));
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace krq
