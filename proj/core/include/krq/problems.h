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

#ifndef KRQ_PROBLEMS_H_
#define KRQ_PROBLEMS_H_

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "krq/lds.h"

namespace krq {

// Drift/diffusion structure of the underlying SDE.
enum class DynamicsCase {
  kConstant,     // mu(x) = mu_bar, sigma(x) = sigma_bar
  kGeometric,    // mu(x) = diag(x) mu_bar, sigma(x) = diag(x) sigma_bar
  kAffineEuler,  // affine mu, sigma; terminal state by Euler-Maruyama
};

enum class PayoffKind { kParaboloid, kRainbowPut };

std::string_view ToString(DynamicsCase c);
std::string_view ToString(PayoffKind k);

struct Payoff {
  PayoffKind kind = PayoffKind::kParaboloid;
  double strike = 0.0;  // rainbow put only
  double rate = 0.0;    // discount rate of the rainbow put
};

// x -> matrix * x + offset.
struct AffineMap {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd offset;

  Eigen::VectorXd Apply(const Eigen::VectorXd& x) const { return matrix * x + offset; }
};

struct ProblemSpec {
  std::string name;
  int d = 1;
  double a = 0.0;
  double b = 1.0;
  double T = 1.0;
  DynamicsCase dynamics = DynamicsCase::kConstant;
  Eigen::VectorXd drift;      // mu_bar; constant and geometric cases
  Eigen::MatrixXd diffusion;  // sigma_bar (d x d); constant and geometric cases
  AffineMap euler_drift;      // affine_euler: mu(x)
  // affine_euler: column j of sigma(x) is euler_diffusion[j].Apply(x).
  std::vector<AffineMap> euler_diffusion;
  Payoff payoff;
  int M = 0;  // Euler steps, affine_euler only

  // D: number of uniforms feeding the Brownian increments.
  int label_dim() const { return dynamics == DynamicsCase::kAffineEuler ? M * d : d; }
  // d + D.
  int input_dim() const { return d + label_dim(); }

  // Throws ConfigError on inconsistent shapes or parameters.
  void Validate() const;
};

// Heat equation du/dt = Laplacian(u), u(0,x) = |x|^2 on [0,1]^d, T = 1.
// The generator carries 1/2 sigma sigma^T, hence sigma_bar = sqrt(2) I.
ProblemSpec HeatProblem(int d);

// Correlated Black-Scholes rainbow put on [4.5,5.5]^d: T = 1, mu = -0.05,
// K = 5.5, sigma = BsSigma(d).
ProblemSpec BlackScholesProblem(int d);

// Restates a constant or geometric problem as an affine Euler problem with M
// steps.
ProblemSpec ToEuler(const ProblemSpec& spec, int M);

// JSON form: {name, case, d, a, b, T, drift, diffusion, payoff:{kind,...}, M}.
// {"name": "heat"|"bs", "d": k} (optionally with M) selects a built-in.
ProblemSpec ProblemFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const ProblemSpec& spec);

double ParaboloidPayoff(std::span<const double> s);
// exp(-mu T) max(0, K - min_i s_i).
double RainbowPutPayoff(std::span<const double> s, double strike, double mu, double T);
double EvaluatePayoff(const ProblemSpec& spec, std::span<const double> s);

struct Sample {
  Eigen::VectorXd x;
  double y = 0.0;
};

// x = a + (b - a) u_{1:d}.
Eigen::VectorXd MapInput(std::span<const double> u, const ProblemSpec& spec);

// Label maps from a point u of (0,1)^{d+D}.
Sample MapHeat(std::span<const double> u, const ProblemSpec& spec);
Sample MapGbm(std::span<const double> u, const ProblemSpec& spec);
Sample MapEuler(std::span<const double> u, const ProblemSpec& spec);
// Dispatches on spec.dynamics.
Sample MapSample(std::span<const double> u, const ProblemSpec& spec);

// Terminal state of the geometric SDE started at x, given z ~ N(0, T I).
Eigen::VectorXd GbmTerminal(const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                            const ProblemSpec& spec);

// Inputs (n x d, row-major) and labels built from a point set with s = d + D.
struct LabeledBatch {
  std::size_t n = 0;
  int d = 0;
  std::vector<double> x;
  std::vector<double> y;
};

LabeledBatch MakeLabeledBatch(const PointSet& u, const ProblemSpec& spec);

// |x|^2 + 2 d t.
double HeatExact(double t, std::span<const double> x);

// Closed-form u*(T, x) where available: constant dynamics with the
// paraboloid payoff give |x + mu_bar T|^2 + T |sigma_bar|_F^2.
bool HasClosedForm(const ProblemSpec& spec);
double ClosedFormSolution(const ProblemSpec& spec, std::span<const double> x);

// Lower-triangular C with C C^T = Q. Throws FactorizationError if Q is not
// symmetric positive definite.
Eigen::MatrixXd Cholesky(const Eigen::MatrixXd& q);

// Q with unit diagonal and 0.5 off the diagonal.
Eigen::MatrixXd BsCorrelation(int d);
// diag(beta) * Cholesky(BsCorrelation(d)), beta_i = 0.1 + i / (2d).
Eigen::MatrixXd BsSigma(int d);

// Closed-form Black-Scholes European put and call. Throws DomainError
// unless x, sigma, T > 0.
double BsPut1d(double x, double strike, double r, double sigma, double T);
double BsCall1d(double x, double strike, double r, double sigma, double T);

struct OracleEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Monte Carlo / RQMC estimate of u*(T, x) = E[phi(S_T^x)] from n simulated
// terminal states, for every row of `xs` (count x d, row-major). All rows
// share one set of simulated paths. With a net sampler the n paths are split
// into `replicates` independent scramblings and the standard error comes
// from their spread; with iid sampling it comes from the sample variance.
std::vector<OracleEstimate> SolutionOracleBatch(std::span<const double> xs,
                                                const ProblemSpec& spec, std::size_t n,
                                                const SamplerSpec& sampler,
                                                int replicates = 16);

// SolutionOracleBatch at a single point of a geometric (Black-Scholes)
// problem.
OracleEstimate BsOracle(std::span<const double> x, const ProblemSpec& spec, std::size_t n,
                        const SamplerSpec& sampler, int replicates = 16);

}  // namespace krq

#endif  // KRQ_PROBLEMS_H_
