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

#include "krq/problems.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "krq/error.h"
#include "krq/hash.h"
#include "krq/inverse_normal.h"
#include "krq/parallel.h"

namespace krq {
namespace {

Eigen::VectorXd GaussianBlock(std::span<const double> u, std::size_t offset, int d,
                              double scale) {
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) {
    z[i] = scale * InverseNormalCdf(u[offset + static_cast<std::size_t>(i)]);
  }
  return z;
}

void CheckPointSize(std::span<const double> u, const ProblemSpec& spec) {
  if (u.size() != static_cast<std::size_t>(spec.input_dim())) {
    throw ShapeError("uniform point has " + std::to_string(u.size()) +
                     " coordinates, problem '" + spec.name + "' needs " +
                     std::to_string(spec.input_dim()));
  }
}

Eigen::VectorXd VectorFromJson(const nlohmann::json& j, int d, const char* what) {
  if (j.is_number()) return Eigen::VectorXd::Constant(d, j.get<double>());
  const auto values = j.get<std::vector<double>>();
  if (static_cast<int>(values.size()) != d) {
    throw ConfigError(std::string(what) + " must have " + std::to_string(d) + " entries");
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), d);
}

Eigen::MatrixXd MatrixFromJson(const nlohmann::json& j, int d, const char* what) {
  if (j.is_number()) return j.get<double>() * Eigen::MatrixXd::Identity(d, d);
  if (j.is_string()) {
    if (j.get<std::string>() == "bs_sigma") return BsSigma(d);
    throw ConfigError(std::string(what) + ": unknown matrix generator");
  }
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (static_cast<int>(rows.size()) != d) {
    throw ConfigError(std::string(what) + " must be " + std::to_string(d) + "x" +
                      std::to_string(d));
  }
  Eigen::MatrixXd m(d, d);
  for (int r = 0; r < d; ++r) {
    if (static_cast<int>(rows[r].size()) != d) {
      throw ConfigError(std::string(what) + " must be square");
    }
    for (int c = 0; c < d; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

nlohmann::json MatrixToJson(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    std::vector<double> row(m.cols());
    for (int c = 0; c < m.cols(); ++c) row[c] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json VectorToJson(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

AffineMap AffineFromJson(const nlohmann::json& j, int d) {
  AffineMap map;
  map.matrix = MatrixFromJson(j.at("matrix"), d, "affine matrix");
  map.offset = j.contains("offset") ? VectorFromJson(j.at("offset"), d, "affine offset")
                                    : Eigen::VectorXd::Zero(d);
  return map;
}

DynamicsCase ParseCase(const std::string& name) {
  if (name == "constant") return DynamicsCase::kConstant;
  if (name == "geometric") return DynamicsCase::kGeometric;
  if (name == "affine_euler") return DynamicsCase::kAffineEuler;
  throw ConfigError("unknown dynamics case '" + name + "'");
}

}  // namespace

std::string_view ToString(DynamicsCase c) {
  switch (c) {
    case DynamicsCase::kConstant:
      return "constant";
    case DynamicsCase::kGeometric:
      return "geometric";
    case DynamicsCase::kAffineEuler:
      return "affine_euler";
  }
  return "unknown";
}

std::string_view ToString(PayoffKind k) {
  return k == PayoffKind::kParaboloid ? "paraboloid" : "rainbow_put";
}

void ProblemSpec::Validate() const {
  if (d < 1) throw ConfigError("problem dimension must be >= 1");
  if (!(a < b)) throw ConfigError("problem domain requires a < b");
  if (!(T > 0.0)) throw ConfigError("problem horizon T must be positive");
  if (dynamics == DynamicsCase::kAffineEuler) {
    if (M < 1) throw ConfigError("affine_euler problems need M >= 1");
    if (euler_drift.matrix.rows() != d || euler_drift.matrix.cols() != d ||
        euler_drift.offset.size() != d) {
      throw ConfigError("affine drift must be d x d plus a d-vector");
    }
    if (static_cast<int>(euler_diffusion.size()) != d) {
      throw ConfigError("affine diffusion needs one map per Brownian component");
    }
    for (const auto& col : euler_diffusion) {
      if (col.matrix.rows() != d || col.matrix.cols() != d || col.offset.size() != d) {
        throw ConfigError("affine diffusion columns must be d x d plus a d-vector");
      }
    }
  } else {
    if (drift.size() != d) throw ConfigError("drift must have d entries");
    if (diffusion.rows() != d || diffusion.cols() != d) {
      throw ConfigError("diffusion must be d x d");
    }
  }
  if (payoff.kind == PayoffKind::kRainbowPut && !(payoff.strike > 0.0)) {
    throw ConfigError("rainbow put needs a positive strike");
  }
}

ProblemSpec HeatProblem(int d) {
  ProblemSpec p;
  p.name = "heat";
  p.d = d;
  p.a = 0.0;
  p.b = 1.0;
  p.T = 1.0;
  p.dynamics = DynamicsCase::kConstant;
  p.drift = Eigen::VectorXd::Zero(d);
  p.diffusion = std::numbers::sqrt2 * Eigen::MatrixXd::Identity(d, d);
  p.payoff = {PayoffKind::kParaboloid, 0.0, 0.0};
  p.Validate();
  return p;
}

ProblemSpec BlackScholesProblem(int d) {
  ProblemSpec p;
  p.name = "bs";
  p.d = d;
  p.a = 4.5;
  p.b = 5.5;
  p.T = 1.0;
  p.dynamics = DynamicsCase::kGeometric;
  p.drift = Eigen::VectorXd::Constant(d, -0.05);
  p.diffusion = BsSigma(d);
  p.payoff = {PayoffKind::kRainbowPut, 5.5, -0.05};
  p.Validate();
  return p;
}

ProblemSpec ToEuler(const ProblemSpec& spec, int M) {
  if (spec.dynamics == DynamicsCase::kAffineEuler) {
    ProblemSpec out = spec;
    out.M = M;
    out.Validate();
    return out;
  }
  const int d = spec.d;
  ProblemSpec out = spec;
  out.dynamics = DynamicsCase::kAffineEuler;
  out.M = M;
  out.euler_diffusion.clear();
  if (spec.dynamics == DynamicsCase::kConstant) {
    out.euler_drift = {Eigen::MatrixXd::Zero(d, d), spec.drift};
    for (int j = 0; j < d; ++j) {
      out.euler_diffusion.push_back({Eigen::MatrixXd::Zero(d, d), spec.diffusion.col(j)});
    }
  } else {
    out.euler_drift = {spec.drift.asDiagonal(), Eigen::VectorXd::Zero(d)};
    for (int j = 0; j < d; ++j) {
      out.euler_diffusion.push_back(
          {Eigen::MatrixXd(spec.diffusion.col(j).asDiagonal()), Eigen::VectorXd::Zero(d)});
    }
  }
  out.Validate();
  return out;
}

ProblemSpec ProblemFromJson(const nlohmann::json& j) {
  try {
    const std::string name = j.value("name", std::string("custom"));
    const int d = j.at("d").get<int>();
    if (d < 1) throw ConfigError("problem dimension must be >= 1");
    ProblemSpec p;
    if (!j.contains("case")) {
      if (name == "heat") {
        p = HeatProblem(d);
      } else if (name == "bs") {
        p = BlackScholesProblem(d);
      } else {
        throw ConfigError("problem '" + name + "' is not a built-in and has no 'case'");
      }
      if (j.contains("M")) p = ToEuler(p, j.at("M").get<int>());
      return p;
    }
    p.name = name;
    p.d = d;
    p.a = j.at("a").get<double>();
    p.b = j.at("b").get<double>();
    p.T = j.at("T").get<double>();
    p.dynamics = ParseCase(j.at("case").get<std::string>());
    const auto& payoff = j.at("payoff");
    const std::string kind = payoff.at("kind").get<std::string>();
    if (kind == "paraboloid") {
      p.payoff = {PayoffKind::kParaboloid, 0.0, 0.0};
    } else if (kind == "rainbow_put") {
      p.payoff = {PayoffKind::kRainbowPut, payoff.at("strike").get<double>(),
                  payoff.value("rate", 0.0)};
    } else {
      throw ConfigError("unknown payoff kind '" + kind + "'");
    }
    if (p.dynamics == DynamicsCase::kAffineEuler) {
      p.M = j.at("M").get<int>();
      p.euler_drift = AffineFromJson(j.at("drift"), d);
      const auto& cols = j.at("diffusion");
      if (!cols.is_array() || static_cast<int>(cols.size()) != d) {
        throw ConfigError("affine diffusion must list d column maps");
      }
      for (const auto& c : cols) p.euler_diffusion.push_back(AffineFromJson(c, d));
    } else {
      p.drift = VectorFromJson(j.value("drift", nlohmann::json(0.0)), d, "drift");
      p.diffusion = MatrixFromJson(j.at("diffusion"), d, "diffusion");
    }
    p.Validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("problem config: ") + e.what());
  }
}

nlohmann::json ToJson(const ProblemSpec& spec) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["case"] = std::string(ToString(spec.dynamics));
  j["d"] = spec.d;
  j["a"] = spec.a;
  j["b"] = spec.b;
  j["T"] = spec.T;
  nlohmann::json payoff;
  payoff["kind"] = std::string(ToString(spec.payoff.kind));
  if (spec.payoff.kind == PayoffKind::kRainbowPut) {
    payoff["strike"] = spec.payoff.strike;
    payoff["rate"] = spec.payoff.rate;
  }
  j["payoff"] = payoff;
  if (spec.dynamics == DynamicsCase::kAffineEuler) {
    j["M"] = spec.M;
    j["drift"] = {{"matrix", MatrixToJson(spec.euler_drift.matrix)},
                  {"offset", VectorToJson(spec.euler_drift.offset)}};
    auto cols = nlohmann::json::array();
    for (const auto& c : spec.euler_diffusion) {
      cols.push_back({{"matrix", MatrixToJson(c.matrix)}, {"offset", VectorToJson(c.offset)}});
    }
    j["diffusion"] = cols;
  } else {
    j["drift"] = VectorToJson(spec.drift);
    j["diffusion"] = MatrixToJson(spec.diffusion);
  }
  return j;
}

double ParaboloidPayoff(std::span<const double> s) {
  double sum = 0.0;
  for (double v : s) sum += v * v;
  return sum;
}

double RainbowPutPayoff(std::span<const double> s, double strike, double mu, double T) {
  const double lowest = *std::min_element(s.begin(), s.end());
  return std::exp(-mu * T) * std::max(0.0, strike - lowest);
}

double EvaluatePayoff(const ProblemSpec& spec, std::span<const double> s) {
  if (spec.payoff.kind == PayoffKind::kParaboloid) return ParaboloidPayoff(s);
  return RainbowPutPayoff(s, spec.payoff.strike, spec.payoff.rate, spec.T);
}

Eigen::VectorXd MapInput(std::span<const double> u, const ProblemSpec& spec) {
  Eigen::VectorXd x(spec.d);
  const double width = spec.b - spec.a;
  for (int i = 0; i < spec.d; ++i) x[i] = spec.a + width * u[static_cast<std::size_t>(i)];
  return x;
}

Sample MapHeat(std::span<const double> u, const ProblemSpec& spec) {
  if (spec.dynamics != DynamicsCase::kConstant) {
    throw ConfigError("MapHeat needs constant dynamics");
  }
  CheckPointSize(u, spec);
  const int d = spec.d;
  Sample out{MapInput(u, spec), 0.0};
  const Eigen::VectorXd z = GaussianBlock(u, static_cast<std::size_t>(d), d, std::sqrt(spec.T));
  Eigen::VectorXd s(d);
  for (int i = 0; i < d; ++i) {
    double noise = 0.0;
    for (int j = 0; j < d; ++j) noise += spec.diffusion(i, j) * z[j];
    s[i] = (spec.drift[i] * spec.T + out.x[i]) + noise;
  }
  out.y = EvaluatePayoff(spec, {s.data(), static_cast<std::size_t>(d)});
  return out;
}

Eigen::VectorXd GbmTerminal(const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                            const ProblemSpec& spec) {
  Eigen::VectorXd s(spec.d);
  for (int i = 0; i < spec.d; ++i) {
    const double norm2 = spec.diffusion.row(i).squaredNorm();
    s[i] = x[i] * std::exp((spec.drift[i] - 0.5 * norm2) * spec.T + spec.diffusion.row(i).dot(z));
  }
  return s;
}

Sample MapGbm(std::span<const double> u, const ProblemSpec& spec) {
  if (spec.dynamics != DynamicsCase::kGeometric) {
    throw ConfigError("MapGbm needs geometric dynamics");
  }
  CheckPointSize(u, spec);
  Sample out{MapInput(u, spec), 0.0};
  const Eigen::VectorXd z =
      GaussianBlock(u, static_cast<std::size_t>(spec.d), spec.d, std::sqrt(spec.T));
  const Eigen::VectorXd s = GbmTerminal(out.x, z, spec);
  out.y = EvaluatePayoff(spec, {s.data(), static_cast<std::size_t>(spec.d)});
  return out;
}

Sample MapEuler(std::span<const double> u, const ProblemSpec& spec) {
  if (spec.dynamics != DynamicsCase::kAffineEuler) {
    throw ConfigError("MapEuler needs affine_euler dynamics");
  }
  CheckPointSize(u, spec);
  const int d = spec.d;
  const double dt = spec.T / spec.M;
  const double scale = std::sqrt(dt);
  Sample out{MapInput(u, spec), 0.0};
  Eigen::VectorXd state = out.x;
  Eigen::VectorXd next(d);
  std::vector<Eigen::VectorXd> columns(static_cast<std::size_t>(d));
  for (int m = 0; m < spec.M; ++m) {
    const Eigen::VectorXd z =
        GaussianBlock(u, static_cast<std::size_t>(d) * (static_cast<std::size_t>(m) + 1), d, scale);
    const Eigen::VectorXd mu = spec.euler_drift.Apply(state);
    for (int j = 0; j < d; ++j) columns[j] = spec.euler_diffusion[j].Apply(state);
    for (int i = 0; i < d; ++i) {
      double noise = 0.0;
      for (int j = 0; j < d; ++j) noise += columns[j][i] * z[j];
      next[i] = (state[i] + mu[i] * dt) + noise;
    }
    state = next;
  }
  out.y = EvaluatePayoff(spec, {state.data(), static_cast<std::size_t>(d)});
  return out;
}

Sample MapSample(std::span<const double> u, const ProblemSpec& spec) {
  switch (spec.dynamics) {
    case DynamicsCase::kConstant:
      return MapHeat(u, spec);
    case DynamicsCase::kGeometric:
      return MapGbm(u, spec);
    case DynamicsCase::kAffineEuler:
      return MapEuler(u, spec);
  }
  throw ConfigError("unknown dynamics");
}

LabeledBatch MakeLabeledBatch(const PointSet& u, const ProblemSpec& spec) {
  if (u.s() != spec.input_dim()) {
    throw ShapeError("point set dimension " + std::to_string(u.s()) + " != d + D = " +
                     std::to_string(spec.input_dim()));
  }
  LabeledBatch batch;
  batch.n = u.n();
  batch.d = spec.d;
  batch.x.resize(u.n() * static_cast<std::size_t>(spec.d));
  batch.y.resize(u.n());
  ParallelFor(u.n(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Sample s = MapSample(u.row(i), spec);
      std::copy(s.x.data(), s.x.data() + spec.d,
                batch.x.begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(spec.d)));
      batch.y[i] = s.y;
    }
  });
  return batch;
}

double HeatExact(double t, std::span<const double> x) {
  return ParaboloidPayoff(x) + 2.0 * static_cast<double>(x.size()) * t;
}

bool HasClosedForm(const ProblemSpec& spec) {
  return spec.dynamics == DynamicsCase::kConstant &&
         spec.payoff.kind == PayoffKind::kParaboloid;
}

double ClosedFormSolution(const ProblemSpec& spec, std::span<const double> x) {
  if (!HasClosedForm(spec)) {
    throw ConfigError("problem '" + spec.name + "' has no closed-form solution");
  }
  double sum = 0.0;
  for (int i = 0; i < spec.d; ++i) {
    const double m = x[static_cast<std::size_t>(i)] + spec.drift[i] * spec.T;
    sum += m * m;
  }
  return sum + spec.T * spec.diffusion.squaredNorm();
}

Eigen::MatrixXd Cholesky(const Eigen::MatrixXd& q) {
  const Eigen::Index n = q.rows();
  if (q.cols() != n) throw FactorizationError("Cholesky needs a square matrix");
  if (n > 0 && (q - q.transpose()).cwiseAbs().maxCoeff() >
                   1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff())) {
    throw FactorizationError("Cholesky needs a symmetric matrix");
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double diag = q(j, j);
    for (Eigen::Index k = 0; k < j; ++k) diag -= c(j, k) * c(j, k);
    if (!(diag > 0.0)) throw FactorizationError("matrix is not positive definite");
    c(j, j) = std::sqrt(diag);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double v = q(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= c(i, k) * c(j, k);
      c(i, j) = v / c(j, j);
    }
  }
  return c;
}

Eigen::MatrixXd BsCorrelation(int d) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Constant(d, d, 0.5);
  q.diagonal().setOnes();
  return q;
}

Eigen::MatrixXd BsSigma(int d) {
  Eigen::VectorXd beta(d);
  for (int i = 0; i < d; ++i) beta[i] = 0.1 + static_cast<double>(i + 1) / (2.0 * d);
  return beta.asDiagonal() * Cholesky(BsCorrelation(d));
}

namespace {

void CheckBsInputs(double x, double sigma, double T) {
  if (!(x > 0.0) || !(sigma > 0.0) || !(T > 0.0)) {
    throw DomainError("Black-Scholes formula needs x, sigma, T > 0");
  }
}

}  // namespace

double BsPut1d(double x, double strike, double r, double sigma, double T) {
  CheckBsInputs(x, sigma, T);
  const double vol = sigma * std::sqrt(T);
  const double d1 = (std::log(x / strike) + (r + 0.5 * sigma * sigma) * T) / vol;
  const double d2 = d1 - vol;
  return strike * std::exp(-r * T) * NormalCdf(-d2) - x * NormalCdf(-d1);
}

double BsCall1d(double x, double strike, double r, double sigma, double T) {
  CheckBsInputs(x, sigma, T);
  const double vol = sigma * std::sqrt(T);
  const double d1 = (std::log(x / strike) + (r + 0.5 * sigma * sigma) * T) / vol;
  const double d2 = d1 - vol;
  return x * NormalCdf(d1) - strike * std::exp(-r * T) * NormalCdf(d2);
}

std::vector<OracleEstimate> SolutionOracleBatch(std::span<const double> xs,
                                                const ProblemSpec& spec, std::size_t n,
                                                const SamplerSpec& sampler, int replicates) {
  const int d = spec.d;
  const auto du = static_cast<std::size_t>(d);
  if (xs.size() % du != 0) throw ShapeError("oracle inputs must be count x d");
  if (n < 2) throw DomainError("oracle needs at least two samples");
  const std::size_t count = xs.size() / du;
  const int noise_dims = spec.label_dim();

  std::size_t groups = 1;
  if (IsNetMethod(sampler.method)) {
    if (replicates < 2 || !std::has_single_bit(static_cast<unsigned>(replicates)) ||
        !std::has_single_bit(n) || n < 2 * static_cast<std::size_t>(replicates)) {
      throw DomainError("RQMC oracle needs power-of-two n >= 2 * replicates (power of two)");
    }
    groups = static_cast<std::size_t>(replicates);
  }
  const std::size_t per_group = n / groups;

  // For constant dynamics S_T = x + w_k, for geometric dynamics S_T = x * w_k
  // (componentwise); w_k is computed once per path. Affine Euler paths keep
  // their raw Gaussian increments and are simulated per point.
  const bool euler = spec.dynamics == DynamicsCase::kAffineEuler;
  const Eigen::Index path_cols = euler ? noise_dims : d;
  Eigen::MatrixXd paths(static_cast<Eigen::Index>(n), path_cols);
  for (std::size_t g = 0; g < groups; ++g) {
    SamplerSpec rep = sampler;
    rep.s = noise_dims;
    rep.seed = groups == 1 ? sampler.seed : HashCombine(sampler.seed, g);
    const PointSet u = Generate(rep, per_group);
    ParallelFor(per_group, [&](std::size_t begin, std::size_t end) {
      Eigen::VectorXd z(noise_dims);
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d);
      const double scale = euler ? std::sqrt(spec.T / spec.M) : std::sqrt(spec.T);
      for (std::size_t k = begin; k < end; ++k) {
        const auto row = u.row(k);
        for (int i = 0; i < noise_dims; ++i) {
          z[i] = scale * InverseNormalCdf(row[static_cast<std::size_t>(i)]);
        }
        const auto out_row = static_cast<Eigen::Index>(g * per_group + k);
        if (euler) {
          paths.row(out_row) = z.transpose();
        } else if (spec.dynamics == DynamicsCase::kGeometric) {
          paths.row(out_row) = GbmTerminal(ones, z, spec).transpose();
        } else {
          paths.row(out_row) = (spec.drift * spec.T + spec.diffusion * z).transpose();
        }
      }
    });
  }

  std::vector<OracleEstimate> out(count);
  ParallelFor(
      count,
      [&](std::size_t begin, std::size_t end) {
        Eigen::VectorXd s(d);
        Eigen::VectorXd next(d);
        std::vector<Eigen::VectorXd> columns(du);
        std::vector<double> group_means(groups);
        for (std::size_t p = begin; p < end; ++p) {
          const double* x = xs.data() + p * du;
          auto terminal = [&](std::size_t k) {
            const auto r = static_cast<Eigen::Index>(k);
            if (spec.dynamics == DynamicsCase::kGeometric) {
              for (int i = 0; i < d; ++i) s[i] = x[i] * paths(r, i);
            } else if (spec.dynamics == DynamicsCase::kConstant) {
              for (int i = 0; i < d; ++i) s[i] = x[i] + paths(r, i);
            } else {
              const double dt = spec.T / spec.M;
              for (int i = 0; i < d; ++i) s[i] = x[i];
              for (int m = 0; m < spec.M; ++m) {
                const Eigen::VectorXd mu = spec.euler_drift.Apply(s);
                for (int j = 0; j < d; ++j) columns[j] = spec.euler_diffusion[j].Apply(s);
                for (int i = 0; i < d; ++i) {
                  double noise = 0.0;
                  for (int j = 0; j < d; ++j) noise += columns[j][i] * paths(r, m * d + j);
                  next[i] = (s[i] + mu[i] * dt) + noise;
                }
                s = next;
              }
            }
            return EvaluatePayoff(spec, {s.data(), du});
          };
          // Sums are shifted by the first payoff so that a degenerate
          // (deterministic) payoff gives an exact mean and zero variance.
          double shift = 0.0;
          double total = 0.0;
          double total_sq = 0.0;
          for (std::size_t g = 0; g < groups; ++g) {
            double group_sum = 0.0;
            for (std::size_t k = g * per_group; k < (g + 1) * per_group; ++k) {
              const double y = terminal(k);
              if (k == 0) shift = y;
              const double c = y - shift;
              group_sum += c;
              total_sq += c * c;
            }
            group_means[g] = group_sum / static_cast<double>(per_group);
            total += group_sum;
          }
          const double nd = static_cast<double>(n);
          const double mean_c = total / nd;
          out[p].estimate = shift + mean_c;
          if (groups == 1) {
            const double var = std::max(0.0, (total_sq - nd * mean_c * mean_c) / (nd - 1.0));
            out[p].std_error = std::sqrt(var / nd);
          } else {
            double ss = 0.0;
            for (double gm : group_means) ss += (gm - mean_c) * (gm - mean_c);
            const double gd = static_cast<double>(groups);
            out[p].std_error = std::sqrt(ss / (gd - 1.0) / gd);
          }
        }
      },
      1);
  return out;
}

OracleEstimate BsOracle(std::span<const double> x, const ProblemSpec& spec, std::size_t n,
                        const SamplerSpec& sampler, int replicates) {
  if (spec.dynamics != DynamicsCase::kGeometric) {
    throw ConfigError("the Black-Scholes oracle needs geometric dynamics");
  }
  if (x.size() != static_cast<std::size_t>(spec.d)) {
    throw ShapeError("oracle point must have d entries");
  }
  return SolutionOracleBatch(x, spec, n, sampler, replicates).front();
}

}  // namespace krq
