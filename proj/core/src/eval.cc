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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "krq/error.h"
#include "krq/hash.h"

namespace krq {
namespace {

constexpr uint64_t kEvalTag = 0x4556414CULL;  // "EVAL"

std::filesystem::path CachePath(const ProblemSpec& problem, std::size_t m, uint64_t seed,
                                const OracleConfig& oracle) {
  const nlohmann::json request = {{"problem", ToJson(problem)},
                                  {"m", m},
                                  {"seed", seed},
                                  {"oracle_log2n", oracle.log2n},
                                  {"oracle_method", std::string(ToString(oracle.method))},
                                  {"oracle_replicates", oracle.replicates},
                                  {"oracle_seed", oracle.seed}};
  char name[40];
  std::snprintf(name, sizeof(name), "oracle-%016llx.bin",
                static_cast<unsigned long long>(Fnv1a64(request.dump())));
  return oracle.cache_dir / name;
}

bool ReadCache(const std::filesystem::path& path, EvaluationSet& set) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  uint64_t m = 0;
  in.read(reinterpret_cast<char*>(&m), sizeof(m));
  if (!in || m != set.m) return false;
  set.exact.resize(set.m);
  set.exact_std_error.resize(set.m);
  in.read(reinterpret_cast<char*>(set.exact.data()),
          static_cast<std::streamsize>(set.m * sizeof(double)));
  in.read(reinterpret_cast<char*>(set.exact_std_error.data()),
          static_cast<std::streamsize>(set.m * sizeof(double)));
  return static_cast<bool>(in);
}

void WriteCache(const std::filesystem::path& path, const EvaluationSet& set) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write oracle cache " + tmp.string());
    const uint64_t m = set.m;
    out.write(reinterpret_cast<const char*>(&m), sizeof(m));
    out.write(reinterpret_cast<const char*>(set.exact.data()),
              static_cast<std::streamsize>(set.m * sizeof(double)));
    out.write(reinterpret_cast<const char*>(set.exact_std_error.data()),
              static_cast<std::streamsize>(set.m * sizeof(double)));
  }
  std::filesystem::rename(tmp, path);
}

void FillReference(const ProblemSpec& problem, std::span<const double> xs,
                   std::vector<double>& exact, std::vector<double>& std_error,
                   const OracleConfig& oracle) {
  const auto d = static_cast<std::size_t>(problem.d);
  const std::size_t count = xs.size() / d;
  exact.resize(count);
  if (HasClosedForm(problem)) {
    std_error.clear();
    for (std::size_t i = 0; i < count; ++i) {
      exact[i] = ClosedFormSolution(problem, xs.subspan(i * d, d));
    }
    return;
  }
  const SamplerSpec sampler{oracle.method, problem.label_dim(), oracle.seed};
  const auto estimates = SolutionOracleBatch(xs, problem, std::size_t{1} << oracle.log2n,
                                             sampler, oracle.replicates);
  std_error.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    exact[i] = estimates[i].estimate;
    std_error[i] = estimates[i].std_error;
  }
}

}  // namespace

EvaluationSet BuildEvaluationSet(const ProblemSpec& problem, std::size_t m, uint64_t seed,
                                 const OracleConfig& oracle) {
  if (m < 1) throw DomainError("evaluation needs m >= 1");
  EvaluationSet set;
  set.m = m;
  set.seed = seed;
  set.d = problem.d;
  const PointSet u = Generate({SamplerMethod::kIid, problem.d, seed ^ kEvalTag}, m);
  set.x.resize(m * static_cast<std::size_t>(problem.d));
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::VectorXd x = MapInput(u.row(i), problem);
    for (int k = 0; k < problem.d; ++k) set.x[i * static_cast<std::size_t>(problem.d) + k] = x[k];
  }
  set.from_oracle = !HasClosedForm(problem);
  if (set.from_oracle && !oracle.cache_dir.empty()) {
    const auto path = CachePath(problem, m, seed, oracle);
    if (ReadCache(path, set)) return set;
    FillReference(problem, set.x, set.exact, set.exact_std_error, oracle);
    WriteCache(path, set);
    return set;
  }
  FillReference(problem, set.x, set.exact, set.exact_std_error, oracle);
  return set;
}

EvalReport RelativeL2(const NetworkParams& params, const EvaluationSet& set) {
  const Eigen::VectorXd pred = Predict(params, AsBatch(set.x, set.d));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < set.m; ++i) {
    const double diff = pred[static_cast<Eigen::Index>(i)] - set.exact[i];
    num += diff * diff;
    den += set.exact[i] * set.exact[i];
  }
  if (!(den > 0.0)) {
    throw DomainError("relative L2 error undefined: reference solution is identically zero");
  }
  EvalReport report;
  report.rel_l2 = std::sqrt(num / den);
  report.m = set.m;
  report.seed = set.seed;
  if (set.from_oracle) {
    double ss = 0.0;
    for (double se : set.exact_std_error) ss += se * se;
    report.oracle_std_error = std::sqrt(ss / static_cast<double>(set.m));
  }
  return report;
}

EvalReport RelativeL2(const NetworkParams& params, const ProblemSpec& problem, std::size_t m,
                      uint64_t seed, const OracleConfig& oracle) {
  return RelativeL2(params, BuildEvaluationSet(problem, m, seed, oracle));
}

ProjectionGrid MakeProjectionGrid(const NetworkParams& params, const ProblemSpec& problem,
                                  const std::vector<std::optional<double>>& fixed,
                                  int resolution, const OracleConfig& oracle) {
  if (static_cast<int>(fixed.size()) != problem.d) {
    throw ShapeError("projection needs one assignment slot per coordinate");
  }
  if (resolution < 2) throw DomainError("projection grid resolution must be >= 2");
  std::vector<int> free;
  for (int k = 0; k < problem.d; ++k) {
    if (!fixed[static_cast<std::size_t>(k)]) free.push_back(k);
  }
  if (free.size() != 2) throw ConfigError("projection needs exactly two free coordinates");

  ProjectionGrid grid;
  grid.free_first = free[0];
  grid.free_second = free[1];
  grid.resolution = resolution;
  grid.from_oracle = !HasClosedForm(problem);
  grid.oracle_samples = grid.from_oracle ? std::size_t{1} << oracle.log2n : 0;

  const auto d = static_cast<std::size_t>(problem.d);
  const auto cells = static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution);
  std::vector<double> xs(cells * d);
  // Division last so that the final node lands on b exactly.
  auto node = [&](int i) { return problem.a + (problem.b - problem.a) * i / (resolution - 1); };
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const std::size_t c = static_cast<std::size_t>(i) * resolution + j;
      for (std::size_t k = 0; k < d; ++k) xs[c * d + k] = fixed[k].value_or(0.0);
      xs[c * d + static_cast<std::size_t>(free[0])] = node(i);
      xs[c * d + static_cast<std::size_t>(free[1])] = node(j);
    }
  }
  std::vector<double> exact, std_error;
  FillReference(problem, xs, exact, std_error, oracle);
  const Eigen::VectorXd pred = Predict(params, AsBatch(xs, problem.d));
  grid.cells.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    GridCell& cell = grid.cells[c];
    cell.x1 = xs[c * d + static_cast<std::size_t>(free[0])];
    cell.x2 = xs[c * d + static_cast<std::size_t>(free[1])];
    cell.prediction = pred[static_cast<Eigen::Index>(c)];
    cell.exact = exact[c];
    const double err = std::abs(cell.prediction - cell.exact);
    cell.rel_err = cell.exact != 0.0 ? err / std::abs(cell.exact) : err;
    cell.exact_std_error = std_error.empty() ? 0.0 : std_error[c];
  }
  return grid;
}

}  // namespace krq
