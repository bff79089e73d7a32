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

#include "cli.h"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "krq/checkpoint.h"
#include "krq/csv.h"
#include "krq/error.h"
#include "krq/eval.h"
#include "krq/hash.h"
#include "krq/lds.h"
#include "krq/problems.h"
#include "krq/quadstudy.h"
#include "krq/train.h"

namespace krq::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string UtcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string HexHash(const std::string& bytes) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << Fnv1a64(bytes);
  return s.str();
}

// Manifest written next to a single-file output: out/rates.csv -> out/rates.manifest.json.
fs::path ManifestFor(const fs::path& output) {
  fs::path m = output;
  return m.replace_extension(".manifest.json");
}

fs::path Resolve(const fs::path& out_dir, const fs::path& p) {
  if (p.empty() || p.is_absolute() || out_dir.empty()) return p;
  return out_dir / p;
}

std::ofstream OpenOutput(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  return f;
}

// Content hash of a checkpoint: the tensor file followed by its spec sidecar.
std::string CheckpointHash(const fs::path& path) {
  std::string bytes;
  for (const fs::path& p : {path, SidecarPath(path)}) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot read " + p.string());
    bytes.append(std::istreambuf_iterator<char>(f), {});
  }
  return HexHash(bytes);
}

json ReadJsonFile(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// "heat", "bs" or a path to a JSON problem object.
ProblemSpec ResolveProblem(const std::string& problem, std::optional<int> d) {
  if (problem.ends_with(".json")) return ProblemFromJson(ReadJsonFile(problem));
  if (!d) throw UsageError("--d is required for built-in problem '" + problem + "'");
  return ProblemFromJson(json{{"name", problem}, {"d", *d}});
}

// Accumulates the manifest of one command and writes it on success.
class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& args)
      : started_(UtcTimestamp()), t0_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["argv"] = args;
    doc_["started_at"] = started_;
  }

  // The hash covers what determines the results. Locations (the oracle
  // cache, a checkpoint path whose contents are hashed) are left out.
  void Config(const json& config) {
    doc_["config"] = config;
    json hashed = config;
    if (hashed.contains("oracle") && hashed["oracle"].is_object()) hashed["oracle"].erase("cache_dir");
    if (hashed.contains("checkpoint_hash")) hashed.erase("checkpoint");
    doc_["config_hash"] = "fnv1a64:" + HexHash(hashed.dump());
  }
  void Set(const std::string& key, json value) { doc_[key] = std::move(value); }
  void Output(const fs::path& p) { outputs_.push_back(p.string()); }

  void Write(const fs::path& path) {
    for (const auto& o : outputs_) {
      if (!fs::exists(o)) throw IoError("declared output missing: " + o);
    }
    doc_["outputs"] = outputs_;
    doc_["finished_at"] = UtcTimestamp();
    doc_["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    auto f = OpenOutput(path);
    f << doc_.dump(2) << "\n";
  }

 private:
  json doc_;
  std::string started_;
  std::chrono::steady_clock::time_point t0_;
  std::vector<std::string> outputs_;
};

// ---------------------------------------------------------------- gen-points

struct GenPointsArgs {
  std::string method = "owen";
  int dims = 1;
  int log2n = 10;
  uint64_t seed = 0;
  uint64_t start = 0;
  std::string out;
  std::string out_dir;
};

void RunGenPoints(const GenPointsArgs& a, std::ostream& out) {
  if (a.log2n < 0 || a.log2n > 32) throw UsageError("--log2n must be in [0, 32]");
  const SamplerSpec spec{ParseSamplerMethod(a.method), a.dims, a.seed};
  const std::size_t n = std::size_t{1} << a.log2n;
  const PointSet points = Generate(spec, n, a.start);

  std::vector<std::string> header{"i"};
  for (int j = 1; j <= a.dims; ++j) header.push_back("u" + std::to_string(j));
  std::ofstream file;
  std::ostream* sink = &out;
  if (!a.out.empty()) {
    file = OpenOutput(Resolve(a.out_dir, a.out));
    sink = &file;
  }
  CsvWriter csv(*sink, header);
  for (std::size_t i = 0; i < n; ++i) {
    csv.Field(static_cast<unsigned long long>(a.start + i));
    for (int j = 0; j < a.dims; ++j) csv.Field(points(i, j));
    csv.EndRow();
  }
}

// ---------------------------------------------------------------------- train

struct TrainArgs {
  std::string config;
  std::string preset;
  std::string out_dir = ".";
  std::string sweep;
  std::optional<std::string> sampler;
  std::optional<std::string> rqmc_mode;
  std::optional<int> batch_log2;
  std::optional<int> iterations;
  std::optional<int> eval_every;
  std::optional<int> eval_log2m;
  std::optional<uint64_t> seed;
  std::optional<bool> batch_norm;
  std::optional<std::string> cache_dir;
};

TrainingConfig BuildTrainingConfig(const TrainArgs& a) {
  json j = json::object();
  if (!a.config.empty()) j = ReadJsonFile(a.config);
  if (!a.preset.empty()) j["preset"] = a.preset;
  if (!j.contains("preset") && !j.contains("problem")) {
    throw UsageError("train needs --config or --preset");
  }
  if (a.sampler) j["sampler"] = *a.sampler;
  if (a.rqmc_mode) j["rqmc_mode"] = *a.rqmc_mode;
  if (a.batch_log2) j["batch_log2"] = *a.batch_log2;
  if (a.iterations) j["iterations"] = *a.iterations;
  if (a.eval_every) j["eval_every"] = *a.eval_every;
  if (a.eval_log2m) j["eval_log2m"] = *a.eval_log2m;
  if (a.batch_norm) j["network"]["batch_norm"] = *a.batch_norm;
  TrainingConfig config = TrainingConfigFromJson(j);
  if (a.seed) config.seeds.net = config.seeds.data = *a.seed;
  config.oracle.cache_dir = a.cache_dir ? fs::path(*a.cache_dir) : fs::path(a.out_dir) / "oracle_cache";
  config.Validate();
  return config;
}

void WriteSummary(const fs::path& path, const RunSummary& s) {
  auto f = OpenOutput(path);
  CsvWriter csv(f, {"method", "batch_size", "seed", "final_rel_l2", "norm_mode"});
  csv.Field(s.method).Field(s.batch_size).Field(static_cast<unsigned long long>(s.seed));
  csv.Field(s.final_rel_l2).Field(s.norm_mode);
  csv.EndRow();
}

// Writes log.csv, eval.csv, summary.csv, checkpoint.bin(+.json) and
// manifest.json for one finished run.
RunSummary WriteRun(const fs::path& dir, const TrainingConfig& config, const TrainResult& r,
                    Manifest& manifest) {
  fs::create_directories(dir);
  {
    auto f = OpenOutput(dir / "log.csv");
    CsvWriter csv(f, {"iteration", "loss", "lr"});
    for (const auto& l : r.log.losses) csv.Field(l.iteration).Field(l.loss).Field(l.lr).EndRow();
  }
  {
    auto f = OpenOutput(dir / "eval.csv");
    CsvWriter csv(f, {"iteration", "rel_l2"});
    for (const auto& e : r.log.evals) csv.Field(e.iteration).Field(e.rel_l2).EndRow();
  }
  WriteSummary(dir / "summary.csv", r.log.summary);
  SaveCheckpoint(dir / "checkpoint.bin", r.params);

  for (const char* name : {"log.csv", "eval.csv", "summary.csv", "checkpoint.bin"}) {
    manifest.Output(dir / name);
  }
  manifest.Output(SidecarPath(dir / "checkpoint.bin"));
  manifest.Config(ToJson(config));
  manifest.Set("norm_mode", r.log.summary.norm_mode);
  manifest.Set("run_wall_seconds", r.log.summary.wall_seconds);
  manifest.Write(dir / "manifest.json");
  return r.log.summary;
}

void RunTrain(const TrainArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  TrainingConfig config = BuildTrainingConfig(a);
  const fs::path out_dir = a.out_dir;
  const EvaluationSet eval_set = BuildEvaluationSet(
      config.problem, std::size_t{1} << config.eval_log2m, config.seeds.eval, config.oracle);

  if (a.sweep.empty()) {
    Manifest manifest("train", argv);
    const TrainResult r = Train(config, eval_set);
    const RunSummary s = WriteRun(out_dir, config, r, manifest);
    out << "final rel_l2 " << FormatDouble(s.final_rel_l2) << " (" << s.method << ", seed "
        << s.seed << ")\n";
    return;
  }

  const auto eq = a.sweep.find('=');
  if (eq == std::string::npos || a.sweep.substr(0, eq) != "seeds") {
    throw UsageError("--sweep expects seeds=A..B");
  }
  const auto [lo, hi] = ParseRange(a.sweep.substr(eq + 1));
  if (lo < 0 || hi < lo) throw UsageError("--sweep seed range must satisfy 0 <= A <= B");

  Manifest sweep_manifest("train", argv);
  std::vector<double> finals;
  std::vector<RunSummary> summaries;
  for (long long k = lo; k <= hi; ++k) {
    TrainingConfig run = config;
    run.seeds.net = run.seeds.data = static_cast<uint64_t>(k);
    Manifest manifest("train", argv);
    manifest.Set("sweep_member", k);
    const fs::path dir = out_dir / ("seed_" + std::to_string(k));
    const TrainResult r = Train(run, eval_set);
    summaries.push_back(WriteRun(dir, run, r, manifest));
    finals.push_back(summaries.back().final_rel_l2);
    sweep_manifest.Output(dir / "manifest.json");
    out << "seed " << k << ": final rel_l2 " << FormatDouble(finals.back()) << "\n";
  }

  double mean = 0.0;
  for (double v : finals) mean += v;
  mean /= static_cast<double>(finals.size());
  double ss = 0.0;
  for (double v : finals) ss += (v - mean) * (v - mean);
  const double sd = finals.size() > 1 ? std::sqrt(ss / static_cast<double>(finals.size() - 1)) : 0.0;

  {
    auto f = OpenOutput(out_dir / "summary.csv");
    CsvWriter csv(f, {"method", "batch_size", "runs", "seed_first", "seed_last",
                      "mean_rel_l2", "std_rel_l2", "norm_mode"});
    csv.Field(summaries.front().method).Field(summaries.front().batch_size);
    csv.Field(finals.size()).Field(lo).Field(hi).Field(mean).Field(sd);
    csv.Field(summaries.front().norm_mode).EndRow();
  }
  {
    auto f = OpenOutput(out_dir / "runs.csv");
    CsvWriter csv(f, {"method", "batch_size", "seed", "final_rel_l2", "norm_mode"});
    for (const auto& s : summaries) {
      csv.Field(s.method).Field(s.batch_size).Field(static_cast<unsigned long long>(s.seed));
      csv.Field(s.final_rel_l2).Field(s.norm_mode).EndRow();
    }
  }
  sweep_manifest.Output(out_dir / "summary.csv");
  sweep_manifest.Output(out_dir / "runs.csv");
  sweep_manifest.Config(ToJson(config));
  sweep_manifest.Set("sweep", {{"seeds_first", lo}, {"seeds_last", hi}});
  sweep_manifest.Write(out_dir / "manifest.json");
  out << "mean rel_l2 " << FormatDouble(mean) << " std " << FormatDouble(sd) << " over "
      << finals.size() << " runs\n";
}

// ----------------------------------------------------------------------- eval

struct EvalArgs {
  std::string checkpoint;
  std::string problem = "heat";
  std::optional<int> d;
  int m_log2 = 16;
  uint64_t seed = 1;
  std::string out = "eval.csv";
  std::string grid;
  std::vector<int> grid_free = {1, 2};
  std::optional<double> grid_fix;
  int grid_resolution = 50;
  int oracle_log2n = 18;
  int oracle_replicates = 16;
  std::string out_dir = ".";
  std::optional<std::string> cache_dir;
};

void RunEval(const EvalArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  const NetworkParams params = LoadCheckpoint(a.checkpoint);
  const ProblemSpec problem =
      ResolveProblem(a.problem, a.d ? a.d : std::optional<int>(params.spec.input_dim()));
  if (problem.d != params.spec.input_dim()) {
    throw ShapeError("checkpoint input dimension " + std::to_string(params.spec.input_dim()) +
                     " does not match problem dimension " + std::to_string(problem.d));
  }
  if (a.m_log2 < 0 || a.m_log2 > 30) throw UsageError("--m-log2 must be in [0, 30]");
  const fs::path out_dir = a.out_dir;
  OracleConfig oracle;
  oracle.log2n = a.oracle_log2n;
  oracle.replicates = a.oracle_replicates;
  oracle.cache_dir = a.cache_dir ? fs::path(*a.cache_dir) : out_dir / "oracle_cache";

  Manifest manifest("eval", argv);
  const EvalReport report =
      RelativeL2(params, problem, std::size_t{1} << a.m_log2, a.seed, oracle);
  const fs::path eval_path = Resolve(out_dir, a.out);
  {
    auto f = OpenOutput(eval_path);
    CsvWriter csv(f, {"rel_l2", "m", "seed", "oracle_std_error", "norm_mode"});
    csv.Field(report.rel_l2).Field(report.m).Field(static_cast<unsigned long long>(report.seed));
    if (report.oracle_std_error) {
      csv.Field(*report.oracle_std_error);
    } else {
      csv.Field(std::string_view{});
    }
    csv.Field("eval").EndRow();
  }
  manifest.Output(eval_path);
  out << "rel_l2 " << FormatDouble(report.rel_l2) << "\n";

  if (!a.grid.empty()) {
    if (a.grid_free.size() != 2) throw UsageError("--grid-free needs two coordinates");
    std::vector<std::optional<double>> fixed(static_cast<std::size_t>(problem.d),
                                             a.grid_fix.value_or(0.5 * (problem.a + problem.b)));
    for (int c : a.grid_free) {
      if (c < 1 || c > problem.d) throw UsageError("--grid-free coordinate out of range");
      fixed[static_cast<std::size_t>(c - 1)].reset();
    }
    const ProjectionGrid grid = MakeProjectionGrid(params, problem, fixed, a.grid_resolution, oracle);
    const fs::path grid_path = Resolve(out_dir, a.grid);
    auto f = OpenOutput(grid_path);
    CsvWriter csv(f, {"x1", "x2", "prediction", "exact", "rel_err", "exact_std_error"});
    for (const auto& c : grid.cells) {
      csv.Field(c.x1).Field(c.x2).Field(c.prediction).Field(c.exact).Field(c.rel_err);
      csv.Field(c.exact_std_error).EndRow();
    }
    manifest.Output(grid_path);
    manifest.Set("grid", {{"free", a.grid_free},
                          {"resolution", grid.resolution},
                          {"from_oracle", grid.from_oracle},
                          {"oracle_samples", grid.oracle_samples}});
  }
  manifest.Config({{"checkpoint", a.checkpoint},
                   {"checkpoint_hash", CheckpointHash(a.checkpoint)},
                   {"problem", ToJson(problem)},
                   {"m_log2", a.m_log2},
                   {"seed", a.seed},
                   {"oracle", {{"log2n", a.oracle_log2n}, {"replicates", a.oracle_replicates}}}});
  manifest.Set("norm_mode", "eval");
  manifest.Write(ManifestFor(eval_path));
}

// ----------------------------------------------------------------- quad-study

struct QuadArgs {
  std::string problem = "heat";
  std::optional<int> d = 2;
  std::string n_log2 = "6..13";
  int replicates = 32;
  uint64_t seed = 0;
  uint64_t net_seed = 0;
  std::string checkpoint;
  std::vector<std::string> methods = {"iid", "owen"};
  int ref_log2n = 18;
  int ref_replicates = 16;
  bool retrain = false;
  int retrain_iterations = 500;
  std::string out = "rates.csv";
  std::string out_dir = ".";
};

void RunQuadStudy(const QuadArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  const ProblemSpec problem = ResolveProblem(a.problem, a.d);
  const auto [lo, hi] = ParseRange(a.n_log2);
  RateStudyConfig config;
  config.methods.clear();
  for (const auto& m : a.methods) config.methods.push_back(ParseSamplerMethod(m));
  config.min_log2n = static_cast<int>(lo);
  config.max_log2n = static_cast<int>(hi);
  config.replicates = a.replicates;
  config.seed = a.seed;
  config.ref_log2n = a.ref_log2n;
  config.ref_replicates = a.ref_replicates;

  NetworkParams params =
      a.checkpoint.empty()
          ? XavierInit(NetworkSpec::ForInputDim(problem.d, 4, 6, true, a.net_seed))
          : LoadCheckpoint(a.checkpoint);
  if (params.spec.input_dim() != problem.d) {
    throw ShapeError("network input dimension does not match the problem");
  }

  Manifest manifest("quad-study", argv);
  RateTable table;
  if (a.retrain) {
    RetrainConfig rc;
    rc.iterations = a.retrain_iterations;
    table = RetrainRateStudy(params, problem, config, rc);
  } else {
    table = RateStudy(params, problem, config);
  }

  const fs::path rates_path = Resolve(a.out_dir, a.out);
  const fs::path slopes_path = rates_path.parent_path() / "slopes.csv";
  {
    auto f = OpenOutput(rates_path);
    CsvWriter csv(f, {"method", "n", "replicate", "abs_error"});
    for (const auto& r : table.rows) {
      csv.Field(ToString(r.method)).Field(r.n).Field(r.replicate).Field(r.abs_error).EndRow();
    }
  }
  {
    auto f = OpenOutput(slopes_path);
    CsvWriter csv(f, {"method", "slope", "intercept", "r2"});
    for (const auto& fit : table.fits) {
      csv.Field(ToString(fit.method)).Field(fit.slope).Field(fit.intercept).Field(fit.r2).EndRow();
      out << ToString(fit.method) << ": slope " << FormatDouble(fit.slope) << ", r2 "
          << FormatDouble(fit.r2) << "\n";
    }
  }
  manifest.Output(rates_path);
  manifest.Output(slopes_path);
  json cfg = {{"problem", ToJson(problem)},
              {"methods", a.methods},
              {"n_log2", {lo, hi}},
              {"replicates", a.replicates},
              {"seed", a.seed},
              {"ref_log2n", a.ref_log2n},
              {"ref_replicates", a.ref_replicates},
              {"retrain", a.retrain}};
  if (a.checkpoint.empty()) {
    cfg["network"] = ToJson(params.spec);
  } else {
    cfg["checkpoint"] = a.checkpoint;
    cfg["checkpoint_hash"] = CheckpointHash(a.checkpoint);
  }
  if (a.retrain) cfg["retrain_iterations"] = a.retrain_iterations;
  manifest.Config(cfg);
  manifest.Set("network_state", a.retrain        ? "retrained per (method, n, replicate)"
                                : a.checkpoint.empty() ? "frozen after Xavier init"
                                                       : "frozen checkpoint");
  manifest.Set("statistic", a.retrain ? "excess risk vs exact solution" : "mean abs integration error");
  if (!a.retrain) {
    manifest.Set("reference", {{"value", table.reference.value},
                               {"ci95", table.reference.ci},
                               {"n_ref", table.reference.n_ref},
                               {"replicates", table.reference.replicate_means.size()}});
  }
  manifest.Write(ManifestFor(rates_path));
}

// ------------------------------------------------------------------ bs-oracle

struct OracleArgs {
  std::string problem = "bs";
  std::optional<int> d = 1;
  std::vector<double> x = {5.0};
  int n_log2 = 20;
  std::string method = "owen";
  int replicates = 16;
  uint64_t seed = 0;
  std::string out;
  std::string out_dir = ".";
};

void RunBsOracle(const OracleArgs& a, std::ostream& out) {
  const ProblemSpec problem = ResolveProblem(a.problem, a.d);
  std::vector<double> x = a.x;
  if (x.size() == 1 && problem.d > 1) x.assign(static_cast<std::size_t>(problem.d), x[0]);
  if (static_cast<int>(x.size()) != problem.d) {
    throw UsageError("--x needs 1 or d = " + std::to_string(problem.d) + " values");
  }
  if (a.n_log2 < 1 || a.n_log2 > 30) throw UsageError("--n-log2 must be in [1, 30]");
  const SamplerSpec sampler{ParseSamplerMethod(a.method), problem.label_dim(), a.seed};
  const OracleEstimate est = SolutionOracleBatch(x, problem, std::size_t{1} << a.n_log2, sampler,
                                                 a.replicates)
                                 .front();

  std::optional<double> closed;
  if (problem.d == 1 && problem.dynamics == DynamicsCase::kGeometric &&
      problem.payoff.kind == PayoffKind::kRainbowPut) {
    closed = BsPut1d(x[0], problem.payoff.strike, problem.payoff.rate,
                     problem.diffusion(0, 0), problem.T);
  } else if (HasClosedForm(problem)) {
    closed = ClosedFormSolution(problem, x);
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!a.out.empty()) {
    file = OpenOutput(Resolve(a.out_dir, a.out));
    sink = &file;
  }
  CsvWriter csv(*sink, {"estimate", "std_error", "n", "method", "closed_form", "z_score"});
  csv.Field(est.estimate).Field(est.std_error).Field(std::size_t{1} << a.n_log2);
  csv.Field(ToString(sampler.method));
  if (closed) {
    csv.Field(*closed);
    csv.Field(est.std_error > 0.0 ? (est.estimate - *closed) / est.std_error : 0.0);
  } else {
    csv.Field(std::string_view{}).Field(std::string_view{});
  }
  csv.EndRow();
}

}  // namespace

std::pair<long long, long long> ParseRange(const std::string& text) {
  auto parse = [&](const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError("bad range '" + text + "'");
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const long long v = parse(text);
    return {v, v};
  }
  const long long lo = parse(text.substr(0, dots));
  const long long hi = parse(text.substr(dots + 2));
  if (hi < lo) throw UsageError("empty range '" + text + "'");
  return {lo, hi};
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"krq: deep-learning solvers for linear Kolmogorov PDEs with MC and RQMC sampling",
               "krq"};
  app.require_subcommand(1);

  GenPointsArgs gp;
  auto* gen = app.add_subcommand("gen-points", "Emit a (randomized) Sobol' point set as CSV");
  gen->add_option("--method", gp.method, "iid | digital_shift | owen")->capture_default_str();
  gen->add_option("--dims", gp.dims, "Dimension s")->capture_default_str();
  gen->add_option("--log2n", gp.log2n, "log2 of the number of points")->capture_default_str();
  gen->add_option("--seed", gp.seed, "Randomization seed")->capture_default_str();
  gen->add_option("--start", gp.start, "First sequence index")->capture_default_str();
  gen->add_option("--out", gp.out, "Output CSV (default stdout)");
  gen->add_option("--out-dir", gp.out_dir, "Base directory for relative paths");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a network by ERM and write logs");
  train->add_option("--config", ta.config, "JSON training config");
  train->add_option("--preset", ta.preset, "Built-in preset name");
  train->add_option("--out-dir", ta.out_dir, "Output directory")->capture_default_str();
  train->add_option("--sweep", ta.sweep, "Seed sweep, e.g. seeds=0..3");
  train->add_option("--sampler", ta.sampler, "iid | digital_shift | owen");
  train->add_option("--rqmc-mode", ta.rqmc_mode, "rescramble_each_batch | sequential_stream");
  train->add_option("--batch-log2", ta.batch_log2, "log2 batch size");
  train->add_option("--iterations", ta.iterations, "Iteration budget");
  train->add_option("--eval-every", ta.eval_every, "Relative L2 cadence");
  train->add_option("--eval-log2m", ta.eval_log2m, "log2 evaluation sample count");
  train->add_option("--seed", ta.seed, "Network and data seed");
  train->add_option("--batch-norm", ta.batch_norm, "Enable batch normalization");
  train->add_option("--cache-dir", ta.cache_dir, "Oracle cache directory");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Relative L2 error and projection grid of a checkpoint");
  eval->add_option("--checkpoint", ea.checkpoint, "checkpoint.bin")->required();
  eval->add_option("--problem", ea.problem, "heat | bs | problem.json")->capture_default_str();
  eval->add_option("--d", ea.d, "Dimension (defaults to the checkpoint's)");
  eval->add_option("--m-log2", ea.m_log2, "log2 evaluation sample count")->capture_default_str();
  eval->add_option("--seed", ea.seed, "Evaluation seed")->capture_default_str();
  eval->add_option("--out", ea.out, "Report CSV")->capture_default_str();
  eval->add_option("--grid", ea.grid, "Projection grid CSV");
  eval->add_option("--grid-free", ea.grid_free, "Two free coordinates (1-based)")->expected(2);
  eval->add_option("--grid-fix", ea.grid_fix, "Value of fixed coordinates (default midpoint)");
  eval->add_option("--grid-resolution", ea.grid_resolution)->capture_default_str();
  eval->add_option("--oracle-log2n", ea.oracle_log2n)->capture_default_str();
  eval->add_option("--oracle-replicates", ea.oracle_replicates)->capture_default_str();
  eval->add_option("--out-dir", ea.out_dir, "Base directory for outputs")->capture_default_str();
  eval->add_option("--cache-dir", ea.cache_dir, "Oracle cache directory");

  QuadArgs qa;
  auto* quad = app.add_subcommand("quad-study", "Integration-error rates of a fixed network");
  quad->add_option("--problem", qa.problem, "heat | bs | problem.json")->capture_default_str();
  quad->add_option("--d", qa.d, "Dimension")->capture_default_str();
  quad->add_option("--n-log2", qa.n_log2, "Range of log2 n, e.g. 6..13")->capture_default_str();
  quad->add_option("--replicates", qa.replicates)->capture_default_str();
  quad->add_option("--seed", qa.seed, "Stream seed")->capture_default_str();
  quad->add_option("--net-seed", qa.net_seed, "Xavier init seed")->capture_default_str();
  quad->add_option("--checkpoint", qa.checkpoint, "Use a trained network instead of Xavier init");
  quad->add_option("--methods", qa.methods, "Samplers to compare")->delimiter(',');
  quad->add_option("--ref-log2n", qa.ref_log2n)->capture_default_str();
  quad->add_option("--ref-replicates", qa.ref_replicates)->capture_default_str();
  quad->add_flag("--retrain", qa.retrain, "Retrain per sample and report excess risk");
  quad->add_option("--retrain-iterations", qa.retrain_iterations)->capture_default_str();
  quad->add_option("--out", qa.out, "Rates CSV; slopes.csv goes next to it")->capture_default_str();
  quad->add_option("--out-dir", qa.out_dir, "Base directory for outputs")->capture_default_str();

  OracleArgs oa;
  auto* oracle = app.add_subcommand("bs-oracle", "Feynman-Kac estimate of u(T, x)");
  oracle->add_option("--problem", oa.problem, "bs | heat | problem.json")->capture_default_str();
  oracle->add_option("--d", oa.d, "Dimension")->capture_default_str();
  oracle->add_option("--x", oa.x, "Point (one value is broadcast)")->delimiter(',');
  oracle->add_option("--n-log2", oa.n_log2)->capture_default_str();
  oracle->add_option("--method", oa.method)->capture_default_str();
  oracle->add_option("--replicates", oa.replicates)->capture_default_str();
  oracle->add_option("--seed", oa.seed)->capture_default_str();
  oracle->add_option("--out", oa.out, "Output CSV (default stdout)");
  oracle->add_option("--out-dir", oa.out_dir, "Base directory for relative paths");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    err << app.help();
    return kExitUsage;
  }

  std::vector<std::string> argv{"krq"};
  argv.insert(argv.end(), args.begin(), args.end());
  try {
    if (*gen) RunGenPoints(gp, out);
    if (*train) RunTrain(ta, argv, out);
    if (*eval) RunEval(ea, argv, out);
    if (*quad) RunQuadStudy(qa, argv, out);
    if (*oracle) RunBsOracle(oa, out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "krq: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "krq: config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "krq: diverged: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const PrecisionError& e) {
    err << "krq: precision: " << e.what() << "\n";
    return kExitPrecision;
  } catch (const std::exception& e) {
    err << "krq: error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace krq::cli
