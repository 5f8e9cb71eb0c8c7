// Copyright 2026 The match-anneal Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "match_anneal/analysis.hpp"
#include "match_anneal/instance.hpp"
#include "match_anneal/io.hpp"
#include "match_anneal/solvers.hpp"

namespace match_anneal {

// Gaussian compatibility scores; the defaults are the field-data estimate.
struct ScoreDistribution {
  double mean = 12.3;
  double variance = 2.80;
  bool round_to_integer = false;
};

struct GeneratorOptions {
  ScoreDistribution scores;
  bool complete = true;    // all n*m pairs; otherwise keep each with `retention`
  double retention = 0.38;
};

// i.i.d. Gaussian scores clamped at 0, balanced capacities.
MatchingInstance gen_random_instance(std::size_t num_users, std::size_t num_supporters,
                                     std::uint64_t seed,
                                     const GeneratorOptions& options = {});

// Field-study-shaped replica: integer scores in [score_min, score_max], a
// random mask keeping round(retention * n * n) pairs, C_j = 1, and a mask
// that still admits a perfect matching.
struct ReplicaOptions {
  std::size_t size = 14;
  double retention = 0.38;
  int score_min = 6;
  int score_max = 21;
  ScoreDistribution scores;
};

InstanceDocument make_sendai_replica(std::uint64_t seed, const ReplicaOptions& options = {});

enum class ExperimentKind { kScaling, kHistogram, kDiversity, kFormulationCompare };

const char* to_string(ExperimentKind kind) noexcept;
ExperimentKind experiment_kind_from_string(const std::string& name);

inline constexpr std::size_t kOracleMaxUsers = 400;

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kScaling;
  std::string label = "default";
  // n for one-to-one experiments (n users, n supporters); N for
  // formulation-compare, where the supporter count is fixed.
  std::vector<std::size_t> sizes;
  std::size_t num_supporters = 4;
  std::size_t instances = 100;
  ScoreDistribution scores;
  SaConfig sa;
  // Penalty weight; when absent, lambda_scale * max_e M_e per instance.
  std::optional<double> lambda;
  double lambda_scale = 1.0;
  bool steepest = true;  // also report SA followed by steepest descent
  std::vector<double> alphas;
  std::vector<double> Rs{0.1, 0.5};
  std::size_t histogram_bins = kDefaultHistogramBins;
  std::uint64_t seed = 0;
  std::string output_dir = ".";

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& config);

struct BenchmarkRow {
  std::size_t size = 0;
  std::size_t num_supporters = 0;
  std::size_t instance = 0;
  std::uint64_t seed = 0;
  std::string solver;
  std::optional<double> R;
  std::optional<double> alpha;
  double optimum = 0.0;
  std::optional<double> best_objective;
  std::optional<double> best_relative_error;
  double feasibility_rate = 0.0;
  std::optional<std::size_t> diversity;
  double wall_seconds = 0.0;
};

struct Aggregate {
  std::size_t size = 0;
  std::string solver;
  std::optional<double> R;
  std::optional<double> alpha;
  std::size_t count = 0;    // rows with a best relative error
  std::size_t missing = 0;  // rows without a feasible sample
  double mean_relative_error = 0.0;
  double stderr_relative_error = 0.0;
  double mean_feasibility_rate = 0.0;
  std::optional<double> mean_diversity;
  double mean_wall_seconds = 0.0;
};

struct BenchmarkReport {
  ExperimentKind kind = ExperimentKind::kScaling;
  std::string label;
  std::vector<BenchmarkRow> rows;
  std::vector<Aggregate> aggregates;
  // Pooled per-sample relative-error histograms, keyed "size/solver"
  // (histogram experiment only).
  std::map<std::string, Histogram> histograms;
  std::vector<std::string> log;
};

// Mean and standard error (sample standard deviation / sqrt(k)) per
// (size, solver, R, alpha) group, in first-appearance order.
std::vector<Aggregate> aggregate_rows(const std::vector<BenchmarkRow>& rows);

BenchmarkReport run_scaling_experiment(const ExperimentConfig& config);
BenchmarkReport run_histogram_experiment(const ExperimentConfig& config);
BenchmarkReport run_diversity_experiment(const ExperimentConfig& config);
BenchmarkReport run_formulation_comparison(const ExperimentConfig& config);
BenchmarkReport run_experiment(const ExperimentConfig& config);

// One row per size x instance x solver; wall_seconds is the last column.
std::string report_csv(const BenchmarkReport& report);
// Aggregates, histograms and the regeneration log. Wall-clock means sit
// under "timings" only.
nlohmann::json report_summary(const BenchmarkReport& report);
// `<experiment>_<label>` inside the config's output directory.
std::string report_basename(const ExperimentConfig& config);

// ---- field workflow ----

enum class Formulation { kNaive, kApprox };

// Just above max M / 2, where adding a surplus edge to a perfect matching
// stops lowering the energy.
inline constexpr double kWorkflowLambdaScale = 0.55;

struct WorkflowOptions {
  Formulation formulation = Formulation::kNaive;
  std::optional<double> lambda;  // default: kWorkflowLambdaScale * max_e M_e
  SaConfig sa;
  bool steepest = false;
  std::uint64_t seed = 0;
  std::size_t enumerate_cap = kEnumerateMaxUsers;
};

struct WorkflowReport {
  std::size_t num_users = 0;
  std::size_t num_supporters = 0;
  std::size_t total_pairs = 0;
  std::size_t retained_pairs = 0;
  double retention = 0.0;
  double score_min = 0.0;
  double score_max = 0.0;
  double score_mean = 0.0;
  std::map<long, std::size_t> score_counts;  // floor(score) -> pairs, all scored pairs
  std::string formulation;
  double lambda = 0.0;
  std::size_t num_vars = 0;
  double feasibility_rate = 0.0;
  double optimum = 0.0;
  std::optional<double> best_objective;
  bool optima_enumerated = false;
  std::vector<Matching> optimal_matchings;  // from the exact enumeration
  std::vector<Matching> found_optimal;      // distinct optimal matchings sampled
  bool all_optima_found = false;
  bool one_to_one_verified = false;  // every found optimum meets C_j exactly
  std::vector<std::string> warnings;
  MatchingInstance instance;
  double wall_seconds = 0.0;
};

// filter -> solvability check -> QUBO -> SA -> audit -> optimal matchings,
// cross-checked against the exact enumeration.
WorkflowReport run_sendai_workflow(const InstanceDocument& doc,
                                   const WorkflowOptions& options);

nlohmann::json to_json(const WorkflowReport& report);
std::string workflow_table(const WorkflowReport& report);

}  // namespace match_anneal
