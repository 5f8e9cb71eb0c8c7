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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "match_anneal/instance.hpp"
#include "match_anneal/qubo.hpp"
#include "match_anneal/solvers.hpp"

namespace match_anneal {

// (E* - E) / E*, objectives in maximisation form. Throws InputError when
// E* = 0.
double relative_error(double objective, double optimum);

// ---- feasibility ----

struct SampleViolation {
  std::size_t sample = 0;
  // Users whose selected-edge count is not exactly one.
  std::vector<std::size_t> violated_users;
  // Per supporter: assigned count minus C_j (zero when satisfied).
  std::vector<long> supporter_deviation;
  bool feasible = false;
};

struct FeasibilityAudit {
  std::vector<SampleViolation> per_sample;
  double feasibility_rate = 0.0;
};

// Counts constraint violations from the raw bits (naive) or the decoded
// choices (approx) against the instance capacities.
FeasibilityAudit feasibility_audit(const SampleSet& samples,
                                   const MatchingInstance& instance,
                                   const QuboModel& model);

// ---- histogram ----

struct Histogram {
  std::vector<double> edges;        // bins + 1 ascending edges
  std::vector<double> probability;  // mass per bin, sums to 1 when non-empty
  std::size_t count = 0;
  bool empty = true;
};

// Uniform bins over [0, max(values)]; a zero maximum collapses to [0, 1].
Histogram histogram(std::span<const double> values, std::size_t bins);

// ---- quality ----

struct QualityReport {
  double optimum = 0.0;
  std::optional<double> best_objective;
  std::optional<double> best_relative_error;
  std::vector<std::optional<double>> relative_errors;  // nullopt if infeasible
  double feasibility_rate = 0.0;
  Histogram histogram;
};

inline constexpr std::size_t kDefaultHistogramBins = 40;

QualityReport quality_report(const SampleSet& samples, const QuboModel& model,
                             double optimum,
                             std::size_t bins = kDefaultHistogramBins);

// Relative-error histogram of the feasible samples.
Histogram energy_histogram(const SampleSet& samples, const QuboModel& model,
                           double optimum,
                           std::size_t bins = kDefaultHistogramBins);

// ---- diversity ----

struct DiversityConfig {
  double alpha = 0.0;  // allowable-error fraction, >= 0
  double R = 0.1;      // distinctness threshold fraction in (0, 1]
  std::size_t scale = 0;  // n in R * n; 0 means the model's user count

  void validate() const;
};

struct DiversityResult {
  std::size_t size = 0;
  bool exact = true;
  std::vector<Bits> representatives;  // the independent set
  std::size_t candidates = 0;         // unique feasible solutions in range
  std::string diagnostic;
};

// Solutions are adjacent when their Hamming distance is <= threshold.
// Returns adjacency bitmasks (requires <= 64 solutions) ...
std::vector<std::uint64_t> similarity_masks(std::span<const Bits> solutions,
                                            double threshold);
// ... or adjacency lists for any count.
std::vector<std::vector<std::size_t>> similarity_lists(
    std::span<const Bits> solutions, double threshold);

// Exact maximum independent set by branch and bound with a clique-cover
// bound. Vertex indices ascending.
std::vector<std::size_t> maximum_independent_set(std::span<const std::uint64_t> adjacency);

// Repeatedly takes a minimum-degree vertex and deletes its neighbourhood.
std::vector<std::size_t> greedy_independent_set(
    const std::vector<std::vector<std::size_t>>& adjacency);

inline constexpr std::size_t kExactMisLimit = 64;

// Keeps feasible samples with objective >= E* - alpha (E* - E_best), where
// E_best is the best feasible objective in the set, dedupes them, links
// pairs within Hamming distance R * n and returns the size of a maximum
// independent set (greedy above kExactMisLimit unique solutions).
DiversityResult diversity(const SampleSet& samples, const QuboModel& model,
                          double optimum, const DiversityConfig& config);

struct DiversityPoint {
  double alpha = 0.0;
  double R = 0.0;
  std::size_t size = 0;
  bool exact = true;
};

std::vector<DiversityPoint> diversity_curve(const SampleSet& samples,
                                            const QuboModel& model, double optimum,
                                            std::span<const double> alphas,
                                            std::span<const double> Rs,
                                            std::size_t scale = 0);

// ---- serialisation ----

nlohmann::json to_json(const Histogram& h);
nlohmann::json to_json(const QualityReport& report);
nlohmann::json to_json(const DiversityResult& result);
nlohmann::json to_json(const FeasibilityAudit& audit);

// One row per sample: index,energy,feasible,objective,relative_error.
std::string quality_csv(const SampleSet& samples, const QuboModel& model,
                        const QualityReport& report);
// One row per (R, alpha) point.
std::string diversity_csv(std::span<const DiversityPoint> points);

}  // namespace match_anneal
