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

#include "match_anneal/instance.hpp"
#include "match_anneal/qubo.hpp"
#include "match_anneal/random.hpp"

namespace match_anneal {

// Geometric inverse-temperature ramp.
struct AnnealSchedule {
  double beta_min = 0.02;
  double beta_max = 2.0;
  std::size_t num_sweeps = 1000;

  void validate() const;
  // beta_min * (beta_max / beta_min)^(sweep / (num_sweeps - 1)); a
  // single-sweep schedule runs at beta_max.
  double beta(std::size_t sweep) const;

  friend bool operator==(const AnnealSchedule&, const AnnealSchedule&) = default;
};

// Sampler settings shared by the tuning and benchmark drivers.
struct SaConfig {
  AnnealSchedule schedule;
  std::size_t num_reads = 1000;
};

struct Sample {
  Bits bits;
  double energy = 0.0;
  bool feasible = false;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct SampleSet {
  std::vector<Sample> samples;
  std::string solver;
  std::uint64_t seed = 0;
  std::optional<AnnealSchedule> schedule;
  std::size_t num_reads = 0;
  double wall_seconds = 0.0;

  // Indices of feasible samples, in read order.
  std::vector<std::size_t> feasible_indices() const;
  double feasibility_rate() const;
};

// Number of worker threads: MATCH_ANNEAL_THREADS if set, else the hardware
// concurrency.
std::size_t worker_threads();

// Single-flip Metropolis state with cached local fields, so a proposal costs
// O(1) and an accepted flip O(degree).
class MetropolisChain {
 public:
  MetropolisChain(const QuboModel& model, Bits initial);

  double delta(std::size_t var) const noexcept {
    return bits_[var] ? -field_[var] : field_[var];
  }
  void flip(std::size_t var) noexcept;

  // Accept iff delta <= 0 or u < exp(-beta * delta).
  bool propose(std::size_t var, double beta, Rng& rng);

  double energy() const noexcept { return energy_; }
  const Bits& bits() const noexcept { return bits_; }

 private:
  const QuboModel* model_;
  Bits bits_;
  std::vector<double> field_;
  double energy_;
};

// One read: uniform random start, then num_sweeps sweeps, each a freshly
// shuffled pass over every variable.
Bits anneal_read(const QuboModel& model, const AnnealSchedule& schedule, Rng& rng);

// Read r uses substream r of `seed`; the result does not depend on `threads`
// (0 means worker_threads()).
SampleSet sa_sample(const QuboModel& model, const AnnealSchedule& schedule,
                    std::size_t num_reads, std::uint64_t seed,
                    std::size_t threads = 0);

// Greedy descent: flip the most improving variable (lowest index on ties)
// until no single flip lowers the energy.
Bits steepest_descent(const QuboModel& model, std::span<const std::uint8_t> bits);

// Post-processes every sample of a set; solver name gains "+steepest".
SampleSet steepest_descent(const QuboModel& model, const SampleSet& samples);

struct BruteForceResult {
  Bits best_bits;
  double best_energy = 0.0;
  std::vector<Bits> ground_states;  // lexicographic order
};

inline constexpr std::size_t kBruteForceMaxVars = 26;

BruteForceResult brute_force(const QuboModel& model,
                             std::size_t max_vars = kBruteForceMaxVars);

struct AssignmentResult {
  Matching matching;
  double score = 0.0;
};

// max sum M_e x_e subject to one supporter per user and exactly C_j users
// per supporter. Supporters are split into C_j unit slots and the square
// assignment is solved with the Hungarian method.
AssignmentResult exact_assignment(const MatchingInstance& instance);

inline constexpr std::size_t kEnumerateMaxUsers = 16;

// Every feasible matching whose score equals `optimum` (relative tolerance
// 1e-9), in lexicographic order of the assignment.
std::vector<Matching> enumerate_optima(const MatchingInstance& instance,
                                       double optimum,
                                       std::size_t max_users = kEnumerateMaxUsers);

}  // namespace match_anneal
