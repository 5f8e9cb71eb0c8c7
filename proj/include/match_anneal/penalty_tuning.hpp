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

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "match_anneal/instance.hpp"
#include "match_anneal/solvers.hpp"

namespace match_anneal {

struct PenaltyTrial {
  double lambda = 0.0;
  double feasibility_rate = 0.0;
  std::optional<double> best_objective;  // best feasible compatibility total
};

struct PenaltyTuningResult {
  double lambda = 0.0;
  std::vector<PenaltyTrial> trials;  // one per grid entry, grid order
};

// No grid value reached the feasibility threshold; carries the full table.
class PenaltyTuningError : public std::runtime_error {
 public:
  PenaltyTuningError(const std::string& what, std::vector<PenaltyTrial> trials)
      : std::runtime_error(what), trials_(std::move(trials)) {}
  const std::vector<PenaltyTrial>& trials() const noexcept { return trials_; }

 private:
  std::vector<PenaltyTrial> trials_;
};

// {1/4, 1/2, 1, 2, 4} x max_e M_e
std::vector<double> default_penalty_grid(const MatchingInstance& instance);

// Runs SA on the naive model with lambda1 = lambda2 = lambda for each grid
// value and picks the smallest lambda whose feasible fraction reaches
// `threshold`; equal lambdas are ranked by best feasible objective.
PenaltyTuningResult tune_penalty(const MatchingInstance& instance,
                                 std::span<const double> grid,
                                 const SaConfig& sa, std::uint64_t seed,
                                 double threshold = 0.5);

}  // namespace match_anneal
