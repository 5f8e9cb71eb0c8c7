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

#include "match_anneal/penalty_tuning.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "match_anneal/errors.hpp"

namespace match_anneal {

std::vector<double> default_penalty_grid(const MatchingInstance& instance) {
  const double m = instance.max_score();
  return {0.25 * m, 0.5 * m, m, 2.0 * m, 4.0 * m};
}

PenaltyTuningResult tune_penalty(const MatchingInstance& instance,
                                 std::span<const double> grid, const SaConfig& sa,
                                 std::uint64_t seed, double threshold) {
  if (grid.empty()) throw InputError("tune_penalty: empty lambda grid");

  PenaltyTuningResult result;
  for (double lambda : grid) {
    const QuboModel model = build_naive_qubo(instance, lambda, lambda);
    const SampleSet samples = sa_sample(model, sa.schedule, sa.num_reads, seed);
    PenaltyTrial trial{lambda, samples.feasibility_rate(), std::nullopt};
    for (std::size_t k : samples.feasible_indices()) {
      const double obj = objective(model, samples.samples[k].bits);
      if (!trial.best_objective || obj > *trial.best_objective) trial.best_objective = obj;
    }
    result.trials.push_back(trial);
  }

  std::vector<std::size_t> order(result.trials.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ta = result.trials[a];
    const auto& tb = result.trials[b];
    if (ta.lambda != tb.lambda) return ta.lambda < tb.lambda;
    return ta.best_objective.value_or(-1.0) > tb.best_objective.value_or(-1.0);
  });
  for (std::size_t k : order) {
    if (result.trials[k].feasibility_rate >= threshold) {
      result.lambda = result.trials[k].lambda;
      return result;
    }
  }

  std::ostringstream msg;
  msg << "tune_penalty: no lambda reached feasibility rate " << threshold << ":";
  for (const auto& t : result.trials) {
    msg << " [lambda=" << t.lambda << " rate=" << t.feasibility_rate << "]";
  }
  throw PenaltyTuningError(msg.str(), std::move(result.trials));
}

}  // namespace match_anneal
