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

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "match_anneal/errors.hpp"
#include "match_anneal/solvers.hpp"

namespace match_anneal {

namespace {

Bits unpack(std::uint64_t state, std::size_t n) {
  Bits bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = (state >> i) & 1U;
  return bits;
}

}  // namespace

BruteForceResult brute_force(const QuboModel& model, std::size_t max_vars) {
  const std::size_t n = model.num_vars();
  max_vars = std::min<std::size_t>(max_vars, 63);
  if (n > max_vars) {
    throw SizeCapError("brute_force: model has " + std::to_string(n) +
                       " variables, cap is " + std::to_string(max_vars));
  }

  // Gray-code walk: one flip per step, energies tracked through the cached
  // fields and resynchronised from scratch every 2^16 steps.
  MetropolisChain chain(model, Bits(n, 0));
  std::uint64_t state = 0;
  const double loose = 1e-8 * (1.0 + model.coefficient_scale() * static_cast<double>(n + 1));
  double best = chain.energy();
  std::vector<std::pair<double, std::uint64_t>> candidates{{best, 0}};
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto var = static_cast<std::size_t>(std::countr_zero(k));
    chain.flip(var);
    state ^= std::uint64_t{1} << var;
    if ((k & 0xFFFF) == 0) chain = MetropolisChain(model, unpack(state, n));
    const double e = chain.energy();
    if (e <= best + loose) {
      candidates.emplace_back(e, state);
      if (e < best) best = e;
      if (candidates.size() > (1U << 20)) {
        std::erase_if(candidates, [&](const auto& c) { return c.first > best + loose; });
      }
    }
  }

  BruteForceResult result;
  std::vector<std::pair<double, Bits>> exact;
  for (const auto& [e, s] : candidates) {
    if (e > best + loose) continue;
    Bits bits = unpack(s, n);
    exact.emplace_back(energy(model, bits), std::move(bits));
  }
  double min_energy = std::numeric_limits<double>::infinity();
  for (const auto& [e, bits] : exact) min_energy = std::min(min_energy, e);
  const double tie = 1e-9 * std::max(1.0, std::abs(min_energy));
  for (auto& [e, bits] : exact) {
    if (e <= min_energy + tie) result.ground_states.push_back(std::move(bits));
  }
  std::sort(result.ground_states.begin(), result.ground_states.end());
  result.best_bits = result.ground_states.front();
  result.best_energy = energy(model, result.best_bits);
  return result;
}

namespace {

// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
// with potentials, O(n^3)). Returns column -> row.
std::vector<std::size_t> hungarian(const Eigen::MatrixXd& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1),
                                static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_of(n);
  for (std::size_t j = 1; j <= n; ++j) row_of[j - 1] = p[j] - 1;
  return row_of;
}

}  // namespace

AssignmentResult exact_assignment(const MatchingInstance& instance) {
  const SolvabilityReport report = check_solvability(instance);
  if (!report.perfect_matching_possible) {
    throw InfeasibleError("exact_assignment: no feasible matching (" + report.reason + ")",
                          report.blocking_users);
  }
  const std::size_t n = instance.num_users();
  AssignmentResult result;
  result.matching.assignment.assign(n, std::nullopt);
  if (n == 0) return result;

  std::vector<std::size_t> slot_owner;
  for (std::size_t j = 0; j < instance.num_supporters(); ++j) {
    slot_owner.insert(slot_owner.end(), instance.capacities()[j], j);
  }
  // Any assignment through a forbidden cell costs more than every admissible
  // one, and an admissible perfect assignment exists.
  const double forbidden =
      4.0 * (static_cast<double>(n) * instance.max_score() + 1.0);
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(dim, dim, forbidden);
  for (std::size_t slot = 0; slot < n; ++slot) {
    for (std::size_t e : instance.supporter_edges(slot_owner[slot])) {
      const Edge& edge = instance.edges()[e];
      cost(static_cast<Eigen::Index>(edge.user), static_cast<Eigen::Index>(slot)) =
          -edge.score;
    }
  }
  const auto row_of = hungarian(cost);
  for (std::size_t slot = 0; slot < n; ++slot) {
    result.matching.assignment[row_of[slot]] = slot_owner[slot];
  }
  if (!is_feasible(instance, result.matching)) {
    throw InfeasibleError("exact_assignment: assignment used an inadmissible pair");
  }
  result.score = matching_score(instance, result.matching);
  return result;
}

namespace {

class OptimaEnumerator {
 public:
  OptimaEnumerator(const MatchingInstance& instance, double optimum)
      : instance_(instance),
        optimum_(optimum),
        tolerance_(1e-9 * std::max(1.0, std::abs(optimum))),
        remaining_(instance.capacities()),
        suffix_bound_(instance.num_users() + 1, 0.0) {
    current_.assignment.assign(instance.num_users(), std::nullopt);
    for (std::size_t i = instance.num_users(); i-- > 0;) {
      double best = 0.0;
      for (std::size_t e : instance.user_edges(i)) {
        best = std::max(best, instance.edges()[e].score);
      }
      suffix_bound_[i] = suffix_bound_[i + 1] + best;
    }
  }

  std::vector<Matching> run() {
    descend(0, 0.0);
    return std::move(found_);
  }

 private:
  void descend(std::size_t user, double partial) {
    if (partial + suffix_bound_[user] < optimum_ - tolerance_) return;
    if (user == instance_.num_users()) {
      if (std::all_of(remaining_.begin(), remaining_.end(),
                      [](std::size_t r) { return r == 0; }) &&
          std::abs(matching_score(instance_, current_) - optimum_) <= tolerance_) {
        found_.push_back(current_);
      }
      return;
    }
    for (std::size_t e : instance_.user_edges(user)) {
      const Edge& edge = instance_.edges()[e];
      if (remaining_[edge.supporter] == 0) continue;
      --remaining_[edge.supporter];
      current_.assignment[user] = edge.supporter;
      descend(user + 1, partial + edge.score);
      current_.assignment[user].reset();
      ++remaining_[edge.supporter];
    }
  }

  const MatchingInstance& instance_;
  double optimum_;
  double tolerance_;
  std::vector<std::size_t> remaining_;
  std::vector<double> suffix_bound_;
  Matching current_;
  std::vector<Matching> found_;
};

}  // namespace

std::vector<Matching> enumerate_optima(const MatchingInstance& instance,
                                       double optimum, std::size_t max_users) {
  if (instance.num_users() > max_users) {
    throw SizeCapError("enumerate_optima: " + std::to_string(instance.num_users()) +
                       " users exceeds the cap of " + std::to_string(max_users));
  }
  return OptimaEnumerator(instance, optimum).run();
}

}  // namespace match_anneal
