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
#include <cmath>
#include <set>

#include "doctest.h"
#include "match_anneal/errors.hpp"
#include "match_anneal/penalty_tuning.hpp"
#include "match_anneal/qubo.hpp"
#include "match_anneal/random.hpp"
#include "match_anneal/solvers.hpp"
#include "oracles.hpp"

using namespace match_anneal;

namespace {

QuboModel random_model(std::size_t n, double density, Rng& rng) {
  std::vector<double> linear(n);
  for (auto& h : linear) h = 4.0 * uniform01(rng) - 2.0;
  QuadraticTerms quad;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (uniform01(rng) < density) quad[{a, b}] = 4.0 * uniform01(rng) - 2.0;
    }
  }
  return QuboModel(n, linear, quad, uniform01(rng), {});
}

bool is_local_minimum(const QuboModel& q, const Bits& x) {
  for (std::size_t v = 0; v < q.num_vars(); ++v) {
    if (flip_delta(q, x, v) < -1e-9) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("random substreams are reproducible and distinct") {
  Rng a = make_rng(42, 3), b = make_rng(42, 3), c = make_rng(42, 4);
  const auto x = a(), y = b(), z = c();
  CHECK(x == y);
  CHECK(x != z);
  Rng r = make_rng(1, 0);
  for (int k = 0; k < 1000; ++k) {
    const double u = uniform01(r);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(uniform_below(r, 7) < 7);
  }
}

TEST_CASE("geometric inverse-temperature schedule") {
  AnnealSchedule s;
  CHECK(s.beta(0) == doctest::Approx(0.02));
  CHECK(s.beta(999) == doctest::Approx(2.0));
  const double ratio = s.beta(1) / s.beta(0);
  for (std::size_t k = 1; k < 999; ++k) CHECK(s.beta(k + 1) / s.beta(k) == doctest::Approx(ratio));
  AnnealSchedule one{0.1, 3.0, 1};
  CHECK(one.beta(0) == 3.0);
  CHECK_THROWS_AS((AnnealSchedule{0.0, 1.0, 10}.validate()), InputError);
  CHECK_THROWS_AS((AnnealSchedule{2.0, 1.0, 10}.validate()), InputError);
  CHECK_THROWS_AS((AnnealSchedule{0.1, 1.0, 0}.validate()), InputError);
}

TEST_CASE("Metropolis chain keeps its cached energy exact") {
  Rng rng = make_rng(2, 0);
  const QuboModel q = random_model(12, 0.5, rng);
  Bits x(12, 0);
  MetropolisChain chain(q, x);
  for (int step = 0; step < 2000; ++step) {
    const std::size_t v = uniform_below(rng, 12);
    CHECK(chain.delta(v) == doctest::Approx(flip_delta(q, chain.bits(), v)));
    chain.propose(v, 0.7, rng);
  }
  CHECK(chain.energy() == doctest::Approx(energy(q, chain.bits())).epsilon(1e-10));
}

TEST_CASE("annealing is deterministic and independent of thread count") {
  Rng rng = make_rng(3, 0);
  const QuboModel q = random_model(20, 0.3, rng);
  const AnnealSchedule s{0.02, 2.0, 50};
  const SampleSet a = sa_sample(q, s, 37, 11, 1);
  const SampleSet b = sa_sample(q, s, 37, 11, 4);
  const SampleSet c = sa_sample(q, s, 37, 12, 1);
  REQUIRE(a.samples.size() == 37);
  CHECK(a.samples == b.samples);
  CHECK_FALSE(a.samples == c.samples);
  CHECK(a.solver == "sa");
  CHECK(a.seed == 11);
  CHECK(a.num_reads == 37);
  CHECK(a.schedule == s);
  for (const auto& smp : a.samples) {
    CHECK(smp.energy == doctest::Approx(energy(q, smp.bits)));
  }
  CHECK_THROWS_AS(sa_sample(q, s, 0, 1), InputError);
}

TEST_CASE("annealing reaches the ground state of small models") {
  Rng rng = make_rng(4, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const QuboModel q = random_model(10, 0.5, rng);
    const double ground = oracle::min_energy(q);
    const SampleSet s = sa_sample(q, AnnealSchedule{0.02, 2.0, 200}, 50, trial);
    double best = INFINITY;
    for (const auto& smp : s.samples) best = std::min(best, smp.energy);
    CHECK(best == doctest::Approx(ground));
  }
}

TEST_CASE("steepest descent never raises energy and stops at a local minimum") {
  Rng rng = make_rng(5, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const QuboModel q = random_model(1 + uniform_below(rng, 15), 0.4, rng);
    Bits x(q.num_vars());
    for (auto& b : x) b = static_cast<std::uint8_t>(uniform_below(rng, 2));
    const Bits y = steepest_descent(q, x);
    CHECK(energy(q, y) <= energy(q, x) + 1e-12);
    CHECK(is_local_minimum(q, y));
  }
}

TEST_CASE("steepest descent picks the most improving flip, lowest index on ties") {
  // E = -x0 - 2 x1 - 2 x2 + 10 x1 x2: from 000 flip x1 first, then stop.
  const QuboModel q(3, {-1.0, -2.0, -2.0}, {{{1, 2}, 10.0}}, 0.0, {});
  CHECK(steepest_descent(q, Bits{0, 0, 0}) == Bits{1, 1, 0});
}

TEST_CASE("post-processed sample sets keep their metadata") {
  Rng rng = make_rng(6, 0);
  const QuboModel q = random_model(8, 0.5, rng);
  const SampleSet s = sa_sample(q, AnnealSchedule{0.1, 1.0, 5}, 10, 3);
  const SampleSet p = steepest_descent(q, s);
  CHECK(p.solver == "sa+steepest");
  CHECK(p.seed == s.seed);
  REQUIRE(p.samples.size() == s.samples.size());
  for (std::size_t k = 0; k < p.samples.size(); ++k) {
    CHECK(p.samples[k].energy <= s.samples[k].energy + 1e-12);
  }
}

TEST_CASE("brute force matches exhaustive enumeration") {
  Rng rng = make_rng(7, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const QuboModel q = random_model(1 + uniform_below(rng, 12), 0.5, rng);
    const BruteForceResult r = brute_force(q);
    CHECK(r.best_energy == doctest::Approx(oracle::min_energy(q)));
    CHECK(energy(q, r.best_bits) == doctest::Approx(r.best_energy));
    REQUIRE_FALSE(r.ground_states.empty());
    CHECK(std::is_sorted(r.ground_states.begin(), r.ground_states.end()));
  }
  const QuboModel big(27, std::vector<double>(27, 0.0), {}, 0.0, {});
  CHECK_THROWS_AS(brute_force(big), SizeCapError);
}

TEST_CASE("brute force lists every degenerate ground state") {
  // E = -x0 - x1 + 2 x0 x1 has ground states 01 and 10.
  const QuboModel q(2, {-1.0, -1.0}, {{{0, 1}, 2.0}}, 0.0, {});
  const BruteForceResult r = brute_force(q);
  CHECK(r.best_energy == -1.0);
  CHECK(r.ground_states == std::vector<Bits>{{0, 1}, {1, 0}});
}

TEST_CASE("exact assignment agrees with exhaustive search") {
  Rng rng = make_rng(8, 0);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + uniform_below(rng, 6);
    const std::size_t m = 1 + uniform_below(rng, n);
    const MatchingInstance inst = oracle::random_instance(n, m, 0.6, rng, trial % 2 == 0);
    const auto best = oracle::best_matching_score(inst);
    if (!best) {
      CHECK_THROWS_AS(exact_assignment(inst), InfeasibleError);
      continue;
    }
    const AssignmentResult r = exact_assignment(inst);
    CHECK(r.score == doctest::Approx(*best));
    CHECK(is_feasible(inst, r.matching));
    CHECK(matching_score(inst, r.matching) == r.score);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("infeasible instances report their blocking users") {
  const MatchingInstance inst(3, 3, {{0, 0, 1.0}, {1, 0, 1.0}, {2, 2, 1.0}, {2, 1, 1.0}},
                              {1, 1, 1});
  try {
    exact_assignment(inst);
    FAIL("expected an exception");
  } catch (const InfeasibleError& e) {
    CHECK(e.blocking_users() == std::vector<std::size_t>{0, 1});
  }
}

TEST_CASE("optimum enumeration matches exhaustive search") {
  Rng rng = make_rng(9, 0);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + uniform_below(rng, 5);
    const std::size_t m = 1 + uniform_below(rng, n);
    // Integer scores make ties, and so several optima, common.
    const MatchingInstance inst = oracle::random_instance(n, m, 0.7, rng, true);
    const auto best = oracle::best_matching_score(inst);
    if (!best) continue;
    std::vector<Matching> expected;
    oracle::for_each_feasible_matching(inst, [&](const Matching& mt, double s) {
      if (std::abs(s - *best) <= 1e-9 * std::max(1.0, *best)) expected.push_back(mt);
    });
    std::sort(expected.begin(), expected.end());
    CHECK(enumerate_optima(inst, *best) == expected);
  }
}

TEST_CASE("optimum enumeration refuses large instances") {
  Rng rng = make_rng(10, 0);
  const MatchingInstance inst = oracle::random_instance(17, 17, 1.0, rng);
  CHECK_THROWS_AS(enumerate_optima(inst, 1.0), SizeCapError);
}

TEST_CASE("penalty tuning picks the smallest adequate weight") {
  Rng rng = make_rng(11, 0);
  const MatchingInstance inst = oracle::random_instance(4, 4, 1.0, rng);
  SaConfig sa{AnnealSchedule{0.02, 2.0, 100}, 100};
  const auto grid = default_penalty_grid(inst);
  REQUIRE(grid.size() == 5);
  CHECK(grid[2] == doctest::Approx(inst.max_score()));
  const PenaltyTuningResult r = tune_penalty(inst, grid, sa, 5);
  REQUIRE(r.trials.size() == grid.size());
  const auto chosen = std::find_if(r.trials.begin(), r.trials.end(),
                                   [&](const PenaltyTrial& t) { return t.lambda == r.lambda; });
  REQUIRE(chosen != r.trials.end());
  CHECK(chosen->feasibility_rate >= 0.5);
  for (const auto& t : r.trials) {
    if (t.lambda < r.lambda) CHECK(t.feasibility_rate < 0.5);
  }
  CHECK_THROWS_AS(tune_penalty(inst, grid, sa, 5, 1.01), PenaltyTuningError);
  const std::vector<double> bad{-1.0};
  CHECK_THROWS_AS(tune_penalty(inst, bad, sa, 5), InputError);
}
