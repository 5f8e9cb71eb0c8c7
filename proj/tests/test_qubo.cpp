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

#include <cmath>

#include "doctest.h"
#include "match_anneal/errors.hpp"
#include "match_anneal/qubo.hpp"
#include "match_anneal/random.hpp"
#include "oracles.hpp"

using namespace match_anneal;

namespace {

Bits random_bits(std::size_t n, Rng& rng) {
  Bits x(n);
  for (auto& b : x) b = static_cast<std::uint8_t>(uniform_below(rng, 2));
  return x;
}

double tol(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

}  // namespace

TEST_CASE("builder folds diagonal terms and expands squared penalties") {
  QuboBuilder b(3);
  b.add_linear(0, 1.5);
  b.add_quadratic(1, 1, 2.0);
  b.add_quadratic(2, 0, -1.0);
  b.add_offset(4.0);
  const std::pair<std::size_t, double> terms[] = {{0, 1.0}, {1, 2.0}};
  b.add_squared_penalty(3.0, terms, -1.0);  // 3 (x0 + 2 x1 - 1)^2
  const QuboModel q = std::move(b).build({});
  CHECK(q.linear()[0] == doctest::Approx(1.5 + 3.0 * (1.0 - 2.0)));
  CHECK(q.linear()[1] == doctest::Approx(2.0 + 3.0 * (4.0 - 4.0)));
  CHECK(q.linear()[2] == 0.0);
  CHECK(q.quadratic().at({0, 1}) == doctest::Approx(12.0));
  CHECK(q.quadratic().at({0, 2}) == doctest::Approx(-1.0));
  CHECK(q.offset() == doctest::Approx(7.0));
  Rng rng = make_rng(1, 0);
  for (int t = 0; t < 8; ++t) {
    const Bits x = random_bits(3, rng);
    const double direct = 1.5 * x[0] + 2.0 * x[1] - x[0] * x[2] + 4.0 +
                          3.0 * std::pow(x[0] + 2.0 * x[1] - 1.0, 2);
    CHECK(energy(q, x) == doctest::Approx(direct));
  }
}

TEST_CASE("model constructor rejects malformed terms") {
  CHECK_THROWS_AS(QuboModel(2, {0.0, 0.0}, {{{1, 0}, 1.0}}, 0.0, {}), InputError);
  CHECK_THROWS_AS(QuboModel(2, {0.0, 0.0}, {{{0, 2}, 1.0}}, 0.0, {}), InputError);
  CHECK_THROWS_AS(QuboModel(2, {0.0, 0.0}, {{{1, 1}, 1.0}}, 0.0, {}), InputError);
  CHECK_THROWS_AS(QuboModel(3, {0.0, 0.0}, {}, 0.0, {}), InputError);
}

TEST_CASE("neighbour lists mirror the quadratic terms") {
  const QuboModel q(4, {0, 0, 0, 0}, {{{0, 1}, 2.0}, {{1, 3}, -1.0}, {{0, 3}, 0.5}}, 0.0, {});
  CHECK(q.neighbors(0).size() == 2);
  CHECK(q.neighbors(1).size() == 2);
  CHECK(q.neighbors(2).size() == 0);
  CHECK(q.neighbors(3).size() == 2);
  double sum = 0.0;
  for (const auto& c : q.neighbors(3)) sum += c.weight;
  CHECK(sum == doctest::Approx(-0.5));
}

TEST_CASE("naive energy equals the penalty formula") {
  Rng rng = make_rng(2, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + uniform_below(rng, 5);
    const std::size_t m = 1 + uniform_below(rng, 4);
    const MatchingInstance inst = oracle::random_instance(n, m, 0.7, rng);
    if (inst.edges().empty()) continue;
    const double l1 = 0.5 + 10.0 * uniform01(rng), l2 = 0.5 + 10.0 * uniform01(rng);
    const QuboModel q = build_naive_qubo(inst, l1, l2);
    REQUIRE(q.num_vars() == inst.edges().size());
    for (int t = 0; t < 5; ++t) {
      const Bits x = random_bits(q.num_vars(), rng);
      const double direct = oracle::naive_energy(inst, l1, l2, x);
      CHECK(energy(q, x) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("feasible assignments have energy equal to minus their score") {
  Rng rng = make_rng(3, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + uniform_below(rng, 4);
    const MatchingInstance inst = oracle::random_instance(n, n, 0.8, rng);
    if (inst.edges().empty()) continue;
    const QuboModel q = build_naive_qubo(inst, 7.0, 9.0);
    oracle::for_each_feasible_matching(inst, [&](const Matching& m, double score) {
      Bits x(q.num_vars(), 0);
      for (std::size_t i = 0; i < n; ++i) x[*inst.find_edge(i, *m.assignment[i])] = 1;
      CHECK(energy(q, x) == doctest::Approx(-score).epsilon(1e-12));
      CHECK(is_feasible(q, x));
      CHECK(objective(q, x) == doctest::Approx(score));
      CHECK(decode(q, x) == m);
    });
  }
}

TEST_CASE("naive build rejects bad penalties and empty edge sets") {
  const MatchingInstance inst(1, 1, {{0, 0, 1.0}}, {1});
  CHECK_THROWS_AS(build_naive_qubo(inst, 0.0, 1.0), InputError);
  CHECK_THROWS_AS(build_naive_qubo(inst, 1.0, -1.0), InputError);
  CHECK_THROWS_AS(build_approx_qubo(inst, 0.0), InputError);
  const MatchingInstance empty(1, 1, {}, {1});
  CHECK_THROWS_AS(build_naive_qubo(empty, 1.0, 1.0), InputError);
}

TEST_CASE("flip delta equals the energy difference") {
  Rng rng = make_rng(4, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const MatchingInstance inst = oracle::random_instance(4, 3, 0.8, rng);
    if (inst.edges().empty()) continue;
    const QuboModel q = build_naive_qubo(inst, 6.0, 6.0);
    Bits x = random_bits(q.num_vars(), rng);
    for (std::size_t v = 0; v < q.num_vars(); ++v) {
      const double before = energy(q, x);
      const double d = flip_delta(q, x, v);
      x[v] ^= 1U;
      CHECK(energy(q, x) - before == doctest::Approx(d).epsilon(1e-12));
    }
  }
}

TEST_CASE("dense matrix form reproduces the energy") {
  Rng rng = make_rng(5, 0);
  const MatchingInstance inst = oracle::random_instance(5, 3, 0.8, rng);
  const QuboModel q = build_naive_qubo(inst, 4.0, 5.0);
  const Eigen::MatrixXd Q = to_dense(q);
  CHECK(Q.rows() == static_cast<Eigen::Index>(q.num_vars()));
  CHECK(Q.triangularView<Eigen::StrictlyLower>().toDenseMatrix().isZero());
  for (int t = 0; t < 20; ++t) {
    const Bits x = random_bits(q.num_vars(), rng);
    Eigen::VectorXd v(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) v(k) = x[k];
    CHECK(v.dot(Q * v) + q.offset() == doctest::Approx(energy(q, x)));
  }
}

TEST_CASE("decode marks users with several selected edges as conflicted") {
  const MatchingInstance inst(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {1, 1, 4.0}}, {1, 1});
  const QuboModel q = build_naive_qubo(inst, 5.0, 5.0);
  const Bits x{1, 1, 0, 1};
  const Matching m = decode(q, x);
  CHECK_FALSE(m.assignment[0].has_value());
  CHECK(m.assignment[1] == std::optional<std::size_t>{1});
  CHECK(m.conflicted == std::vector<std::size_t>{0});
  CHECK_FALSE(is_feasible(q, x));
  CHECK(objective(q, x) == 4.0);
  CHECK_THROWS_AS(decode(q, Bits{1, 0}), InputError);
}

TEST_CASE("top-two candidates break ties toward the lower supporter") {
  const MatchingInstance inst(
      2, 3, {{0, 0, 5.0}, {0, 1, 7.0}, {0, 2, 7.0}, {1, 0, 3.0}, {1, 2, 1.0}}, {1, 1, 0});
  const CandidateTable t = top2_candidates(inst);
  CHECK(t.per_user[0] == CandidateRecord{1, 2, 7.0, 7.0});
  CHECK(t.per_user[1] == CandidateRecord{0, 2, 3.0, 1.0});
  CHECK(t.first_choice_users[0] == std::vector<std::size_t>{1});
  CHECK(t.first_choice_users[1] == std::vector<std::size_t>{0});
  CHECK(t.second_choice_users[2] == std::vector<std::size_t>{0, 1});

  const MatchingInstance thin(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 1, 3.0}}, {1, 1});
  try {
    top2_candidates(thin);
    FAIL("expected an exception");
  } catch (const ApproximationInfeasibleError& e) {
    CHECK(e.user() == 1);
  }
}

TEST_CASE("approximate energy equals the top-two formula") {
  Rng rng = make_rng(6, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + uniform_below(rng, 3);
    const std::size_t n = m + uniform_below(rng, 6);
    const MatchingInstance inst = oracle::random_instance(n, m, 1.0, rng);
    const double lambda = 1.0 + 20.0 * uniform01(rng);
    const QuboModel q = build_approx_qubo(inst, lambda);
    const CandidateTable t = top2_candidates(inst);
    REQUIRE(q.num_vars() == n);
    std::vector<std::size_t> first, second;
    std::vector<double> m1, m2;
    for (const auto& c : t.per_user) {
      first.push_back(c.first);
      second.push_back(c.second);
      m1.push_back(c.first_score);
      m2.push_back(c.second_score);
    }
    for (int k = 0; k < 5; ++k) {
      const Bits x = random_bits(n, rng);
      const double direct = oracle::approx_energy(inst, lambda, first, second, m1, m2, x);
      CHECK(energy(q, x) == doctest::Approx(direct).epsilon(1e-12));
      double obj = 0.0;
      for (std::size_t i = 0; i < n; ++i) obj += x[i] ? m1[i] : m2[i];
      CHECK(objective(q, x) == doctest::Approx(obj));
      if (is_feasible(q, x)) CHECK(energy(q, x) == doctest::Approx(-obj).epsilon(1e-12));
    }
  }
}

TEST_CASE("restricting to candidates keeps exactly the top-two edges") {
  Rng rng = make_rng(7, 0);
  const MatchingInstance inst = oracle::random_instance(6, 4, 1.0, rng);
  const CandidateTable t = top2_candidates(inst);
  const MatchingInstance r = restrict_to_candidates(inst, t);
  CHECK(r.edges().size() == 12);
  CHECK(r.capacities() == inst.capacities());
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(r.find_edge(i, t.per_user[i].first).has_value());
    CHECK(r.find_edge(i, t.per_user[i].second).has_value());
  }
}

TEST_CASE("decode map rebuilds the instance") {
  Rng rng = make_rng(8, 0);
  const MatchingInstance inst = oracle::random_instance(5, 3, 0.9, rng);
  const QuboModel q = build_naive_qubo(inst, 3.0, 3.0);
  const MatchingInstance back = decode_instance(q.decode_map());
  CHECK(back.edges() == inst.edges());
  CHECK(back.capacities() == inst.capacities());
}
