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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "match_anneal/analysis.hpp"
#include "match_anneal/bench.hpp"
#include "match_anneal/errors.hpp"
#include "match_anneal/qubo.hpp"
#include "match_anneal/random.hpp"
#include "match_anneal/solvers.hpp"
#include "oracles.hpp"

using namespace match_anneal;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double mean_error(const BenchmarkReport& r, std::size_t size, const std::string& solver) {
  for (const auto& a : r.aggregates) {
    if (a.size == size && a.solver == solver && !a.R) return a.mean_relative_error;
  }
  return NAN;
}

std::size_t missing(const BenchmarkReport& r, const std::string& solver) {
  std::size_t k = 0;
  for (const auto& a : r.aggregates) {
    if (a.solver == solver && !a.R) k += a.missing;
  }
  return k;
}

std::string without_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

// The paper's SA settings: beta in (0.02, 2.0), 1000 sweeps, 1000 reads.
ExperimentConfig paper_config(ExperimentKind kind, std::vector<std::size_t> sizes,
                              std::size_t instances, std::uint64_t seed) {
  ExperimentConfig c;
  c.kind = kind;
  c.label = "acceptance";
  c.sizes = std::move(sizes);
  c.instances = instances;
  c.steepest = false;
  c.seed = seed;
  return c;
}

// 1. exact_assignment equals the brute-force naive-QUBO ground state.
Outcome oracle_agreement() {
  Outcome o;
  Rng rng = make_rng(101, 0);
  std::size_t feasible = 0, infeasible = 0, mismatches = 0;
  for (std::size_t t = 0; t < 200; ++t) {
    const std::size_t n = 2 + t % 3;
    GeneratorOptions g;
    // Half complete, half with pairs removed so infeasible cases appear.
    g.complete = t % 2 == 0;
    g.retention = 0.55;
    const MatchingInstance inst = gen_random_instance(n, n, rng(), g);
    if (inst.edges().empty()) {
      ++infeasible;
      continue;
    }
    const double lambda = 2.0 * inst.max_score() + 1.0;
    const QuboModel q = build_naive_qubo(inst, lambda, lambda);
    const BruteForceResult bf = brute_force(q);
    if (!check_solvability(inst).perfect_matching_possible) {
      ++infeasible;
      if (is_feasible(q, bf.best_bits)) ++mismatches;
      continue;
    }
    ++feasible;
    const AssignmentResult ex = exact_assignment(inst);
    bool ok = is_feasible(q, bf.best_bits) && objective(q, bf.best_bits) == ex.score;
    for (const Bits& g2 : bf.ground_states) ok = ok && is_feasible(q, g2) && objective(q, g2) == ex.score;
    if (!ok) ++mismatches;
  }
  o.pass = mismatches == 0 && feasible > 0;
  o.detail = std::to_string(feasible) + " feasible and " + std::to_string(infeasible) +
             " infeasible instances, " + std::to_string(mismatches) + " mismatches";
  return o;
}

// 2. SA reaches the optimum on at least 95 of 100 n = 4 instances.
Outcome small_n_recovery() {
  const BenchmarkReport r = run_experiment(paper_config(ExperimentKind::kScaling, {4}, 100, 202));
  std::size_t exact = 0;
  for (const auto& row : r.rows) {
    if (row.best_relative_error && std::abs(*row.best_relative_error) <= 1e-9) ++exact;
  }
  return {exact >= 95, std::to_string(exact) + "/100 instances at zero relative error"};
}

// 3. Mean best relative error grows from n = 4 to n = 10.
Outcome degradation_trend() {
  const BenchmarkReport r =
      run_experiment(paper_config(ExperimentKind::kScaling, {4, 6, 8, 10}, 50, 303));
  std::string detail = "mean best relative error";
  for (std::size_t n : {4, 6, 8, 10}) detail += " n=" + std::to_string(n) + ":" + fmt(mean_error(r, n, "sa"));
  detail += ", instances without a feasible sample: " + std::to_string(missing(r, "sa"));
  return {mean_error(r, 10, "sa") > mean_error(r, 4, "sa"), detail};
}

// 4. Approximation bound never beats the naive optimum and tightens with N.
Outcome approximation_bound() {
  ExperimentConfig c = paper_config(ExperimentKind::kFormulationCompare, {8, 16, 32}, 25, 404);
  c.num_supporters = 4;
  const BenchmarkReport r = run_experiment(c);
  std::size_t violations = 0;
  for (const auto& row : r.rows) {
    if (row.solver == "approx-bound" && *row.best_objective > row.optimum + 1e-9 * row.optimum) {
      ++violations;
    }
  }
  const double b8 = mean_error(r, 8, "approx-bound"), b32 = mean_error(r, 32, "approx-bound");
  std::string detail = "bound above optimum: " + std::to_string(violations) + "; bound error";
  for (std::size_t n : {8, 16, 32}) detail += " N=" + std::to_string(n) + ":" + fmt(mean_error(r, n, "approx-bound"));
  detail += "; SA naive/approx";
  for (std::size_t n : {8, 16, 32}) {
    detail += " N=" + std::to_string(n) + ":" + fmt(mean_error(r, n, "sa-naive")) + "/" +
              fmt(mean_error(r, n, "sa-approx"));
  }
  return {violations == 0 && b32 < b8, detail};
}

// 5. Mean |U1(j) u U2(j)| is close to 2N/M.
Outcome candidate_count() {
  double total = 0.0;
  std::size_t count = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const MatchingInstance inst = gen_random_instance(100, 10, substream_seed(505, k));
    const CandidateTable t = top2_candidates(inst);
    for (std::size_t j = 0; j < 10; ++j) {
      std::set<std::size_t> users(t.first_choice_users[j].begin(), t.first_choice_users[j].end());
      users.insert(t.second_choice_users[j].begin(), t.second_choice_users[j].end());
      total += static_cast<double>(users.size());
      ++count;
    }
  }
  const double mean = total / static_cast<double>(count);
  return {std::abs(mean - 20.0) <= 0.05 * 20.0, "mean " + fmt(mean) + " (target 20)"};
}

// 6. Diversity equals exhaustive MIS; monotone in alpha on real runs.
Outcome diversity_correctness() {
  Rng rng = make_rng(606, 0);
  std::size_t agree = 0;
  const std::size_t n = 6;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) edges.push_back({i, j, 2.0});
  }
  const MatchingInstance inst(n, n, edges, std::vector<std::size_t>(n, 1));
  const QuboModel q = build_naive_qubo(inst, 3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    // A few random base permutations plus local swaps give clustered sets.
    SampleSet set;
    const std::size_t k = 2 + uniform_below(rng, 9);
    std::vector<std::size_t> base(n);
    std::iota(base.begin(), base.end(), 0);
    for (std::size_t s = 0; s < k; ++s) {
      if (uniform01(rng) < 0.4) shuffle(base.begin(), base.end(), rng);
      std::vector<std::size_t> perm = base;
      std::swap(perm[uniform_below(rng, n)], perm[uniform_below(rng, n)]);
      Bits x(q.num_vars(), 0);
      for (std::size_t i = 0; i < n; ++i) x[*inst.find_edge(i, perm[i])] = 1;
      set.samples.push_back({x, energy(q, x), true});
    }
    const double R = 0.2 + 0.8 * uniform01(rng);
    std::vector<Bits> unique;
    for (const auto& s : set.samples) unique.push_back(s.bits);
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    std::vector<std::vector<bool>> adj(unique.size(), std::vector<bool>(unique.size()));
    for (std::size_t a = 0; a < unique.size(); ++a) {
      for (std::size_t b = 0; b < unique.size(); ++b) {
        adj[a][b] = a != b && static_cast<double>(oracle::hamming(unique[a], unique[b])) <= R * n;
      }
    }
    const DiversityResult d = diversity(set, q, 12.0, {0.0, R, 0});
    if (d.exact && d.size == oracle::max_independent_set_size(adj)) ++agree;
  }

  ExperimentConfig c = paper_config(ExperimentKind::kDiversity, {4, 6}, 10, 607);
  c.steepest = true;
  c.alphas = {};
  for (int a = 0; a <= 20; ++a) c.alphas.push_back(a / 10.0);
  const BenchmarkReport r = run_experiment(c);
  std::map<std::tuple<std::size_t, std::size_t, std::string, double>, std::size_t> last;
  std::size_t violations = 0, points = 0;
  for (const auto& row : r.rows) {
    if (!row.R) continue;
    ++points;
    const auto key = std::make_tuple(row.size, row.instance, row.solver, *row.R);
    if (last.count(key) && *row.diversity < last[key]) ++violations;
    last[key] = *row.diversity;
  }
  return {agree == 50 && violations == 0,
          std::to_string(agree) + "/50 sets match exhaustive search; " + std::to_string(violations) +
              " monotonicity violations over " + std::to_string(points) + " curve points"};
}

// 7. Steepest descent never raises energy and ends at a 1-flip minimum.
Outcome steepest_contract() {
  Rng rng = make_rng(707, 0);
  std::size_t ok = 0;
  const std::size_t total = 10000;
  for (std::size_t t = 0; t < total; ++t) {
    QuboModel q;
    if (t % 2 == 0) {
      const std::size_t n = 1 + uniform_below(rng, 30);
      std::vector<double> h(n);
      for (auto& v : h) v = 6.0 * uniform01(rng) - 3.0;
      QuadraticTerms quad;
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          if (uniform01(rng) < 0.3) quad[{a, b}] = 6.0 * uniform01(rng) - 3.0;
        }
      }
      q = QuboModel(n, h, quad, 0.0, {});
    } else {
      const std::size_t n = 2 + uniform_below(rng, 5);
      const MatchingInstance inst = gen_random_instance(n, 1 + uniform_below(rng, n), rng());
      const double lambda = inst.max_score() * (0.25 + 2.0 * uniform01(rng));
      q = build_naive_qubo(inst, lambda, lambda);
    }
    Bits x(q.num_vars());
    for (auto& b : x) b = static_cast<std::uint8_t>(uniform_below(rng, 2));
    const Bits y = steepest_descent(q, x);
    bool good = energy(q, y) <= energy(q, x) + 1e-9 * (1.0 + std::abs(energy(q, x)));
    for (std::size_t v = 0; v < q.num_vars() && good; ++v) {
      Bits z = y;
      z[v] ^= 1U;
      good = energy(q, z) >= energy(q, y) - 1e-9 * (1.0 + std::abs(energy(q, y)));
    }
    if (good) ++ok;
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " pairs satisfy the contract"};
}

// 8. Field-workflow replica: every enumerated optimum is sampled.
Outcome replica_workflow() {
  const auto start = std::chrono::steady_clock::now();
  const InstanceDocument doc = make_sendai_replica(0);
  WorkflowOptions o;
  o.seed = 0;
  const WorkflowReport r = run_sendai_workflow(doc, o);
  bool one_to_one = r.one_to_one_verified;
  for (const Matching& m : r.found_optimal) {
    const auto loads = supporter_loads(r.instance, m);
    for (std::size_t l : loads) one_to_one = one_to_one && l == 1;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = r.optima_enumerated && r.all_optima_found && one_to_one && secs < 120.0;
  return {pass, std::to_string(r.retained_pairs) + "/196 pairs kept, scores " + fmt(r.score_min) +
                    "-" + fmt(r.score_max) + ", " + std::to_string(r.found_optimal.size()) + " of " +
                    std::to_string(r.optimal_matchings.size()) + " optimal matchings sampled, " +
                    "one-to-one " + (one_to_one ? "confirmed" : "violated") + ", " +
                    fmt(secs) + " s"};
}

// 9. Identical seeds give identical CSV reports, whatever the thread count.
Outcome determinism() {
  std::size_t same = 0, total = 0;
  for (auto kind : {ExperimentKind::kScaling, ExperimentKind::kHistogram, ExperimentKind::kDiversity,
                    ExperimentKind::kFormulationCompare}) {
    ExperimentConfig c = paper_config(kind, {4, 5}, 3, 909);
    if (kind == ExperimentKind::kFormulationCompare) c.sizes = {8};
    c.steepest = true;
    c.sa.num_reads = 200;
    setenv("MATCH_ANNEAL_THREADS", "1", 1);
    const std::string a = without_timing(report_csv(run_experiment(c)));
    setenv("MATCH_ANNEAL_THREADS", "3", 1);
    const std::string b = without_timing(report_csv(run_experiment(c)));
    unsetenv("MATCH_ANNEAL_THREADS");
    ++total;
    if (a == b) ++same;
  }
  return {same == total, std::to_string(same) + "/" + std::to_string(total) +
                             " experiment kinds reproduce byte for byte"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle agreement", oracle_agreement},
      {"SA recovers optima at n = 4", small_n_recovery},
      {"SA degradation from n = 4 to n = 10", degradation_trend},
      {"approximation bound and trend in N", approximation_bound},
      {"candidate-count statistic", candidate_count},
      {"diversity metric correctness", diversity_correctness},
      {"steepest-descent contract", steepest_contract},
      {"field-workflow replica", replica_workflow},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu %s: %s (%s) [%.1f s]\n", k + 1, o.pass ? "PASS" : "FAIL",
                criteria[k].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
