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

#include "match_anneal/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "format.hpp"
#include "match_anneal/errors.hpp"

namespace match_anneal {

double relative_error(double objective, double optimum) {
  if (optimum == 0.0) throw InputError("relative_error: undefined for E* = 0");
  return (optimum - objective) / optimum;
}

FeasibilityAudit feasibility_audit(const SampleSet& samples,
                                   const MatchingInstance& instance,
                                   const QuboModel& model) {
  const DecodeMap& d = model.decode_map();
  if (d.num_users != instance.num_users() ||
      d.num_supporters != instance.num_supporters()) {
    throw InputError("feasibility_audit: model and instance sizes differ");
  }
  FeasibilityAudit audit;
  std::size_t feasible = 0;
  for (std::size_t k = 0; k < samples.samples.size(); ++k) {
    const Bits& bits = samples.samples[k].bits;
    if (bits.size() != model.num_vars()) {
      throw InputError("feasibility_audit: sample " + std::to_string(k) +
                       " has the wrong length");
    }
    std::vector<long> per_user(d.num_users, 0);
    std::vector<long> per_supporter(d.num_supporters, 0);
    if (d.kind == DecodeKind::kNaive) {
      for (std::size_t e = 0; e < bits.size(); ++e) {
        if (!bits[e]) continue;
        ++per_user[d.edges[e].user];
        ++per_supporter[d.edges[e].supporter];
      }
    } else {
      for (std::size_t i = 0; i < bits.size(); ++i) {
        ++per_user[i];
        ++per_supporter[bits[i] ? d.candidates[i].first : d.candidates[i].second];
      }
    }
    SampleViolation v;
    v.sample = k;
    for (std::size_t i = 0; i < per_user.size(); ++i) {
      if (per_user[i] != 1) v.violated_users.push_back(i);
    }
    v.supporter_deviation.resize(per_supporter.size());
    bool supporters_ok = true;
    for (std::size_t j = 0; j < per_supporter.size(); ++j) {
      v.supporter_deviation[j] =
          per_supporter[j] - static_cast<long>(instance.capacities()[j]);
      supporters_ok = supporters_ok && v.supporter_deviation[j] == 0;
    }
    v.feasible = v.violated_users.empty() && supporters_ok;
    if (v.feasible) ++feasible;
    audit.per_sample.push_back(std::move(v));
  }
  if (!samples.samples.empty()) {
    audit.feasibility_rate =
        static_cast<double>(feasible) / static_cast<double>(samples.samples.size());
  }
  return audit;
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
  if (bins < 1) throw InputError("histogram: bins must be >= 1");
  Histogram h;
  double hi = 0.0;
  for (double v : values) hi = std::max(hi, v);
  if (!(hi > 0.0)) hi = 1.0;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges[b] = hi * static_cast<double>(b) / static_cast<double>(bins);
  }
  h.probability.assign(bins, 0.0);
  h.count = values.size();
  h.empty = values.empty();
  if (h.empty) return h;
  const double w = 1.0 / static_cast<double>(values.size());
  for (double v : values) {
    auto b = static_cast<std::ptrdiff_t>(std::floor(v / hi * static_cast<double>(bins)));
    b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    h.probability[static_cast<std::size_t>(b)] += w;
  }
  return h;
}

QualityReport quality_report(const SampleSet& samples, const QuboModel& model,
                             double optimum, std::size_t bins) {
  QualityReport r;
  r.optimum = optimum;
  r.feasibility_rate = samples.feasibility_rate();
  std::vector<double> errors;
  for (const Sample& s : samples.samples) {
    if (!s.feasible) {
      r.relative_errors.emplace_back(std::nullopt);
      continue;
    }
    const double obj = objective(model, s.bits);
    const double err = relative_error(obj, optimum);
    r.relative_errors.emplace_back(err);
    errors.push_back(err);
    if (!r.best_objective || obj > *r.best_objective) r.best_objective = obj;
  }
  if (r.best_objective) r.best_relative_error = relative_error(*r.best_objective, optimum);
  r.histogram = histogram(errors, bins);
  return r;
}

Histogram energy_histogram(const SampleSet& samples, const QuboModel& model,
                           double optimum, std::size_t bins) {
  return quality_report(samples, model, optimum, bins).histogram;
}

void DiversityConfig::validate() const {
  if (!(alpha >= 0.0)) throw InputError("diversity: alpha must be >= 0");
  if (!(R > 0.0 && R <= 1.0)) throw InputError("diversity: R must lie in (0, 1]");
}

namespace {

std::size_t hamming(const Bits& a, const Bits& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

std::uint64_t bit(std::size_t v) { return std::uint64_t{1} << v; }

class MisSearch {
 public:
  explicit MisSearch(std::span<const std::uint64_t> adjacency) : adj_(adjacency) {}

  std::uint64_t run() {
    const std::uint64_t all =
        adj_.size() == 64 ? ~std::uint64_t{0} : bit(adj_.size()) - 1;
    search(all, 0, 0);
    return best_set_;
  }

 private:
  // Vertices of P partitioned greedily into cliques; an independent set
  // holds at most one vertex per clique.
  int clique_cover(std::uint64_t p) const {
    int count = 0;
    while (p) {
      const int v = std::countr_zero(p);
      p &= ~bit(v);
      std::uint64_t candidates = p & adj_[v];
      while (candidates) {
        const int w = std::countr_zero(candidates);
        p &= ~bit(w);
        candidates &= adj_[w] & ~bit(w);
      }
      ++count;
    }
    return count;
  }

  void search(std::uint64_t p, std::uint64_t current, int size) {
    // Vertices with no neighbour left in P are always taken.
    std::uint64_t isolated = 0;
    int max_degree = -1;
    int pivot = -1;
    for (std::uint64_t rest = p; rest;) {
      const int v = std::countr_zero(rest);
      rest &= rest - 1;
      const int deg = std::popcount(adj_[v] & p);
      if (deg == 0) {
        isolated |= bit(v);
      } else if (deg > max_degree) {
        max_degree = deg;
        pivot = v;
      }
    }
    current |= isolated;
    size += std::popcount(isolated);
    p &= ~isolated;
    if (p == 0) {
      if (size > best_size_) {
        best_size_ = size;
        best_set_ = current;
      }
      return;
    }
    if (size + clique_cover(p) <= best_size_) return;
    search(p & ~adj_[pivot] & ~bit(pivot), current | bit(pivot), size + 1);
    search(p & ~bit(pivot), current, size);
  }

  std::span<const std::uint64_t> adj_;
  std::uint64_t best_set_ = 0;
  int best_size_ = -1;
};

}  // namespace

std::vector<std::uint64_t> similarity_masks(std::span<const Bits> solutions,
                                            double threshold) {
  if (solutions.size() > 64) throw InputError("similarity_masks: more than 64 solutions");
  std::vector<std::uint64_t> masks(solutions.size(), 0);
  for (std::size_t a = 0; a < solutions.size(); ++a) {
    for (std::size_t b = a + 1; b < solutions.size(); ++b) {
      if (static_cast<double>(hamming(solutions[a], solutions[b])) <= threshold) {
        masks[a] |= bit(b);
        masks[b] |= bit(a);
      }
    }
  }
  return masks;
}

std::vector<std::vector<std::size_t>> similarity_lists(std::span<const Bits> solutions,
                                                       double threshold) {
  std::vector<std::vector<std::size_t>> lists(solutions.size());
  for (std::size_t a = 0; a < solutions.size(); ++a) {
    for (std::size_t b = a + 1; b < solutions.size(); ++b) {
      if (static_cast<double>(hamming(solutions[a], solutions[b])) <= threshold) {
        lists[a].push_back(b);
        lists[b].push_back(a);
      }
    }
  }
  return lists;
}

std::vector<std::size_t> maximum_independent_set(std::span<const std::uint64_t> adjacency) {
  if (adjacency.size() > 64) throw InputError("maximum_independent_set: more than 64 vertices");
  if (adjacency.empty()) return {};
  const std::uint64_t set = MisSearch(adjacency).run();
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < adjacency.size(); ++v) {
    if (set & bit(v)) out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> greedy_independent_set(
    const std::vector<std::vector<std::size_t>>& adjacency) {
  const std::size_t n = adjacency.size();
  std::vector<bool> alive(n, true);
  std::vector<std::size_t> degree(n);
  for (std::size_t v = 0; v < n; ++v) degree[v] = adjacency[v].size();
  std::vector<std::size_t> out;
  auto remove = [&](std::size_t v) {
    alive[v] = false;
    for (std::size_t w : adjacency[v]) {
      if (alive[w]) --degree[w];
    }
  };
  for (;;) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (alive[v] && (pick == n || degree[v] < degree[pick])) pick = v;
    }
    if (pick == n) break;
    out.push_back(pick);
    remove(pick);
    for (std::size_t w : adjacency[pick]) {
      if (alive[w]) remove(w);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DiversityResult diversity(const SampleSet& samples, const QuboModel& model,
                          double optimum, const DiversityConfig& config) {
  config.validate();
  if (samples.samples.empty()) throw InputError("diversity: empty sample set");
  DiversityResult result;

  std::vector<std::pair<double, const Bits*>> feasible;
  for (const Sample& s : samples.samples) {
    if (s.feasible) feasible.emplace_back(objective(model, s.bits), &s.bits);
  }
  if (feasible.empty()) {
    result.diagnostic = "no feasible samples";
    return result;
  }
  double best = feasible.front().first;
  for (const auto& f : feasible) best = std::max(best, f.first);
  const double floor = optimum - config.alpha * (optimum - best);
  const double tol = 1e-9 * std::max(1.0, std::abs(optimum));

  std::vector<Bits> unique;
  for (const auto& [obj, bits] : feasible) {
    if (obj >= floor - tol) unique.push_back(*bits);
  }
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  result.candidates = unique.size();
  if (unique.empty()) {
    result.diagnostic = "no feasible samples inside the allowable range";
    return result;
  }

  const std::size_t n = config.scale ? config.scale : model.decode_map().num_users;
  const double threshold = config.R * static_cast<double>(n);
  std::vector<std::size_t> chosen;
  if (unique.size() <= kExactMisLimit) {
    chosen = maximum_independent_set(similarity_masks(unique, threshold));
  } else {
    chosen = greedy_independent_set(similarity_lists(unique, threshold));
    result.exact = false;
  }
  result.size = chosen.size();
  for (std::size_t v : chosen) result.representatives.push_back(unique[v]);
  return result;
}

std::vector<DiversityPoint> diversity_curve(const SampleSet& samples,
                                            const QuboModel& model, double optimum,
                                            std::span<const double> alphas,
                                            std::span<const double> Rs,
                                            std::size_t scale) {
  std::vector<DiversityPoint> out;
  for (double R : Rs) {
    for (double alpha : alphas) {
      const DiversityResult d = diversity(samples, model, optimum, {alpha, R, scale});
      out.push_back({alpha, R, d.size, d.exact});
    }
  }
  return out;
}

namespace {

std::string bits_string(const Bits& bits) {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) s[i] = '1';
  }
  return s;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const Histogram& h) {
  return {{"edges", h.edges}, {"probability", h.probability}, {"count", h.count},
          {"empty", h.empty}};
}

nlohmann::json to_json(const QualityReport& report) {
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& e : report.relative_errors) errors.push_back(optional_json(e));
  return {{"optimum", report.optimum},
          {"best_objective", optional_json(report.best_objective)},
          {"best_relative_error", optional_json(report.best_relative_error)},
          {"feasibility_rate", report.feasibility_rate},
          {"relative_errors", errors},
          {"histogram", to_json(report.histogram)}};
}

nlohmann::json to_json(const DiversityResult& result) {
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& b : result.representatives) reps.push_back(bits_string(b));
  return {{"size", result.size}, {"exact", result.exact},
          {"candidates", result.candidates}, {"representatives", reps},
          {"diagnostic", result.diagnostic}};
}

nlohmann::json to_json(const FeasibilityAudit& audit) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& v : audit.per_sample) {
    rows.push_back({{"sample", v.sample},
                    {"feasible", v.feasible},
                    {"violated_users", v.violated_users},
                    {"supporter_deviation", v.supporter_deviation}});
  }
  return {{"feasibility_rate", audit.feasibility_rate}, {"samples", rows}};
}

std::string quality_csv(const SampleSet& samples, const QuboModel& model,
                        const QualityReport& report) {
  std::ostringstream out;
  out << "sample,energy,feasible,objective,relative_error\n";
  for (std::size_t k = 0; k < samples.samples.size(); ++k) {
    const Sample& s = samples.samples[k];
    out << k << ',' << detail::format_number(s.energy) << ','
        << (s.feasible ? 1 : 0) << ','
        << detail::format_number(objective(model, s.bits)) << ','
        << detail::format_number(report.relative_errors.at(k)) << '\n';
  }
  return out.str();
}

std::string diversity_csv(std::span<const DiversityPoint> points) {
  std::ostringstream out;
  out << "R,alpha,diversity,exact\n";
  for (const auto& p : points) {
    out << detail::format_number(p.R) << ',' << detail::format_number(p.alpha) << ','
        << p.size << ',' << (p.exact ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace match_anneal
