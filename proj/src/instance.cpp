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

#include "match_anneal/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "match_anneal/errors.hpp"

namespace match_anneal {

QuestionnaireSchema::QuestionnaireSchema(std::vector<QuestionnaireItem> items)
    : items_(std::move(items)) {
  if (items_.empty()) throw InputError("schema: item list is empty");
  std::unordered_set<std::string> seen;
  for (const auto& item : items_) {
    if (item.level_count < 2) {
      throw InputError("schema: item '" + item.item_id +
                       "' has level_count < 2");
    }
    if (!seen.insert(item.item_id).second) {
      throw InputError("schema: duplicate item_id '" + item.item_id + "'");
    }
  }
}

double QuestionnaireSchema::max_score() const noexcept {
  double total = 0.0;
  for (const auto& item : items_) total += item.level_count - 1;
  return total;
}

void validate_profile(const ParticipantProfile& profile,
                      const QuestionnaireSchema& schema) {
  for (const auto& item : schema.items()) {
    auto it = profile.responses.find(item.item_id);
    if (it == profile.responses.end()) {
      throw InputError("participant '" + profile.id +
                       "': missing response for item '" + item.item_id + "'");
    }
    if (it->second < 1 || it->second > item.level_count) {
      throw InputError("participant '" + profile.id + "': response " +
                       std::to_string(it->second) + " for item '" +
                       item.item_id + "' outside [1, " +
                       std::to_string(item.level_count) + "]");
    }
  }
}

int item_score(int response_user, int response_supporter, int levels) {
  if (levels < 2) throw InputError("item_score: levels must be >= 2");
  if (response_user < 1 || response_user > levels || response_supporter < 1 ||
      response_supporter > levels) {
    throw InputError("item_score: response outside [1, " +
                     std::to_string(levels) + "]");
  }
  return (levels - 1) - std::abs(response_user - response_supporter);
}

CompatibilityMatrix compatibility_matrix(
    std::span<const ParticipantProfile> users,
    std::span<const ParticipantProfile> supporters,
    const QuestionnaireSchema& schema) {
  for (const auto& p : users) validate_profile(p, schema);
  for (const auto& p : supporters) validate_profile(p, schema);

  CompatibilityMatrix out;
  out.scores = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(users.size()),
                                     static_cast<Eigen::Index>(supporters.size()));
  for (const auto& u : users) out.user_ids.push_back(u.id);
  for (const auto& s : supporters) out.supporter_ids.push_back(s.id);

  for (std::size_t i = 0; i < users.size(); ++i) {
    for (std::size_t j = 0; j < supporters.size(); ++j) {
      int total = 0;
      for (const auto& item : schema.items()) {
        total += item_score(users[i].responses.at(item.item_id),
                            supporters[j].responses.at(item.item_id),
                            item.level_count);
      }
      out.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          total;
    }
  }
  return out;
}

MatchingInstance::MatchingInstance(std::size_t num_users,
                                   std::size_t num_supporters,
                                   std::vector<Edge> edges,
                                   std::vector<std::size_t> capacities)
    : num_users_(num_users),
      num_supporters_(num_supporters),
      edges_(std::move(edges)),
      capacities_(std::move(capacities)) {
  if (capacities_.size() != num_supporters_) {
    throw InputError("instance: expected " + std::to_string(num_supporters_) +
                     " capacities, got " + std::to_string(capacities_.size()));
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.user, a.supporter) < std::tie(b.user, b.supporter);
  });
  user_edges_.resize(num_users_);
  supporter_edges_.resize(num_supporters_);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.user >= num_users_ || edge.supporter >= num_supporters_) {
      throw InputError("instance: edge (" + std::to_string(edge.user) + ", " +
                       std::to_string(edge.supporter) + ") out of range");
    }
    if (!(edge.score >= 0.0) || !std::isfinite(edge.score)) {
      throw InputError("instance: edge (" + std::to_string(edge.user) + ", " +
                       std::to_string(edge.supporter) +
                       ") has a negative or non-finite score");
    }
    if (e > 0 && edges_[e - 1].user == edge.user &&
        edges_[e - 1].supporter == edge.supporter) {
      throw InputError("instance: duplicate edge (" + std::to_string(edge.user) +
                       ", " + std::to_string(edge.supporter) + ")");
    }
    user_edges_[edge.user].push_back(e);
    supporter_edges_[edge.supporter].push_back(e);
  }
}

std::optional<std::size_t> MatchingInstance::find_edge(
    std::size_t user, std::size_t supporter) const {
  if (user >= num_users_) return std::nullopt;
  for (std::size_t e : user_edges_[user]) {
    if (edges_[e].supporter == supporter) return e;
  }
  return std::nullopt;
}

double MatchingInstance::max_score() const noexcept {
  double best = 0.0;
  for (const auto& e : edges_) best = std::max(best, e.score);
  return best;
}

std::size_t MatchingInstance::total_capacity() const noexcept {
  return std::accumulate(capacities_.begin(), capacities_.end(), std::size_t{0});
}

std::vector<std::size_t> balanced_capacities(std::size_t num_users,
                                             std::size_t num_supporters) {
  if (num_supporters == 0) return {};
  std::vector<std::size_t> caps(num_supporters, num_users / num_supporters);
  for (std::size_t j = 0; j < num_users % num_supporters; ++j) ++caps[j];
  return caps;
}

bool Matching::total() const noexcept {
  return conflicted.empty() &&
         std::all_of(assignment.begin(), assignment.end(),
                     [](const auto& a) { return a.has_value(); });
}

double matching_score(const MatchingInstance& instance,
                      const Matching& matching) {
  double total = 0.0;
  for (std::size_t i = 0; i < matching.assignment.size(); ++i) {
    if (!matching.assignment[i]) continue;
    auto e = instance.find_edge(i, *matching.assignment[i]);
    if (!e) {
      throw InputError("matching assigns user " + std::to_string(i) +
                       " to supporter " +
                       std::to_string(*matching.assignment[i]) +
                       ", which is not an edge");
    }
    total += instance.edges()[*e].score;
  }
  return total;
}

std::vector<std::size_t> supporter_loads(const MatchingInstance& instance,
                                         const Matching& matching) {
  std::vector<std::size_t> loads(instance.num_supporters(), 0);
  for (const auto& a : matching.assignment) {
    if (a && *a < loads.size()) ++loads[*a];
  }
  return loads;
}

bool is_feasible(const MatchingInstance& instance, const Matching& matching) {
  if (matching.assignment.size() != instance.num_users()) return false;
  if (!matching.total()) return false;
  for (std::size_t i = 0; i < instance.num_users(); ++i) {
    if (!instance.find_edge(i, *matching.assignment[i])) return false;
  }
  return supporter_loads(instance, matching) == instance.capacities();
}

bool availability_overlaps(const ParticipantProfile& user,
                           const ParticipantProfile& supporter) {
  // Both sets are ordered: a single merge pass decides intersection.
  auto a = user.availability.begin();
  auto b = supporter.availability.begin();
  while (a != user.availability.end() && b != supporter.availability.end()) {
    if (*a == *b) return true;
    if (*a < *b) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

bool infant_care_compatible(const ParticipantProfile& user,
                            const ParticipantProfile& supporter) {
  return !user.needs_infant_care || supporter.can_care_infant;
}

std::vector<PairRule> default_pair_rules() {
  return {availability_overlaps, infant_care_compatible};
}

MatchingInstance feasible_pairs(const CompatibilityMatrix& matrix,
                                std::span<const ParticipantProfile> users,
                                std::span<const ParticipantProfile> supporters,
                                std::vector<std::size_t> capacities,
                                std::span<const PairRule> rules) {
  if (static_cast<std::size_t>(matrix.rows()) != users.size() ||
      static_cast<std::size_t>(matrix.cols()) != supporters.size()) {
    throw InputError("feasible_pairs: matrix is " +
                     std::to_string(matrix.rows()) + "x" +
                     std::to_string(matrix.cols()) + " but there are " +
                     std::to_string(users.size()) + " users and " +
                     std::to_string(supporters.size()) + " supporters");
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < users.size(); ++i) {
    for (std::size_t j = 0; j < supporters.size(); ++j) {
      const double score =
          matrix.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (std::isnan(score)) continue;
      const bool admissible =
          std::all_of(rules.begin(), rules.end(), [&](const PairRule& rule) {
            return rule(users[i], supporters[j]);
          });
      if (admissible) edges.push_back({i, j, score});
    }
  }
  MatchingInstance out(users.size(), supporters.size(), std::move(edges),
                       std::move(capacities));
  out.user_ids = matrix.user_ids;
  out.supporter_ids = matrix.supporter_ids;
  return out;
}

MatchingInstance feasible_pairs(const CompatibilityMatrix& matrix,
                                std::span<const ParticipantProfile> users,
                                std::span<const ParticipantProfile> supporters) {
  const auto rules = default_pair_rules();
  return feasible_pairs(matrix, users, supporters,
                        balanced_capacities(users.size(), supporters.size()),
                        rules);
}

CompatibilityMatrix to_matrix(const MatchingInstance& instance) {
  CompatibilityMatrix out;
  out.scores = Eigen::MatrixXd::Constant(
      static_cast<Eigen::Index>(instance.num_users()),
      static_cast<Eigen::Index>(instance.num_supporters()),
      std::numeric_limits<double>::quiet_NaN());
  for (const auto& e : instance.edges()) {
    out.scores(static_cast<Eigen::Index>(e.user),
               static_cast<Eigen::Index>(e.supporter)) = e.score;
  }
  out.user_ids = instance.user_ids;
  out.supporter_ids = instance.supporter_ids;
  return out;
}

namespace {

// Capacitated Kuhn matching: each supporter holds up to C_j users.
class CapacitatedMatcher {
 public:
  explicit CapacitatedMatcher(const MatchingInstance& instance)
      : instance_(instance),
        owner_(instance.num_users()),
        held_(instance.num_supporters()) {}

  bool augment(std::size_t user) {
    visited_.assign(instance_.num_supporters(), false);
    return try_user(user);
  }

  const std::vector<std::optional<std::size_t>>& owner() const { return owner_; }
  const std::vector<std::vector<std::size_t>>& held() const { return held_; }

 private:
  bool try_user(std::size_t user) {
    for (std::size_t e : instance_.user_edges(user)) {
      const std::size_t s = instance_.edges()[e].supporter;
      if (visited_[s]) continue;
      visited_[s] = true;
      if (held_[s].size() < instance_.capacities()[s]) {
        assign(user, s);
        return true;
      }
      for (std::size_t k = 0; k < held_[s].size(); ++k) {
        const std::size_t other = held_[s][k];
        if (try_user(other)) {
          // `other` moved elsewhere; its slot at s now belongs to `user`.
          held_[s][k] = user;
          owner_[user] = s;
          return true;
        }
      }
    }
    return false;
  }

  void assign(std::size_t user, std::size_t s) {
    held_[s].push_back(user);
    owner_[user] = s;
  }

  const MatchingInstance& instance_;
  std::vector<std::optional<std::size_t>> owner_;
  std::vector<std::vector<std::size_t>> held_;
  std::vector<bool> visited_;
};

}  // namespace

SolvabilityReport check_solvability(const MatchingInstance& instance) {
  SolvabilityReport report;
  CapacitatedMatcher matcher(instance);
  std::optional<std::size_t> first_unmatched;
  for (std::size_t i = 0; i < instance.num_users(); ++i) {
    if (!matcher.augment(i) && !first_unmatched) first_unmatched = i;
  }
  report.witness.assignment = matcher.owner();

  if (first_unmatched) {
    // Alternating search from an exposed user: every reached supporter is
    // full, and the reached users outnumber the reached capacity.
    std::vector<bool> user_seen(instance.num_users(), false);
    std::vector<bool> supporter_seen(instance.num_supporters(), false);
    std::vector<std::size_t> frontier{*first_unmatched};
    user_seen[*first_unmatched] = true;
    while (!frontier.empty()) {
      const std::size_t u = frontier.back();
      frontier.pop_back();
      for (std::size_t e : instance.user_edges(u)) {
        const std::size_t s = instance.edges()[e].supporter;
        if (supporter_seen[s]) continue;
        supporter_seen[s] = true;
        for (std::size_t v : matcher.held()[s]) {
          if (!user_seen[v]) {
            user_seen[v] = true;
            frontier.push_back(v);
          }
        }
      }
    }
    for (std::size_t i = 0; i < user_seen.size(); ++i) {
      if (user_seen[i]) report.blocking_users.push_back(i);
    }
    for (std::size_t j = 0; j < supporter_seen.size(); ++j) {
      if (supporter_seen[j]) report.blocking_supporters.push_back(j);
    }
    std::size_t cap = 0;
    for (std::size_t j : report.blocking_supporters) cap += instance.capacities()[j];
    report.reason = std::to_string(report.blocking_users.size()) +
                    " users can only reach supporters with total capacity " +
                    std::to_string(cap);
    return report;
  }

  if (instance.total_capacity() != instance.num_users()) {
    const auto loads = supporter_loads(instance, report.witness);
    for (std::size_t j = 0; j < loads.size(); ++j) {
      if (loads[j] < instance.capacities()[j]) report.blocking_supporters.push_back(j);
    }
    report.reason = "total capacity " +
                    std::to_string(instance.total_capacity()) +
                    " exceeds the " + std::to_string(instance.num_users()) +
                    " users available";
    return report;
  }

  report.perfect_matching_possible = true;
  return report;
}

}  // namespace match_anneal
