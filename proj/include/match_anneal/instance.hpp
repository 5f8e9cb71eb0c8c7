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
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace match_anneal {

enum class ScoringMode { kAgreement };

struct QuestionnaireItem {
  std::string item_id;
  std::string category;
  int level_count = 4;
  ScoringMode scoring_mode = ScoringMode::kAgreement;
};

// Ordered, validated list of questionnaire items.
class QuestionnaireSchema {
 public:
  explicit QuestionnaireSchema(std::vector<QuestionnaireItem> items);

  const std::vector<QuestionnaireItem>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }

  // Largest attainable compatibility score: sum of (levels - 1).
  double max_score() const noexcept;

 private:
  std::vector<QuestionnaireItem> items_;
};

enum class Role { kUser, kSupporter };

struct ParticipantProfile {
  std::string id;
  Role role = Role::kUser;
  std::map<std::string, int> responses;  // item_id -> level in [1, level_count]
  std::set<int> availability;            // discrete time-slot ids
  bool needs_infant_care = false;        // users only
  bool can_care_infant = false;          // supporters only
};

// Throws InputError naming the participant and item on a missing or
// out-of-range response.
void validate_profile(const ParticipantProfile& profile,
                      const QuestionnaireSchema& schema);

// Agreement score of one item: (levels - 1) - |a - b|.
int item_score(int response_user, int response_supporter, int levels);

// Dense |U| x |S| score grid. NaN marks a pair that is excluded up front
// (e.g. a precomputed mask) and is never turned into an edge.
struct CompatibilityMatrix {
  Eigen::MatrixXd scores;
  std::vector<std::string> user_ids;
  std::vector<std::string> supporter_ids;

  Eigen::Index rows() const noexcept { return scores.rows(); }
  Eigen::Index cols() const noexcept { return scores.cols(); }
};

CompatibilityMatrix compatibility_matrix(
    std::span<const ParticipantProfile> users,
    std::span<const ParticipantProfile> supporters,
    const QuestionnaireSchema& schema);

struct Edge {
  std::size_t user = 0;
  std::size_t supporter = 0;
  double score = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Bipartite edge set with per-supporter capacities. Edges are stored sorted
// by (user, supporter); that order is also the naive QUBO variable order.
class MatchingInstance {
 public:
  MatchingInstance() = default;
  MatchingInstance(std::size_t num_users, std::size_t num_supporters,
                   std::vector<Edge> edges, std::vector<std::size_t> capacities);

  std::size_t num_users() const noexcept { return num_users_; }
  std::size_t num_supporters() const noexcept { return num_supporters_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::size_t>& capacities() const noexcept { return capacities_; }

  // Edge indices incident to a user (ascending supporter) or a supporter
  // (ascending user).
  const std::vector<std::size_t>& user_edges(std::size_t user) const {
    return user_edges_.at(user);
  }
  const std::vector<std::size_t>& supporter_edges(std::size_t supporter) const {
    return supporter_edges_.at(supporter);
  }

  std::optional<std::size_t> find_edge(std::size_t user,
                                       std::size_t supporter) const;
  double max_score() const noexcept;
  std::size_t total_capacity() const noexcept;

  // Optional display labels; empty when the instance was built from indices.
  std::vector<std::string> user_ids;
  std::vector<std::string> supporter_ids;

 private:
  std::size_t num_users_ = 0;
  std::size_t num_supporters_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> capacities_;
  std::vector<std::vector<std::size_t>> user_edges_;
  std::vector<std::vector<std::size_t>> supporter_edges_;
};

// C_j = n / m, remainder handed to the lowest-index supporters.
std::vector<std::size_t> balanced_capacities(std::size_t num_users,
                                             std::size_t num_supporters);

// Per-user supporter choice. `conflicted` lists users whose decoded bits
// selected two or more supporters; those users are left unassigned.
struct Matching {
  std::vector<std::optional<std::size_t>> assignment;
  std::vector<std::size_t> conflicted;

  bool total() const noexcept;
  friend bool operator==(const Matching&, const Matching&) = default;
  friend auto operator<=>(const Matching&, const Matching&) = default;
};

// Sum of M_e over assigned pairs, accumulated in user order. Throws
// InputError if an assigned pair is not an edge.
double matching_score(const MatchingInstance& instance, const Matching& matching);

// Number of users assigned to each supporter.
std::vector<std::size_t> supporter_loads(const MatchingInstance& instance,
                                         const Matching& matching);

// Every user assigned exactly once to an existing edge and every supporter
// receiving exactly C_j users.
bool is_feasible(const MatchingInstance& instance, const Matching& matching);

// ---- pre-filtering ----

// A pair rule returns true when the (user, supporter) pair is admissible.
using PairRule = std::function<bool(const ParticipantProfile& user,
                                    const ParticipantProfile& supporter)>;

bool availability_overlaps(const ParticipantProfile& user,
                           const ParticipantProfile& supporter);
bool infant_care_compatible(const ParticipantProfile& user,
                            const ParticipantProfile& supporter);

std::vector<PairRule> default_pair_rules();

// Keeps pair (i, j) iff every rule admits it and the matrix entry is not NaN.
MatchingInstance feasible_pairs(const CompatibilityMatrix& matrix,
                                std::span<const ParticipantProfile> users,
                                std::span<const ParticipantProfile> supporters,
                                std::vector<std::size_t> capacities,
                                std::span<const PairRule> rules);

MatchingInstance feasible_pairs(const CompatibilityMatrix& matrix,
                                std::span<const ParticipantProfile> users,
                                std::span<const ParticipantProfile> supporters);

// Matrix view of an instance: edge scores, NaN where no edge exists.
CompatibilityMatrix to_matrix(const MatchingInstance& instance);

// ---- solvability ----

struct SolvabilityReport {
  bool perfect_matching_possible = false;
  // Maximum-cardinality capacitated matching found by augmenting paths.
  Matching witness;
  // When impossible: a user set Z whose neighbourhood N(Z) has total
  // capacity below |Z| (Hall violation), or under-filled supporters when the
  // capacities exceed the user count.
  std::vector<std::size_t> blocking_users;
  std::vector<std::size_t> blocking_supporters;
  std::string reason;
};

SolvabilityReport check_solvability(const MatchingInstance& instance);

}  // namespace match_anneal
