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
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "match_anneal/instance.hpp"

namespace match_anneal {

using Bits = std::vector<std::uint8_t>;

enum class DecodeKind { kNaive, kApprox };

const char* to_string(DecodeKind kind) noexcept;

// Top-two admissible supporters of one user.
struct CandidateRecord {
  std::size_t first = 0;
  std::size_t second = 0;
  double first_score = 0.0;
  double second_score = 0.0;

  friend bool operator==(const CandidateRecord&, const CandidateRecord&) = default;
};

struct CandidateTable {
  std::vector<CandidateRecord> per_user;
  // U_1(j) and U_2(j): users ranking supporter j first / second, ascending.
  std::vector<std::vector<std::size_t>> first_choice_users;
  std::vector<std::vector<std::size_t>> second_choice_users;
};

// Everything needed to turn a bit-vector back into a matching and audit it.
struct DecodeMap {
  DecodeKind kind = DecodeKind::kNaive;
  std::size_t num_users = 0;
  std::size_t num_supporters = 0;
  std::vector<std::size_t> capacities;
  std::vector<Edge> edges;                  // naive: variable -> edge
  std::vector<CandidateRecord> candidates;  // approx: variable (= user) -> choices

  friend bool operator==(const DecodeMap&, const DecodeMap&) = default;
};

struct Coupling {
  std::size_t var;
  double weight;
};

using QuadraticTerms = std::map<std::pair<std::size_t, std::size_t>, double>;

// E(x) = offset + sum_i linear_i x_i + sum_{i<j} Q_ij x_i x_j over x in {0,1}^n.
class QuboModel {
 public:
  QuboModel() = default;
  QuboModel(std::size_t num_vars, std::vector<double> linear,
            QuadraticTerms quadratic, double offset, DecodeMap decode);

  std::size_t num_vars() const noexcept { return linear_.size(); }
  const std::vector<double>& linear() const noexcept { return linear_; }
  // Keys (i, j) with i < j.
  const QuadraticTerms& quadratic() const noexcept { return quadratic_; }
  double offset() const noexcept { return offset_; }
  const DecodeMap& decode_map() const noexcept { return decode_; }

  std::span<const Coupling> neighbors(std::size_t var) const noexcept {
    return {adjacency_.data() + row_start_[var],
            adjacency_.data() + row_start_[var + 1]};
  }

  // Largest |coefficient|; used as the scale for float tolerances.
  double coefficient_scale() const noexcept { return scale_; }

 private:
  std::vector<double> linear_;
  QuadraticTerms quadratic_;
  double offset_ = 0.0;
  DecodeMap decode_;
  std::vector<std::size_t> row_start_{0};
  std::vector<Coupling> adjacency_;
  double scale_ = 0.0;
};

// Accumulates coefficients; folds x^2 = x and keeps constants in the offset.
class QuboBuilder {
 public:
  explicit QuboBuilder(std::size_t num_vars) : linear_(num_vars, 0.0) {}

  void add_linear(std::size_t var, double value);
  void add_quadratic(std::size_t a, std::size_t b, double value);
  void add_offset(double value) { offset_ += value; }

  // weight * (sum_k coeff_k x_k + constant)^2
  void add_squared_penalty(double weight,
                           std::span<const std::pair<std::size_t, double>> terms,
                           double constant);

  QuboModel build(DecodeMap decode) &&;

 private:
  std::vector<double> linear_;
  QuadraticTerms quadratic_;
  double offset_ = 0.0;
};

// -sum M_e x_e + lambda1 sum_i (sum_{t(e)=i} x_e - 1)^2
//              + lambda2 sum_j (sum_{h(e)=j} x_e - C_j)^2
QuboModel build_naive_qubo(const MatchingInstance& instance, double lambda1,
                           double lambda2);

CandidateTable top2_candidates(const MatchingInstance& instance);

// -sum_i (M1_i x_i + M2_i (1 - x_i))
//   + lambda sum_j (sum_{U1(j)} x_i + sum_{U2(j)} (1 - x_i) - C_j)^2
QuboModel build_approx_qubo(const MatchingInstance& instance, double lambda);

// Sub-instance keeping only each user's top-two edges. Its exact optimum is
// the best the approximate formulation can reach.
MatchingInstance restrict_to_candidates(const MatchingInstance& instance,
                                        const CandidateTable& table);

double energy(const QuboModel& model, std::span<const std::uint8_t> bits);

// Change in energy from flipping `var` in `bits`.
double flip_delta(const QuboModel& model, std::span<const std::uint8_t> bits,
                  std::size_t var);

// Upper-triangular Q with the linear terms on the diagonal:
// E(x) = offset + x^T Q x.
Eigen::MatrixXd to_dense(const QuboModel& model);

Matching decode(const QuboModel& model, std::span<const std::uint8_t> bits);

// Compatibility total of the decoded matching (conflicted users excluded).
double objective(const QuboModel& model, std::span<const std::uint8_t> bits);

// Decoded matching is total, conflict-free and meets every C_j exactly.
bool is_feasible(const QuboModel& model, std::span<const std::uint8_t> bits);

// The instance a decode map was built from. Exact only for naive models;
// approximate models only remember the candidate edges.
MatchingInstance decode_instance(const DecodeMap& decode);

}  // namespace match_anneal
