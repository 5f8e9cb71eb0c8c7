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

#include "match_anneal/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "match_anneal/errors.hpp"

namespace match_anneal {

const char* to_string(DecodeKind kind) noexcept {
  return kind == DecodeKind::kNaive ? "naive" : "approx";
}

QuboModel::QuboModel(std::size_t num_vars, std::vector<double> linear,
                     QuadraticTerms quadratic, double offset, DecodeMap decode)
    : linear_(std::move(linear)),
      quadratic_(std::move(quadratic)),
      offset_(offset),
      decode_(std::move(decode)) {
  if (linear_.size() != num_vars) {
    throw InputError("qubo: linear vector has " + std::to_string(linear_.size()) +
                     " entries for " + std::to_string(num_vars) + " variables");
  }
  std::vector<std::size_t> degree(num_vars, 0);
  for (const auto& [key, w] : quadratic_) {
    const auto [a, b] = key;
    if (a >= b || b >= num_vars) {
      throw InputError("qubo: invalid quadratic key (" + std::to_string(a) +
                       ", " + std::to_string(b) + ")");
    }
    ++degree[a];
    ++degree[b];
    scale_ = std::max(scale_, std::abs(w));
  }
  for (double v : linear_) scale_ = std::max(scale_, std::abs(v));

  row_start_.assign(num_vars + 1, 0);
  for (std::size_t i = 0; i < num_vars; ++i) row_start_[i + 1] = row_start_[i] + degree[i];
  adjacency_.resize(row_start_.back());
  std::vector<std::size_t> fill(row_start_.begin(), row_start_.end() - 1);
  for (const auto& [key, w] : quadratic_) {
    adjacency_[fill[key.first]++] = {key.second, w};
    adjacency_[fill[key.second]++] = {key.first, w};
  }
}

void QuboBuilder::add_linear(std::size_t var, double value) {
  linear_.at(var) += value;
}

void QuboBuilder::add_quadratic(std::size_t a, std::size_t b, double value) {
  if (a == b) {
    add_linear(a, value);
    return;
  }
  if (a > b) std::swap(a, b);
  if (b >= linear_.size()) throw InputError("qubo: quadratic index out of range");
  quadratic_[{a, b}] += value;
}

void QuboBuilder::add_squared_penalty(
    double weight, std::span<const std::pair<std::size_t, double>> terms,
    double constant) {
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto [var, coeff] = terms[k];
    add_linear(var, weight * (coeff * coeff + 2.0 * constant * coeff));
    for (std::size_t l = k + 1; l < terms.size(); ++l) {
      add_quadratic(var, terms[l].first, 2.0 * weight * coeff * terms[l].second);
    }
  }
  add_offset(weight * constant * constant);
}

QuboModel QuboBuilder::build(DecodeMap decode) && {
  const std::size_t n = linear_.size();
  return QuboModel(n, std::move(linear_), std::move(quadratic_), offset_,
                   std::move(decode));
}

namespace {

void require_positive(double lambda, const char* name) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InputError(std::string("penalty weight ") + name + " must be positive");
  }
}

std::string user_label(const MatchingInstance& instance, std::size_t user) {
  if (user < instance.user_ids.size()) return "'" + instance.user_ids[user] + "'";
  return std::to_string(user);
}

}  // namespace

QuboModel build_naive_qubo(const MatchingInstance& instance, double lambda1,
                           double lambda2) {
  require_positive(lambda1, "lambda1");
  require_positive(lambda2, "lambda2");
  if (instance.num_users() == 0 || instance.edges().empty()) {
    throw InputError("naive qubo: instance has no users or no edges");
  }
  const auto& edges = instance.edges();
  QuboBuilder builder(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) builder.add_linear(e, -edges[e].score);

  std::vector<std::pair<std::size_t, double>> terms;
  for (std::size_t i = 0; i < instance.num_users(); ++i) {
    terms.clear();
    for (std::size_t e : instance.user_edges(i)) terms.emplace_back(e, 1.0);
    builder.add_squared_penalty(lambda1, terms, -1.0);
  }
  for (std::size_t j = 0; j < instance.num_supporters(); ++j) {
    terms.clear();
    for (std::size_t e : instance.supporter_edges(j)) terms.emplace_back(e, 1.0);
    builder.add_squared_penalty(lambda2, terms,
                                -static_cast<double>(instance.capacities()[j]));
  }

  DecodeMap decode;
  decode.kind = DecodeKind::kNaive;
  decode.num_users = instance.num_users();
  decode.num_supporters = instance.num_supporters();
  decode.capacities = instance.capacities();
  decode.edges = edges;
  return std::move(builder).build(std::move(decode));
}

CandidateTable top2_candidates(const MatchingInstance& instance) {
  CandidateTable table;
  table.per_user.reserve(instance.num_users());
  table.first_choice_users.resize(instance.num_supporters());
  table.second_choice_users.resize(instance.num_supporters());
  std::vector<std::size_t> ranked;
  for (std::size_t i = 0; i < instance.num_users(); ++i) {
    ranked = instance.user_edges(i);
    if (ranked.size() < 2) {
      throw ApproximationInfeasibleError(
          "user " + user_label(instance, i) + " has " +
              std::to_string(ranked.size()) +
              " admissible supporters; the top-2 formulation needs at least 2",
          i);
    }
    // user_edges is in ascending supporter order, so a stable sort on score
    // leaves ties with the lower supporter index first.
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
      return instance.edges()[a].score > instance.edges()[b].score;
    });
    const Edge& first = instance.edges()[ranked[0]];
    const Edge& second = instance.edges()[ranked[1]];
    table.per_user.push_back({first.supporter, second.supporter, first.score, second.score});
    table.first_choice_users[first.supporter].push_back(i);
    table.second_choice_users[second.supporter].push_back(i);
  }
  return table;
}

QuboModel build_approx_qubo(const MatchingInstance& instance, double lambda) {
  require_positive(lambda, "lambda");
  if (instance.num_users() == 0) throw InputError("approx qubo: instance has no users");
  const CandidateTable table = top2_candidates(instance);
  const std::size_t n = instance.num_users();

  QuboBuilder builder(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = table.per_user[i];
    builder.add_offset(-rec.second_score);
    builder.add_linear(i, -(rec.first_score - rec.second_score));
  }
  std::vector<std::pair<std::size_t, double>> terms;
  for (std::size_t j = 0; j < instance.num_supporters(); ++j) {
    terms.clear();
    for (std::size_t i : table.first_choice_users[j]) terms.emplace_back(i, 1.0);
    for (std::size_t i : table.second_choice_users[j]) terms.emplace_back(i, -1.0);
    std::sort(terms.begin(), terms.end());
    const double constant = static_cast<double>(table.second_choice_users[j].size()) -
                            static_cast<double>(instance.capacities()[j]);
    builder.add_squared_penalty(lambda, terms, constant);
  }

  DecodeMap decode;
  decode.kind = DecodeKind::kApprox;
  decode.num_users = n;
  decode.num_supporters = instance.num_supporters();
  decode.capacities = instance.capacities();
  decode.candidates = table.per_user;
  return std::move(builder).build(std::move(decode));
}

MatchingInstance restrict_to_candidates(const MatchingInstance& instance,
                                        const CandidateTable& table) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < table.per_user.size(); ++i) {
    const auto& rec = table.per_user[i];
    edges.push_back({i, rec.first, rec.first_score});
    edges.push_back({i, rec.second, rec.second_score});
  }
  MatchingInstance out(instance.num_users(), instance.num_supporters(),
                       std::move(edges), instance.capacities());
  out.user_ids = instance.user_ids;
  out.supporter_ids = instance.supporter_ids;
  return out;
}

namespace {

void check_length(const QuboModel& model, std::span<const std::uint8_t> bits) {
  if (bits.size() != model.num_vars()) {
    throw InputError("bit-vector has length " + std::to_string(bits.size()) +
                     ", model has " + std::to_string(model.num_vars()) +
                     " variables");
  }
}

}  // namespace

double energy(const QuboModel& model, std::span<const std::uint8_t> bits) {
  check_length(model, bits);
  double e = model.offset();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) e += model.linear()[i];
  }
  for (const auto& [key, w] : model.quadratic()) {
    if (bits[key.first] && bits[key.second]) e += w;
  }
  return e;
}

double flip_delta(const QuboModel& model, std::span<const std::uint8_t> bits,
                  std::size_t var) {
  check_length(model, bits);
  double field = model.linear()[var];
  for (const auto& c : model.neighbors(var)) {
    if (bits[c.var]) field += c.weight;
  }
  return bits[var] ? -field : field;
}

Eigen::MatrixXd to_dense(const QuboModel& model) {
  const auto n = static_cast<Eigen::Index>(model.num_vars());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  q.diagonal() = Eigen::Map<const Eigen::VectorXd>(model.linear().data(), n);
  for (const auto& [key, w] : model.quadratic()) {
    q(static_cast<Eigen::Index>(key.first), static_cast<Eigen::Index>(key.second)) = w;
  }
  return q;
}

Matching decode(const QuboModel& model, std::span<const std::uint8_t> bits) {
  check_length(model, bits);
  const DecodeMap& d = model.decode_map();
  Matching m;
  m.assignment.assign(d.num_users, std::nullopt);
  if (d.kind == DecodeKind::kApprox) {
    for (std::size_t i = 0; i < d.num_users; ++i) {
      m.assignment[i] = bits[i] ? d.candidates[i].first : d.candidates[i].second;
    }
    return m;
  }
  std::vector<std::size_t> selected(d.num_users, 0);
  for (std::size_t e = 0; e < d.edges.size(); ++e) {
    if (!bits[e]) continue;
    const Edge& edge = d.edges[e];
    if (++selected[edge.user] == 1) m.assignment[edge.user] = edge.supporter;
  }
  for (std::size_t i = 0; i < d.num_users; ++i) {
    if (selected[i] >= 2) {
      m.assignment[i].reset();
      m.conflicted.push_back(i);
    }
  }
  return m;
}

double objective(const QuboModel& model, std::span<const std::uint8_t> bits) {
  check_length(model, bits);
  const DecodeMap& d = model.decode_map();
  double total = 0.0;
  if (d.kind == DecodeKind::kApprox) {
    for (std::size_t i = 0; i < d.num_users; ++i) {
      total += bits[i] ? d.candidates[i].first_score : d.candidates[i].second_score;
    }
    return total;
  }
  std::vector<std::size_t> selected(d.num_users, 0);
  for (std::size_t e = 0; e < d.edges.size(); ++e) {
    if (bits[e]) ++selected[d.edges[e].user];
  }
  // Edges are in user order, so this accumulates exactly like matching_score.
  for (std::size_t e = 0; e < d.edges.size(); ++e) {
    if (bits[e] && selected[d.edges[e].user] == 1) total += d.edges[e].score;
  }
  return total;
}

bool is_feasible(const QuboModel& model, std::span<const std::uint8_t> bits) {
  const Matching m = decode(model, bits);
  if (!m.total()) return false;
  std::vector<std::size_t> loads(model.decode_map().num_supporters, 0);
  for (const auto& a : m.assignment) ++loads[*a];
  return loads == model.decode_map().capacities;
}

MatchingInstance decode_instance(const DecodeMap& decode) {
  if (decode.kind == DecodeKind::kNaive) {
    return MatchingInstance(decode.num_users, decode.num_supporters, decode.edges,
                            decode.capacities);
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < decode.candidates.size(); ++i) {
    const auto& rec = decode.candidates[i];
    edges.push_back({i, rec.first, rec.first_score});
    edges.push_back({i, rec.second, rec.second_score});
  }
  return MatchingInstance(decode.num_users, decode.num_supporters, std::move(edges),
                          decode.capacities);
}

}  // namespace match_anneal
