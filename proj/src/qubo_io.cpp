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

#include <string>

#include "json_util.hpp"
#include "match_anneal/io.hpp"

namespace match_anneal {

using nlohmann::json;
using detail::field;
using detail::get_as;

json to_json(const QuboModel& model) {
  json linear = json::object();
  for (std::size_t i = 0; i < model.num_vars(); ++i) {
    linear[std::to_string(i)] = model.linear()[i];
  }
  json quadratic = json::object();
  for (const auto& [key, w] : model.quadratic()) {
    quadratic[std::to_string(key.first) + "," + std::to_string(key.second)] = w;
  }
  const DecodeMap& d = model.decode_map();
  json decode = {{"num_users", d.num_users},
                 {"num_supporters", d.num_supporters},
                 {"capacities", d.capacities}};
  if (d.kind == DecodeKind::kNaive) {
    json edges = json::array();
    for (const auto& e : d.edges) edges.push_back({e.user, e.supporter, e.score});
    decode["edges"] = edges;
  } else {
    json candidates = json::array();
    for (const auto& c : d.candidates) {
      candidates.push_back({c.first, c.second, c.first_score, c.second_score});
    }
    decode["candidates"] = candidates;
  }
  return {{"num_vars", model.num_vars()},
          {"offset", model.offset()},
          {"linear", linear},
          {"quadratic", quadratic},
          {"decode_kind", to_string(d.kind)},
          {"decode_map", decode}};
}

QuboModel qubo_from_json(const json& doc) {
  const auto n = get_as<std::size_t>(field(doc, "num_vars", "qubo"), "qubo.num_vars");
  const double offset = get_as<double>(field(doc, "offset", "qubo"), "qubo.offset");

  std::vector<double> linear(n, 0.0);
  for (const auto& [key, value] : field(doc, "linear", "qubo").items()) {
    std::size_t idx = 0;
    try {
      idx = std::stoul(key);
    } catch (const std::exception&) {
      throw InputError("qubo.linear: bad index '" + key + "'");
    }
    if (idx >= n) throw InputError("qubo.linear: index " + key + " out of range");
    linear[idx] = get_as<double>(value, "qubo.linear." + key);
  }

  QuadraticTerms quadratic;
  for (const auto& [key, value] : field(doc, "quadratic", "qubo").items()) {
    const auto comma = key.find(',');
    if (comma == std::string::npos) throw InputError("qubo.quadratic: bad key '" + key + "'");
    std::size_t a = 0, b = 0;
    try {
      a = std::stoul(key.substr(0, comma));
      b = std::stoul(key.substr(comma + 1));
    } catch (const std::exception&) {
      throw InputError("qubo.quadratic: bad key '" + key + "'");
    }
    if (a > b) std::swap(a, b);
    quadratic[{a, b}] += get_as<double>(value, "qubo.quadratic." + key);
  }

  DecodeMap d;
  const auto kind = get_as<std::string>(field(doc, "decode_kind", "qubo"), "qubo.decode_kind");
  if (kind == "naive") {
    d.kind = DecodeKind::kNaive;
  } else if (kind == "approx") {
    d.kind = DecodeKind::kApprox;
  } else {
    throw InputError("qubo.decode_kind: unknown kind '" + kind + "'");
  }
  const json& dm = field(doc, "decode_map", "qubo");
  d.num_users = get_as<std::size_t>(field(dm, "num_users", "decode_map"), "decode_map.num_users");
  d.num_supporters =
      get_as<std::size_t>(field(dm, "num_supporters", "decode_map"), "decode_map.num_supporters");
  d.capacities = get_as<std::vector<std::size_t>>(field(dm, "capacities", "decode_map"),
                                                  "decode_map.capacities");
  if (d.capacities.size() != d.num_supporters) {
    throw InputError("decode_map.capacities: expected one entry per supporter");
  }
  if (d.kind == DecodeKind::kNaive) {
    const json& edges = field(dm, "edges", "decode_map");
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const std::string where = "decode_map.edges[" + std::to_string(k) + "]";
      Edge e{get_as<std::size_t>(edges[k].at(0), where), get_as<std::size_t>(edges[k].at(1), where),
             get_as<double>(edges[k].at(2), where)};
      if (e.user >= d.num_users || e.supporter >= d.num_supporters) {
        throw InputError(where + ": index out of range");
      }
      d.edges.push_back(e);
    }
    if (d.edges.size() != n) throw InputError("decode_map.edges: expected one edge per variable");
  } else {
    const json& cands = field(dm, "candidates", "decode_map");
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const std::string where = "decode_map.candidates[" + std::to_string(k) + "]";
      CandidateRecord c{get_as<std::size_t>(cands[k].at(0), where),
                        get_as<std::size_t>(cands[k].at(1), where),
                        get_as<double>(cands[k].at(2), where),
                        get_as<double>(cands[k].at(3), where)};
      if (c.first >= d.num_supporters || c.second >= d.num_supporters) {
        throw InputError(where + ": supporter out of range");
      }
      d.candidates.push_back(c);
    }
    if (d.candidates.size() != n || d.num_users != n) {
      throw InputError("decode_map.candidates: expected one record per variable");
    }
  }
  return QuboModel(n, std::move(linear), std::move(quadratic), offset, std::move(d));
}

}  // namespace match_anneal
