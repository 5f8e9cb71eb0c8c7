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
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "format.hpp"
#include "json_util.hpp"
#include "match_anneal/errors.hpp"
#include "match_anneal/io.hpp"

namespace match_anneal {

using nlohmann::json;
using detail::field;
using detail::get_as;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
}

namespace {

QuestionnaireSchema parse_schema(const json& doc) {
  const json& items = field(doc, "items", "schema");
  if (!items.is_array()) throw InputError("schema.items: expected an array");
  std::vector<QuestionnaireItem> out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const std::string where = "schema.items[" + std::to_string(k) + "]";
    QuestionnaireItem item;
    item.item_id = get_as<std::string>(field(items[k], "item_id", where), where + ".item_id");
    item.category = items[k].value("category", "");
    if (items[k].contains("level_count")) {
      item.level_count = get_as<int>(items[k]["level_count"], where + ".level_count");
    }
    const std::string mode = items[k].value("scoring_mode", "agreement");
    if (mode != "agreement") {
      throw InputError(where + ".scoring_mode: unsupported mode '" + mode + "'");
    }
    out.push_back(std::move(item));
  }
  return QuestionnaireSchema(std::move(out));
}

std::vector<ParticipantProfile> parse_profiles(const json& doc, const char* key,
                                               Role role) {
  const json& list = field(doc, key, "instance");
  if (!list.is_array()) throw InputError(std::string(key) + ": expected an array");
  if (list.empty()) throw InputError(std::string(key) + ": list is empty");
  std::vector<ParticipantProfile> out;
  std::unordered_set<std::string> ids;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string where = std::string(key) + "[" + std::to_string(k) + "]";
    ParticipantProfile p;
    p.role = role;
    p.id = get_as<std::string>(field(list[k], "id", where), where + ".id");
    if (!ids.insert(p.id).second) throw InputError(where + ".id: duplicate id '" + p.id + "'");
    if (list[k].contains("responses")) {
      p.responses = get_as<std::map<std::string, int>>(list[k]["responses"],
                                                       where + ".responses");
    }
    if (list[k].contains("availability")) {
      p.availability = get_as<std::set<int>>(list[k]["availability"], where + ".availability");
    }
    p.needs_infant_care = get_as<bool>(list[k].value("needs_infant_care", json(false)),
                                       where + ".needs_infant_care");
    p.can_care_infant = get_as<bool>(list[k].value("can_care_infant", json(false)),
                                     where + ".can_care_infant");
    out.push_back(std::move(p));
  }
  return out;
}

CompatibilityMatrix parse_matrix(const json& rows, const InstanceDocument& doc) {
  if (!rows.is_array() || rows.size() != doc.users.size()) {
    throw InputError("matrix: expected " + std::to_string(doc.users.size()) + " rows");
  }
  CompatibilityMatrix m;
  m.scores.resize(static_cast<Eigen::Index>(doc.users.size()),
                  static_cast<Eigen::Index>(doc.supporters.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != doc.supporters.size()) {
      throw InputError("matrix[" + std::to_string(i) + "]: expected " +
                       std::to_string(doc.supporters.size()) + " entries");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      const json& cell = rows[i][j];
      const std::string where =
          "matrix[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      double v = std::numeric_limits<double>::quiet_NaN();
      if (!cell.is_null()) {
        v = get_as<double>(cell, where);
        if (!(v >= 0.0)) throw InputError(where + ": score must be >= 0");
      }
      m.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  for (const auto& u : doc.users) m.user_ids.push_back(u.id);
  for (const auto& s : doc.supporters) m.supporter_ids.push_back(s.id);
  return m;
}

}  // namespace

InstanceDocument parse_instance_document(const json& doc) {
  if (!doc.is_object()) throw InputError("instance: expected a JSON object");
  InstanceDocument out;
  out.users = parse_profiles(doc, "users", Role::kUser);
  out.supporters = parse_profiles(doc, "supporters", Role::kSupporter);
  if (doc.contains("schema")) out.schema = parse_schema(doc["schema"]);

  if (doc.contains("availability")) {
    const json& avail = doc["availability"];
    if (!avail.is_object()) throw InputError("availability: expected an object");
    for (const auto& [id, slots] : avail.items()) {
      auto parsed = get_as<std::set<int>>(slots, "availability." + id);
      bool found = false;
      for (auto* list : {&out.users, &out.supporters}) {
        for (auto& p : *list) {
          if (p.id == id) {
            p.availability.insert(parsed.begin(), parsed.end());
            found = true;
          }
        }
      }
      if (!found) throw InputError("availability." + id + ": unknown participant");
    }
  }
  if (doc.contains("capacities")) {
    out.capacities = get_as<std::vector<std::size_t>>(doc["capacities"], "capacities");
    if (out.capacities->size() != out.supporters.size()) {
      throw InputError("capacities: expected " + std::to_string(out.supporters.size()) +
                       " entries");
    }
  }
  if (doc.contains("matrix")) out.matrix = parse_matrix(doc["matrix"], out);

  if (!out.matrix) {
    if (!out.schema) throw InputError("instance: needs either 'schema' or 'matrix'");
    for (const auto& p : out.users) validate_profile(p, *out.schema);
    for (const auto& p : out.supporters) validate_profile(p, *out.schema);
  }
  return out;
}

InstanceDocument load_instance_document(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  return parse_instance_document(doc);
}

json to_json(const InstanceDocument& doc) {
  json out = json::object();
  if (doc.schema) {
    json items = json::array();
    for (const auto& item : doc.schema->items()) {
      items.push_back({{"item_id", item.item_id},
                       {"category", item.category},
                       {"level_count", item.level_count},
                       {"scoring_mode", "agreement"}});
    }
    out["schema"] = {{"items", items}};
  }
  json availability = json::object();
  auto profiles = [&](const std::vector<ParticipantProfile>& list, bool user) {
    json arr = json::array();
    for (const auto& p : list) {
      json o = {{"id", p.id}};
      if (!p.responses.empty()) o["responses"] = p.responses;
      if (user) {
        o["needs_infant_care"] = p.needs_infant_care;
      } else {
        o["can_care_infant"] = p.can_care_infant;
      }
      availability[p.id] = p.availability;
      arr.push_back(std::move(o));
    }
    return arr;
  };
  out["users"] = profiles(doc.users, true);
  out["supporters"] = profiles(doc.supporters, false);
  out["availability"] = availability;
  if (doc.capacities) out["capacities"] = *doc.capacities;
  if (doc.matrix) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < doc.matrix->rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < doc.matrix->cols(); ++j) {
        const double v = doc.matrix->scores(i, j);
        row.push_back(std::isnan(v) ? json(nullptr) : json(v));
      }
      rows.push_back(std::move(row));
    }
    out["matrix"] = rows;
  }
  return out;
}

CompatibilityMatrix document_scores(const InstanceDocument& doc) {
  if (doc.matrix) return *doc.matrix;
  return compatibility_matrix(doc.users, doc.supporters, *doc.schema);
}

MatchingInstance filter_document(const InstanceDocument& doc) {
  const auto rules = default_pair_rules();
  return feasible_pairs(document_scores(doc), doc.users, doc.supporters,
                        doc.capacities.value_or(balanced_capacities(
                            doc.users.size(), doc.supporters.size())),
                        rules);
}

std::string matrix_csv(const CompatibilityMatrix& matrix) {
  std::ostringstream out;
  out << "user_id";
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    out << ',' << (static_cast<std::size_t>(j) < matrix.supporter_ids.size()
                       ? matrix.supporter_ids[static_cast<std::size_t>(j)]
                       : std::to_string(j));
  }
  out << '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    out << (static_cast<std::size_t>(i) < matrix.user_ids.size()
                ? matrix.user_ids[static_cast<std::size_t>(i)]
                : std::to_string(i));
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      out << ',';
      const double v = matrix.scores(i, j);
      if (!std::isnan(v)) out << detail::format_number(v);
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CompatibilityMatrix parse_matrix_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InputError("matrix csv: empty input");
  auto header = split_csv_line(line);
  if (header.empty()) throw InputError("matrix csv: missing header");
  CompatibilityMatrix m;
  m.supporter_ids.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InputError("matrix csv: row for '" + cells.front() + "' has " +
                       std::to_string(cells.size()) + " cells");
    }
    m.user_ids.push_back(cells.front());
    std::vector<double> row;
    for (std::size_t j = 1; j < cells.size(); ++j) {
      row.push_back(cells[j].empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : std::stod(cells[j]));
    }
    rows.push_back(std::move(row));
  }
  m.scores.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(m.supporter_ids.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

json to_json(const MatchingInstance& instance) {
  json edges = json::array();
  for (const auto& e : instance.edges()) edges.push_back({e.user, e.supporter, e.score});
  json out = {{"num_users", instance.num_users()},
              {"num_supporters", instance.num_supporters()},
              {"capacities", instance.capacities()},
              {"edges", edges}};
  if (!instance.user_ids.empty()) out["user_ids"] = instance.user_ids;
  if (!instance.supporter_ids.empty()) out["supporter_ids"] = instance.supporter_ids;
  return out;
}

MatchingInstance matching_instance_from_json(const json& doc) {
  const auto n = get_as<std::size_t>(field(doc, "num_users", "instance"), "num_users");
  const auto m =
      get_as<std::size_t>(field(doc, "num_supporters", "instance"), "num_supporters");
  std::vector<Edge> edges;
  const json& arr = field(doc, "edges", "instance");
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string where = "edges[" + std::to_string(k) + "]";
    if (!arr[k].is_array() || arr[k].size() != 3) {
      throw InputError(where + ": expected [user, supporter, score]");
    }
    edges.push_back({get_as<std::size_t>(arr[k][0], where), get_as<std::size_t>(arr[k][1], where),
                     get_as<double>(arr[k][2], where)});
  }
  auto caps = doc.contains("capacities")
                  ? get_as<std::vector<std::size_t>>(doc["capacities"], "capacities")
                  : balanced_capacities(n, m);
  MatchingInstance out(n, m, std::move(edges), std::move(caps));
  if (doc.contains("user_ids")) {
    out.user_ids = get_as<std::vector<std::string>>(doc["user_ids"], "user_ids");
  }
  if (doc.contains("supporter_ids")) {
    out.supporter_ids = get_as<std::vector<std::string>>(doc["supporter_ids"], "supporter_ids");
  }
  return out;
}

}  // namespace match_anneal
