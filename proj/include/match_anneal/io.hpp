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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "match_anneal/instance.hpp"
#include "match_anneal/qubo.hpp"
#include "match_anneal/solvers.hpp"

namespace match_anneal {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Participant file: `schema`, `users`, `supporters`, `availability`
// (participant id -> slot ids), optional `capacities` and `matrix`
// (rows of numbers, null for a pair excluded up front). With a `matrix`
// the schema and responses are optional.
struct InstanceDocument {
  std::optional<QuestionnaireSchema> schema;
  std::vector<ParticipantProfile> users;
  std::vector<ParticipantProfile> supporters;
  std::optional<std::vector<std::size_t>> capacities;
  std::optional<CompatibilityMatrix> matrix;
};

InstanceDocument parse_instance_document(const nlohmann::json& doc);
InstanceDocument load_instance_document(const std::string& path);
nlohmann::json to_json(const InstanceDocument& doc);

// The document's matrix, or scores computed from its questionnaire answers.
CompatibilityMatrix document_scores(const InstanceDocument& doc);

// Scores, then pre-filters with the default rules and the document's
// capacities (balanced when absent).
MatchingInstance filter_document(const InstanceDocument& doc);

// Header row of supporter ids, one row per user; NaN cells are written empty.
std::string matrix_csv(const CompatibilityMatrix& matrix);
CompatibilityMatrix parse_matrix_csv(const std::string& text);

nlohmann::json to_json(const MatchingInstance& instance);
MatchingInstance matching_instance_from_json(const nlohmann::json& doc);

// `num_vars`, `offset`, `linear` ("i" -> value), `quadratic` ("i,j" -> value),
// `decode_kind`, `decode_map`.
nlohmann::json to_json(const QuboModel& model);
QuboModel qubo_from_json(const nlohmann::json& doc);

// JSON lines: a header record with solver metadata, then one record per
// sample with `bits` as a 0/1 string, `energy` and `feasible`.
std::string to_jsonl(const SampleSet& samples);
// Records may omit `energy`/`feasible` (external samplers); call rescore().
SampleSet parse_sample_jsonl(const std::string& text);
// Recomputes every energy and feasibility flag against the model.
void rescore(SampleSet& samples, const QuboModel& model);

std::string bits_to_string(const Bits& bits);
Bits bits_from_string(const std::string& text);

}  // namespace match_anneal
