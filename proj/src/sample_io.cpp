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
#include <limits>
#include <sstream>

#include "json_util.hpp"
#include "match_anneal/io.hpp"

namespace match_anneal {

using nlohmann::json;
using detail::field;
using detail::get_as;

std::string bits_to_string(const Bits& bits) {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) s[i] = '1';
  }
  return s;
}

Bits bits_from_string(const std::string& text) {
  Bits bits(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1') {
      throw InputError("bits: unexpected character '" + std::string(1, text[i]) + "'");
    }
    bits[i] = text[i] == '1';
  }
  return bits;
}

std::string to_jsonl(const SampleSet& samples) {
  json header = {{"type", "header"},
                 {"solver", samples.solver},
                 {"seed", samples.seed},
                 {"num_reads", samples.num_reads},
                 {"wall_seconds", samples.wall_seconds}};
  if (samples.schedule) {
    header["schedule"] = {{"beta_min", samples.schedule->beta_min},
                          {"beta_max", samples.schedule->beta_max},
                          {"num_sweeps", samples.schedule->num_sweeps}};
  } else {
    header["schedule"] = nullptr;
  }
  std::ostringstream out;
  out << header.dump() << '\n';
  for (const Sample& s : samples.samples) {
    json rec = {{"bits", bits_to_string(s.bits)}, {"energy", s.energy}, {"feasible", s.feasible}};
    out << rec.dump() << '\n';
  }
  return out.str();
}

namespace {

SampleSet parse_records(const std::string& text) {
  SampleSet out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = "samples line " + std::to_string(lineno);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(where + ": " + e.what());
    }
    if (rec.value("type", "") == "header") {
      out.solver = rec.value("solver", "external");
      out.seed = rec.value("seed", std::uint64_t{0});
      out.num_reads = rec.value("num_reads", std::size_t{0});
      out.wall_seconds = rec.value("wall_seconds", 0.0);
      if (rec.contains("schedule") && !rec["schedule"].is_null()) {
        const json& s = rec["schedule"];
        out.schedule = AnnealSchedule{get_as<double>(field(s, "beta_min", where), where),
                                      get_as<double>(field(s, "beta_max", where), where),
                                      get_as<std::size_t>(field(s, "num_sweeps", where), where)};
      }
      have_header = true;
      continue;
    }
    Sample s;
    s.bits = bits_from_string(get_as<std::string>(field(rec, "bits", where), where + ".bits"));
    s.energy = rec.contains("energy") ? get_as<double>(rec["energy"], where + ".energy")
                                      : std::numeric_limits<double>::quiet_NaN();
    s.feasible = rec.value("feasible", false);
    out.samples.push_back(std::move(s));
  }
  if (!have_header) {
    out.solver = "external";
    out.num_reads = out.samples.size();
  }
  if (out.num_reads != out.samples.size()) {
    throw InputError("samples: header declares " + std::to_string(out.num_reads) +
                     " reads but " + std::to_string(out.samples.size()) + " records follow");
  }
  return out;
}

}  // namespace

SampleSet parse_sample_jsonl(const std::string& text) {
  try {
    return parse_records(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("samples: ") + e.what());
  }
}

void rescore(SampleSet& samples, const QuboModel& model) {
  for (Sample& s : samples.samples) {
    s.energy = energy(model, s.bits);
    s.feasible = is_feasible(model, s.bits);
  }
}

}  // namespace match_anneal
