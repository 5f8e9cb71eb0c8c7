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

#include <chrono>

#include "match_anneal/errors.hpp"
#include "match_anneal/solvers.hpp"

namespace match_anneal {

Bits steepest_descent(const QuboModel& model, std::span<const std::uint8_t> bits) {
  if (bits.size() != model.num_vars()) {
    throw InputError("steepest_descent: bit-vector length does not match model");
  }
  MetropolisChain chain(model, Bits(bits.begin(), bits.end()));
  // Improvements smaller than this are rounding noise in the cached fields.
  const double tolerance = 1e-12 * (1.0 + model.coefficient_scale());
  for (;;) {
    std::size_t best_var = 0;
    double best_delta = 0.0;
    for (std::size_t v = 0; v < model.num_vars(); ++v) {
      const double d = chain.delta(v);
      if (d < best_delta) {
        best_delta = d;
        best_var = v;
      }
    }
    if (!(best_delta < -tolerance)) break;
    chain.flip(best_var);
  }
  return chain.bits();
}

SampleSet steepest_descent(const QuboModel& model, const SampleSet& samples) {
  const auto start = std::chrono::steady_clock::now();
  SampleSet out = samples;
  out.solver = samples.solver + "+steepest";
  for (Sample& s : out.samples) {
    s.bits = steepest_descent(model, s.bits);
    s.energy = energy(model, s.bits);
    s.feasible = is_feasible(model, s.bits);
  }
  out.wall_seconds =
      samples.wall_seconds +
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace match_anneal
