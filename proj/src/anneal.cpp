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
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>

#include "match_anneal/errors.hpp"
#include "match_anneal/solvers.hpp"

namespace match_anneal {

void AnnealSchedule::validate() const {
  if (!(beta_min > 0.0) || !(beta_min < beta_max) || !std::isfinite(beta_max)) {
    throw InputError("anneal schedule: need 0 < beta_min < beta_max");
  }
  if (num_sweeps < 1) throw InputError("anneal schedule: num_sweeps must be >= 1");
}

double AnnealSchedule::beta(std::size_t sweep) const {
  if (num_sweeps <= 1) return beta_max;
  const double t = static_cast<double>(sweep) / static_cast<double>(num_sweeps - 1);
  return beta_min * std::pow(beta_max / beta_min, t);
}

std::vector<std::size_t> SampleSet::feasible_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].feasible) out.push_back(k);
  }
  return out;
}

double SampleSet::feasibility_rate() const {
  if (samples.empty()) return 0.0;
  return static_cast<double>(feasible_indices().size()) /
         static_cast<double>(samples.size());
}

std::size_t worker_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MATCH_ANNEAL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) n = static_cast<std::size_t>(v);
  }
  return n;
}

MetropolisChain::MetropolisChain(const QuboModel& model, Bits initial)
    : model_(&model), bits_(std::move(initial)), field_(model.linear()) {
  if (bits_.size() != model.num_vars()) {
    throw InputError("initial state has wrong length");
  }
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    for (const auto& c : model.neighbors(i)) {
      if (bits_[c.var]) field_[i] += c.weight;
    }
  }
  energy_ = match_anneal::energy(model, bits_);
}

void MetropolisChain::flip(std::size_t var) noexcept {
  energy_ += delta(var);
  const double direction = bits_[var] ? -1.0 : 1.0;
  bits_[var] ^= 1;
  for (const auto& c : model_->neighbors(var)) field_[c.var] += direction * c.weight;
}

bool MetropolisChain::propose(std::size_t var, double beta, Rng& rng) {
  const double d = delta(var);
  bool accept = d <= 0.0;
  if (!accept) {
    const double u = uniform01(rng);
    const double x = beta * d;
    // exp(-40) is below the smallest positive uniform01 value (2^-53).
    accept = x > 40.0 ? u == 0.0 : u < std::exp(-x);
  }
  if (accept) flip(var);
  return accept;
}

Bits anneal_read(const QuboModel& model, const AnnealSchedule& schedule, Rng& rng) {
  const std::size_t n = model.num_vars();
  Bits start(n);
  for (auto& b : start) b = static_cast<std::uint8_t>(rng() >> 63);
  MetropolisChain chain(model, std::move(start));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t sweep = 0; sweep < schedule.num_sweeps; ++sweep) {
    const double beta = schedule.beta(sweep);
    shuffle(order.begin(), order.end(), rng);
    for (std::size_t var : order) chain.propose(var, beta, rng);
  }
  return chain.bits();
}

SampleSet sa_sample(const QuboModel& model, const AnnealSchedule& schedule,
                    std::size_t num_reads, std::uint64_t seed, std::size_t threads) {
  schedule.validate();
  if (num_reads < 1) throw InputError("sa_sample: num_reads must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  SampleSet out;
  out.solver = "sa";
  out.seed = seed;
  out.schedule = schedule;
  out.num_reads = num_reads;
  out.samples.resize(num_reads);

  auto run_block = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng = make_rng(seed, r);
      Sample& s = out.samples[r];
      s.bits = anneal_read(model, schedule, rng);
      s.energy = energy(model, s.bits);
      s.feasible = is_feasible(model, s.bits);
    }
  };

  if (threads == 0) threads = worker_threads();
  threads = std::min(threads, num_reads);
  if (threads <= 1) {
    run_block(0, num_reads);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (num_reads + threads - 1) / threads;
    for (std::size_t begin = 0; begin < num_reads; begin += chunk) {
      pool.emplace_back(run_block, begin, std::min(num_reads, begin + chunk));
    }
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace match_anneal
