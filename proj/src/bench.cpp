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

#include "match_anneal/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "format.hpp"
#include "json_util.hpp"
#include "match_anneal/errors.hpp"
#include "match_anneal/random.hpp"

namespace match_anneal {

using nlohmann::json;

MatchingInstance gen_random_instance(std::size_t num_users, std::size_t num_supporters,
                                     std::uint64_t seed, const GeneratorOptions& options) {
  if (num_users < 1 || num_supporters < 1) {
    throw InputError("gen_random_instance: need at least one user and one supporter");
  }
  if (!(options.scores.variance > 0.0)) {
    throw InputError("gen_random_instance: variance must be positive");
  }
  Rng rng = make_rng(seed, 0);
  const double sigma = std::sqrt(options.scores.variance);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < num_users; ++i) {
    for (std::size_t j = 0; j < num_supporters; ++j) {
      double score = std::max(0.0, options.scores.mean + sigma * standard_normal(rng));
      if (options.scores.round_to_integer) score = std::round(score);
      const bool keep = options.complete || uniform01(rng) < options.retention;
      if (keep) edges.push_back({i, j, score});
    }
  }
  return MatchingInstance(num_users, num_supporters, std::move(edges),
                          balanced_capacities(num_users, num_supporters));
}

InstanceDocument make_sendai_replica(std::uint64_t seed, const ReplicaOptions& options) {
  const std::size_t n = options.size;
  if (n < 1) throw InputError("replica: size must be >= 1");
  const auto keep = static_cast<std::size_t>(
      std::lround(options.retention * static_cast<double>(n * n)));
  const double sigma = std::sqrt(options.scores.variance);

  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng = make_rng(seed, attempt);
    InstanceDocument doc;
    CompatibilityMatrix m;
    m.scores.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double raw = std::round(options.scores.mean + sigma * standard_normal(rng));
        m.scores(i, j) = std::clamp(raw, static_cast<double>(options.score_min),
                                    static_cast<double>(options.score_max));
      }
    }
    // Each retained pair gets a private time slot, so the availability rule
    // removes exactly the pairs outside the mask.
    std::vector<std::size_t> cells(n * n);
    std::iota(cells.begin(), cells.end(), std::size_t{0});
    shuffle(cells.begin(), cells.end(), rng);
    std::vector<std::set<int>> user_slots(n), supporter_slots(n);
    for (std::size_t k = 0; k < keep; ++k) {
      user_slots[cells[k] / n].insert(static_cast<int>(cells[k]));
      supporter_slots[cells[k] % n].insert(static_cast<int>(cells[k]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      ParticipantProfile u;
      u.id = "u" + std::to_string(i + 1);
      u.role = Role::kUser;
      u.availability = user_slots[i];
      doc.users.push_back(u);
      m.user_ids.push_back(u.id);
      ParticipantProfile s;
      s.id = "s" + std::to_string(i + 1);
      s.role = Role::kSupporter;
      s.availability = supporter_slots[i];
      doc.supporters.push_back(s);
      m.supporter_ids.push_back(s.id);
    }
    doc.capacities = std::vector<std::size_t>(n, 1);
    doc.matrix = std::move(m);
    if (check_solvability(filter_document(doc)).perfect_matching_possible) return doc;
  }
}

const char* to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::kScaling: return "scaling";
    case ExperimentKind::kHistogram: return "histogram";
    case ExperimentKind::kDiversity: return "diversity";
    case ExperimentKind::kFormulationCompare: return "formulation-compare";
  }
  return "scaling";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (auto kind : {ExperimentKind::kScaling, ExperimentKind::kHistogram,
                    ExperimentKind::kDiversity, ExperimentKind::kFormulationCompare}) {
    if (name == to_string(kind)) return kind;
  }
  throw InputError("unknown experiment kind '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (sizes.empty()) throw InputError("config: sizes must not be empty");
  if (instances < 1) throw InputError("config: instances must be >= 1");
  if (!(scores.variance > 0.0)) throw InputError("config: variance must be positive");
  if (lambda && !(*lambda > 0.0)) throw InputError("config: lambda must be positive");
  if (!(lambda_scale > 0.0)) throw InputError("config: lambda_scale must be positive");
  sa.schedule.validate();
  if (sa.num_reads < 1) throw InputError("config: num_reads must be >= 1");
  if (kind == ExperimentKind::kFormulationCompare && num_supporters < 2) {
    throw InputError("config: formulation-compare needs num_supporters >= 2");
  }
  for (double R : Rs) {
    if (!(R > 0.0 && R <= 1.0)) throw InputError("config: R values must lie in (0, 1]");
  }
  for (double a : alphas) {
    if (!(a >= 0.0)) throw InputError("config: alpha values must be >= 0");
  }
  for (std::size_t n : sizes) {
    if (n < 1) throw InputError("config: sizes must be >= 1");
    if (n > kOracleMaxUsers) {
      throw SizeCapError("config: size " + std::to_string(n) +
                         " exceeds the exact-oracle cap of " +
                         std::to_string(kOracleMaxUsers) + " users");
    }
  }
}

namespace {

std::vector<double> default_alphas() {
  std::vector<double> out;
  for (int k = 0; k <= 20; ++k) out.push_back(k / 10.0);
  return out;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& doc) {
  using detail::get_as;
  if (!doc.is_object()) throw InputError("config: expected a JSON object");
  static const std::set<std::string> known = {
      "kind", "label", "sizes", "num_supporters", "instances", "score_distribution",
      "sa", "lambda", "lambda_scale", "steepest", "alphas", "R", "histogram_bins",
      "seed", "output_dir"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw InputError("config: unknown field '" + key + "'");
  }
  ExperimentConfig c;
  c.kind = experiment_kind_from_string(
      get_as<std::string>(detail::field(doc, "kind", "config"), "config.kind"));
  if (doc.contains("label")) c.label = get_as<std::string>(doc["label"], "config.label");
  c.sizes = get_as<std::vector<std::size_t>>(detail::field(doc, "sizes", "config"),
                                             "config.sizes");
  if (doc.contains("num_supporters")) {
    c.num_supporters = get_as<std::size_t>(doc["num_supporters"], "config.num_supporters");
  }
  if (doc.contains("instances")) c.instances = get_as<std::size_t>(doc["instances"], "config.instances");
  if (doc.contains("score_distribution")) {
    const json& s = doc["score_distribution"];
    c.scores.mean = get_as<double>(s.value("mean", json(c.scores.mean)), "config.score_distribution.mean");
    c.scores.variance =
        get_as<double>(s.value("variance", json(c.scores.variance)), "config.score_distribution.variance");
    c.scores.round_to_integer = get_as<bool>(s.value("round_to_integer", json(false)),
                                             "config.score_distribution.round_to_integer");
  }
  if (doc.contains("sa")) {
    const json& s = doc["sa"];
    auto& sched = c.sa.schedule;
    sched.beta_min = get_as<double>(s.value("beta_min", json(sched.beta_min)), "config.sa.beta_min");
    sched.beta_max = get_as<double>(s.value("beta_max", json(sched.beta_max)), "config.sa.beta_max");
    sched.num_sweeps =
        get_as<std::size_t>(s.value("num_sweeps", json(sched.num_sweeps)), "config.sa.num_sweeps");
    c.sa.num_reads = get_as<std::size_t>(s.value("num_reads", json(c.sa.num_reads)), "config.sa.num_reads");
  }
  if (doc.contains("lambda") && !doc["lambda"].is_null()) {
    c.lambda = get_as<double>(doc["lambda"], "config.lambda");
  }
  if (doc.contains("lambda_scale")) c.lambda_scale = get_as<double>(doc["lambda_scale"], "config.lambda_scale");
  if (doc.contains("steepest")) c.steepest = get_as<bool>(doc["steepest"], "config.steepest");
  if (doc.contains("alphas")) c.alphas = get_as<std::vector<double>>(doc["alphas"], "config.alphas");
  if (doc.contains("R")) c.Rs = get_as<std::vector<double>>(doc["R"], "config.R");
  if (doc.contains("histogram_bins")) {
    c.histogram_bins = get_as<std::size_t>(doc["histogram_bins"], "config.histogram_bins");
  }
  if (doc.contains("seed")) c.seed = get_as<std::uint64_t>(doc["seed"], "config.seed");
  if (doc.contains("output_dir")) c.output_dir = get_as<std::string>(doc["output_dir"], "config.output_dir");
  if (c.alphas.empty()) c.alphas = default_alphas();
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json out = {{"kind", to_string(c.kind)},
              {"label", c.label},
              {"sizes", c.sizes},
              {"num_supporters", c.num_supporters},
              {"instances", c.instances},
              {"score_distribution",
               {{"mean", c.scores.mean},
                {"variance", c.scores.variance},
                {"round_to_integer", c.scores.round_to_integer}}},
              {"sa",
               {{"beta_min", c.sa.schedule.beta_min},
                {"beta_max", c.sa.schedule.beta_max},
                {"num_sweeps", c.sa.schedule.num_sweeps},
                {"num_reads", c.sa.num_reads}}},
              {"lambda_scale", c.lambda_scale},
              {"steepest", c.steepest},
              {"alphas", c.alphas},
              {"R", c.Rs},
              {"histogram_bins", c.histogram_bins},
              {"seed", c.seed},
              {"output_dir", c.output_dir}};
  out["lambda"] = c.lambda ? json(*c.lambda) : json(nullptr);
  return out;
}

std::vector<Aggregate> aggregate_rows(const std::vector<BenchmarkRow>& rows) {
  using Key = std::tuple<std::size_t, std::string, std::optional<double>, std::optional<double>>;
  std::vector<Key> order;
  std::map<Key, std::vector<const BenchmarkRow*>> groups;
  for (const auto& row : rows) {
    Key key{row.size, row.solver, row.R, row.alpha};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&row);
  }
  std::vector<Aggregate> out;
  for (const Key& key : order) {
    const auto& members = groups[key];
    Aggregate a;
    std::tie(a.size, a.solver, a.R, a.alpha) = key;
    std::vector<double> errors;
    double feas = 0.0, wall = 0.0, div = 0.0;
    bool has_div = false;
    for (const BenchmarkRow* r : members) {
      if (r->best_relative_error) {
        errors.push_back(*r->best_relative_error);
      } else {
        ++a.missing;
      }
      feas += r->feasibility_rate;
      wall += r->wall_seconds;
      if (r->diversity) {
        has_div = true;
        div += static_cast<double>(*r->diversity);
      }
    }
    const auto k = static_cast<double>(members.size());
    a.count = errors.size();
    a.mean_feasibility_rate = feas / k;
    a.mean_wall_seconds = wall / k;
    if (has_div) a.mean_diversity = div / k;
    if (!errors.empty()) {
      const double ke = static_cast<double>(errors.size());
      a.mean_relative_error = std::accumulate(errors.begin(), errors.end(), 0.0) / ke;
      if (errors.size() >= 2) {
        double ss = 0.0;
        for (double e : errors) ss += (e - a.mean_relative_error) * (e - a.mean_relative_error);
        a.stderr_relative_error = std::sqrt(ss / (ke - 1.0)) / std::sqrt(ke);
      }
    }
    out.push_back(a);
  }
  return out;
}

namespace {

std::uint64_t instance_seed(std::uint64_t master, std::size_t size, std::size_t index,
                            std::size_t attempt) {
  return substream_seed(substream_seed(master, size),
                        (static_cast<std::uint64_t>(index) << 20) | attempt);
}

double penalty_for(const ExperimentConfig& config, const MatchingInstance& instance) {
  return config.lambda ? *config.lambda : config.lambda_scale * instance.max_score();
}

BenchmarkRow make_row(std::size_t size, std::size_t num_supporters, std::size_t index,
                      std::uint64_t seed, std::string solver, const QuboModel& model,
                      const SampleSet& samples, double optimum) {
  BenchmarkRow row;
  row.size = size;
  row.num_supporters = num_supporters;
  row.instance = index;
  row.seed = seed;
  row.solver = std::move(solver);
  row.optimum = optimum;
  row.feasibility_rate = samples.feasibility_rate();
  row.wall_seconds = samples.wall_seconds;
  for (std::size_t k : samples.feasible_indices()) {
    const double obj = objective(model, samples.samples[k].bits);
    if (!row.best_objective || obj > *row.best_objective) row.best_objective = obj;
  }
  if (row.best_objective) row.best_relative_error = relative_error(*row.best_objective, optimum);
  return row;
}

// Samples one model and (optionally) its steepest-descent post-processing.
std::vector<std::pair<std::string, SampleSet>> solve_variants(const QuboModel& model,
                                                              const ExperimentConfig& config,
                                                              std::uint64_t seed,
                                                              const std::string& name) {
  std::vector<std::pair<std::string, SampleSet>> out;
  SampleSet sa = sa_sample(model, config.sa.schedule, config.sa.num_reads, seed);
  if (config.steepest) {
    SampleSet post = steepest_descent(model, sa);
    out.emplace_back(name, std::move(sa));
    out.emplace_back(name + "+steepest", std::move(post));
  } else {
    out.emplace_back(name, std::move(sa));
  }
  return out;
}

// Shared driver for the one-to-one experiments (scaling, histogram,
// diversity): n users, n supporters, complete edges.
BenchmarkReport run_one_to_one(const ExperimentConfig& config) {
  config.validate();
  BenchmarkReport report;
  report.kind = config.kind;
  report.label = config.label;
  std::map<std::string, std::vector<double>> pooled;
  const auto alphas = config.alphas.empty() ? default_alphas() : config.alphas;

  GeneratorOptions gen;
  gen.scores = config.scores;
  for (std::size_t n : config.sizes) {
    for (std::size_t k = 0; k < config.instances; ++k) {
      MatchingInstance instance;
      std::uint64_t seed = 0;
      for (std::size_t attempt = 0;; ++attempt) {
        seed = instance_seed(config.seed, n, k, attempt);
        instance = gen_random_instance(n, n, seed, gen);
        if (check_solvability(instance).perfect_matching_possible) break;
        report.log.push_back("size " + std::to_string(n) + " instance " + std::to_string(k) +
                             ": unsolvable, regenerating");
      }
      const double optimum = exact_assignment(instance).score;
      const double lambda = penalty_for(config, instance);
      const QuboModel model = build_naive_qubo(instance, lambda, lambda);
      for (auto& [name, samples] : solve_variants(model, config, substream_seed(seed, 1), "sa")) {
        report.rows.push_back(make_row(n, n, k, seed, name, model, samples, optimum));
        if (config.kind == ExperimentKind::kHistogram) {
          const QualityReport q = quality_report(samples, model, optimum);
          auto& pool = pooled[std::to_string(n) + "/" + name];
          for (const auto& e : q.relative_errors) {
            if (e) pool.push_back(*e);
          }
        }
        if (config.kind == ExperimentKind::kDiversity) {
          const BenchmarkRow base = report.rows.back();
          for (const auto& p : diversity_curve(samples, model, optimum, alphas, config.Rs)) {
            BenchmarkRow row = base;
            row.R = p.R;
            row.alpha = p.alpha;
            row.diversity = p.size;
            report.rows.push_back(row);
          }
        }
      }
    }
  }
  for (const auto& [key, values] : pooled) {
    report.histograms[key] = histogram(values, config.histogram_bins);
  }
  report.aggregates = aggregate_rows(report.rows);
  return report;
}

}  // namespace

BenchmarkReport run_scaling_experiment(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.kind = ExperimentKind::kScaling;
  return run_one_to_one(c);
}

BenchmarkReport run_histogram_experiment(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.kind = ExperimentKind::kHistogram;
  return run_one_to_one(c);
}

BenchmarkReport run_diversity_experiment(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.kind = ExperimentKind::kDiversity;
  return run_one_to_one(c);
}

BenchmarkReport run_formulation_comparison(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.kind = ExperimentKind::kFormulationCompare;
  c.validate();
  BenchmarkReport report;
  report.kind = c.kind;
  report.label = c.label;
  const std::size_t m = c.num_supporters;
  GeneratorOptions gen;
  gen.scores = c.scores;

  for (std::size_t n : c.sizes) {
    for (std::size_t k = 0; k < c.instances; ++k) {
      MatchingInstance instance;
      std::uint64_t seed = 0;
      double optimum = 0.0;
      AssignmentResult bound;
      for (std::size_t attempt = 0;; ++attempt) {
        seed = instance_seed(c.seed, n, k, attempt);
        instance = gen_random_instance(n, m, seed, gen);
        try {
          optimum = exact_assignment(instance).score;
          bound = exact_assignment(restrict_to_candidates(instance, top2_candidates(instance)));
          break;
        } catch (const InfeasibleError& e) {
          report.log.push_back("N " + std::to_string(n) + " instance " + std::to_string(k) +
                               ": " + e.what() + "; regenerating");
        }
      }
      const double lambda = penalty_for(c, instance);
      const QuboModel naive = build_naive_qubo(instance, lambda, lambda);
      const QuboModel approx = build_approx_qubo(instance, lambda);
      const std::uint64_t sa_seed = substream_seed(seed, 1);
      for (auto& [name, samples] : solve_variants(naive, c, sa_seed, "sa-naive")) {
        report.rows.push_back(make_row(n, m, k, seed, name, naive, samples, optimum));
      }
      for (auto& [name, samples] : solve_variants(approx, c, sa_seed, "sa-approx")) {
        report.rows.push_back(make_row(n, m, k, seed, name, approx, samples, optimum));
      }
      BenchmarkRow row;
      row.size = n;
      row.num_supporters = m;
      row.instance = k;
      row.seed = seed;
      row.solver = "approx-bound";
      row.optimum = optimum;
      row.best_objective = bound.score;
      row.best_relative_error = relative_error(bound.score, optimum);
      row.feasibility_rate = 1.0;
      report.rows.push_back(row);
    }
  }
  report.aggregates = aggregate_rows(report.rows);
  return report;
}

BenchmarkReport run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::kScaling: return run_scaling_experiment(config);
    case ExperimentKind::kHistogram: return run_histogram_experiment(config);
    case ExperimentKind::kDiversity: return run_diversity_experiment(config);
    case ExperimentKind::kFormulationCompare: return run_formulation_comparison(config);
  }
  return run_scaling_experiment(config);
}

std::string report_csv(const BenchmarkReport& report) {
  using detail::format_number;
  std::ostringstream out;
  out << "experiment,size,num_supporters,instance,seed,solver,R,alpha,optimum,"
         "best_objective,best_relative_error,feasibility_rate,diversity,wall_seconds\n";
  for (const auto& r : report.rows) {
    out << to_string(report.kind) << ',' << r.size << ',' << r.num_supporters << ','
        << r.instance << ',' << r.seed << ',' << r.solver << ',' << format_number(r.R) << ','
        << format_number(r.alpha) << ',' << format_number(r.optimum) << ','
        << format_number(r.best_objective) << ',' << format_number(r.best_relative_error)
        << ',' << format_number(r.feasibility_rate) << ','
        << (r.diversity ? std::to_string(*r.diversity) : std::string()) << ','
        << format_number(r.wall_seconds) << '\n';
  }
  return out.str();
}

json report_summary(const BenchmarkReport& report) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json aggregates = json::array();
  json timings = json::array();
  for (const auto& a : report.aggregates) {
    aggregates.push_back({{"size", a.size},
                          {"solver", a.solver},
                          {"R", opt(a.R)},
                          {"alpha", opt(a.alpha)},
                          {"count", a.count},
                          {"missing", a.missing},
                          {"mean_relative_error", a.mean_relative_error},
                          {"stderr_relative_error", a.stderr_relative_error},
                          {"mean_feasibility_rate", a.mean_feasibility_rate},
                          {"mean_diversity", opt(a.mean_diversity)}});
    if (!a.R) {
      timings.push_back({{"size", a.size}, {"solver", a.solver},
                         {"mean_wall_seconds", a.mean_wall_seconds}});
    }
  }
  json histograms = json::object();
  for (const auto& [key, h] : report.histograms) histograms[key] = to_json(h);
  return {{"experiment", to_string(report.kind)},
          {"label", report.label},
          {"aggregates", aggregates},
          {"histograms", histograms},
          {"log", report.log},
          {"timings", timings}};
}

std::string report_basename(const ExperimentConfig& config) {
  std::string dir = config.output_dir.empty() ? "." : config.output_dir;
  return dir + "/" + to_string(config.kind) + "_" + config.label;
}

// ---- field workflow ----

namespace {

std::string user_name(const MatchingInstance& inst, std::size_t i) {
  return i < inst.user_ids.size() ? inst.user_ids[i] : std::to_string(i);
}

std::string supporter_name(const MatchingInstance& inst, std::size_t j) {
  return j < inst.supporter_ids.size() ? inst.supporter_ids[j] : std::to_string(j);
}

}  // namespace

WorkflowReport run_sendai_workflow(const InstanceDocument& doc, const WorkflowOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  WorkflowReport report;
  const CompatibilityMatrix scores = document_scores(doc);
  report.instance = filter_document(doc);
  const MatchingInstance& instance = report.instance;

  report.num_users = instance.num_users();
  report.num_supporters = instance.num_supporters();
  report.total_pairs = report.num_users * report.num_supporters;
  report.retained_pairs = instance.edges().size();
  report.retention = report.total_pairs
                         ? static_cast<double>(report.retained_pairs) /
                               static_cast<double>(report.total_pairs)
                         : 0.0;
  bool first = true;
  double sum = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      const double v = scores.scores(i, j);
      if (std::isnan(v)) continue;
      report.score_min = first ? v : std::min(report.score_min, v);
      report.score_max = first ? v : std::max(report.score_max, v);
      first = false;
      sum += v;
      ++count;
      ++report.score_counts[static_cast<long>(std::floor(v))];
    }
  }
  if (count) report.score_mean = sum / static_cast<double>(count);

  const SolvabilityReport solvable = check_solvability(instance);
  if (!solvable.perfect_matching_possible) {
    std::string users;
    for (std::size_t i : solvable.blocking_users) users += " " + user_name(instance, i);
    throw InfeasibleError("no feasible matching after filtering: " + solvable.reason +
                              (users.empty() ? "" : "; blocking users:" + users),
                          solvable.blocking_users);
  }

  report.lambda = options.lambda ? *options.lambda : kWorkflowLambdaScale * instance.max_score();
  QuboModel model;
  if (options.formulation == Formulation::kApprox) {
    report.formulation = "approx";
    const bool one_to_one = std::all_of(instance.capacities().begin(), instance.capacities().end(),
                                        [](std::size_t c) { return c == 1; });
    report.warnings.push_back(
        std::string("approximate formulation: supporter capacity constraints are soft "
                    "penalties and may be violated") +
        (one_to_one ? "; this instance requires a strict one-to-one matching" : ""));
    model = build_approx_qubo(instance, report.lambda);
  } else {
    report.formulation = "naive";
    model = build_naive_qubo(instance, report.lambda, report.lambda);
  }
  report.num_vars = model.num_vars();

  SampleSet samples = sa_sample(model, options.sa.schedule, options.sa.num_reads, options.seed);
  if (options.steepest) samples = steepest_descent(model, samples);
  report.feasibility_rate = samples.feasibility_rate();

  report.optimum = exact_assignment(instance).score;
  const double tol = 1e-9 * std::max(1.0, std::abs(report.optimum));
  std::set<Matching> found;
  for (std::size_t k : samples.feasible_indices()) {
    const Matching m = decode(model, samples.samples[k].bits);
    const double score = matching_score(instance, m);
    if (!report.best_objective || score > *report.best_objective) report.best_objective = score;
    if (score >= report.optimum - tol) found.insert(m);
  }
  report.found_optimal.assign(found.begin(), found.end());
  report.one_to_one_verified =
      !report.found_optimal.empty() &&
      std::all_of(report.found_optimal.begin(), report.found_optimal.end(),
                  [&](const Matching& m) { return is_feasible(instance, m); });

  if (instance.num_users() <= options.enumerate_cap) {
    report.optima_enumerated = true;
    report.optimal_matchings = enumerate_optima(instance, report.optimum, options.enumerate_cap);
    report.all_optima_found = std::includes(found.begin(), found.end(),
                                            report.optimal_matchings.begin(),
                                            report.optimal_matchings.end());
  } else {
    report.warnings.push_back("instance too large to enumerate every optimum; "
                              "only sampled optima are listed");
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

namespace {

json matching_json(const MatchingInstance& inst, const Matching& m) {
  json pairs = json::array();
  for (std::size_t i = 0; i < m.assignment.size(); ++i) {
    if (m.assignment[i]) {
      pairs.push_back({user_name(inst, i), supporter_name(inst, *m.assignment[i])});
    }
  }
  return {{"score", matching_score(inst, m)}, {"pairs", pairs}};
}

}  // namespace

json to_json(const WorkflowReport& r) {
  json histogram = json::object();
  for (const auto& [score, n] : r.score_counts) histogram[std::to_string(score)] = n;
  json optimal = json::array();
  for (const auto& m : r.optimal_matchings) optimal.push_back(matching_json(r.instance, m));
  json found = json::array();
  for (const auto& m : r.found_optimal) found.push_back(matching_json(r.instance, m));
  return {{"num_users", r.num_users},
          {"num_supporters", r.num_supporters},
          {"total_pairs", r.total_pairs},
          {"retained_pairs", r.retained_pairs},
          {"retention", r.retention},
          {"score_min", r.score_min},
          {"score_max", r.score_max},
          {"score_mean", r.score_mean},
          {"score_histogram", histogram},
          {"formulation", r.formulation},
          {"lambda", r.lambda},
          {"num_vars", r.num_vars},
          {"feasibility_rate", r.feasibility_rate},
          {"optimum", r.optimum},
          {"best_objective", r.best_objective ? json(*r.best_objective) : json(nullptr)},
          {"optima_enumerated", r.optima_enumerated},
          {"optimal_matchings", optimal},
          {"found_optimal_matchings", found},
          {"all_optima_found", r.all_optima_found},
          {"one_to_one_verified", r.one_to_one_verified},
          {"warnings", r.warnings},
          {"wall_seconds", r.wall_seconds}};
}

std::string workflow_table(const WorkflowReport& r) {
  std::ostringstream out;
  out << "users " << r.num_users << ", supporters " << r.num_supporters << ", pairs kept "
      << r.retained_pairs << "/" << r.total_pairs << " ("
      << std::lround(100.0 * r.retention) << "%)\n";
  out << "scores: min " << r.score_min << ", max " << r.score_max << ", mean "
      << r.score_mean << "\n";
  out << "formulation " << r.formulation << ", " << r.num_vars << " variables, lambda "
      << r.lambda << ", feasible samples " << r.feasibility_rate * 100.0 << "%\n";
  out << "optimal score " << r.optimum << "\n";
  if (r.optima_enumerated) {
    out << "optimal matchings: " << r.optimal_matchings.size() << " exist, "
        << r.found_optimal.size() << " sampled"
        << (r.all_optima_found ? " (all found)" : "") << "\n";
  } else {
    out << "optimal matchings sampled: " << r.found_optimal.size() << "\n";
  }
  const auto& list = r.optima_enumerated ? r.optimal_matchings : r.found_optimal;
  std::set<Matching> found(r.found_optimal.begin(), r.found_optimal.end());
  for (std::size_t k = 0; k < list.size(); ++k) {
    out << "#" << k + 1 << (found.count(list[k]) ? " [sampled]" : " [missed]") << ":";
    for (std::size_t i = 0; i < list[k].assignment.size(); ++i) {
      const auto& a = list[k].assignment[i];
      if (!a) continue;
      const double s = r.instance.edges()[*r.instance.find_edge(i, *a)].score;
      out << " " << user_name(r.instance, i) << "-" << supporter_name(r.instance, *a) << "("
          << s << ")";
    }
    out << "\n";
  }
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  return out.str();
}

}  // namespace match_anneal
