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

// match-anneal: score, filter, build, solve, analyze, bench, workflow.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 input error, 3 size cap,
// 4 infeasible instance.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "match_anneal/analysis.hpp"
#include "match_anneal/bench.hpp"
#include "match_anneal/errors.hpp"
#include "match_anneal/io.hpp"
#include "match_anneal/qubo.hpp"
#include "match_anneal/solvers.hpp"

namespace ma = match_anneal;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitSizeCap = 3;
constexpr int kExitInfeasible = 4;

struct Options {
  std::string input;
  std::string samples;
  std::string instance;
  std::string out;
  std::string csv;
  std::string formulation = "naive";
  std::optional<double> lambda, lambda1, lambda2;
  double beta_min = 0.02;
  double beta_max = 2.0;
  std::size_t num_sweeps = 1000;
  std::size_t num_reads = 1000;
  std::uint64_t seed = 0;
  std::string post = "none";
  double alpha = 0.0;
  double R = 0.1;
  std::size_t bins = ma::kDefaultHistogramBins;
  bool verbose = false;
};

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    ma::write_file(path, content);
  }
}

// Summaries go to stdout unless stdout already carries the main output.
std::ostream& info(const Options& o) { return o.out.empty() || o.out == "-" ? std::cerr : std::cout; }

ma::MatchingInstance load_instance(const std::string& path) {
  json doc;
  try {
    doc = json::parse(ma::read_file(path));
  } catch (const json::exception& e) {
    throw ma::InputError(path + ": " + e.what());
  }
  if (doc.is_object() && doc.contains("num_users")) return ma::matching_instance_from_json(doc);
  return ma::filter_document(ma::parse_instance_document(doc));
}

ma::QuboModel load_qubo(const std::string& path) {
  try {
    return ma::qubo_from_json(json::parse(ma::read_file(path)));
  } catch (const json::exception& e) {
    throw ma::InputError(path + ": " + e.what());
  }
}

ma::SaConfig sa_config(const Options& o) {
  ma::SaConfig c;
  c.schedule = {o.beta_min, o.beta_max, o.num_sweeps};
  c.schedule.validate();
  c.num_reads = o.num_reads;
  if (c.num_reads < 1) throw ma::InputError("--num-reads must be >= 1");
  return c;
}

bool steepest(const Options& o) { return o.post == "steepest"; }

int cmd_score(const Options& o) {
  const ma::InstanceDocument doc = ma::load_instance_document(o.input);
  const ma::CompatibilityMatrix m = ma::document_scores(doc);
  emit(o.out, ma::matrix_csv(m));
  double lo = 0.0, hi = 0.0, sum = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m.scores(i, j);
      if (std::isnan(v)) continue;
      lo = count ? std::min(lo, v) : v;
      hi = count ? std::max(hi, v) : v;
      sum += v;
      ++count;
    }
  }
  info(o) << m.rows() << "x" << m.cols() << " scores: min " << lo << ", max " << hi
          << ", mean " << (count ? sum / static_cast<double>(count) : 0.0) << "\n";
  return kExitOk;
}

int cmd_filter(const Options& o) {
  const ma::MatchingInstance inst = load_instance(o.input);
  emit(o.out, ma::to_json(inst).dump(2) + "\n");
  const std::size_t total = inst.num_users() * inst.num_supporters();
  info(o) << "kept " << inst.edges().size() << "/" << total << " pairs\n";
  const ma::SolvabilityReport s = ma::check_solvability(inst);
  if (!s.perfect_matching_possible) info(o) << "warning: " << s.reason << "\n";
  return kExitOk;
}

int cmd_build(const Options& o) {
  const ma::MatchingInstance inst = load_instance(o.input);
  const double base = o.lambda ? *o.lambda : ma::kWorkflowLambdaScale * inst.max_score();
  ma::QuboModel model;
  if (o.formulation == "approx") {
    model = ma::build_approx_qubo(inst, base);
  } else {
    model = ma::build_naive_qubo(inst, o.lambda1.value_or(base), o.lambda2.value_or(base));
  }
  emit(o.out, ma::to_json(model).dump(2) + "\n");
  info(o) << o.formulation << " model: " << model.num_vars() << " variables, "
          << model.quadratic().size() << " couplings\n";
  return kExitOk;
}

int cmd_solve(const Options& o) {
  const ma::QuboModel model = load_qubo(o.input);
  const ma::SaConfig c = sa_config(o);
  ma::SampleSet samples = ma::sa_sample(model, c.schedule, c.num_reads, o.seed);
  if (steepest(o)) samples = ma::steepest_descent(model, samples);
  emit(o.out, ma::to_jsonl(samples));
  double best = 0.0;
  for (std::size_t k = 0; k < samples.samples.size(); ++k) {
    best = k ? std::min(best, samples.samples[k].energy) : samples.samples[k].energy;
  }
  info(o) << samples.samples.size() << " reads, best energy " << best << ", feasible "
          << samples.feasibility_rate() * 100.0 << "%\n";
  return kExitOk;
}

int cmd_analyze(const Options& o) {
  const ma::QuboModel model = load_qubo(o.input);
  ma::SampleSet samples = ma::parse_sample_jsonl(ma::read_file(o.samples));
  ma::rescore(samples, model);
  const ma::MatchingInstance inst =
      o.instance.empty() ? ma::decode_instance(model.decode_map()) : load_instance(o.instance);
  const double optimum = ma::exact_assignment(inst).score;
  const ma::QualityReport quality = ma::quality_report(samples, model, optimum, o.bins);
  const ma::FeasibilityAudit audit =
      ma::feasibility_audit(samples, ma::decode_instance(model.decode_map()), model);
  ma::DiversityConfig dc;
  dc.alpha = o.alpha;
  dc.R = o.R;
  dc.validate();
  const ma::DiversityResult div = ma::diversity(samples, model, optimum, dc);
  json report = {{"quality", ma::to_json(quality)},
                 {"feasibility", ma::to_json(audit)},
                 {"diversity", ma::to_json(div)},
                 {"alpha", o.alpha},
                 {"R", o.R}};
  emit(o.out, report.dump(2) + "\n");
  if (!o.csv.empty()) ma::write_file(o.csv, ma::quality_csv(samples, model, quality));
  info(o) << "optimum " << optimum << ", best "
          << (quality.best_objective ? json(*quality.best_objective).dump() : "none")
          << ", feasible " << quality.feasibility_rate * 100.0 << "%, diversity " << div.size
          << (div.exact ? "" : " (greedy)") << "\n";
  return kExitOk;
}

int cmd_bench(const Options& o) {
  json doc;
  try {
    doc = json::parse(ma::read_file(o.input));
  } catch (const json::exception& e) {
    throw ma::InputError(o.input + ": " + e.what());
  }
  ma::ExperimentConfig config = ma::experiment_config_from_json(doc);
  if (!o.out.empty()) config.output_dir = o.out;
  std::filesystem::create_directories(config.output_dir);
  const ma::BenchmarkReport report = ma::run_experiment(config);
  const std::string base = ma::report_basename(config);
  ma::write_file(base + ".csv", ma::report_csv(report));
  ma::write_file(base + ".json", ma::report_summary(report).dump(2) + "\n");
  if (o.verbose) {
    for (const auto& line : report.log) std::cerr << line << "\n";
  }
  std::cout << "wrote " << base << ".csv and " << base << ".json (" << report.rows.size()
            << " rows)\n";
  return kExitOk;
}

int cmd_workflow(const Options& o) {
  const ma::InstanceDocument doc = ma::load_instance_document(o.input);
  ma::WorkflowOptions w;
  w.formulation = o.formulation == "approx" ? ma::Formulation::kApprox : ma::Formulation::kNaive;
  w.lambda = o.lambda;
  w.sa = sa_config(o);
  w.steepest = steepest(o);
  w.seed = o.seed;
  const ma::WorkflowReport report = ma::run_sendai_workflow(doc, w);
  std::cout << ma::workflow_table(report);
  for (const auto& warning : report.warnings) std::cerr << "warning: " << warning << "\n";
  if (!o.out.empty()) ma::write_file(o.out, ma::to_json(report).dump(2) + "\n");
  return kExitOk;
}

void add_anneal_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--beta-min", o.beta_min, "initial inverse temperature")->capture_default_str();
  cmd->add_option("--beta-max", o.beta_max, "final inverse temperature")->capture_default_str();
  cmd->add_option("--num-sweeps", o.num_sweeps, "sweeps per read")->capture_default_str();
  cmd->add_option("--num-reads", o.num_reads, "independent reads")->capture_default_str();
  cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
  cmd->add_option("--post", o.post, "post-processing")
      ->check(CLI::IsMember({"none", "steepest"}))
      ->capture_default_str();
}

void add_formulation_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--formulation", o.formulation, "QUBO formulation")
      ->check(CLI::IsMember({"naive", "approx"}))
      ->capture_default_str();
  cmd->add_option("--lambda", o.lambda, "penalty weight (default 0.55 * max score)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compatibility matching with QUBO models and simulated annealing"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("-v,--verbose", o.verbose, "print experiment logs");

  auto* score = app.add_subcommand("score", "compute the compatibility matrix as CSV");
  score->add_option("instance", o.input, "instance JSON")->required();
  score->add_option("--out", o.out, "output CSV (default stdout)");

  auto* filter = app.add_subcommand("filter", "apply pair rules and write the matching instance");
  filter->add_option("instance", o.input, "instance JSON")->required();
  filter->add_option("--out", o.out, "output JSON (default stdout)");

  auto* build = app.add_subcommand("build", "build a QUBO model");
  build->add_option("instance", o.input, "instance or filtered-instance JSON")->required();
  add_formulation_flags(build, o);
  build->add_option("--lambda1", o.lambda1, "user one-hot penalty (naive)");
  build->add_option("--lambda2", o.lambda2, "supporter capacity penalty (naive)");
  build->add_option("--out", o.out, "output JSON (default stdout)");

  auto* solve = app.add_subcommand("solve", "sample a QUBO model with simulated annealing");
  solve->add_option("model", o.input, "QUBO JSON")->required();
  add_anneal_flags(solve, o);
  solve->add_option("--out", o.out, "output JSONL (default stdout)");

  auto* analyze = app.add_subcommand("analyze", "quality, feasibility and diversity of samples");
  analyze->add_option("model", o.input, "QUBO JSON")->required();
  analyze->add_option("samples", o.samples, "sample-set JSONL")->required();
  analyze->add_option("--instance", o.instance, "full instance for the optimum");
  analyze->add_option("--alpha", o.alpha, "allowable-error fraction")->capture_default_str();
  analyze->add_option("--R", o.R, "distinctness threshold fraction")->capture_default_str();
  analyze->add_option("--bins", o.bins, "histogram bins")->capture_default_str();
  analyze->add_option("--csv", o.csv, "per-sample CSV");
  analyze->add_option("--out", o.out, "output JSON (default stdout)");

  auto* bench = app.add_subcommand("bench", "run a benchmark experiment");
  bench->add_option("config", o.input, "experiment config JSON")->required();
  bench->add_option("--out", o.out, "output directory (overrides the config)");

  auto* workflow = app.add_subcommand("workflow", "score, filter, solve and list all optima");
  workflow->add_option("instance", o.input, "instance JSON")->required();
  add_formulation_flags(workflow, o);
  add_anneal_flags(workflow, o);
  workflow->add_option("--out", o.out, "JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*score) return cmd_score(o);
    if (*filter) return cmd_filter(o);
    if (*build) return cmd_build(o);
    if (*solve) return cmd_solve(o);
    if (*analyze) return cmd_analyze(o);
    if (*bench) return cmd_bench(o);
    if (*workflow) return cmd_workflow(o);
  } catch (const ma::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ma::SizeCapError& e) {
    std::cerr << "size cap: " << e.what() << "\n";
    return kExitSizeCap;
  } catch (const ma::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
