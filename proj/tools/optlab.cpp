// optlab: run experiments, quick benchmarks, verification suites and mode
// replays from the command line.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "optlab/analysis.hpp"
#include "optlab/error.hpp"
#include "optlab/harness/config.hpp"
#include "optlab/harness/csv.hpp"
#include "optlab/harness/runner.hpp"
#include "optlab/harness/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kConfigError = 2;

using namespace optlab;
using namespace optlab::harness;

bool has_split(EstimatorKind kind) {
  return kind == EstimatorKind::EAdam || kind == EstimatorKind::AdaBelief ||
         kind == EstimatorKind::AdamL;
}

Vector parse_list(const std::string& text) {
  Vector out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ConfigError("x0", "cannot parse '" + cell + "' as a number");
    }
  }
  return out;
}

void print_brief(const ExperimentResult& result) {
  for (const auto& run : result.runs) {
    std::cout << run.label << " r" << run.repeat << "  final_f=" << format_double(run.final_f)
              << "  best_f=" << format_double(run.best_f) << " @" << run.best_step
              << (run.diverged ? "  DIVERGED" : "") << '\n';
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  ExperimentConfig cfg = load_config(config_path);
  apply_environment(cfg);
  const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
  const ExperimentResult result = run_experiment(cfg);
  write_outputs(cfg, result, dir);
  print_brief(result);
  std::cout << "wrote " << dir << '\n';
  return kOk;
}

struct BenchArgs {
  std::string problem;
  std::string optimizer;
  std::string x0;
  std::int64_t steps = 0;
  double eta = 1e-3, gamma = 1.0, phi = 1.0, beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
  std::string out;
};

int cmd_bench(const BenchArgs& a) {
  nlohmann::json doc = {
      {"problem", {{"name", a.problem}, {"x0", parse_list(a.x0)}}},
      {"optimizers",
       {{{"kind", a.optimizer}, {"eta", a.eta}, {"gamma", a.gamma}, {"phi", a.phi},
         {"beta1", a.beta1}, {"beta2", a.beta2}, {"epsilon", a.epsilon}}}},
      {"steps", a.steps}};
  ExperimentConfig cfg = parse_config(doc);
  apply_environment(cfg);
  const ExperimentResult result = run_experiment(cfg);
  if (!a.out.empty()) write_outputs(cfg, result, a.out);
  std::cout << summary_json(cfg, result).dump(2) << '\n';
  return kOk;
}

int cmd_verify(const std::string& suite) {
  SuiteReport report;
  try {
    report = run_suite(suite);
  } catch (const InputError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kConfigError;
  }
  print_report(std::cout, report);
  return report.ok() ? kOk : kVerifyFailed;
}

// Replays exact gradients along a logged trajectory and prints the mode split
// after each step. Needs a trace written with record_every = 1.
int cmd_modes(const std::string& trace_path, const std::string& config_path,
              const std::string& label) {
  ExperimentConfig cfg = load_config(config_path);
  const OptimizerEntry* entry = nullptr;
  for (const auto& e : cfg.optimizers) {
    if (label.empty() ? has_split(e.config.kind) : e.label == label) {
      entry = &e;
      break;
    }
  }
  if (entry == nullptr) {
    throw ConfigError("optimizers", label.empty() ? "no eadam, adabelief or adaml entry"
                                                  : "no optimizer labelled '" + label + "'");
  }
  std::ifstream in(trace_path);
  if (!in) throw ConfigError("", "cannot open trace '" + trace_path + "'");
  const auto records = read_csv(in);
  const Problem problem = build_problem(cfg.problem);

  OptimizerConfig oc = entry->config;
  ScalingState scaling = entry->scaling;
  ModeTracker tracker(oc, problem.dim, cfg.mode_ratio);
  Vector m(problem.dim, 0.0);
  std::cout << "k,adaptive_fraction,adaptive,non_adaptive,transitional\n";
  for (std::size_t r = 0; r + 1 < records.size(); ++r) {
    if (records[r].k != static_cast<std::int64_t>(r) || records[r].x.size() != problem.dim) {
      throw InputError("trace must hold consecutive rows k = 0, 1, 2, ... of the problem dimension");
    }
    const Vector g = problem.grad(records[r].x);
    const double f = problem.eval(records[r].x);
    double e = 1.0;
    if (oc.kind == EstimatorKind::AdamL) {
      tracker.set_gamma(scaling.in_warmup() ? 1.0 : oc.gamma);
      e = ell(scaling, f);
      scaling = observe(scaling, f);
    }
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = oc.beta1 * m[i] + (1.0 - oc.beta1) * g[i];
    tracker.push(g, m, e);
    const ModeReport rep = tracker.report();
    int counts[3] = {0, 0, 0};
    for (Mode mode : rep.modes) ++counts[static_cast<int>(mode)];
    std::cout << r + 1 << ',' << format_double(rep.adaptive_fraction) << ',' << counts[0] << ','
              << counts[1] << ',' << counts[2] << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optlab: adaptive-gradient optimizer laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "experiment JSON")->required();
  run->add_option("--out", out_dir, "output directory (overrides output_dir)");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "single optimizer on a named problem");
  bench->add_option("--problem", bench_args.problem, "camel3 or rosenbrock")->required();
  bench->add_option("--optimizer", bench_args.optimizer, "adam, eadam, adabelief, adaml, sgd_momentum")
      ->required();
  bench->add_option("--x0", bench_args.x0, "comma-separated start point")->required();
  bench->add_option("--steps", bench_args.steps, "iterations")->required();
  bench->add_option("--eta", bench_args.eta);
  bench->add_option("--gamma", bench_args.gamma);
  bench->add_option("--phi", bench_args.phi);
  bench->add_option("--beta1", bench_args.beta1);
  bench->add_option("--beta2", bench_args.beta2);
  bench->add_option("--epsilon", bench_args.epsilon);
  bench->add_option("--out", bench_args.out, "also write CSV + summary here");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", suite, "oracle, gradcheck, propositions, modes, scaling")->required();

  std::string trace_path, modes_config, modes_label;
  auto* modes = app.add_subcommand("modes", "mode split along a logged trajectory");
  modes->add_option("--trace", trace_path, "trajectory CSV (record_every = 1)")->required();
  modes->add_option("--config", modes_config, "config that produced the trace")->required();
  modes->add_option("--optimizer", modes_label, "label of the optimizer entry to replay");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir);
    if (*bench) return cmd_bench(bench_args);
    if (*verify) return cmd_verify(suite);
    if (*modes) return cmd_modes(trace_path, modes_config, modes_label);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const optlab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
