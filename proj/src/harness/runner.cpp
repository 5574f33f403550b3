#include "optlab/harness/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>

#include "optlab/error.hpp"
#include "optlab/harness/csv.hpp"
#include "optlab/scaling.hpp"

namespace optlab::harness {
namespace {

double norm2(const Vector& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

bool all_finite(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double c) { return std::isfinite(c); });
}

bool has_mode_split(EstimatorKind kind) {
  return kind == EstimatorKind::EAdam || kind == EstimatorKind::AdaBelief ||
         kind == EstimatorKind::AdamL;
}

// Adam has no epsilon term and reports fully adaptive; heavy ball reports 0.
double fallback_fraction(EstimatorKind kind) { return kind == EstimatorKind::Adam ? 1.0 : 0.0; }

nlohmann::json monotonicity_json(const MonotonicityReport& r) {
  return {{"case", std::string(to_string(r.which))}, {"passes", r.passes},
          {"eta_bound", r.eta_bound},              {"k_threshold", r.k_threshold},
          {"C1", r.C1},                            {"C2", r.C2},
          {"violated", r.violated}};
}

nlohmann::json rate_json(const RateReport& r) {
  return {{"case", std::string(to_string(r.which))},
          {"passes", r.passes},
          {"eta_bound", r.eta_bound},
          {"k0_min", r.k0_min},
          {"C", r.C},
          {"C1", r.C1},
          {"C2", r.C2},
          {"contraction", r.contraction},
          {"violated", r.violated},
          {"notes", r.notes}};
}

struct StepTrace {
  std::vector<TrajectoryRecord> records;  // every step
  std::vector<double> ells;               // ell^(k) used at step k
  Vector g0;
};

nlohmann::json analyse(const ExperimentConfig& config, const Problem& problem,
                       const OptimizerEntry& entry, const StepTrace& trace, bool diverged) {
  const EstimatorKind kind = entry.config.kind;
  if (!has_mode_split(kind)) return nullptr;
  ProblemConstants pc = problem.constants.value_or(ProblemConstants{});
  if (config.analysis.mu) pc.mu = *config.analysis.mu;
  if (config.analysis.L) pc.L = *config.analysis.L;
  if (config.analysis.G) pc.G = *config.analysis.G;
  if (!std::isfinite(pc.mu) || !std::isfinite(pc.L) || !std::isfinite(pc.G)) return nullptr;

  AnalysisConstants c;
  c.G = pc.G;
  c.L = pc.L;
  c.mu = pc.mu;
  c.n = problem.dim;
  c.f_star = problem.f_star.value_or(0.0);
  c.sigma = config.problem.noise.kind == NoiseKind::None ? 0.0 : config.problem.noise.sigma;
  c.g0 = trace.g0;
  if (kind == EstimatorKind::AdamL && !trace.ells.empty()) {
    const auto [lo, hi] = std::minmax_element(trace.ells.begin(), trace.ells.end());
    c.ell_min = *lo;
    c.ell_max = *hi;
  }
  const bool g0_nonzero =
      std::none_of(c.g0.begin(), c.g0.end(), [](double g) { return g == 0.0; });

  nlohmann::json out;
  out["constants_estimated"] = pc.estimated;
  out["G"] = c.G;
  out["L"] = c.L;
  out["mu"] = c.mu;
  out["sigma"] = c.sigma;
  out["ell_min"] = c.ell_min;
  out["ell_max"] = c.ell_max;

  const auto last = static_cast<std::int64_t>(trace.records.size()) - 1;  // steps taken
  auto set_ell = [&](std::int64_t k) {
    if (kind == EstimatorKind::AdamL && k >= 0 && k < static_cast<std::int64_t>(trace.ells.size())) {
      c.ell_k = trace.ells[k];
    }
  };

  std::optional<std::int64_t> k0 = config.analysis.k0;
  if (!k0) {
    for (std::int64_t k = 1; k <= last; ++k) {
      set_ell(k);
      if (check_monotonicity_conditions(kind, c, entry.config, k).passes &&
          check_rate_conditions(kind, c, entry.config, k).passes) {
        k0 = k;
        break;
      }
    }
  }
  const std::int64_t probe = k0 ? *k0 : std::max<std::int64_t>(1, last);
  set_ell(probe);
  out["k0"] = k0 ? nlohmann::json(*k0) : nlohmann::json(nullptr);
  out["v_min"] = g0_nonzero && !c.g0.empty() ? v_min(c.g0, entry.config.beta2, probe)
                                             : std::numeric_limits<double>::quiet_NaN();
  out["monotonicity"] = monotonicity_json(check_monotonicity_conditions(kind, c, entry.config, probe));
  out["rate"] = rate_json(check_rate_conditions(kind, c, entry.config, probe));
  out["verification"] = nullptr;
  if (k0 && !diverged && *k0 <= last) {
    try {
      const VerificationReport v = verify_trajectory(trace.records, c, kind, entry.config, *k0);
      out["verification"] = {{"monotone_after_k0", v.monotone_after_k0},
                             {"monotonicity_violations", v.monotonicity_violations},
                             {"bound_violations", v.bound_violations},
                             {"worst_margin", v.worst_margin},
                             {"checked", v.checked}};
    } catch (const BoundNotApplicableError& e) {
      out["verification"] = {{"not_applicable", e.violated()}};
    }
  }
  return out;
}

}  // namespace

RunResult run_single(const ExperimentConfig& config, const Problem& problem,
                     const OptimizerEntry& entry, std::int64_t repeat,
                     std::vector<TrajectoryRecord>* full_records) {
  RunResult result;
  result.label = entry.label;
  result.kind = entry.config.kind;
  result.repeat = repeat;
  result.seed = config.seed + static_cast<std::uint64_t>(repeat);

  NoiseSpec noise = config.problem.noise;
  noise.seed = result.seed;
  Rng rng(noise.seed);
  NoiseDiagnostics diag;

  const OptimizerConfig& base = entry.config;
  const bool adaml = base.kind == EstimatorKind::AdamL;
  OptimizerState state = OptimizerState::initial(config.problem.x0, base);
  ScalingState scaling = entry.scaling;
  std::optional<ModeTracker> tracker;
  if (has_mode_split(base.kind)) tracker.emplace(base, problem.dim, config.mode_ratio);

  StepTrace trace;
  const bool keep_all = full_records != nullptr || has_mode_split(base.kind);

  auto emit = [&](const TrajectoryRecord& rec) {
    if (keep_all) trace.records.push_back(rec);
    if (rec.k % config.record_every == 0 || rec.k == config.steps) {
      result.records.push_back(rec);
      result.mode_timeline.emplace_back(rec.k, rec.adaptive_fraction);
    }
    if (rec.f < result.best_f || rec.k == 0) {
      result.best_f = rec.f;
      result.best_step = rec.k;
    }
  };

  TrajectoryRecord row0;
  row0.k = 0;
  row0.f = problem.eval(state.x);
  row0.grad_norm = norm2(problem.grad(state.x));
  row0.adaptive_fraction = tracker ? 0.0 : fallback_fraction(base.kind);
  row0.x = state.x;
  emit(row0);
  if (!std::isfinite(row0.f)) result.diverged = true;

  for (std::int64_t k = 0; k < config.steps && !result.diverged; ++k) {
    GradientSample sample = stochastic_gradient(problem, state.x, noise, rng, &diag);
    if (k == 0) trace.g0 = sample.g;

    double ell_value = 1.0;
    OptimizerConfig used = base;
    if (adaml) {
      if (scaling.in_warmup()) used.gamma = 1.0;
      ell_value = ell(scaling, sample.f_value);
      scaling = observe(scaling, sample.f_value);
      trace.ells.push_back(ell_value);
    }

    state = step(state, sample, ell_value, used);
    if (tracker) {
      if (adaml) tracker->set_gamma(used.gamma);
      tracker->push(sample.g, state.m, ell_value);
    }

    TrajectoryRecord rec;
    rec.k = state.k;
    rec.x = state.x;
    if (!all_finite(state.x)) {
      rec.f = std::numeric_limits<double>::quiet_NaN();
      rec.grad_norm = std::numeric_limits<double>::quiet_NaN();
      result.diverged = true;
    } else {
      rec.f = problem.eval(state.x);
      rec.grad_norm = norm2(problem.grad(state.x));
      if (!std::isfinite(rec.f) || !std::isfinite(rec.grad_norm)) result.diverged = true;
    }
    const StepsizeReport sr = effective_stepsize(state, used);
    rec.step_min = *std::min_element(sr.stepsize.begin(), sr.stepsize.end());
    rec.step_max = *std::max_element(sr.stepsize.begin(), sr.stepsize.end());
    rec.step_mean = std::accumulate(sr.stepsize.begin(), sr.stepsize.end(), 0.0) /
                    static_cast<double>(sr.stepsize.size());
    rec.delta_norm = norm2(sr.delta);
    rec.adaptive_fraction = tracker ? tracker->report().adaptive_fraction
                                    : fallback_fraction(base.kind);
    if (result.diverged) {
      // partial trajectory is kept up to the first non-finite row
      if (keep_all) trace.records.push_back(rec);
      result.records.push_back(rec);
      result.mode_timeline.emplace_back(rec.k, rec.adaptive_fraction);
      break;
    }
    emit(rec);
  }

  const TrajectoryRecord& final_row = result.records.back();
  result.final_f = final_row.f;
  result.final_x = final_row.x;
  result.clip_infeasible = diag.clip_infeasible;
  result.analysis = analyse(config, problem, entry, trace, result.diverged);
  if (full_records != nullptr) *full_records = std::move(trace.records);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const Problem problem = build_problem(config.problem);
  if (config.problem.x0.size() != problem.dim) {
    throw ConfigError("problem.x0", "length does not match the problem dimension");
  }
  ExperimentResult out;
  for (std::int64_t r = 0; r < config.repeats; ++r) {
    for (const auto& entry : config.optimizers) {
      out.runs.push_back(run_single(config, problem, entry, r));
    }
  }
  return out;
}

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& run : result.runs) {
    nlohmann::json timeline = nlohmann::json::array();
    for (const auto& [k, frac] : run.mode_timeline) timeline.push_back({k, frac});
    runs.push_back({{"label", run.label},
                    {"kind", std::string(to_string(run.kind))},
                    {"repeat", run.repeat},
                    {"seed", run.seed},
                    {"final_f", run.final_f},
                    {"best_f", run.best_f},
                    {"best_step", run.best_step},
                    {"diverged", run.diverged},
                    {"final_x", run.final_x},
                    {"clip_infeasible", run.clip_infeasible},
                    {"mode_timeline", timeline},
                    {"analysis", run.analysis}});
  }
  return {{"problem", config.problem.name},
          {"steps", config.steps},
          {"record_every", config.record_every},
          {"seed", config.seed},
          {"repeats", config.repeats},
          {"runs", runs}};
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result,
                   const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const Problem problem = build_problem(config.problem);
  for (const auto& run : result.runs) {
    const fs::path file = fs::path(dir) / (run.label + "_r" + std::to_string(run.repeat) + ".csv");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write " + file.string());
    write_csv(out, run.records, problem.dim);
  }
  std::ofstream summary(fs::path(dir) / "summary.json", std::ios::binary);
  if (!summary) throw Error("cannot write summary.json in " + dir);
  summary << summary_json(config, result).dump(2) << '\n';
}

}  // namespace optlab::harness
