#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "optlab/analysis.hpp"
#include "optlab/harness/config.hpp"
#include "optlab/trajectory.hpp"

namespace optlab::harness {

struct RunResult {
  std::string label;
  EstimatorKind kind = EstimatorKind::Adam;
  std::int64_t repeat = 0;
  std::uint64_t seed = 0;
  std::vector<TrajectoryRecord> records;  // rows kept at the record stride
  double final_f = 0.0;
  double best_f = 0.0;
  std::int64_t best_step = 0;
  bool diverged = false;
  Vector final_x;
  std::vector<std::pair<std::int64_t, double>> mode_timeline;  // (k, adaptive fraction)
  std::int64_t clip_infeasible = 0;
  nlohmann::json analysis;  // null when no constants are available
};

struct ExperimentResult {
  std::vector<RunResult> runs;
};

/// Runs every (optimizer, repeat) pair; repeat r uses seed + r. Nothing is
/// written to disk.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// A single optimizer on a prepared problem. All steps are kept in
/// `full_records` when it is non-null (used by trajectory verification).
RunResult run_single(const ExperimentConfig& config, const Problem& problem,
                     const OptimizerEntry& entry, std::int64_t repeat,
                     std::vector<TrajectoryRecord>* full_records = nullptr);

/// `<label>_r<repeat>.csv` per run plus summary.json.
void write_outputs(const ExperimentConfig& config, const ExperimentResult& result,
                   const std::string& dir);

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace optlab::harness
