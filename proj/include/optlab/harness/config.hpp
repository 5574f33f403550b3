#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "optlab/optim.hpp"
#include "optlab/problems.hpp"
#include "optlab/scaling.hpp"

namespace optlab::harness {

struct ProblemSpec {
  std::string name;
  Vector spectrum;  // pl_quadratic
  Vector x_star;    // pl_quadratic
  std::optional<DomainBox> box;
  Vector x0;
  NoiseSpec noise;
};

struct OptimizerEntry {
  std::string label;
  OptimizerConfig config;
  ScalingState scaling;
};

struct AnalysisOverrides {
  std::optional<std::int64_t> k0;
  std::optional<double> mu, L, G;
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<OptimizerEntry> optimizers;
  std::int64_t steps = 1;
  std::int64_t record_every = 1;
  std::uint64_t seed = 0;
  std::int64_t repeats = 1;
  std::string output_dir = "out";
  double mode_ratio = 1.05;
  AnalysisOverrides analysis;
};

/// Parses and validates; every failure is a ConfigError carrying the JSON
/// path of the offending field. Unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Applies OPTLAB_SEED when set.
void apply_environment(ExperimentConfig& config);

Problem build_problem(const ProblemSpec& spec);

}  // namespace optlab::harness
