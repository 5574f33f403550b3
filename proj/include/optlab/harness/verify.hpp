#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "optlab/analysis.hpp"
#include "optlab/problems.hpp"
#include "optlab/scaling.hpp"

namespace optlab::harness {

struct PropertyCount {
  std::string name;
  std::int64_t passed = 0;
  std::int64_t failed = 0;
  std::string detail;  // first failure, if any
};

struct SuiteReport {
  std::string suite;
  std::vector<PropertyCount> properties;
  bool ok() const;
};

/// "oracle", "gradcheck", "propositions", "modes" or "scaling".
/// Throws InputError for any other name.
SuiteReport run_suite(std::string_view name);

SuiteReport oracle_suite(int seeds = 20, int steps = 1000, std::size_t n = 8);
SuiteReport gradcheck_suite(int points = 100);
SuiteReport propositions_suite(int instances = 50, std::int64_t steps = 2000);
SuiteReport modes_suite();
SuiteReport scaling_suite();

void print_report(std::ostream& out, const SuiteReport& report);

// Random PL quadratic with an admissible beta1 = 0 configuration for the
// monotonicity and rate results of `kind` (EAdam, AdaBelief or AdamL).
struct PlInstance {
  Problem problem;
  Vector x_star;
  Vector x0;
  OptimizerConfig config;
  ScalingState scaling;  // AdamL: ell = f + 1
  AnalysisConstants constants;
  std::int64_t k0 = 0;
};

PlInstance make_pl_instance(EstimatorKind kind, Rng& rng);

struct PlOutcome {
  bool conditions_pass = false;  // monotonicity and rate hypotheses at k0
  std::string violated;
  VerificationReport verification;
  double contraction = 0.0;
};

PlOutcome run_pl_instance(const PlInstance& instance, std::int64_t steps);

}  // namespace optlab::harness
