#pragma once

// Mode classification, v_min, and numeric evaluation of the sufficient
// conditions and constants behind the monotonicity / linear-rate results for
// EAdam, AdaBelief and AdamL (all with beta1 = 0).

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "optlab/optim.hpp"
#include "optlab/trajectory.hpp"

namespace optlab {

enum class Mode { Adaptive, NonAdaptive, Transitional };

std::string_view to_string(Mode mode);

inline constexpr double kDefaultModeRatio = 1.05;

struct ModeReport {
  std::int64_t k = 0;  // index of the last history entry
  std::vector<Mode> modes;
  double adaptive_fraction = 0.0;
  Vector adaptive_sum;
  Vector nonadaptive_sum;
};

/// Adaptive iff A > tau N, NonAdaptive iff A tau < N, Transitional otherwise.
ModeReport classify_sums(std::int64_t k, Vector adaptive_sum, Vector nonadaptive_sum,
                         double tau = kDefaultModeRatio);

/// Batch evaluation of both sums over the whole history.
ModeReport classify_modes(const GradientHistory& history, const OptimizerConfig& config,
                          double tau = kDefaultModeRatio);

/// Same sums, maintained incrementally while a run progresses.
class ModeTracker {
 public:
  ModeTracker(const OptimizerConfig& config, std::size_t n, double tau = kDefaultModeRatio);

  void push(std::span<const double> g, std::span<const double> m_new, double ell);
  ModeReport report() const;
  std::int64_t steps() const noexcept { return steps_; }
  // epoch-0 runs of the auto scaling modes use gamma = 1
  void set_gamma(double gamma) { config_.gamma = gamma; }

 private:
  OptimizerConfig config_;
  double tau_;
  Vector adaptive_;
  double nonadaptive_ = 0.0;
  std::int64_t steps_ = 0;
};

/// (1 - beta2) beta2^(k-1) min_i (g0_i)^2.
double v_min(std::span<const double> g0, double beta2, std::int64_t k);

/// sum_{j=0}^{k} beta2^j.
double geometric_sum(double beta2, std::int64_t k);

/// Smallest k >= 0 with geometric_sum(beta2, k) >= threshold, or -1 if the
/// series limit 1/(1-beta2) never reaches it.
std::int64_t smallest_k_for_sum(double threshold, double beta2);

/// Smallest integer strictly above log_beta2(arg); requires 0 < arg < 1.
std::int64_t smallest_k_above_log(double arg, double beta2);

struct AnalysisConstants {
  double G = std::numeric_limits<double>::quiet_NaN();
  double L = std::numeric_limits<double>::quiet_NaN();
  double mu = std::numeric_limits<double>::quiet_NaN();
  double sigma = 0.0;
  std::size_t n = 0;
  double f_star = 0.0;
  Vector g0;  // first gradient; v_min is derived from it at the checked k
  double v_min = std::numeric_limits<double>::quiet_NaN();  // explicit override when finite
  double ell_min = std::numeric_limits<double>::quiet_NaN();
  double ell_max = std::numeric_limits<double>::quiet_NaN();
  double ell_k = std::numeric_limits<double>::quiet_NaN();  // ell at the checked step
  std::int64_t k0 = 0;
};

enum class PropCase { None, I, II };

std::string_view to_string(PropCase c);

struct MonotonicityReport {
  PropCase which = PropCase::None;
  bool passes = false;
  double eta_bound = std::numeric_limits<double>::quiet_NaN();
  std::int64_t k_threshold = -1;  // smallest k meeting the sum condition of the case
  double C1 = std::numeric_limits<double>::quiet_NaN();
  double C2 = std::numeric_limits<double>::quiet_NaN();
  std::string violated;  // first failing inequality per case, when none passes
};

/// Monotonicity conditions after k steps (k >= 1).
MonotonicityReport check_monotonicity_conditions(EstimatorKind estimator,
                                                 const AnalysisConstants& constants,
                                                 const OptimizerConfig& config,
                                                 std::int64_t k);

struct RateReport {
  PropCase which = PropCase::None;
  bool passes = false;
  double eta_bound = std::numeric_limits<double>::quiet_NaN();
  std::int64_t k0_min = -1;  // smallest admissible k0 for the case
  double C = std::numeric_limits<double>::quiet_NaN();
  double C1 = std::numeric_limits<double>::quiet_NaN();
  double C2 = std::numeric_limits<double>::quiet_NaN();
  double contraction = std::numeric_limits<double>::quiet_NaN();  // 2 mu C
  std::string violated;
  std::vector<std::string> notes;
};

/// Linear-rate hypotheses with the sum / stepsize conditions checked at k0.
RateReport check_rate_conditions(EstimatorKind estimator, const AnalysisConstants& constants,
                                 const OptimizerConfig& config, std::int64_t k0);

/// (1 - 2 mu C)^(k-k0) gap + C1/(2 mu C) sigma + C2/(2 mu C) sigma^2.
/// Throws BoundNotApplicableError when the hypotheses fail, and
/// std::logic_error if a passing case yields 2 mu C outside (0, 1).
double rate_bound(EstimatorKind estimator, const AnalysisConstants& constants,
                  const OptimizerConfig& config, std::int64_t k0, std::int64_t k,
                  double f_gap_at_k0);

/// Smallest k0 at which both the monotonicity and the rate conditions hold,
/// scanning up to k_limit; -1 if none does.
std::int64_t warmup_index(EstimatorKind estimator, const AnalysisConstants& constants,
                          const OptimizerConfig& config, std::int64_t k_limit);

struct VerificationReport {
  bool monotone_after_k0 = true;
  std::int64_t monotonicity_violations = 0;
  std::int64_t bound_violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  // min(bound - gap)
  double contraction = std::numeric_limits<double>::quiet_NaN();
  std::int64_t checked = 0;
};

/// Replays logged f values against the monotonicity statement and the rate
/// bound. Throws BoundNotApplicableError if the hypotheses fail at k0.
VerificationReport verify_trajectory(const std::vector<TrajectoryRecord>& records,
                                     const AnalysisConstants& constants,
                                     EstimatorKind estimator, const OptimizerConfig& config,
                                     std::int64_t k0);

}  // namespace optlab
