#pragma once

// Adaptive-gradient update template shared by Adam, EAdam, AdaBelief and
// AdamL, plus heavy-ball gradient descent. All state is 64-bit.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace optlab {

using Vector = std::vector<double>;

enum class EstimatorKind { Adam, EAdam, AdaBelief, AdamL, SgdMomentum };

std::string_view to_string(EstimatorKind kind);
/// Accepts the lower-case names used in configs ("adam", "eadam",
/// "adabelief", "adaml", "sgd_momentum"). Throws ConfigError otherwise.
EstimatorKind parse_estimator_kind(std::string_view name);

/// Multiply the current stepsize by `factor` at the start of step `step_index`
/// (the step that produces x^(step_index)).
struct DecayEntry {
  std::int64_t step_index = 1;
  double factor = 1.0;
};

/// One-shot stepsize change the first time f(x^(k)) drops below a threshold.
struct ValueTrigger {
  double when_f_below = 1.0;
  double factor = 10.0;
};

struct OptimizerConfig {
  EstimatorKind kind = EstimatorKind::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eta = 1e-3;
  double epsilon = 1e-8;
  double gamma = 1.0;  // AdamL only
  double phi = 1.0;    // AdamL only
  std::vector<DecayEntry> decay_schedule;
  std::optional<ValueTrigger> boost;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

struct OptimizerState {
  Vector x;
  Vector m;
  Vector second_moment;    // v, y, s or w depending on the estimator
  Vector momentum_buffer;  // SgdMomentum only
  std::int64_t k = 0;
  double eta = 0.0;        // base stepsize after schedule/boost factors
  bool boost_fired = false;

  static OptimizerState initial(Vector x0, const OptimizerConfig& config);
  std::size_t dim() const noexcept { return x.size(); }
};

struct GradientSample {
  Vector g;
  double f_value = 0.0;
  bool is_stochastic = false;
};

/// Lower clamp applied to AdamL's w before the square root of the stepsize.
inline constexpr double kSecondMomentFloor = 1e-30;

/// One iteration of the template: m' = b1 m + (1-b1) g, second moment per
/// estimator, x' = x - eta^(k+1) m' / (1 - b1^(k+1)). `ell` is only read for
/// AdamL. SgdMomentum is forwarded to sgd_momentum_step.
OptimizerState step(const OptimizerState& state, const GradientSample& sample,
                    double ell, const OptimizerConfig& config);

/// Elementwise second-moment recursion for the adaptive estimators.
Vector second_moment_update(std::span<const double> prev,
                            std::span<const double> g,
                            std::span<const double> m_new, double ell,
                            const OptimizerConfig& config);

struct StepsizeReport {
  Vector stepsize;  // eta^(k) per coordinate
  Vector delta;     // |eta^(k) m^(k)|
};

/// Stepsize used by the most recent step. Throws StateError when k == 0.
StepsizeReport effective_stepsize(const OptimizerState& state,
                                  const OptimizerConfig& config);

/// g^(j), m^(j+1) and ell^(j) for j = 0..k, in step order.
struct GradientHistory {
  std::vector<Vector> gradients;
  std::vector<Vector> first_moments;
  std::vector<double> ells;

  std::size_t size() const noexcept { return gradients.size(); }
  void append(Vector g, Vector m_new, double ell);
};

/// Explicit-sum second moment after the last history entry, evaluated
/// independently of the recursion (powers of beta2 computed directly).
Vector closed_form_second_moment(const GradientHistory& history,
                                 const OptimizerConfig& config);

/// b' = b1 b + g, x' = x - eta b'.
OptimizerState sgd_momentum_step(const OptimizerState& state,
                                 const GradientSample& sample,
                                 const OptimizerConfig& config);

}  // namespace optlab
