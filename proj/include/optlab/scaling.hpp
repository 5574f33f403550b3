#pragma once

// Scaling function ell for AdamL and the epoch-0 range estimation used when
// f_min / f_max are unknown.

#include <cstdint>
#include <string_view>

namespace optlab {

enum class ScalingMode { Identity, KnownRange, AutoEpochLstm, AutoEpochWgan };

std::string_view to_string(ScalingMode mode);
ScalingMode parse_scaling_mode(std::string_view name);

inline constexpr double kEllFloor = 1e-12;

struct ScalingState {
  ScalingMode mode = ScalingMode::Identity;
  double f_min = 0.0;
  double f_max = 1.0;
  double f_scale = 1.0;
  double f_star = 0.0;  // Identity only
  std::int64_t epoch_index = 0;
  std::int64_t iters_per_epoch = 1;
  bool continuous_refresh = false;

  // bookkeeping for observe()
  std::int64_t observations = 0;
  double epoch_min = 0.0;
  double epoch_max = 0.0;

  bool is_auto() const noexcept {
    return mode == ScalingMode::AutoEpochLstm || mode == ScalingMode::AutoEpochWgan;
  }
  // Auto modes emit ell = 1 (and run with gamma = 1) until epoch 0 ends.
  bool in_warmup() const noexcept { return is_auto() && epoch_index == 0; }

  void validate() const;
};

/// 10^floor(log10(range)); 1 when range <= 0.
double wgan_scale(double f_min, double f_max);

/// Scaled loss, floored at kEllFloor.
double ell(const ScalingState& state, double f_value);

/// Feeds one loss value to the range estimator. No-op apart from the finite
/// check in Identity/KnownRange modes.
ScalingState observe(ScalingState state, double f_value);

/// max{4, 4 + log10(e)} for a training error e in percent.
double phi_from_train_error(double e_train_percent);

}  // namespace optlab
