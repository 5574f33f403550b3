#include "optlab/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "optlab/error.hpp"

namespace optlab {

std::string_view to_string(ScalingMode mode) {
  switch (mode) {
    case ScalingMode::Identity: return "identity";
    case ScalingMode::KnownRange: return "known_range";
    case ScalingMode::AutoEpochLstm: return "auto_epoch_lstm";
    case ScalingMode::AutoEpochWgan: return "auto_epoch_wgan";
  }
  return "unknown";
}

ScalingMode parse_scaling_mode(std::string_view name) {
  for (auto mode : {ScalingMode::Identity, ScalingMode::KnownRange,
                    ScalingMode::AutoEpochLstm, ScalingMode::AutoEpochWgan}) {
    if (name == to_string(mode)) return mode;
  }
  throw ConfigError("mode", "unknown scaling mode '" + std::string(name) + "'");
}

void ScalingState::validate() const {
  if (iters_per_epoch < 1) throw ConfigError("iters_per_epoch", "must be >= 1");
  if (!std::isfinite(f_star)) throw ConfigError("f_star", "must be finite");
  if (mode == ScalingMode::KnownRange) {
    if (!std::isfinite(f_min) || !std::isfinite(f_max)) {
      throw ConfigError("f_min", "range endpoints must be finite");
    }
    if (!(f_max > f_min)) throw ConfigError("f_max", "must exceed f_min");
  }
}

double wgan_scale(double f_min, double f_max) {
  const double range = f_max - f_min;
  if (!(range > 0.0)) return 1.0;
  return std::pow(10.0, std::floor(std::log10(range)));
}

double ell(const ScalingState& state, double f_value) {
  if (!std::isfinite(f_value)) throw NumericInputError("loss value is not finite");
  double out = 1.0;
  switch (state.mode) {
    case ScalingMode::Identity:
      out = f_value - state.f_star;
      break;
    case ScalingMode::KnownRange:
      if (!(state.f_max > state.f_min)) {
        throw ConfigError("f_max", "must exceed f_min");
      }
      out = (f_value - state.f_min) / (state.f_max - state.f_min);
      break;
    case ScalingMode::AutoEpochLstm:
      if (state.epoch_index == 0) return 1.0;
      if (!(state.f_max > 0.0)) {
        throw DomainError("auto_epoch_lstm needs a positive f_max, got " +
                          std::to_string(state.f_max));
      }
      out = f_value / state.f_max;
      break;
    case ScalingMode::AutoEpochWgan:
      if (state.epoch_index == 0) return 1.0;
      out = (f_value - state.f_min) / wgan_scale(state.f_min, state.f_max);
      break;
  }
  return std::max(out, kEllFloor);
}

ScalingState observe(ScalingState state, double f_value) {
  if (!std::isfinite(f_value)) throw NumericInputError("loss value is not finite");
  if (!state.is_auto()) return state;
  if (state.iters_per_epoch < 1) throw ConfigError("iters_per_epoch", "must be >= 1");

  const std::int64_t in_epoch = state.observations % state.iters_per_epoch;
  if (in_epoch == 0) {
    state.epoch_min = f_value;
    state.epoch_max = f_value;
  } else {
    state.epoch_min = std::min(state.epoch_min, f_value);
    state.epoch_max = std::max(state.epoch_max, f_value);
  }
  if (state.epoch_index == 0) {
    state.f_min = state.epoch_min;
    state.f_max = state.epoch_max;
  }

  ++state.observations;
  if (state.observations % state.iters_per_epoch == 0) {
    if (state.epoch_index > 0 && state.continuous_refresh) {
      state.f_min = state.epoch_min;
      state.f_max = state.epoch_max;
    }
    ++state.epoch_index;
    state.f_scale = wgan_scale(state.f_min, state.f_max);
  }
  return state;
}

double phi_from_train_error(double e_train_percent) {
  if (!(e_train_percent > 0.0) || !std::isfinite(e_train_percent)) {
    throw DomainError("training error must be finite and > 0, got " +
                      std::to_string(e_train_percent));
  }
  return std::max(4.0, 4.0 + std::log10(e_train_percent));
}

}  // namespace optlab
