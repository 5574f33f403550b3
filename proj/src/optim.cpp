#include "optlab/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "optlab/error.hpp"

namespace optlab {
namespace {

void require_finite(const GradientSample& sample) {
  for (std::size_t i = 0; i < sample.g.size(); ++i) {
    if (!std::isfinite(sample.g[i])) {
      throw NumericInputError("gradient coordinate " + std::to_string(i) +
                              " is not finite");
    }
  }
  if (!std::isfinite(sample.f_value)) {
    throw NumericInputError("objective value is not finite");
  }
}

void require_same_length(std::size_t expected, std::size_t got,
                         const char* what) {
  if (expected != got) {
    throw InputError(std::string(what) + " has length " + std::to_string(got) +
                     ", expected " + std::to_string(expected));
  }
}

void require_ell(double ell) {
  if (!(ell > 0.0) || !std::isfinite(ell)) {
    throw DomainError("AdamL requires a finite ell > 0, got " +
                      std::to_string(ell));
  }
}

// Applies the decay schedule and the value trigger for the step that
// produces x^(k+1).
void update_base_stepsize(OptimizerState& next, const GradientSample& sample,
                          const OptimizerConfig& config) {
  const std::int64_t index = next.k + 1;
  for (const auto& entry : config.decay_schedule) {
    if (entry.step_index == index) next.eta *= entry.factor;
  }
  if (config.boost && !next.boost_fired &&
      sample.f_value < config.boost->when_f_below) {
    next.eta *= config.boost->factor;
    next.boost_fired = true;
  }
}

// eta^(k) from the second moment after k steps (k >= 1).
Vector adaptive_stepsize(const Vector& second_moment, std::int64_t k,
                         double eta, const OptimizerConfig& config) {
  const double correction = 1.0 - std::pow(config.beta2, static_cast<double>(k));
  Vector out(second_moment.size());
  if (config.kind == EstimatorKind::AdamL) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double w = std::max(second_moment[i], kSecondMomentFloor);
      out[i] = eta * std::sqrt(correction / w);
    }
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = eta / (std::sqrt(second_moment[i] / correction) + config.epsilon);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Adam: return "adam";
    case EstimatorKind::EAdam: return "eadam";
    case EstimatorKind::AdaBelief: return "adabelief";
    case EstimatorKind::AdamL: return "adaml";
    case EstimatorKind::SgdMomentum: return "sgd_momentum";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  for (auto kind : {EstimatorKind::Adam, EstimatorKind::EAdam,
                    EstimatorKind::AdaBelief, EstimatorKind::AdamL,
                    EstimatorKind::SgdMomentum}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("kind", "unknown optimizer kind '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1", "must lie in [0,1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("beta2", "must lie in (0,1)");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta", "must be > 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon", "must be > 0");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma", "must be > 0");
  if (!(phi > 0.0) || !std::isfinite(phi)) throw ConfigError("phi", "must be > 0");
  std::int64_t last = 0;
  for (std::size_t i = 0; i < decay_schedule.size(); ++i) {
    const auto& entry = decay_schedule[i];
    const std::string path = "decay_schedule[" + std::to_string(i) + "]";
    if (entry.step_index <= last) {
      throw ConfigError(path + ".step", "step indices must be >= 1 and strictly increasing");
    }
    if (!(entry.factor > 0.0 && entry.factor <= 1.0)) {
      throw ConfigError(path + ".factor", "must lie in (0,1]");
    }
    last = entry.step_index;
  }
  if (boost) {
    if (!std::isfinite(boost->when_f_below)) {
      throw ConfigError("boost.when_f_below", "must be finite");
    }
    if (!(boost->factor > 0.0) || !std::isfinite(boost->factor)) {
      throw ConfigError("boost.factor", "must be > 0");
    }
  }
}

OptimizerState OptimizerState::initial(Vector x0, const OptimizerConfig& config) {
  OptimizerState state;
  const std::size_t n = x0.size();
  state.x = std::move(x0);
  state.m.assign(n, 0.0);
  state.second_moment.assign(n, 0.0);
  state.momentum_buffer.assign(n, 0.0);
  state.eta = config.eta;
  return state;
}

void GradientHistory::append(Vector g, Vector m_new, double ell) {
  gradients.push_back(std::move(g));
  first_moments.push_back(std::move(m_new));
  ells.push_back(ell);
}

Vector second_moment_update(std::span<const double> prev,
                            std::span<const double> g,
                            std::span<const double> m_new, double ell,
                            const OptimizerConfig& config) {
  require_same_length(prev.size(), g.size(), "gradient");
  require_same_length(prev.size(), m_new.size(), "first moment");
  const double b2 = config.beta2;
  const double eps = config.epsilon;
  Vector out(prev.size());
  switch (config.kind) {
    case EstimatorKind::Adam:
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = b2 * prev[i] + (1.0 - b2) * g[i] * g[i];
      }
      break;
    case EstimatorKind::EAdam:
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = b2 * prev[i] + (1.0 - b2) * g[i] * g[i] + eps;
      }
      break;
    case EstimatorKind::AdaBelief:
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double belief = g[i] - m_new[i];
        out[i] = b2 * prev[i] + (1.0 - b2) * belief * belief + eps;
      }
      break;
    case EstimatorKind::AdamL: {
      require_ell(ell);
      const double scale = config.gamma * std::pow(ell, config.phi);
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = b2 * prev[i] + (1.0 - b2) * g[i] * g[i] / scale + eps * ell;
      }
      break;
    }
    case EstimatorKind::SgdMomentum:
      throw UnsupportedEstimatorError("sgd_momentum keeps no second moment");
  }
  return out;
}

OptimizerState step(const OptimizerState& state, const GradientSample& sample,
                    double ell, const OptimizerConfig& config) {
  if (config.kind == EstimatorKind::SgdMomentum) {
    return sgd_momentum_step(state, sample, config);
  }
  require_same_length(state.dim(), sample.g.size(), "gradient");
  require_finite(sample);
  if (config.kind == EstimatorKind::AdamL) require_ell(ell);

  OptimizerState next = state;
  update_base_stepsize(next, sample, config);

  const double b1 = config.beta1;
  for (std::size_t i = 0; i < next.dim(); ++i) {
    next.m[i] = b1 * state.m[i] + (1.0 - b1) * sample.g[i];
  }
  next.second_moment =
      second_moment_update(state.second_moment, sample.g, next.m, ell, config);
  next.k = state.k + 1;

  const Vector stepsize =
      adaptive_stepsize(next.second_moment, next.k, next.eta, config);
  const double first_correction =
      1.0 - std::pow(b1, static_cast<double>(next.k));
  for (std::size_t i = 0; i < next.dim(); ++i) {
    next.x[i] = state.x[i] - stepsize[i] * next.m[i] / first_correction;
  }
  return next;
}

OptimizerState sgd_momentum_step(const OptimizerState& state,
                                 const GradientSample& sample,
                                 const OptimizerConfig& config) {
  if (config.kind != EstimatorKind::SgdMomentum) {
    throw UnsupportedEstimatorError("sgd_momentum_step called with estimator " +
                                    std::string(to_string(config.kind)));
  }
  require_same_length(state.dim(), sample.g.size(), "gradient");
  require_finite(sample);

  OptimizerState next = state;
  update_base_stepsize(next, sample, config);
  for (std::size_t i = 0; i < next.dim(); ++i) {
    next.momentum_buffer[i] = config.beta1 * state.momentum_buffer[i] + sample.g[i];
    next.x[i] = state.x[i] - next.eta * next.momentum_buffer[i];
  }
  next.k = state.k + 1;
  return next;
}

StepsizeReport effective_stepsize(const OptimizerState& state,
                                  const OptimizerConfig& config) {
  if (state.k == 0) throw StateError("no step has been taken yet");
  StepsizeReport report;
  const std::size_t n = state.dim();
  report.delta.resize(n);
  if (config.kind == EstimatorKind::SgdMomentum) {
    report.stepsize.assign(n, state.eta);
    for (std::size_t i = 0; i < n; ++i) {
      report.delta[i] = std::abs(state.eta * state.momentum_buffer[i]);
    }
    return report;
  }
  report.stepsize = adaptive_stepsize(state.second_moment, state.k, state.eta, config);
  for (std::size_t i = 0; i < n; ++i) {
    report.delta[i] = std::abs(report.stepsize[i] * state.m[i]);
  }
  return report;
}

Vector closed_form_second_moment(const GradientHistory& history,
                                 const OptimizerConfig& config) {
  const std::size_t count = history.size();
  if (count == 0) throw InputError("empty gradient history");
  if (history.first_moments.size() != count || history.ells.size() != count) {
    throw InputError("gradient, first-moment and ell histories differ in length");
  }
  const std::size_t n = history.gradients.front().size();
  for (std::size_t j = 0; j < count; ++j) {
    require_same_length(n, history.gradients[j].size(), "gradient history entry");
    require_same_length(n, history.first_moments[j].size(), "first-moment history entry");
  }
  if (config.kind == EstimatorKind::SgdMomentum) {
    throw UnsupportedEstimatorError("sgd_momentum keeps no second moment");
  }

  const double b2 = config.beta2;
  const double eps = config.epsilon;
  const auto k = static_cast<double>(count - 1);
  Vector adaptive(n, 0.0);
  double nonadaptive = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double decay = std::pow(b2, k - static_cast<double>(j));
    const auto& g = history.gradients[j];
    double weight = 1.0;
    if (config.kind == EstimatorKind::AdamL) {
      require_ell(history.ells[j]);
      weight = 1.0 / (config.gamma * std::pow(history.ells[j], config.phi));
      nonadaptive += decay * history.ells[j];
    } else {
      nonadaptive += std::pow(b2, static_cast<double>(j));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double term = config.kind == EstimatorKind::AdaBelief
                              ? g[i] - history.first_moments[j][i]
                              : g[i];
      adaptive[i] += decay * term * term * weight;
    }
  }

  Vector out(n);
  const double offset = config.kind == EstimatorKind::Adam ? 0.0 : eps * nonadaptive;
  for (std::size_t i = 0; i < n; ++i) out[i] = (1.0 - b2) * adaptive[i] + offset;
  return out;
}

}  // namespace optlab
