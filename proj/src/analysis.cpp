#include "optlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "optlab/error.hpp"

namespace optlab {
namespace {

bool adaptive_split_supported(EstimatorKind kind) {
  return kind == EstimatorKind::EAdam || kind == EstimatorKind::AdaBelief ||
         kind == EstimatorKind::AdamL;
}

void require_mode_estimator(EstimatorKind kind) {
  if (!adaptive_split_supported(kind)) {
    throw UnsupportedEstimatorError("no adaptive / non-adaptive split for estimator " +
                                    std::string(to_string(kind)));
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Collects inequalities of one case; the first failure is kept.
class Conditions {
 public:
  void require(bool ok, const std::string& text) {
    if (!ok && first_.empty()) first_ = text;
  }
  bool ok() const { return first_.empty(); }
  const std::string& first() const { return first_; }

 private:
  std::string first_;
};

// Shared assumptions: beta1 = 0 and a first gradient without zero entries.
void common_assumptions(Conditions& c, const AnalysisConstants& k, const OptimizerConfig& config) {
  c.require(config.beta1 == 0.0, "beta1 = 0 (got " + fmt(config.beta1) + ")");
  c.require(std::isfinite(k.G) && k.G > 0.0, "G > 0 known");
  c.require(std::isfinite(k.L) && k.L > 0.0, "L > 0 known");
  const bool nonzero = std::none_of(k.g0.begin(), k.g0.end(), [](double g) { return g == 0.0; });
  c.require(nonzero, "g0_i != 0 for all i");
}

double vmin_at(const AnalysisConstants& k, double beta2, std::int64_t step) {
  if (std::isfinite(k.v_min)) return k.v_min;
  if (k.g0.empty()) return std::numeric_limits<double>::quiet_NaN();
  return v_min(k.g0, beta2, step);
}

void join_violation(std::string& out, std::string_view label, const std::string& what) {
  if (!out.empty()) out += "; ";
  out += std::string(label) + ": " + what;
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Adaptive: return "adaptive";
    case Mode::NonAdaptive: return "non_adaptive";
    case Mode::Transitional: return "transitional";
  }
  return "unknown";
}

std::string_view to_string(PropCase c) {
  switch (c) {
    case PropCase::None: return "none";
    case PropCase::I: return "i";
    case PropCase::II: return "ii";
  }
  return "unknown";
}

ModeReport classify_sums(std::int64_t k, Vector adaptive_sum, Vector nonadaptive_sum,
                         double tau) {
  if (!(tau >= 1.0)) throw DomainError("mode ratio threshold must be >= 1");
  if (adaptive_sum.size() != nonadaptive_sum.size()) {
    throw InputError("adaptive and non-adaptive sums differ in length");
  }
  ModeReport report;
  report.k = k;
  report.modes.resize(adaptive_sum.size());
  std::size_t adaptive = 0;
  for (std::size_t i = 0; i < adaptive_sum.size(); ++i) {
    const double a = adaptive_sum[i];
    const double b = nonadaptive_sum[i];
    if (a > tau * b) {
      report.modes[i] = Mode::Adaptive;
      ++adaptive;
    } else if (a * tau < b) {
      report.modes[i] = Mode::NonAdaptive;
    } else {
      report.modes[i] = Mode::Transitional;
    }
  }
  report.adaptive_fraction =
      report.modes.empty() ? 0.0 : static_cast<double>(adaptive) / report.modes.size();
  report.adaptive_sum = std::move(adaptive_sum);
  report.nonadaptive_sum = std::move(nonadaptive_sum);
  return report;
}

ModeReport classify_modes(const GradientHistory& history, const OptimizerConfig& config,
                          double tau) {
  require_mode_estimator(config.kind);
  const std::size_t count = history.size();
  if (count == 0) throw InputError("empty gradient history");
  if (history.first_moments.size() != count || history.ells.size() != count) {
    throw InputError("gradient, first-moment and ell histories differ in length");
  }
  const std::size_t n = history.gradients.front().size();
  const double b2 = config.beta2;
  const auto k = static_cast<double>(count - 1);

  Vector adaptive(n, 0.0);
  double nonadaptive = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    if (history.gradients[j].size() != n || history.first_moments[j].size() != n) {
      throw InputError("history entry " + std::to_string(j) + " has the wrong length");
    }
    const double decay = std::pow(b2, k - static_cast<double>(j));
    double weight = 1.0;
    if (config.kind == EstimatorKind::AdamL) {
      const double ell = history.ells[j];
      if (!(ell > 0.0)) throw DomainError("ell must be > 0");
      weight = 1.0 / (config.gamma * std::pow(ell, config.phi));
      nonadaptive += decay * ell;
    } else {
      nonadaptive += std::pow(b2, static_cast<double>(j));
    }
    for (std::size_t i = 0; i < n; ++i) {
      double t = history.gradients[j][i];
      if (config.kind == EstimatorKind::AdaBelief) t -= history.first_moments[j][i];
      adaptive[i] += decay * t * t * weight;
    }
  }
  for (double& a : adaptive) a *= 1.0 - b2;
  return classify_sums(static_cast<std::int64_t>(count) - 1, std::move(adaptive),
                       Vector(n, config.epsilon * nonadaptive), tau);
}

ModeTracker::ModeTracker(const OptimizerConfig& config, std::size_t n, double tau)
    : config_(config), tau_(tau), adaptive_(n, 0.0) {
  require_mode_estimator(config.kind);
  if (!(tau >= 1.0)) throw DomainError("mode ratio threshold must be >= 1");
}

void ModeTracker::push(std::span<const double> g, std::span<const double> m_new, double ell) {
  if (g.size() != adaptive_.size() || m_new.size() != adaptive_.size()) {
    throw InputError("mode tracker input has the wrong length");
  }
  const double b2 = config_.beta2;
  double weight = 1.0;
  double added = 1.0;
  if (config_.kind == EstimatorKind::AdamL) {
    if (!(ell > 0.0)) throw DomainError("ell must be > 0");
    weight = 1.0 / (config_.gamma * std::pow(ell, config_.phi));
    added = ell;
  }
  for (std::size_t i = 0; i < adaptive_.size(); ++i) {
    double t = g[i];
    if (config_.kind == EstimatorKind::AdaBelief) t -= m_new[i];
    adaptive_[i] = b2 * adaptive_[i] + (1.0 - b2) * t * t * weight;
  }
  nonadaptive_ = b2 * nonadaptive_ + added;
  ++steps_;
}

ModeReport ModeTracker::report() const {
  if (steps_ == 0) throw StateError("mode tracker has no steps");
  return classify_sums(steps_ - 1, adaptive_,
                       Vector(adaptive_.size(), config_.epsilon * nonadaptive_), tau_);
}

double v_min(std::span<const double> g0, double beta2, std::int64_t k) {
  if (k < 1) throw DomainError("v_min needs k >= 1");
  if (g0.empty()) throw InputError("v_min needs a non-empty g0");
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g0.size(); ++i) {
    if (g0[i] == 0.0) {
      throw DomainError("v_min requires every g0 coordinate nonzero (g0[" +
                        std::to_string(i) + "] = 0)");
    }
    smallest = std::min(smallest, g0[i] * g0[i]);
  }
  return (1.0 - beta2) * std::pow(beta2, static_cast<double>(k - 1)) * smallest;
}

double geometric_sum(double beta2, std::int64_t k) {
  if (k < 0) return 0.0;
  return -std::expm1(static_cast<double>(k + 1) * std::log(beta2)) / (1.0 - beta2);
}

std::int64_t smallest_k_for_sum(double threshold, double beta2) {
  if (threshold <= 1.0) return 0;
  if (threshold * (1.0 - beta2) >= 1.0) return -1;
  const double estimate = std::log1p(-threshold * (1.0 - beta2)) / std::log(beta2) - 1.0;
  auto k = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(estimate)));
  while (k > 0 && geometric_sum(beta2, k - 1) >= threshold) --k;
  while (geometric_sum(beta2, k) < threshold) ++k;
  return k;
}

std::int64_t smallest_k_above_log(double arg, double beta2) {
  if (!(arg > 0.0) || !(arg < 1.0)) {
    throw DomainError("log threshold argument must lie in (0,1), got " + fmt(arg));
  }
  const double t = std::log(arg) / std::log(beta2);
  return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(t)) + 1);
}

MonotonicityReport check_monotonicity_conditions(EstimatorKind estimator,
                                                 const AnalysisConstants& constants,
                                                 const OptimizerConfig& config,
                                                 std::int64_t k) {
  require_mode_estimator(estimator);
  if (k < 1) throw DomainError("monotonicity conditions need k >= 1");
  const double b2 = config.beta2;
  const double eps = config.epsilon;
  const double eta = config.eta;
  const double G = constants.G;
  const double L = constants.L;
  const double n = static_cast<double>(constants.n);
  const double S = geometric_sum(b2, k);
  const double S_prev = geometric_sum(b2, k - 1);
  const double root_ratio = std::sqrt((1.0 - b2) / b2);

  MonotonicityReport report;
  Conditions common;
  common_assumptions(common, constants, config);
  if (!common.ok()) {
    report.violated = common.first();
    return report;
  }

  // case (i) is tried first; both share the structure sum >= threshold, eta <= bound
  std::string violated;
  if (estimator == EstimatorKind::AdaBelief) {
    Conditions c;
    const double threshold = 4.0 / (3.0 * std::sqrt(1.0 - b2));
    const double eta_bound = std::sqrt(eps * S) / (2.0 * L);
    c.require(S >= threshold, "sum beta2^j >= 4/(3 sqrt(1-beta2)) = " + fmt(threshold));
    c.require(eta <= eta_bound, "eta <= sqrt(eps S)/(2L) = " + fmt(eta_bound));
    report.eta_bound = eta_bound;
    report.k_threshold = smallest_k_for_sum(threshold, b2);
    if (c.ok()) {
      report.which = PropCase::I;
      report.passes = true;
      report.C1 = std::sqrt(n) * eta * G / (std::sqrt(b2) * S_prev);
      report.C2 = L * eta * eta / (2.0 * eps * S_prev);
    } else {
      report.violated = c.first();
    }
    return report;
  }

  const bool adaml = estimator == EstimatorKind::AdamL;
  const double gamma = adaml ? config.gamma : 1.0;

  {
    Conditions c;
    if (adaml) c.require(constants.ell_min >= 1.0, "ell_min >= 1");
    const double threshold = std::max(4.0 * G / std::sqrt(gamma * eps), 2.0 / std::sqrt(1.0 - b2));
    const double eta_bound = std::sqrt(eps * S) / (2.0 * L);
    c.require(S >= threshold, "sum beta2^j >= " + fmt(threshold));
    c.require(eta <= eta_bound, "eta <= sqrt(eps S)/(2L) = " + fmt(eta_bound));
    if (c.ok()) {
      report.which = PropCase::I;
      report.passes = true;
      report.eta_bound = eta_bound;
      report.k_threshold = smallest_k_for_sum(threshold, b2);
      report.C1 = std::sqrt(n / (b2 * eps)) * eta * G / S_prev;
      const double G_term = adaml ? G / std::sqrt(gamma) : G;
      report.C2 = eta / (eps * S_prev) * (0.5 * L * eta + G_term * root_ratio);
      return report;
    }
    join_violation(violated, "case (i)", c.first());
  }

  {
    Conditions c;
    const double v = vmin_at(constants, b2, k);
    const double ell_k = adaml ? constants.ell_k : 1.0;
    const double floor_term = eps * gamma * ell_k;  // eps for EAdam
    if (adaml) {
      c.require(constants.ell_max < 1.0, "ell_max < 1");
      c.require(std::isfinite(ell_k) && ell_k > 0.0, "ell^(k) known and > 0");
    }
    c.require(std::isfinite(v), "v_min available");
    c.require(v > 4.0 * floor_term, "v_min > " + fmt(4.0 * floor_term));
    const double threshold =
        std::max(4.0 * G / std::sqrt(v), 4.0 * floor_term / ((1.0 - b2) * v));
    const double eta_bound = std::sqrt(v) / (2.0 * L * std::sqrt(gamma));
    c.require(S >= threshold, "sum beta2^j >= " + fmt(threshold));
    c.require(eta <= eta_bound, "eta <= " + fmt(eta_bound));
    if (c.ok()) {
      report.which = PropCase::II;
      report.passes = true;
      report.eta_bound = eta_bound;
      report.k_threshold = smallest_k_for_sum(threshold, b2);
      if (adaml) {
        report.C1 = std::sqrt(n * eps * gamma * ell_k / b2) * eta * G / v;
        report.C2 = eta / v * (0.5 * L * eta * gamma + G * root_ratio);
      } else {
        report.C1 = std::sqrt(n * eps / b2) * eta * G / v;
        report.C2 = eta / v * (0.5 * L * eta + G * root_ratio);
      }
      return report;
    }
    join_violation(violated, "case (ii)", c.first());
  }
  report.violated = violated;
  return report;
}

RateReport check_rate_conditions(EstimatorKind estimator, const AnalysisConstants& constants,
                                 const OptimizerConfig& config, std::int64_t k0) {
  require_mode_estimator(estimator);
  if (k0 < 1) throw DomainError("rate conditions need k0 >= 1");
  const double b2 = config.beta2;
  const double eps = config.epsilon;
  const double eta = config.eta;
  const double G = constants.G;
  const double L = constants.L;
  const double mu = constants.mu;
  const double n = static_cast<double>(constants.n);
  const double S = geometric_sum(b2, k0);
  const double S_prev = geometric_sum(b2, k0 - 1);
  const double tail = -std::expm1(static_cast<double>(k0 + 1) * std::log(b2));  // 1 - beta2^(k0+1)
  const double root_ratio = std::sqrt((1.0 - b2) / b2);
  const double eps_scale = std::sqrt(eps / (1.0 - b2));

  RateReport report;
  Conditions common;
  common_assumptions(common, constants, config);
  common.require(std::isfinite(mu) && mu > 0.0, "mu > 0 known");
  if (!common.ok()) {
    report.violated = common.first();
    return report;
  }

  auto finish = [&](RateReport& r) {
    r.passes = true;
    r.contraction = 2.0 * mu * r.C;
  };

  if (estimator == EstimatorKind::AdaBelief) {
    Conditions c;
    const double threshold = 4.0 / (3.0 * std::sqrt(1.0 - b2));
    const double log_arg = 1.0 - 4.0 * std::sqrt(1.0 - b2) / 3.0;
    const double eta_bound = std::min(std::sqrt(eps * S) / (2.0 * L), 4.0 * std::sqrt(b2) * G / (3.0 * mu));
    report.eta_bound = eta_bound;
    c.require(S >= threshold, "sum beta2^j >= 4/(3 sqrt(1-beta2)) = " + fmt(threshold));
    c.require(eta <= std::sqrt(eps * S) / (2.0 * L), "eta <= sqrt(eps S)/(2L)");
    c.require(eta <= 4.0 * std::sqrt(b2) * G / (3.0 * mu), "eta <= 4 sqrt(beta2) G/(3 mu)");
    c.require(log_arg > 0.0, "1 - 4 sqrt(1-beta2)/3 > 0");
    if (log_arg > 0.0) {
      report.k0_min = std::max(smallest_k_above_log(log_arg, b2), smallest_k_for_sum(threshold, b2));
      c.require(k0 >= smallest_k_above_log(log_arg, b2),
                "k0 > log_beta2(1 - 4 sqrt(1-beta2)/3)");
    }
    if (c.ok()) {
      report.which = PropCase::I;
      report.C = eta * (0.75 - 1.0 / (std::sqrt(1.0 - b2) * S)) /
                 (std::sqrt(b2) * (2.0 * G + eps_scale));
      report.C1 = std::sqrt(n) * eta * G / (std::sqrt(b2) * S_prev);
      report.C2 = L * eta * eta / (2.0 * eps * S_prev);
      finish(report);
    } else {
      report.violated = c.first();
    }
    return report;
  }

  const bool adaml = estimator == EstimatorKind::AdamL;
  const double gamma = adaml ? config.gamma : 1.0;
  std::string violated;

  {
    Conditions c;
    if (adaml) {
      c.require(constants.ell_min >= 1.0, "ell_min >= 1");
      c.require(std::isfinite(constants.ell_max), "ell_max known");
    }
    const double threshold = 4.0 * G / std::sqrt(gamma * eps);
    const double eta_mu = std::sqrt(b2) * G / (std::sqrt(gamma) * mu);
    const double eta_L = std::sqrt(eps * S) / (2.0 * L);
    const double log_arg = 1.0 - 2.0 * std::sqrt(1.0 - b2);
    c.require(S >= threshold, "sum beta2^j >= " + fmt(threshold));
    c.require(eta <= eta_L, "eta <= sqrt(eps S)/(2L) = " + fmt(eta_L));
    c.require(eta <= eta_mu, "eta <= sqrt(beta2) G/mu = " + fmt(eta_mu));
    c.require(log_arg > 0.0, "1 - 2 sqrt(1-beta2) > 0");
    std::int64_t k_log = -1;
    if (log_arg > 0.0) {
      k_log = smallest_k_above_log(log_arg, b2);
      c.require(k0 >= k_log, "k0 > log_beta2(1 - 2 sqrt(1-beta2))");
    }
    if (c.ok()) {
      report.which = PropCase::I;
      report.eta_bound = std::min(eta_mu, eta_L);
      report.k0_min = std::max(k_log, smallest_k_for_sum(threshold, b2));
      const double head = 0.5 - 1.0 / std::sqrt(tail * S);
      report.C1 = std::sqrt(n / (b2 * eps)) * eta * G / S_prev;
      if (adaml) {
        report.C = head * eta /
                   (std::sqrt(b2) * (G / std::sqrt(gamma) +
                                     std::sqrt(eps * constants.ell_max / (1.0 - b2))));
        report.C2 = eta / (eps * S_prev) * (0.5 * L * eta + G / std::sqrt(gamma) * root_ratio);
      } else {
        report.C = head * eta / (std::sqrt(b2) * (G + eps_scale));
        report.C2 = eta / (eps * S_prev) * (0.5 * L * eta + G * root_ratio);
      }
      finish(report);
      return report;
    }
    join_violation(violated, "case (i)", c.first());
  }

  {
    Conditions c;
    const double v = vmin_at(constants, b2, k0);
    const double ell_k = adaml ? constants.ell_k : 1.0;
    const double floor_term = eps * gamma * ell_k;
    if (adaml) {
      c.require(constants.ell_max < 1.0, "ell_max < 1");
      c.require(std::isfinite(ell_k) && ell_k > 0.0, "ell^(k) known and > 0");
      c.require(std::isfinite(constants.ell_min) && constants.ell_min > 0.0, "ell_min known and > 0");
    }
    c.require(std::isfinite(v), "v_min available");
    c.require(v > 4.0 * floor_term, "v_min > " + fmt(4.0 * floor_term));
    const double threshold = 4.0 * G / std::sqrt(v);
    const double eta_L = std::sqrt(v) / (2.0 * L * std::sqrt(gamma));
    const double ell_phi = adaml ? gamma * std::pow(constants.ell_min, config.phi) : 1.0;
    // AdamL: G sits inside the square root here but outside it in C_L
    const double eta_mu = adaml ? std::sqrt(b2) * std::sqrt(G / ell_phi) / mu
                                : std::sqrt(b2) * G / mu;
    const double log_arg = 1.0 - 4.0 * floor_term / v;
    c.require(S >= threshold, "sum beta2^j >= 4G/sqrt(v_min) = " + fmt(threshold));
    c.require(eta <= eta_L, "eta <= " + fmt(eta_L));
    const bool eta_mu_ok = eta <= eta_mu;
    c.require(eta_mu_ok, "eta <= " + fmt(eta_mu) + " (mu bound)");
    std::int64_t k_log = -1;
    if (log_arg > 0.0 && log_arg < 1.0) {
      k_log = smallest_k_above_log(log_arg, b2);
      c.require(k0 >= k_log, "k0 > log_beta2(1 - 4 eps gamma ell/v_min)");
    } else {
      c.require(false, "1 - 4 eps gamma ell/v_min in (0,1)");
    }
    if (!adaml && !eta_mu_ok && std::isfinite(v)) {
      const double proof_bound = std::sqrt(b2) * (G + eps / (1.0 - b2)) / eta;
      if (mu <= proof_bound) {
        report.notes.push_back(
            "case (ii): eta <= sqrt(beta2) G/mu fails but mu <= sqrt(beta2)(G + eps/(1-beta2))/eta holds");
      }
    }
    if (c.ok()) {
      report.which = PropCase::II;
      report.eta_bound = std::min(eta_L, eta_mu);
      report.k0_min = std::max(k_log, smallest_k_for_sum(threshold, b2));
      if (adaml) {
        const double head = 0.5 - std::sqrt(floor_term / (v * tail));
        report.C = head * eta / (std::sqrt(b2) * (G / std::sqrt(ell_phi) + eps_scale));
        report.C1 = std::sqrt(n * eps * gamma * ell_k / b2) * eta * G / v;
        report.C2 = eta / v * (0.5 * L * eta * gamma + G * root_ratio);
      } else {
        const double head = 0.5 - std::sqrt(eps / (v * tail));
        report.C = head * eta / (std::sqrt(b2) * (G + eps_scale));
        report.C1 = std::sqrt(n * eps / b2) * eta * G / v;
        report.C2 = eta / v * (0.5 * L * eta + G * root_ratio);
      }
      finish(report);
      return report;
    }
    join_violation(violated, "case (ii)", c.first());
  }
  report.violated = violated;
  return report;
}

double rate_bound(EstimatorKind estimator, const AnalysisConstants& constants,
                  const OptimizerConfig& config, std::int64_t k0, std::int64_t k,
                  double f_gap_at_k0) {
  if (k < k0) throw DomainError("rate bound needs k >= k0");
  const RateReport r = check_rate_conditions(estimator, constants, config, k0);
  if (!r.passes) throw BoundNotApplicableError(r.violated);
  if (!(r.contraction > 0.0 && r.contraction < 1.0)) {
    throw std::logic_error("contraction 2 mu C = " + fmt(r.contraction) + " outside (0,1)");
  }
  const double decay = std::pow(1.0 - r.contraction, static_cast<double>(k - k0));
  const double two_mu_c = r.contraction;
  return decay * f_gap_at_k0 + r.C1 / two_mu_c * constants.sigma +
         r.C2 / two_mu_c * constants.sigma * constants.sigma;
}

std::int64_t warmup_index(EstimatorKind estimator, const AnalysisConstants& constants,
                          const OptimizerConfig& config, std::int64_t k_limit) {
  for (std::int64_t k = 1; k <= k_limit; ++k) {
    if (check_monotonicity_conditions(estimator, constants, config, k).passes &&
        check_rate_conditions(estimator, constants, config, k).passes) {
      return k;
    }
  }
  return -1;
}

VerificationReport verify_trajectory(const std::vector<TrajectoryRecord>& records,
                                     const AnalysisConstants& constants,
                                     EstimatorKind estimator, const OptimizerConfig& config,
                                     std::int64_t k0) {
  const MonotonicityReport mono = check_monotonicity_conditions(estimator, constants, config, k0);
  if (!mono.passes) throw BoundNotApplicableError(mono.violated);
  const RateReport rate = check_rate_conditions(estimator, constants, config, k0);
  if (!rate.passes) throw BoundNotApplicableError(rate.violated);

  const auto at_k0 = std::find_if(records.begin(), records.end(),
                                  [k0](const TrajectoryRecord& r) { return r.k == k0; });
  if (at_k0 == records.end()) {
    throw InputError("no trajectory record at k0 = " + std::to_string(k0));
  }
  const double gap0 = at_k0->f - constants.f_star;
  const double sigma = constants.sigma;

  VerificationReport report;
  report.contraction = rate.contraction;
  const TrajectoryRecord* prev = nullptr;
  for (const auto& rec : records) {
    if (rec.k < k0) continue;
    ++report.checked;
    if (prev != nullptr && rec.k > k0) {
      const auto m = check_monotonicity_conditions(estimator, constants, config, rec.k);
      if (m.passes) {
        const double slack = static_cast<double>(rec.k - prev->k) *
                             (m.C1 * sigma + m.C2 * sigma * sigma);
        if (rec.f > prev->f + slack) {
          report.monotone_after_k0 = false;
          ++report.monotonicity_violations;
        }
      }
    }
    const double bound = rate_bound(estimator, constants, config, k0, rec.k, gap0);
    const double margin = bound - (rec.f - constants.f_star);
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < 0.0) ++report.bound_violations;
    prev = &rec;
  }
  return report;
}

}  // namespace optlab
