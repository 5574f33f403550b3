#include "optlab/harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "optlab/error.hpp"

namespace optlab::harness {
namespace {

class Tally {
 public:
  explicit Tally(std::string name) { p_.name = std::move(name); }
  void check(bool ok, const std::function<std::string()>& detail) {
    if (ok) {
      ++p_.passed;
    } else {
      if (p_.failed == 0) p_.detail = detail();
      ++p_.failed;
    }
  }
  PropertyCount done() { return std::move(p_); }

 private:
  PropertyCount p_;
};

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double norm2(const Vector& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

bool SuiteReport::ok() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyCount& p) { return p.failed == 0; });
}

void print_report(std::ostream& out, const SuiteReport& report) {
  out << "suite " << report.suite << '\n';
  for (const auto& p : report.properties) {
    out << "  " << (p.failed == 0 ? "ok  " : "FAIL") << "  " << p.name << "  passed=" << p.passed
        << " failed=" << p.failed;
    if (p.failed > 0) out << "  first: " << p.detail;
    out << '\n';
  }
  out << (report.ok() ? "suite passed" : "suite FAILED") << '\n';
}

SuiteReport oracle_suite(int seeds, int steps, std::size_t n) {
  SuiteReport report{"oracle", {}};
  for (auto kind : {EstimatorKind::Adam, EstimatorKind::EAdam, EstimatorKind::AdaBelief,
                    EstimatorKind::AdamL}) {
    Tally tally(std::string("recursion = closed form (") + std::string(to_string(kind)) + ")");
    for (int seed = 0; seed < seeds; ++seed) {
      Rng rng(static_cast<std::uint64_t>(seed) * 7919u + static_cast<std::uint64_t>(kind));
      OptimizerConfig config;
      config.kind = kind;
      config.epsilon = 1e-4;
      config.gamma = uniform(rng, 0.5, 2.0);
      config.phi = uniform(rng, 0.5, 3.0);
      OptimizerState state = OptimizerState::initial(Vector(n, 0.0), config);
      GradientHistory history;
      Vector scale(n);
      for (auto& s : scale) s = std::pow(10.0, uniform(rng, -2.0, 1.0));
      std::normal_distribution<double> normal;
      double worst = 0.0;
      for (int k = 0; k < steps; ++k) {
        GradientSample sample;
        sample.g.resize(n);
        for (std::size_t i = 0; i < n; ++i) sample.g[i] = scale[i] * normal(rng);
        const double ell_value = kind == EstimatorKind::AdamL ? uniform(rng, 0.05, 2.0) : 1.0;
        state = step(state, sample, ell_value, config);
        history.append(sample.g, state.m, ell_value);
        const Vector closed = closed_form_second_moment(history, config);
        for (std::size_t i = 0; i < n; ++i) {
          worst = std::max(worst, rel_err(state.second_moment[i], closed[i]));
        }
      }
      tally.check(worst <= 1e-10, [&] {
        return "seed " + std::to_string(seed) + " relative error " + std::to_string(worst);
      });
    }
    report.properties.push_back(tally.done());
  }
  return report;
}

SuiteReport gradcheck_suite(int points) {
  SuiteReport report{"gradcheck", {}};
  std::vector<Problem> problems = {three_hump_camel(), rosenbrock(),
                                   pl_quadratic({1.0, 4.0}, {0.5, -0.25}),
                                   pl_quadratic({0.2, 3.0, 17.0, 2610.0}, {1.0, -1.0, 0.0, 2.0})};
  Rng rng(20240611);
  for (const auto& p : problems) {
    Tally fd("analytic = central difference (" + p.name + ", n=" + std::to_string(p.dim) + ")");
    for (int t = 0; t < points; ++t) {
      Vector x(p.dim);
      for (std::size_t i = 0; i < p.dim; ++i) x[i] = uniform(rng, p.box.lo[i], p.box.hi[i]);
      const Vector g = p.grad(x);
      const Vector h = finite_diff_gradient(p, x, 1e-6);
      Vector diff(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) diff[i] = h[i] - g[i];
      const double rel = norm2(diff) / norm2(g);
      fd.check(rel < 1e-6, [&] { return "relative error " + std::to_string(rel); });
    }
    report.properties.push_back(fd.done());

    Tally stationary("listed minimizers are stationary (" + p.name + ")");
    for (const auto& m : p.minimizers) {
      const Vector g = p.grad(m);
      const double sup = std::abs(*std::max_element(g.begin(), g.end(), [](double a, double b) {
        return std::abs(a) < std::abs(b);
      }));
      stationary.check(sup <= 1e-8, [&] { return "|grad|_inf = " + std::to_string(sup); });
    }
    if (p.f_star) {
      const double gap = std::abs(p.eval(p.minimizers.front()) - *p.f_star);
      stationary.check(gap <= 1e-12, [&] { return "f(global) - f* = " + std::to_string(gap); });
    }
    report.properties.push_back(stationary.done());
  }
  return report;
}

PlInstance make_pl_instance(EstimatorKind kind, Rng& rng) {
  if (kind != EstimatorKind::EAdam && kind != EstimatorKind::AdaBelief &&
      kind != EstimatorKind::AdamL) {
    throw UnsupportedEstimatorError("no PL instance generator for " + std::string(to_string(kind)));
  }
  PlInstance inst;
  const std::size_t n = uniform(rng, 0.0, 1.0) < 0.5 ? 2 : 10;
  const double mu = uniform(rng, 0.1, 1.0);
  const double L = uniform(rng, 1.0, 100.0);
  Vector spectrum = {mu, L};
  while (spectrum.size() < n) spectrum.push_back(uniform(rng, mu, L));
  inst.x_star.resize(n);
  for (auto& c : inst.x_star) c = uniform(rng, -1.0, 1.0);
  inst.problem = pl_quadratic(spectrum, inst.x_star);
  inst.x0.resize(n);
  for (std::size_t i = 0; i < n; ++i) inst.x0[i] = inst.x_star[i] + uniform(rng, -1.0, 1.0);

  const ProblemConstants& pc = *inst.problem.constants;
  const double G = pc.G;
  OptimizerConfig& c = inst.config;
  c.kind = kind;
  c.beta1 = 0.0;
  c.beta2 = 0.999;
  c.epsilon = std::pow(4.0 * G / 50.0, 2.0);
  c.gamma = 1.0;
  c.phi = 1.0;
  const double b2 = c.beta2;

  std::int64_t k_sum = 0;
  std::int64_t k_log = 0;
  if (kind == EstimatorKind::AdaBelief) {
    k_sum = smallest_k_for_sum(4.0 / (3.0 * std::sqrt(1.0 - b2)), b2);
    k_log = smallest_k_above_log(1.0 - 4.0 * std::sqrt(1.0 - b2) / 3.0, b2);
  } else {
    k_sum = smallest_k_for_sum(
        std::max(4.0 * G / std::sqrt(c.gamma * c.epsilon), 2.0 / std::sqrt(1.0 - b2)), b2);
    k_log = smallest_k_above_log(1.0 - 2.0 * std::sqrt(1.0 - b2), b2);
  }
  inst.k0 = std::max(k_sum, k_log);
  const double S = geometric_sum(b2, inst.k0);
  const double eta_L = std::sqrt(c.epsilon * S) / (2.0 * L);
  const double eta_mu = kind == EstimatorKind::AdaBelief
                            ? 4.0 * std::sqrt(b2) * G / (3.0 * mu)
                            : std::sqrt(b2) * G / (std::sqrt(c.gamma) * mu);
  c.eta = std::min(eta_L, eta_mu);

  // ell = (f - (-1)) / (0 - (-1)) = f + 1 >= 1
  inst.scaling.mode = ScalingMode::KnownRange;
  inst.scaling.f_min = -1.0;
  inst.scaling.f_max = 0.0;

  AnalysisConstants& k = inst.constants;
  k.G = G;
  k.L = pc.L;
  k.mu = pc.mu;
  k.n = n;
  k.sigma = 0.0;
  k.f_star = 0.0;
  k.g0 = inst.problem.grad(inst.x0);
  return inst;
}

PlOutcome run_pl_instance(const PlInstance& inst, std::int64_t steps) {
  const bool adaml = inst.config.kind == EstimatorKind::AdamL;
  OptimizerState state = OptimizerState::initial(inst.x0, inst.config);
  std::vector<TrajectoryRecord> records;
  std::vector<double> ells;
  records.push_back({0, inst.problem.eval(state.x), 0, 0, 0, 0, 0, 0, state.x});
  for (std::int64_t k = 0; k < steps; ++k) {
    GradientSample sample{inst.problem.grad(state.x), inst.problem.eval(state.x), false};
    const double e = adaml ? ell(inst.scaling, sample.f_value) : 1.0;
    ells.push_back(e);
    state = step(state, sample, e, inst.config);
    TrajectoryRecord r;
    r.k = state.k;
    r.f = inst.problem.eval(state.x);
    r.x = state.x;
    records.push_back(std::move(r));
  }

  AnalysisConstants constants = inst.constants;
  if (adaml) {
    const auto [lo, hi] = std::minmax_element(ells.begin(), ells.end());
    constants.ell_min = *lo;
    constants.ell_max = *hi;
    constants.ell_k = ells[static_cast<std::size_t>(inst.k0)];
  }

  PlOutcome out;
  const auto mono = check_monotonicity_conditions(inst.config.kind, constants, inst.config, inst.k0);
  const auto rate = check_rate_conditions(inst.config.kind, constants, inst.config, inst.k0);
  out.conditions_pass = mono.passes && rate.passes;
  out.contraction = rate.contraction;
  if (!out.conditions_pass) {
    out.violated = mono.passes ? rate.violated : mono.violated;
    return out;
  }
  out.verification = verify_trajectory(records, constants, inst.config.kind, inst.config, inst.k0);
  return out;
}

SuiteReport propositions_suite(int instances, std::int64_t steps) {
  SuiteReport report{"propositions", {}};

  {
    Tally t("threshold arithmetic at beta2 = 0.999");
    const double b2 = 0.999;
    const std::int64_t k_eadam = smallest_k_for_sum(2.0 / std::sqrt(1.0 - b2), b2);
    const std::int64_t k_belief = smallest_k_for_sum(4.0 / (3.0 * std::sqrt(1.0 - b2)), b2);
    t.check(k_eadam == 65, [&] { return "EAdam sum threshold k = " + std::to_string(k_eadam); });
    t.check(k_belief == 43, [&] { return "AdaBelief sum threshold k = " + std::to_string(k_belief); });
    report.properties.push_back(t.done());
  }

  for (auto kind : {EstimatorKind::EAdam, EstimatorKind::AdaBelief, EstimatorKind::AdamL}) {
    const std::string tag = std::string(to_string(kind));
    Tally applicable("hypotheses hold on generated instances (" + tag + ")");
    Tally contraction("0 < 2 mu C < 1 (" + tag + ")");
    Tally monotone("f non-increasing after k0 (" + tag + ")");
    Tally bound("gap <= linear-rate bound (" + tag + ")");
    Rng rng(1000 + static_cast<std::uint64_t>(kind));
    for (int i = 0; i < instances; ++i) {
      const PlInstance inst = make_pl_instance(kind, rng);
      const PlOutcome out = run_pl_instance(inst, steps);
      applicable.check(out.conditions_pass, [&] { return out.violated; });
      if (!out.conditions_pass) continue;
      contraction.check(out.contraction > 0.0 && out.contraction < 1.0,
                        [&] { return "2 mu C = " + std::to_string(out.contraction); });
      monotone.check(out.verification.monotonicity_violations == 0, [&] {
        return std::to_string(out.verification.monotonicity_violations) + " increases";
      });
      bound.check(out.verification.bound_violations == 0, [&] {
        return std::to_string(out.verification.bound_violations) + " violations, worst margin " +
               std::to_string(out.verification.worst_margin);
      });
    }
    report.properties.push_back(applicable.done());
    report.properties.push_back(contraction.done());
    report.properties.push_back(monotone.done());
    report.properties.push_back(bound.done());
  }
  return report;
}

SuiteReport modes_suite() {
  SuiteReport report{"modes", {}};
  Rng rng(77);
  for (auto kind : {EstimatorKind::EAdam, EstimatorKind::AdaBelief, EstimatorKind::AdamL}) {
    Tally t(std::string("incremental tracker = batch classification (") +
            std::string(to_string(kind)) + ")");
    for (int trial = 0; trial < 20; ++trial) {
      OptimizerConfig config;
      config.kind = kind;
      config.epsilon = std::pow(10.0, uniform(rng, -6.0, -1.0));
      config.phi = uniform(rng, 0.5, 2.0);
      const std::size_t n = 6;
      ModeTracker tracker(config, n);
      GradientHistory history;
      OptimizerState state = OptimizerState::initial(Vector(n, 0.0), config);
      bool same = true;
      double worst = 0.0;
      for (int k = 0; k < 300; ++k) {
        GradientSample s;
        s.g.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          // coordinates span several orders so both modes appear
          s.g[i] = std::pow(10.0, -4.0 + 0.8 * static_cast<double>(i)) * uniform(rng, -1.0, 1.0);
        }
        const double e = kind == EstimatorKind::AdamL ? uniform(rng, 0.1, 1.5) : 1.0;
        state = step(state, s, e, config);
        tracker.push(s.g, state.m, e);
        history.append(s.g, state.m, e);
        if (k % 25 == 24) {
          const ModeReport batch = classify_modes(history, config);
          const ModeReport inc = tracker.report();
          for (std::size_t i = 0; i < n; ++i) {
            worst = std::max({worst, rel_err(batch.adaptive_sum[i], inc.adaptive_sum[i]),
                              rel_err(batch.nonadaptive_sum[i], inc.nonadaptive_sum[i])});
            same = same && batch.modes[i] == inc.modes[i];
          }
        }
      }
      t.check(same && worst <= 1e-10, [&] {
        return "trial " + std::to_string(trial) + " relative sum mismatch " + std::to_string(worst);
      });
    }
    report.properties.push_back(t.done());
  }

  {
    Tally t("zero gradients are non-adaptive (eadam)");
    OptimizerConfig config;
    config.kind = EstimatorKind::EAdam;
    GradientHistory h;
    for (int k = 0; k < 50; ++k) h.append(Vector(3, 0.0), Vector(3, 0.0), 1.0);
    const ModeReport r = classify_modes(h, config);
    for (Mode m : r.modes) t.check(m == Mode::NonAdaptive, [] { return "coordinate not non-adaptive"; });
    report.properties.push_back(t.done());
  }
  {
    Tally t("adabelief with beta1 = 0 is non-adaptive");
    OptimizerConfig config;
    config.kind = EstimatorKind::AdaBelief;
    config.beta1 = 0.0;
    OptimizerState state = OptimizerState::initial(Vector(4, 0.0), config);
    GradientHistory h;
    for (int k = 0; k < 100; ++k) {
      GradientSample s;
      for (int i = 0; i < 4; ++i) s.g.push_back(uniform(rng, -10.0, 10.0));
      state = step(state, s, 1.0, config);
      h.append(s.g, state.m, 1.0);
    }
    const ModeReport r = classify_modes(h, config);
    for (Mode m : r.modes) t.check(m == Mode::NonAdaptive, [] { return "coordinate not non-adaptive"; });
    report.properties.push_back(t.done());
  }
  {
    Tally t("tau = 1 leaves transitional only for ties");
    for (int trial = 0; trial < 200; ++trial) {
      Vector a(5), b(5);
      for (int i = 0; i < 5; ++i) {
        a[i] = std::pow(10.0, uniform(rng, -3.0, 3.0));
        b[i] = std::pow(10.0, uniform(rng, -3.0, 3.0));
      }
      a[0] = b[0];
      const ModeReport r = classify_sums(0, a, b, 1.0);
      for (int i = 0; i < 5; ++i) {
        const bool tie = a[i] == b[i];
        t.check((r.modes[i] == Mode::Transitional) == tie, [] { return "unexpected class"; });
      }
    }
    report.properties.push_back(t.done());
  }
  return report;
}

SuiteReport scaling_suite() {
  SuiteReport report{"scaling", {}};
  Rng rng(4242);
  for (auto mode : {ScalingMode::AutoEpochLstm, ScalingMode::AutoEpochWgan}) {
    const std::string tag = std::string(to_string(mode));
    Tally unity("epoch-0 ell = 1 (" + tag + ")");
    Tally extrema("epoch-0 extrema recovered (" + tag + ")");
    Tally frozen("statistics frozen after epoch 0 (" + tag + ")");
    Tally range("epoch-1 ell in (0,1] for in-range values (" + tag + ")");
    for (int trial = 0; trial < 20; ++trial) {
      ScalingState s;
      s.mode = mode;
      s.iters_per_epoch = 100;
      double lo = 1e300, hi = -1e300;
      for (int j = 0; j < 100; ++j) {
        const double f = uniform(rng, 2.0, 9.0);
        lo = std::min(lo, f);
        hi = std::max(hi, f);
        unity.check(ell(s, f) == 1.0, [] { return "epoch-0 ell != 1"; });
        s = observe(s, f);
      }
      extrema.check(s.f_min == lo && s.f_max == hi && s.epoch_index == 1,
                    [&] { return "f_min/f_max mismatch"; });
      for (int j = 0; j < 100; ++j) {
        const double f = uniform(rng, lo, hi);
        const double e = ell(s, f);
        if (mode == ScalingMode::AutoEpochLstm) {
          range.check(e > 0.0 && e <= 1.0, [&] { return "ell = " + std::to_string(e); });
        }
        s = observe(s, uniform(rng, 0.0, 20.0));
      }
      frozen.check(s.f_min == lo && s.f_max == hi, [] { return "statistics moved"; });
    }
    report.properties.push_back(unity.done());
    report.properties.push_back(extrema.done());
    report.properties.push_back(frozen.done());
    if (mode == ScalingMode::AutoEpochLstm) report.properties.push_back(range.done());
  }
  {
    Tally t("ell strictly increasing in f");
    ScalingState states[4];
    states[0].mode = ScalingMode::Identity;
    states[1].mode = ScalingMode::KnownRange;
    states[1].f_min = 0.0;
    states[1].f_max = 6.0;
    states[2].mode = ScalingMode::AutoEpochLstm;
    states[2].epoch_index = 1;
    states[2].f_min = 2.0;
    states[2].f_max = 9.0;
    states[3] = states[2];
    states[3].mode = ScalingMode::AutoEpochWgan;
    for (const auto& s : states) {
      for (int trial = 0; trial < 200; ++trial) {
        const double a = uniform(rng, 2.5, 20.0);
        const double b = a + uniform(rng, 1e-6, 5.0);
        t.check(ell(s, a) < ell(s, b), [&] { return std::string(to_string(s.mode)); });
      }
    }
    report.properties.push_back(t.done());
  }
  {
    Tally t("phi from training error");
    t.check(phi_from_train_error(1.0) == 4.0, [] { return "phi(1) != 4"; });
    t.check(phi_from_train_error(0.1) == 4.0, [] { return "phi(0.1) != 4"; });
    t.check(std::abs(phi_from_train_error(10.0) - 5.0) < 1e-15, [] { return "phi(10) != 5"; });
    report.properties.push_back(t.done());
  }
  return report;
}

SuiteReport run_suite(std::string_view name) {
  if (name == "oracle") return oracle_suite();
  if (name == "gradcheck") return gradcheck_suite();
  if (name == "propositions") return propositions_suite();
  if (name == "modes") return modes_suite();
  if (name == "scaling") return scaling_suite();
  throw InputError("unknown suite '" + std::string(name) +
                   "' (expected oracle, gradcheck, propositions, modes or scaling)");
}

}  // namespace optlab::harness
