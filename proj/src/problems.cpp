#include "optlab/problems.hpp"

#include <algorithm>
#include <cmath>

#include "optlab/error.hpp"

namespace optlab {
namespace {

void require_dim(const Vector& x, std::size_t n, const char* name) {
  if (x.size() != n) {
    throw InputError(std::string(name) + " expects dimension " + std::to_string(n) +
                     ", got " + std::to_string(x.size()));
  }
}

double sup_norm(const Vector& v) {
  double out = 0.0;
  for (double c : v) out = std::max(out, std::abs(c));
  return out;
}

}  // namespace

Vector camel_local_minimizer() {
  const double a = std::sqrt((4.2 + std::sqrt(3.64)) / 2.0);
  return {a, -a / 2.0};
}

Problem three_hump_camel() {
  Problem p;
  p.name = "camel3";
  p.dim = 2;
  p.eval = [](const Vector& x) {
    require_dim(x, 2, "camel3");
    const double a = x[0], b = x[1];
    const double a2 = a * a;
    return 2.0 * a2 - 1.05 * a2 * a2 + a2 * a2 * a2 / 6.0 + a * b + b * b;
  };
  p.grad = [](const Vector& x) {
    require_dim(x, 2, "camel3");
    const double a = x[0], b = x[1];
    const double a2 = a * a;
    return Vector{4.0 * a - 4.2 * a2 * a + a2 * a2 * a + b, a + 2.0 * b};
  };
  p.f_star = 0.0;
  const Vector local = camel_local_minimizer();
  p.minimizers = {{0.0, 0.0}, local, {-local[0], -local[1]}};
  p.box = {{-5.0, -5.0}, {5.0, 5.0}};
  ProblemConstants c;
  c.G = grid_sup_gradient(p);
  c.estimated = true;
  p.constants = c;
  return p;
}

Problem rosenbrock() {
  Problem p;
  p.name = "rosenbrock";
  p.dim = 2;
  p.eval = [](const Vector& x) {
    require_dim(x, 2, "rosenbrock");
    const double u = 1.0 - x[0];
    const double w = x[1] - x[0] * x[0];
    return u * u + 100.0 * w * w;
  };
  p.grad = [](const Vector& x) {
    require_dim(x, 2, "rosenbrock");
    const double w = x[1] - x[0] * x[0];
    return Vector{-2.0 * (1.0 - x[0]) - 400.0 * x[0] * w, 200.0 * w};
  };
  p.f_star = 0.0;
  p.minimizers = {{1.0, 1.0}};
  // regional constants are quoted for [0,2]^2
  p.box = {{0.0, 0.0}, {2.0, 2.0}};
  ProblemConstants c;
  c.mu = 0.2;
  c.L = 2610.0;
  c.G = grid_sup_gradient(p);
  c.estimated = true;
  p.constants = c;
  return p;
}

Problem pl_quadratic(const Vector& spectrum, const Vector& x_star) {
  DomainBox box{x_star, x_star};
  for (std::size_t i = 0; i < x_star.size(); ++i) {
    box.lo[i] -= 1.0;
    box.hi[i] += 1.0;
  }
  return pl_quadratic(spectrum, x_star, std::move(box));
}

Problem pl_quadratic(const Vector& spectrum, const Vector& x_star, DomainBox box) {
  if (spectrum.empty()) throw InputError("pl_quadratic needs a non-empty spectrum");
  const std::size_t n = spectrum.size();
  if (x_star.size() != n) throw InputError("x_star length differs from the spectrum");
  if (box.lo.size() != n || box.hi.size() != n) {
    throw InputError("domain box length differs from the spectrum");
  }
  for (double lam : spectrum) {
    if (!(lam > 0.0) || !std::isfinite(lam)) {
      throw InputError("spectrum entries must be finite and > 0");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(box.lo[i] <= box.hi[i])) throw InputError("domain box has lo > hi");
  }

  Problem p;
  p.name = "pl_quadratic";
  p.dim = n;
  p.eval = [spectrum, x_star](const Vector& x) {
    require_dim(x, spectrum.size(), "pl_quadratic");
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - x_star[i];
      f += spectrum[i] * d * d;
    }
    return 0.5 * f;
  };
  p.grad = [spectrum, x_star](const Vector& x) {
    require_dim(x, spectrum.size(), "pl_quadratic");
    Vector g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = spectrum[i] * (x[i] - x_star[i]);
    return g;
  };
  p.f_star = 0.0;
  p.minimizers = {x_star};

  ProblemConstants c;
  c.mu = *std::min_element(spectrum.begin(), spectrum.end());
  c.L = *std::max_element(spectrum.begin(), spectrum.end());
  c.G = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double reach = std::max(std::abs(box.lo[i] - x_star[i]), std::abs(box.hi[i] - x_star[i]));
    c.G = std::max(c.G, spectrum[i] * reach);
  }
  p.box = std::move(box);
  p.constants = c;
  return p;
}

Problem make_problem(std::string_view name) {
  if (name == "camel3") return three_hump_camel();
  if (name == "rosenbrock") return rosenbrock();
  throw ConfigError("problem.name", "unknown problem '" + std::string(name) + "'");
}

double grid_sup_gradient(const Problem& problem, int points) {
  if (problem.dim != 2) throw InputError("grid estimate of G is only done in 2-D");
  if (points < 2) throw InputError("grid needs at least 2 points per axis");
  const auto& lo = problem.box.lo;
  const auto& hi = problem.box.hi;
  double G = 0.0;
  for (int i = 0; i < points; ++i) {
    const double a = lo[0] + (hi[0] - lo[0]) * i / (points - 1);
    for (int j = 0; j < points; ++j) {
      const double b = lo[1] + (hi[1] - lo[1]) * j / (points - 1);
      G = std::max(G, sup_norm(problem.grad({a, b})));
    }
  }
  return G;
}

Vector finite_diff_gradient(const Problem& problem, const Vector& x, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be > 0");
  Vector g(x.size());
  Vector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = problem.eval(probe);
    probe[i] = x[i] - h;
    const double down = problem.eval(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::ClippedGaussian: return "clipped_gaussian";
    case NoiseKind::UniformBounded: return "uniform_bounded";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  for (auto kind : {NoiseKind::None, NoiseKind::ClippedGaussian, NoiseKind::UniformBounded}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("kind", "unknown noise kind '" + std::string(name) + "'");
}

void NoiseSpec::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma", "must be finite and >= 0");
  if (!(clip_G > 0.0)) throw ConfigError("clip_G", "must be > 0");
}

GradientSample stochastic_gradient(const Problem& problem, const Vector& x,
                                   const NoiseSpec& noise, Rng& rng,
                                   NoiseDiagnostics* diagnostics) {
  GradientSample sample;
  sample.f_value = problem.eval(x);
  sample.g = problem.grad(x);
  const double G = noise.clip_G;
  const bool infeasible = sup_norm(sample.g) > G;
  if (diagnostics) {
    ++diagnostics->draws;
    if (infeasible) ++diagnostics->clip_infeasible;
  }
  if (noise.kind == NoiseKind::None || noise.sigma == 0.0) {
    if (noise.kind != NoiseKind::None && infeasible) {
      for (double& c : sample.g) c = std::clamp(c, -G, G);
    }
    return sample;
  }

  sample.is_stochastic = true;
  const double coord_var = noise.sigma * noise.sigma / static_cast<double>(sample.g.size());
  for (double& c : sample.g) {
    if (std::abs(c) >= G) {
      c = std::clamp(c, -G, G);
      continue;
    }
    const double room = G - std::abs(c);
    double zeta = 0.0;
    if (noise.kind == NoiseKind::UniformBounded) {
      const double half = std::min(std::sqrt(3.0 * coord_var), room);
      zeta = std::uniform_real_distribution<double>(-half, half)(rng);
    } else {
      // symmetric clipping of a symmetric law keeps the mean at zero
      zeta = std::normal_distribution<double>(0.0, std::sqrt(coord_var))(rng);
      zeta = std::clamp(zeta, -room, room);
    }
    c = std::clamp(c + zeta, -G, G);
  }
  return sample;
}

}  // namespace optlab
