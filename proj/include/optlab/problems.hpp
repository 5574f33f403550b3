#pragma once

// Benchmark objectives and a bounded, unbiased stochastic gradient oracle.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "optlab/optim.hpp"

namespace optlab {

struct DomainBox {
  Vector lo;
  Vector hi;
};

// mu / L are NaN when unknown. `estimated` marks regional or grid values.
struct ProblemConstants {
  double mu = std::numeric_limits<double>::quiet_NaN();
  double L = std::numeric_limits<double>::quiet_NaN();
  double G = std::numeric_limits<double>::quiet_NaN();
  bool estimated = false;
};

struct Problem {
  std::string name;
  std::size_t dim = 0;
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> grad;
  std::optional<double> f_star;
  std::vector<Vector> minimizers;  // global minimizer first
  DomainBox box;
  std::optional<ProblemConstants> constants;
};

Problem three_hump_camel();
Problem rosenbrock();
/// f(x) = 1/2 sum lambda_i (x_i - x*_i)^2. Without a box the domain is
/// x* +- 1 in every coordinate.
Problem pl_quadratic(const Vector& spectrum, const Vector& x_star);
Problem pl_quadratic(const Vector& spectrum, const Vector& x_star, DomainBox box);

/// Looks up "camel3", "rosenbrock"; pl_quadratic needs parameters and is
/// built by the harness.
Problem make_problem(std::string_view name);

/// Max over a points x points grid of ||grad f||_inf (2-D problems only).
double grid_sup_gradient(const Problem& problem, int points = 101);

Vector finite_diff_gradient(const Problem& problem, const Vector& x, double h);

// The local minima of camel3 at +-(a, -a/2), a^2 = (4.2 + sqrt(3.64)) / 2.
Vector camel_local_minimizer();

enum class NoiseKind { None, ClippedGaussian, UniformBounded };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::None;
  double sigma = 0.0;   // total variance bound is sigma^2, sigma^2/n per coordinate
  double clip_G = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;

  void validate() const;
};

struct NoiseDiagnostics {
  std::int64_t draws = 0;
  std::int64_t clip_infeasible = 0;  // draws where |grad_i| > G for some i
};

using Rng = std::mt19937_64;

/// grad f(x) + zeta with E[zeta] = 0, Var(zeta_i) <= sigma^2/n and
/// ||g||_inf <= G. The noise support shrinks symmetrically near the bound.
GradientSample stochastic_gradient(const Problem& problem, const Vector& x,
                                   const NoiseSpec& noise, Rng& rng,
                                   NoiseDiagnostics* diagnostics = nullptr);

}  // namespace optlab
