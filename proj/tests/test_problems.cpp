#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "optlab/error.hpp"
#include "optlab/problems.hpp"

using namespace optlab;

namespace {

double sup_norm(const Vector& v) {
  double out = 0.0;
  for (double c : v) out = std::max(out, std::abs(c));
  return out;
}

double norm2sq(const Vector& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return s;
}

std::vector<Problem> all_problems() {
  return {three_hump_camel(), rosenbrock(), pl_quadratic({1.0, 4.0}, {0.5, -1.0}),
          pl_quadratic({0.3, 2.0, 7.5, 40.0}, {1.0, 2.0, 3.0, 4.0})};
}

Vector random_point(const Problem& p, std::mt19937_64& rng) {
  Vector x(p.dim);
  for (std::size_t i = 0; i < p.dim; ++i) {
    x[i] = std::uniform_real_distribution<double>(p.box.lo[i], p.box.hi[i])(rng);
  }
  return x;
}

}  // namespace

TEST(Camel, Values) {
  const auto p = three_hump_camel();
  EXPECT_EQ(p.eval({0.0, 0.0}), 0.0);
  EXPECT_EQ(p.grad({0.0, 0.0}), (Vector{0.0, 0.0}));
  EXPECT_DOUBLE_EQ(p.eval({0.0, -4.0}), 16.0);
  EXPECT_EQ(p.grad({0.0, -4.0}), (Vector{-4.0, -8.0}));
  EXPECT_NEAR(p.eval({1.0, 1.0}), 2.0 - 1.05 + 1.0 / 6.0 + 1.0 + 1.0, 1e-14);
  EXPECT_NEAR(p.eval(camel_local_minimizer()), 0.29864, 1e-5);
  EXPECT_TRUE(p.constants->estimated);
  EXPECT_GT(p.constants->G, 0.0);
}

TEST(Rosenbrock, Values) {
  const auto p = rosenbrock();
  EXPECT_EQ(p.eval({1.0, 1.0}), 0.0);
  EXPECT_EQ(p.grad({1.0, 1.0}), (Vector{0.0, 0.0}));
  EXPECT_EQ(p.eval({-4.0, -4.0}), 40025.0);
  EXPECT_EQ(p.grad({0.0, 0.0}), (Vector{-2.0, 0.0}));
  EXPECT_EQ(p.constants->mu, 0.2);
  EXPECT_EQ(p.constants->L, 2610.0);
}

TEST(PlQuadratic, Values) {
  const auto p = pl_quadratic({1.0}, {0.0});
  EXPECT_EQ(p.eval({2.0}), 2.0);
  EXPECT_EQ(p.grad({2.0}), (Vector{2.0}));
  // PL with equality at mu = 1
  EXPECT_EQ(norm2sq(p.grad({2.0})), 2.0 * p.constants->mu * p.eval({2.0}));

  const auto r = pl_quadratic({0.2, 2610.0}, {1.0, 1.0});
  EXPECT_EQ(r.constants->mu, 0.2);
  EXPECT_EQ(r.constants->L, 2610.0);

  const auto q = pl_quadratic({1.0, 4.0}, {0.0, 0.0});
  EXPECT_EQ(norm2sq(q.grad({1.0, 1.0})), 17.0);
  EXPECT_EQ(q.eval({1.0, 1.0}), 2.5);
  EXPECT_GE(17.0, 2.0 * q.constants->mu * 2.5);
}

TEST(PlQuadratic, GradientBoundFromBox) {
  const auto p = pl_quadratic({1.0}, {0.0}, DomainBox{{-2.0}, {2.0}});
  EXPECT_EQ(p.constants->G, 2.0);
  const auto q = pl_quadratic({3.0, 0.5}, {1.0, 1.0});
  EXPECT_EQ(q.constants->G, 3.0);
  EXPECT_THROW(pl_quadratic({1.0, -1.0}, {0.0, 0.0}), InputError);
  EXPECT_THROW(pl_quadratic({1.0}, {0.0, 0.0}), InputError);
}

TEST(Problems, Lookup) {
  EXPECT_EQ(make_problem("camel3").name, "camel3");
  EXPECT_EQ(make_problem("rosenbrock").name, "rosenbrock");
  EXPECT_THROW(make_problem("ackley"), ConfigError);
  EXPECT_THROW(three_hump_camel().eval({1.0}), InputError);
}

TEST(FiniteDiff, Examples) {
  const auto c = three_hump_camel();
  const Vector fd = finite_diff_gradient(c, {0.0, -4.0}, 1e-6);
  EXPECT_LE(std::abs(fd[0] + 4.0), 4e-6);
  EXPECT_LE(std::abs(fd[1] + 8.0), 8e-6);

  const auto q = pl_quadratic({2.0}, {0.0}, DomainBox{{-5.0}, {5.0}});  // f = x^2
  for (double h : {1e-6, 0.1, 0.5, 2.0}) {
    EXPECT_NEAR(finite_diff_gradient(q, {1.0}, h)[0], 2.0, 1e-9) << h;
  }
  EXPECT_EQ(finite_diff_gradient(q, {1.0}, 0.5)[0], 2.0);

  const Vector r = finite_diff_gradient(rosenbrock(), {1.0, 1.0}, 1e-6);
  EXPECT_LE(std::abs(r[0]), 1e-6);
  EXPECT_LE(std::abs(r[1]), 1e-6);
  EXPECT_THROW(finite_diff_gradient(q, {1.0}, 0.0), DomainError);
}

TEST(Noise, ExactWhenDisabled) {
  Rng rng(1);
  const auto p = three_hump_camel();
  NoiseSpec none;
  none.sigma = 3.0;
  EXPECT_EQ(stochastic_gradient(p, {0.3, -0.7}, none, rng).g, p.grad({0.3, -0.7}));
  for (auto kind : {NoiseKind::ClippedGaussian, NoiseKind::UniformBounded}) {
    NoiseSpec s;
    s.kind = kind;
    s.sigma = 0.0;
    s.clip_G = 100.0;
    const auto out = stochastic_gradient(p, {0.3, -0.7}, s, rng);
    EXPECT_EQ(out.g, p.grad({0.3, -0.7}));
    EXPECT_FALSE(out.is_stochastic);
  }
  EXPECT_THROW(parse_noise_kind("laplace"), ConfigError);
}

TEST(Noise, InfeasibleCoordinatesAreClampedAndCounted) {
  const auto p = pl_quadratic({10.0, 1.0}, {0.0, 0.0});
  NoiseSpec s;
  s.kind = NoiseKind::UniformBounded;
  s.sigma = 0.5;
  s.clip_G = 5.0;
  Rng rng(2);
  NoiseDiagnostics diag;
  const auto out = stochastic_gradient(p, {0.9, 0.2}, s, rng, &diag);  // grad_0 = 9 > G
  EXPECT_EQ(out.g[0], 5.0);
  EXPECT_LE(std::abs(out.g[1]), 5.0);
  EXPECT_EQ(diag.clip_infeasible, 1);
  EXPECT_EQ(diag.draws, 1);
}

// ---- properties ----

TEST(Property, GradientConsistency) {
  std::mt19937_64 rng(7);
  for (const auto& p : all_problems()) {
    for (int t = 0; t < 100; ++t) {
      const Vector x = random_point(p, rng);
      const Vector g = p.grad(x);
      const Vector fd = finite_diff_gradient(p, x, 1e-6);
      Vector diff(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) diff[i] = g[i] - fd[i];
      const double rel = std::sqrt(norm2sq(diff)) / std::max(std::sqrt(norm2sq(g)), 1.0);
      ASSERT_LT(rel, 1e-6) << p.name << " at point " << t;
    }
  }
}

TEST(Property, MinimizersAreStationary) {
  for (const auto& p : all_problems()) {
    for (const auto& x : p.minimizers) EXPECT_LE(sup_norm(p.grad(x)), 1e-8) << p.name;
    EXPECT_NEAR(p.eval(p.minimizers.front()), *p.f_star, 1e-12) << p.name;
  }
}

TEST(Property, PlCertificate) {
  std::mt19937_64 rng(17);
  const Vector spectrum{0.4, 3.0, 9.0}, star{1.0, -1.0, 2.0};
  const auto p = pl_quadratic(spectrum, star);
  const double mu = p.constants->mu;
  for (int t = 0; t < 200; ++t) {
    const Vector x = random_point(p, rng);
    ASSERT_GE(norm2sq(p.grad(x)), 2.0 * mu * (p.eval(x) - 0.0) * (1.0 - 1e-14));
  }
  // along the smallest eigen-direction the inequality is tight
  for (double t : {-0.8, 0.1, 0.6}) {
    Vector x = star;
    x[0] += t;
    EXPECT_NEAR(norm2sq(p.grad(x)), 2.0 * mu * p.eval(x), 1e-14);
  }
}

TEST(Property, NoiseMomentsAndBound) {
  const auto p = pl_quadratic({1.0, 4.0, 2.0}, {0.0, 0.0, 0.0});
  const Vector x{0.3, -0.2, 0.1};
  const Vector g = p.grad(x);
  const int draws = 200000;
  for (auto kind : {NoiseKind::UniformBounded, NoiseKind::ClippedGaussian}) {
    NoiseSpec s;
    s.kind = kind;
    s.sigma = 0.3;
    s.clip_G = 50.0;
    Rng rng(123);
    Vector mean(3, 0.0), sq(3, 0.0);
    for (int d = 0; d < draws; ++d) {
      const auto out = stochastic_gradient(p, x, s, rng);
      ASSERT_LE(sup_norm(out.g), s.clip_G);
      for (std::size_t i = 0; i < 3; ++i) {
        mean[i] += out.g[i];
        sq[i] += (out.g[i] - g[i]) * (out.g[i] - g[i]);
      }
    }
    const double target = s.sigma * s.sigma / 3.0;
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_LE(std::abs(mean[i] / draws - g[i]), 5.0 * s.sigma / std::sqrt(double(draws)))
          << to_string(kind);
      EXPECT_NEAR(sq[i] / draws, target, 0.02 * target) << to_string(kind);
    }
  }
}

TEST(Property, NoiseBoundHoldsNearTheEdge) {
  // gradient close to G leaves little room; draws must still respect the bound
  const auto p = pl_quadratic({1.0, 1.0}, {0.0, 0.0});
  for (auto kind : {NoiseKind::UniformBounded, NoiseKind::ClippedGaussian}) {
    NoiseSpec s;
    s.kind = kind;
    s.sigma = 2.0;
    s.clip_G = 1.0;
    Rng rng(5);
    double mean = 0.0;
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) {
      const auto out = stochastic_gradient(p, {0.95, -0.5}, s, rng);
      ASSERT_LE(sup_norm(out.g), 1.0);
      mean += out.g[0];
    }
    EXPECT_NEAR(mean / draws, 0.95, 5.0 * 0.05 / std::sqrt(double(draws)));
  }
}
