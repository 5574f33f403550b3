#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "optlab/error.hpp"
#include "optlab/scaling.hpp"

using namespace optlab;

namespace {

ScalingState make(ScalingMode mode, std::int64_t per_epoch = 3) {
  ScalingState s;
  s.mode = mode;
  s.iters_per_epoch = per_epoch;
  return s;
}

ScalingState feed(ScalingState s, std::initializer_list<double> values) {
  for (double v : values) s = observe(s, v);
  return s;
}

}  // namespace

TEST(Ell, KnownRange) {
  auto s = make(ScalingMode::KnownRange);
  s.f_min = 0.0;
  s.f_max = 6.0;
  EXPECT_DOUBLE_EQ(ell(s, 3.0), 0.5);
  EXPECT_EQ(ell(s, -1.0), kEllFloor);
  EXPECT_DOUBLE_EQ(ell(s, 12.0), 2.0);  // not clamped above
}

TEST(Ell, IdentityFloorsAtOptimum) {
  auto s = make(ScalingMode::Identity);
  s.f_star = 0.25;
  EXPECT_EQ(ell(s, 0.25), 1e-12);
  EXPECT_DOUBLE_EQ(ell(s, 1.25), 1.0);
  ScalingState d;
  EXPECT_DOUBLE_EQ(ell(d, 16.0), 16.0);
}

TEST(Ell, WganScale) {
  EXPECT_NEAR(wgan_scale(0.34, 0.60), 0.1, 1e-15);
  EXPECT_EQ(wgan_scale(2.0, 2.0), 1.0);
  EXPECT_EQ(wgan_scale(3.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(wgan_scale(0.0, 250.0), 100.0);

  auto s = make(ScalingMode::AutoEpochWgan, 2);
  s = feed(s, {0.60, 0.34});
  EXPECT_EQ(s.epoch_index, 1);
  EXPECT_NEAR(s.f_scale, 0.1, 1e-15);
  EXPECT_NEAR(ell(s, 0.44), 1.0, 1e-12);
}

TEST(Ell, RejectsNonFinite) {
  ScalingState s;
  EXPECT_THROW(ell(s, NAN), NumericInputError);
  EXPECT_THROW(observe(s, INFINITY), NumericInputError);
}

TEST(Ell, LstmNeedsPositiveMax) {
  auto s = make(ScalingMode::AutoEpochLstm, 2);
  s = feed(s, {-3.0, -1.0});
  EXPECT_THROW(ell(s, -2.0), DomainError);
}

TEST(Observe, EpochZeroExtrema) {
  auto s = feed(make(ScalingMode::AutoEpochLstm), {5.0, 2.0, 9.0});
  EXPECT_EQ(s.f_min, 2.0);
  EXPECT_EQ(s.f_max, 9.0);
  EXPECT_EQ(s.epoch_index, 1);

  auto single = feed(make(ScalingMode::AutoEpochLstm, 1), {7.0});
  EXPECT_EQ(single.f_min, 7.0);
  EXPECT_EQ(single.f_max, 7.0);
}

TEST(Observe, ContinuousRefresh) {
  auto s = make(ScalingMode::AutoEpochLstm);
  s.continuous_refresh = true;
  s = feed(s, {5.0, 2.0, 9.0, 12.0, 3.0, 4.0});
  EXPECT_EQ(s.epoch_index, 2);
  EXPECT_EQ(s.f_max, 12.0);
  EXPECT_EQ(s.f_min, 3.0);
}

TEST(Observe, NonAutoModesUntouched) {
  auto s = make(ScalingMode::KnownRange);
  s.f_min = 1.0;
  s.f_max = 2.0;
  const auto t = feed(s, {100.0, -100.0});
  EXPECT_EQ(t.f_min, 1.0);
  EXPECT_EQ(t.f_max, 2.0);
  EXPECT_EQ(t.epoch_index, 0);
}

TEST(Phi, FromTrainError) {
  EXPECT_EQ(phi_from_train_error(1.0), 4.0);
  EXPECT_EQ(phi_from_train_error(0.1), 4.0);
  EXPECT_DOUBLE_EQ(phi_from_train_error(10.0), 5.0);
  EXPECT_THROW(phi_from_train_error(0.0), DomainError);
}

TEST(Config, ModesAndValidation) {
  EXPECT_EQ(parse_scaling_mode("auto_epoch_wgan"), ScalingMode::AutoEpochWgan);
  EXPECT_THROW(parse_scaling_mode("log"), ConfigError);
  auto s = make(ScalingMode::KnownRange);
  s.f_min = 3.0;
  s.f_max = 3.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = make(ScalingMode::Identity, 0);
  EXPECT_THROW(s.validate(), ConfigError);
}

// ---- properties ----

TEST(Property, EpochZeroUnity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (auto mode : {ScalingMode::AutoEpochLstm, ScalingMode::AutoEpochWgan}) {
    auto s = make(mode, 40);
    for (int i = 0; i < 40; ++i) {
      const double f = u(rng);
      ASSERT_EQ(ell(s, f), 1.0);
      ASSERT_TRUE(s.in_warmup());
      s = observe(s, f);
    }
    EXPECT_FALSE(s.in_warmup());
  }
}

TEST(Property, LstmRange) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.5, 20.0);
  auto s = make(ScalingMode::AutoEpochLstm, 50);
  for (int i = 0; i < 50; ++i) s = observe(s, u(rng));
  std::uniform_real_distribution<double> later(0.01, 40.0);
  double seen_max = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double f = later(rng);
    seen_max = std::max(seen_max, f);
    const double e = ell(s, f);
    ASSERT_GT(e, 0.0);
    ASSERT_LE(e, seen_max / s.f_max);
    if (f >= s.f_min && f <= s.f_max) ASSERT_LE(e, 1.0);
    s = observe(s, f);
  }
}

TEST(Property, StrictlyIncreasingInF) {
  std::vector<ScalingState> states;
  states.push_back(make(ScalingMode::Identity));
  auto kr = make(ScalingMode::KnownRange);
  kr.f_min = -1.0;
  kr.f_max = 4.0;
  states.push_back(kr);
  states.push_back(feed(make(ScalingMode::AutoEpochLstm), {3.0, 1.0, 8.0}));
  states.push_back(feed(make(ScalingMode::AutoEpochWgan), {3.0, 1.0, 8.0}));
  for (const auto& s : states) {
    // above the floor in every mode
    double prev = ell(s, 10.0);
    for (double f = 10.1; f < 60.0; f += 0.7) {
      const double e = ell(s, f);
      ASSERT_GT(e, prev) << to_string(s.mode) << " f=" << f;
      prev = e;
    }
  }
}

TEST(Property, FrozenStatisticsWithoutRefresh) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (auto mode : {ScalingMode::AutoEpochLstm, ScalingMode::AutoEpochWgan}) {
    auto s = make(mode, 10);
    for (int i = 0; i < 10; ++i) s = observe(s, u(rng) * 0.01);
    const double lo = s.f_min, hi = s.f_max, scale = s.f_scale;
    for (int i = 0; i < 500; ++i) {
      s = observe(s, u(rng));
      ASSERT_EQ(s.f_min, lo);
      ASSERT_EQ(s.f_max, hi);
      ASSERT_EQ(s.f_scale, scale);
    }
    EXPECT_LE(lo, hi);
  }
}
