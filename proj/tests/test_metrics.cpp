// Copyright 2026 The critsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "critsim/metrics.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace critsim;

namespace
{

VehicleRecord record(const std::string & id, Role role, double x, double y, double h, double accel = 0.0)
{
  VehicleRecord v;
  v.id = id;
  v.role = role;
  v.x = x;
  v.y = y;
  v.heading = h;
  v.length = 4.5;
  v.width = 1.9;
  v.accel = accel;
  return v;
}

SimTrace two_car_trace(const std::vector<double> & ego_x, const std::vector<double> & adv_x, double dt = 0.05)
{
  SimTrace t;
  t.dt = dt;
  t.adversaries = {"adv"};
  for (std::size_t k = 0; k < ego_x.size(); ++k) {
    TickRecord tick;
    tick.k = static_cast<std::int64_t>(k);
    tick.t = k * dt;
    tick.vehicles = {record("ego", Role::Ego, ego_x[k], 0, 0), record("adv", Role::Adversary, adv_x[k], 0, 0)};
    tick.pairs = {{"ego", "adv", shortest_distance(tick.vehicles[0].box(), tick.vehicles[1].box())}};
    t.ticks.push_back(tick);
  }
  return t;
}

MetricsSummary summary(double act, double comfort, bool crashed)
{
  MetricsSummary m;
  m.min_act = act;
  m.comfortability = comfort;
  m.collision.collided = crashed;
  if (crashed) m.collision.parties = {"adv"};
  return m;
}

}  // namespace

TEST(Act, ClosingPairHasFiniteAct)
{
  // gap shrinks by 0.5 m per 0.05 s tick: closing rate 10 m/s
  const auto s = act_from_distances({10.0, 9.5, 9.0}, 0.05);
  EXPECT_TRUE(std::isinf(s[0].act));
  EXPECT_NEAR(s[1].closing_rate, 10.0, 1e-12);
  EXPECT_NEAR(s[1].act, 0.95, 1e-12);
  EXPECT_NEAR(s[2].act, 0.9, 1e-12);
  EXPECT_NEAR(min_act(s), 0.9, 1e-12);
}

TEST(Act, ConstantAndOpeningDistancesAreInfinite)
{
  for (const auto & d : {std::vector<double>{5, 5, 5, 5}, std::vector<double>{5, 6, 7, 8}}) {
    for (const auto & f : act_from_distances(d, 0.05)) EXPECT_TRUE(std::isinf(f.act));
    EXPECT_TRUE(std::isinf(min_act(act_from_distances(d, 0.05))));
  }
}

TEST(Act, ContactFrameHasZeroAct)
{
  const auto s = act_from_distances({1.0, 0.0}, 0.05);
  EXPECT_EQ(s[1].act, 0.0);
}

TEST(Act, SeriesFromTraceUsesRecordedPairs)
{
  const auto t = two_car_trace({0, 1, 2, 3}, {20, 20, 20, 20});
  const auto s = act_series(t, "ego", "adv");
  ASSERT_EQ(s.size(), 4u);
  EXPECT_NEAR(s[3].delta, 12.5, 1e-12);
  EXPECT_NEAR(s[3].act, 12.5 / 20.0, 1e-12);
}

TEST(Act, UnknownPairThrows)
{
  const auto t = two_car_trace({0, 1}, {20, 20});
  try {
    act_series(t, "ego", "ghost");
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownPair);
  }
}

TEST(ActProperty, MatchesBruteForceOracle)
{
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int run = 0; run < 100; ++run) {
    const double dt = 0.05;
    SimTrace t;
    t.dt = dt;
    t.adversaries = {"adv"};
    std::vector<oracle::Rect> ra;
    std::vector<oracle::Rect> rb;
    double ax = 0, ay = 0, ah = 0, bx = 30 + 10 * u(rng), by = 5 * u(rng), bh = M_PI * u(rng);
    const double av = 15 + 5 * u(rng), bv = 10 + 5 * u(rng);
    for (int k = 0; k < 60; ++k) {
      TickRecord tick;
      tick.k = k;
      tick.t = k * dt;
      tick.vehicles = {record("ego", Role::Ego, ax, ay, ah), record("adv", Role::Adversary, bx, by, bh)};
      tick.pairs = {{"ego", "adv", shortest_distance(tick.vehicles[0].box(), tick.vehicles[1].box())}};
      t.ticks.push_back(tick);
      ra.push_back({ax, ay, ah, 4.5, 1.9});
      rb.push_back({bx, by, bh, 4.5, 1.9});
      ah += 0.02 * u(rng);
      bh += 0.02 * u(rng);
      ax += av * dt * std::cos(ah);
      ay += av * dt * std::sin(ah);
      bx += bv * dt * std::cos(bh);
      by += bv * dt * std::sin(bh);
    }
    const auto got = act_series(t, "ego", "adv");
    const auto want = oracle::act_brute_force(ra, rb, dt);
    for (std::size_t k = 0; k < got.size(); ++k) {
      if (std::isinf(want[k])) {
        EXPECT_TRUE(std::isinf(got[k].act)) << "run " << run << " frame " << k;
      } else {
        EXPECT_NEAR(got[k].act, want[k], 1e-6) << "run " << run << " frame " << k;
      }
    }
  }
}

TEST(Comfort, UnitMagnitudeGivesHalf)
{
  EXPECT_EQ(comfortability_from_accel(std::vector<double>(40, 1.0)), 0.5);
  EXPECT_EQ(comfortability_from_accel(std::vector<double>(40, -1.0)), 0.5);
}

TEST(Comfort, ZeroFramesAreExcluded)
{
  // denoised magnitudes {0, 1, 3}: (1/2 + 1/4) / 2
  EXPECT_EQ(comfortability_from_accel({0.0, 1.0, 3.0}, {1, 1e-3}), 0.375);
}

TEST(Comfort, AllZeroIsOne) { EXPECT_EQ(comfortability_from_accel(std::vector<double>(10, 0.0)), 1.0); }

TEST(Comfort, DenoiseTruncatesAtEnds)
{
  const auto d = denoise({3.0, 0.0, 0.0, 0.0, 3.0}, 3);
  EXPECT_DOUBLE_EQ(d[0], 1.5);
  EXPECT_DOUBLE_EQ(d[1], 1.0);
  EXPECT_DOUBLE_EQ(d[2], 0.0);
  EXPECT_DOUBLE_EQ(d[4], 1.5);
}

TEST(ComfortProperty, MatchesDefinitionAndStaysInRange)
{
  std::mt19937_64 rng(5);
  std::normal_distribution<double> a(0.0, 3.0);
  std::bernoulli_distribution idle(0.3);
  for (int i = 0; i < 300; ++i) {
    std::vector<double> acc(100);
    for (auto & x : acc) x = idle(rng) ? 0.0 : a(rng);
    const double c = comfortability_from_accel(acc);
    EXPECT_NEAR(c, oracle::comfort_reference(acc, 5, 1e-3), 1e-12);
    EXPECT_GT(c, 0.0);
    EXPECT_LE(c, 1.0);
  }
}

TEST(Evaluate, CollisionPartiesAndMinimum)
{
  auto t = two_car_trace({0, 1, 2, 3}, {20, 20, 20, 20});
  t.collisions.push_back({3, "adv", "ego", 20.0});
  const auto m = evaluate(t);
  EXPECT_TRUE(m.collision.collided);
  EXPECT_EQ(m.collision.first_tick, 3);
  EXPECT_EQ(m.collision.parties, std::vector<std::string>{"adv"});
  EXPECT_EQ(m.min_act_pair, "adv");
  EXPECT_NEAR(m.min_delta, 12.5, 1e-12);
}

TEST(Evaluate, IsPure)
{
  const auto t = two_car_trace({0, 1, 2, 3, 3.5}, {20, 20, 20, 20, 20});
  EXPECT_EQ(evaluate(t), evaluate(t));
}

TEST(Batch, MeanOverFiniteMinimaAndCrashRate)
{
  const auto b = summarize_batch({summary(1.0, 0.5, true), summary(3.0, 0.7, false), summary(kInf, 0.9, false)});
  EXPECT_EQ(b.n, 3u);
  EXPECT_EQ(b.finite_act, 2u);
  EXPECT_EQ(b.infinite_act, 1u);
  EXPECT_DOUBLE_EQ(b.mean_min_act, 2.0);
  EXPECT_DOUBLE_EQ(b.global_min_act, 1.0);
  EXPECT_NEAR(b.mean_comfortability, 0.7, 1e-12);
  EXPECT_EQ(b.crashes, 1u);
  EXPECT_NEAR(b.crash_rate, 1.0 / 3.0, 1e-12);
  EXPECT_EQ(b.parties.at("adv"), 1u);
}

TEST(Batch, AllInfinite)
{
  const auto b = summarize_batch({summary(kInf, 1.0, false), summary(kInf, 1.0, false)});
  EXPECT_TRUE(std::isinf(b.mean_min_act));
  EXPECT_EQ(b.infinite_act, 2u);
}

TEST(Render, PercentRoundsHalfUp)
{
  EXPECT_EQ(render_percent(15, 32), "46.9%");
  EXPECT_EQ(render_percent(2, 32), "6.3%");
  EXPECT_EQ(render_percent(0, 32), "0.0%");
  EXPECT_EQ(render_percent(32, 32), "100.0%");
  EXPECT_EQ(render_percent(1, 8), "12.5%");
  EXPECT_EQ(render_percent(0.46875), "46.9%");
}

TEST(RenderProperty, PercentMatchesIntegerArithmetic)
{
  for (std::size_t n = 1; n <= 64; ++n) {
    for (std::size_t k = 0; k <= n; ++k) {
      // tenths of a percent, halves up, computed with exact integers
      const std::size_t tenths = (2000 * k + n) / (2 * n);
      const std::string want = std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
      EXPECT_EQ(render_percent(k, n), want) << k << "/" << n;
    }
  }
}

TEST(Render, Seconds)
{
  EXPECT_EQ(render_seconds(1.23456), "1.235");
  EXPECT_EQ(render_seconds(kInf), "inf");
}

TEST(MetricsJson, RoundTrip)
{
  auto m = summary(0.4, 0.6, true);
  m.min_act_pair = "adv";
  m.collision.first_tick = 12;
  m.min_delta = 0.0;
  EXPECT_EQ(metrics_from_json(metrics_to_json(m)), m);
  const auto inf = summary(kInf, 1.0, false);
  EXPECT_EQ(metrics_from_json(metrics_to_json(inf)), inf);
}
