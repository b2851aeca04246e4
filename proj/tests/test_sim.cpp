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
#include "critsim/scenario.hpp"
#include "critsim/sim.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace critsim;
namespace fs = std::filesystem;

namespace
{

const MapLibrary & maps()
{
  static const MapLibrary lib = MapLibrary::load_directory(fs::path(CRITSIM_DATA_DIR) / "maps");
  return lib;
}

ScenarioSpec preset(const std::string & name)
{
  return load_scenario_file((fs::path(CRITSIM_DATA_DIR) / "presets" / (name + ".json")).string(), &maps());
}

const std::vector<std::string> kPresets = {"dangerous", "moderate", "safe", "sudden_stop", "force_right_turn", "running_red_light"};

const StatusEvent * status_of(const SimTrace & t, const std::string & path)
{
  for (const auto & e : t.statuses) {
    if (e.path == path) return &e;
  }
  return nullptr;
}

}  // namespace

TEST(Sim, TickCountAndSpacing)
{
  SimConfig c;
  c.duration = 10.0;
  const auto t = run_scenario(preset("safe"), maps(), c);
  ASSERT_EQ(t.ticks.size(), 200u);
  for (std::size_t k = 0; k < t.ticks.size(); ++k) {
    EXPECT_EQ(t.ticks[k].k, static_cast<std::int64_t>(k));
    EXPECT_DOUBLE_EQ(t.ticks[k].t, k * 0.05);
  }
  EXPECT_EQ(t.map_id, "highway_3lane");
  EXPECT_EQ(t.adversaries.size(), 2u);
}

TEST(Sim, DeterministicTraces)
{
  for (const auto & name : kPresets) {
    const auto spec = preset(name);
    EXPECT_EQ(write_trace(run_scenario(spec, maps())), write_trace(run_scenario(spec, maps()))) << name;
  }
}

TEST(Sim, SeedChangesTheRun)
{
  auto spec = preset("dangerous");
  const auto a = write_trace(run_scenario(spec, maps()));
  spec.seed += 1;
  EXPECT_NE(a, write_trace(run_scenario(spec, maps())));
}

TEST(Sim, TraceRoundTrip)
{
  SimConfig c;
  c.duration = 8.0;
  const auto t = run_scenario(preset("force_right_turn"), maps(), c);
  const std::string text = write_trace(t);
  const SimTrace back = read_trace(text);
  EXPECT_EQ(write_trace(back), text);
  EXPECT_EQ(back.ticks, t.ticks);
  EXPECT_EQ(back.collisions, t.collisions);
  EXPECT_EQ(evaluate(back), evaluate(t));
}

TEST(Sim, TruncatedTraceNamesBadLine)
{
  SimConfig c;
  c.duration = 2.0;
  const std::string text = write_trace(run_scenario(preset("safe"), maps(), c));
  std::size_t cut = 0;
  for (int i = 0; i < 4; ++i) cut = text.find('\n', cut) + 1;
  const std::string truncated = text.substr(0, cut + 20);
  try {
    read_trace(truncated);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedTrace);
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
}

TEST(Sim, EmptyTraceIsMalformed)
{
  try {
    read_trace("");
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedTrace);
  }
}

TEST(Sim, AllPairsRecordsMore)
{
  SimConfig c;
  c.duration = 1.0;
  const auto few = run_scenario(preset("safe"), maps(), c);
  c.all_pairs = true;
  const auto many = run_scenario(preset("safe"), maps(), c);
  EXPECT_GT(many.ticks[0].pairs.size(), few.ticks[0].pairs.size());
  for (const auto & p : few.ticks[0].pairs) EXPECT_EQ(p.a, "ego");
}

TEST(Sim, RecordedDistancesMatchFootprints)
{
  const auto t = run_scenario(preset("dangerous"), maps());
  for (const auto & tick : t.ticks) {
    for (const auto & p : tick.pairs) {
      const auto * a = tick.vehicle(p.a);
      const auto * b = tick.vehicle(p.b);
      ASSERT_TRUE(a && b);
      EXPECT_NEAR(p.delta, shortest_distance(a->box(), b->box()), 1e-9);
    }
  }
}

TEST(SimProperty, KinematicsStayPhysical)
{
  for (const auto & name : kPresets) {
    const auto t = run_scenario(preset(name), maps());
    for (const auto & tick : t.ticks) {
      for (const auto & v : tick.vehicles) {
        EXPECT_GE(v.speed, 0.0);
        EXPECT_TRUE(std::isfinite(v.x) && std::isfinite(v.y));
      }
    }
  }
}

TEST(SimProperty, CollisionsAreRealContacts)
{
  for (const auto & name : kPresets) {
    const auto t = run_scenario(preset(name), maps());
    for (const auto & c : t.collisions) {
      const auto & tick = t.ticks[static_cast<std::size_t>(c.k)];
      const auto * a = tick.vehicle(c.a);
      const auto * b = tick.vehicle(c.b);
      ASSERT_TRUE(a && b);
      EXPECT_TRUE(boxes_overlap(a->box(), b->box())) << name;
    }
  }
}

TEST(Sim, DetectCollisionsOnWorld)
{
  WorldState w;
  w.map = maps().get("highway_3lane").get();
  VehicleState a;
  a.id = "a";
  a.pose = {0, 0, 0};
  VehicleState b = a;
  b.id = "b";
  b.pose = {4.0, 0.5, 0.1};
  b.speed = 3.0;
  VehicleState c = a;
  c.id = "c";
  c.pose = {50, 0, 0};
  w.vehicles = {a, b, c};
  const auto hits = detect_collisions(w);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_TRUE(hits[0].involves("a"));
  EXPECT_TRUE(hits[0].involves("b"));
}

TEST(Sim, SuddenStopBrakesAndEgoKeepsClear)
{
  auto spec = preset("sudden_stop");
  spec.environment.weather.friction_multiplier = 1.0;
  const auto t = run_scenario(spec, maps());
  const auto * brake = status_of(t, "van_1/1");
  ASSERT_NE(brake, nullptr);
  EXPECT_EQ(brake->status, BehaviorStatus::Succeeded);
  EXPECT_FALSE(evaluate(t).collision.collided);
}

TEST(Sim, HaltOnCollisionFreezesCrashedVehicles)
{
  auto spec = preset("dangerous");
  SimConfig c;
  c.halt_on_collision = true;
  for (std::uint64_t seed = 1000; seed < 1010; ++seed) {
    spec.seed = seed;
    const auto t = run_scenario(spec, maps(), c);
    if (t.collisions.empty()) continue;
    const auto & last = t.ticks.back();
    for (const auto & v : last.vehicles) {
      if (v.crashed) EXPECT_EQ(v.speed, 0.0);
    }
    return;
  }
  GTEST_SKIP() << "no collision in the sampled seeds";
}

TEST(Sim, InfeasiblePlacementThrows)
{
  auto spec = preset("safe");
  spec.adversaries[0].placement = {Relation::OppositeApproach, 5.0};
  try {
    run_scenario(spec, maps());
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::SpawnInfeasible);
  }
}

TEST(Sim, SnapshotsOfTheBehaviorWeb)
{
  SimConfig c;
  c.duration = 2.0;
  const auto t = run_scenario(preset("dangerous"), maps(), c);
  ASSERT_FALSE(t.snapshots.empty());
  EXPECT_EQ(t.snapshots.front().k, 0);
}
