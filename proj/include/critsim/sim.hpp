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

#pragma once

#include "critsim/agents.hpp"
#include "critsim/engine.hpp"
#include "critsim/scenario.hpp"
#include "critsim/world.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace critsim
{

struct SimConfig
{
  double duration{30.0};
  double dt{0.05};
  /// Record shortest distances for every vehicle pair, not only ego x adversary.
  bool all_pairs{false};
  double reaction_headway{0.8};
  double ego_reaction_delay{kEgoReactionDelay};
  double acc_reaction_delay{kAccReactionDelay};
  double cautious_reaction_delay{kCautiousReactionDelay};
  /// Background vehicles keep this much distance from each other and from
  /// the scenario vehicles when placed.
  double background_clearance{25.0};
  /// Minimum distance between a background spawn and the ego or an
  /// adversary. Background vehicles never spawn on a lane one of those
  /// currently occupies.
  double scenario_clearance{60.0};
  /// Crashed vehicles stop on the spot and stay there.
  bool halt_on_collision{false};
  SpawnConfig spawn{};

  std::int64_t tick_count() const;
};

struct VehicleRecord
{
  std::string id;
  Role role{Role::Background};
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  std::string lane;
  double s{0.0};
  double lateral{0.0};
  double speed{0.0};
  double accel{0.0};
  double length{0.0};
  double width{0.0};
  bool changing_lane{false};
  bool crashed{false};

  OrientedBox box() const { return {{x, y, heading}, {length, width}}; }
  friend bool operator==(const VehicleRecord &, const VehicleRecord &) = default;
};

struct PairRecord
{
  std::string a;
  std::string b;
  double delta{0.0};

  friend bool operator==(const PairRecord &, const PairRecord &) = default;
};

struct SignalRecord
{
  std::string lane;
  SignalColor color{SignalColor::Red};

  friend bool operator==(const SignalRecord &, const SignalRecord &) = default;
};

struct TickRecord
{
  std::int64_t k{0};
  double t{0.0};
  std::vector<VehicleRecord> vehicles;
  std::vector<PairRecord> pairs;
  std::vector<SignalRecord> signals;

  const VehicleRecord * vehicle(const std::string & id) const;
  const PairRecord * pair(const std::string & a, const std::string & b) const;
  friend bool operator==(const TickRecord &, const TickRecord &) = default;
};

struct CollisionEvent
{
  std::int64_t k{0};
  std::string a;
  std::string b;
  double relative_speed{0.0};

  bool involves(const std::string & id) const { return a == id || b == id; }
  friend bool operator==(const CollisionEvent &, const CollisionEvent &) = default;
};

struct SnapshotEvent
{
  std::int64_t k{0};
  nlohmann::json web;
};

struct SimTrace
{
  double dt{0.05};
  std::uint64_t seed{0};
  std::string map_id;
  std::string scenario;  // canonical scenario document
  std::vector<std::string> adversaries;
  std::vector<TickRecord> ticks;
  std::vector<CollisionEvent> collisions;
  std::vector<StatusEvent> statuses;
  std::vector<SnapshotEvent> snapshots;
  std::vector<std::string> notes;
};

/// Runs the scenario for config.duration seconds. Throws Error(NoMatch) when
/// the ego cannot be placed, Error(SpawnInfeasible) for unresolvable
/// adversary placements, and validation errors for invalid specs.
SimTrace run_scenario(const ScenarioSpec & spec, const MapLibrary & maps, const SimConfig & config = {});

/// Overlapping vehicle pairs of a world, as events at world.tick.
std::vector<CollisionEvent> detect_collisions(const WorldState & world);

/// Shortest distance between the footprints of two vehicles.
double shortest_distance(const VehicleState & a, const VehicleState & b);

/// JSONL: header line, per-tick records with their events, footer line.
std::string write_trace(const SimTrace & trace);
/// Throws Error(MalformedTrace) naming the first bad line.
SimTrace read_trace(const std::string & text);

}  // namespace critsim
