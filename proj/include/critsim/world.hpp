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

#include "critsim/geometry.hpp"
#include "critsim/map.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace critsim
{

enum class Role
{
  Ego,
  Adversary,
  Background,
};

std::string_view to_string(Role role);

enum class Turn
{
  Straight,
  Left,
  Right,
  Random,
};

struct VehicleState
{
  std::string id;
  Role role{Role::Background};
  Footprint size;
  LanePosition pos;  // lane binding; lateral_offset is non-zero during a lane change
  Pose pose;
  double speed{0.0};
  double accel{0.0};  // applied acceleration that produced `speed`

  // Lane change in progress when lc_source is non-empty. The binding has
  // already moved to the target lane; the lateral offset decays to zero.
  std::string lc_source;
  double lc_elapsed{0.0};
  double lc_duration{2.0};
  double lc_offset0{0.0};

  std::vector<std::string> route;    // lanes after pos.lane_id, in order
  std::vector<std::string> visited;  // lanes already left behind
  Turn turn{Turn::Straight};         // choice policy at the next junction

  bool active{true};
  bool crashed{false};

  bool changing_lane() const { return !lc_source.empty(); }
  OrientedBox box() const { return {pose, size}; }
};

struct WorldState
{
  std::int64_t tick{0};
  double t{0.0};
  double dt{0.05};
  double friction{1.0};
  const LaneGraph * map{nullptr};
  std::vector<VehicleState> vehicles;

  int find(const std::string & id) const;
};

/// Nearest vehicle ahead along the path of `self` (current lane, planned
/// route, and the source lane of an ongoing lane change).
struct Leader
{
  int index{-1};
  double gap{0.0};    // bumper-to-bumper, metres
  double speed{0.0};
};

std::optional<Leader> find_leader(const WorldState & world, int self, double horizon = 200.0);

/// Bumper gap by which `a` leads `b` longitudinally (negative when a is
/// behind b's front bumper).
double bumper_lead(const WorldState & world, int a, int b);

/// Lanes `self` will drive through, starting with its current lane, each
/// with the arc length of its start relative to the vehicle.
struct PathLane
{
  std::string lane;
  double base{0.0};  // distance from the vehicle to s = 0 of the lane (negative for the current lane)
};

std::vector<PathLane> vehicle_path(const WorldState & world, int self, double horizon);

/// Connector chosen among the successors of `lane` for a turn request;
/// straight when the requested turn does not exist.
std::string choose_successor(const LaneGraph & map, const std::string & lane, Turn turn, std::uint64_t random_draw);

Turn classify_turn(const Lane & lane);

}  // namespace critsim
