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

#include "critsim/world.hpp"

#include <optional>
#include <string>

namespace critsim
{

enum class LaneChange
{
  Keep,
  BeginLeft,
  BeginRight,
};

std::string_view to_string(LaneChange lc);

struct ControlTarget
{
  double accel{0.0};
  LaneChange lane_change{LaneChange::Keep};
  double target_lane_progress{0.0};
  double lane_change_duration{2.0};  // s, used when a lane change begins
};

/// Output of one agent evaluation. `failure` is non-empty when the agent
/// cannot do its job (lost target, no neighbour lane); the control is still
/// valid and holds a comfortable deceleration.
struct AgentOutput
{
  ControlTarget control;
  std::string failure;
};

struct VehicleLimits
{
  double max_accel{3.0};
  double max_decel{8.0};

  VehicleLimits scaled(double friction) const { return {max_accel * friction, max_decel * friction}; }
};

/// Car-following tunables. Aggressiveness in [0, 1] interpolates linearly
/// between the safe and aggressive presets.
struct AgentParams
{
  double headway{1.8};         // desired time headway, s
  double min_gap{4.0};         // standstill gap, m
  double accel{2.0};           // IDM acceleration, m/s^2
  double comfort_decel{3.0};   // IDM comfortable deceleration, m/s^2
  double reaction_delay{0.0};  // command latency, s

  static AgentParams from_aggressiveness(double aggressiveness);
};

inline constexpr double kSafeHeadway = 1.8;
inline constexpr double kAggressiveHeadway = 0.4;
inline constexpr double kSafeMinGap = 4.0;
inline constexpr double kAggressiveMinGap = 0.8;
inline constexpr double kLaneChangeDuration = 2.0;
inline constexpr double kEgoReactionDelay = 0.3;
inline constexpr double kAccReactionDelay = 0.4;
inline constexpr double kCautiousReactionDelay = 0.3;

/// IDM acceleration; `gap` and `lead_speed` describe the leader, if any.
double idm_accel(double v, double v0, std::optional<double> gap, double lead_speed, const AgentParams & p);

/// Evaluation context shared by all agents.
struct AgentContext
{
  const WorldState & world;
  int self;
  VehicleLimits limits;  // already scaled by friction
};

AgentOutput acc_follow(const AgentContext & ctx, const std::string & target, double target_speed, double aggressiveness);

/// Effective trigger gap after aggressiveness shrinks it.
double effective_trigger_gap(double trigger_gap, double aggressiveness);

/// Lateral duration of a cut-in: 2 s for a gentle one, 1 s for the most
/// aggressive.
double cut_in_duration(double aggressiveness);

AgentOutput cut_in(
  const AgentContext & ctx, const std::string & victim, double trigger_gap, double aggressiveness,
  double target_speed);

/// `decel` <= 0 means maximum deceleration.
AgentOutput sudden_brake(const AgentContext & ctx, double decel);
AgentOutput comfortable_stop(const AgentContext & ctx, double decel);
AgentOutput idle_hold(const AgentContext & ctx);
AgentOutput run_red_light(const AgentContext & ctx, double target_speed);
AgentOutput route_follow(const AgentContext & ctx, double target_speed);
AgentOutput overtake(const AgentContext & ctx, const std::string & target, double target_speed);

struct CautiousParams
{
  AgentParams follow{};
  double stop_line_margin{1.0};
  double comfortable_stop_decel{3.0};
  double yield_horizon{8.0};
};

AgentOutput cautious_planner(const AgentContext & ctx, double target_speed, const CautiousParams & params = {});

/// Constant deceleration that stops the closing gap to `leader` at
/// `standoff` metres, capped at the braking limit. A braking leader is
/// assumed to keep braking to a standstill.
double required_decel(const AgentContext & ctx, const Leader & leader, double standoff = 2.0);

/// Cautious planner plus emergency braking at the required deceleration
/// when the gap to a closing leader drops below reaction_headway x speed.
AgentOutput ego_defensive(const AgentContext & ctx, double target_speed, double reaction_headway = 0.8);

/// Signal and conflict obstacles the cautious planner brakes for: distance
/// (bumper) to the stop line it must hold at, if any.
std::optional<double> cautious_stop_distance(const AgentContext & ctx, const CautiousParams & params);

}  // namespace critsim
