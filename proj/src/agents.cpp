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

#include "critsim/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace critsim
{

std::string_view to_string(LaneChange lc)
{
  switch (lc) {
    case LaneChange::Keep: return "keep";
    case LaneChange::BeginLeft: return "begin_left";
    case LaneChange::BeginRight: return "begin_right";
  }
  return "?";
}

AgentParams AgentParams::from_aggressiveness(double aggressiveness)
{
  const double k = std::clamp(aggressiveness, 0.0, 1.0);
  AgentParams p;
  p.headway = kSafeHeadway + (kAggressiveHeadway - kSafeHeadway) * k;
  p.min_gap = kSafeMinGap + (kAggressiveMinGap - kSafeMinGap) * k;
  return p;
}

double idm_accel(double v, double v0, std::optional<double> gap, double lead_speed, const AgentParams & p)
{
  v0 = std::max(v0, 0.1);
  double a = p.accel * (1.0 - std::pow(v / v0, 4.0));
  if (gap) {
    const double s = std::max(*gap, 0.05);
    const double dv = v - lead_speed;
    const double s_star =
      p.min_gap + std::max(0.0, v * p.headway + v * dv / (2.0 * std::sqrt(p.accel * p.comfort_decel)));
    a -= p.accel * (s_star / s) * (s_star / s);
  }
  return a;
}

namespace
{

double clamp_accel(double a, const VehicleLimits & lim) { return std::clamp(a, -lim.max_decel, lim.max_accel); }

const VehicleState & me(const AgentContext & ctx) { return ctx.world.vehicles[ctx.self]; }

int live_vehicle(const AgentContext & ctx, const std::string & id)
{
  const int i = ctx.world.find(id);
  if (i < 0 || !ctx.world.vehicles[i].active) {
    return -1;
  }
  return i;
}

double follow_accel(const AgentContext & ctx, double target_speed, const AgentParams & p)
{
  const auto leader = find_leader(ctx.world, ctx.self);
  const double v = me(ctx).speed;
  if (leader) {
    const double a = idm_accel(v, target_speed, leader->gap, leader->speed, p);
    // A leader that is not slower than us (a vehicle that just merged in
    // front, say) only calls for comfortable braking.
    if (leader->speed >= v && leader->gap > 0.0) {
      return std::max(a, -p.comfort_decel);
    }
    return a;
  }
  return idm_accel(v, target_speed, std::nullopt, 0.0, p);
}

AgentOutput hold_decel(const AgentContext & ctx, std::string failure)
{
  AgentOutput out;
  out.control.accel = me(ctx).speed > 0.0 ? -std::min(3.0, ctx.limits.max_decel) : 0.0;
  out.failure = std::move(failure);
  return out;
}

double road_end_gap(const AgentContext & ctx)
{
  const auto path = vehicle_path(ctx.world, ctx.self, 250.0);
  const auto & last = path.back();
  const Lane & lane = ctx.world.map->lane(last.lane);
  if (!lane.successors.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  return last.base + lane.length() - 0.5 * me(ctx).size.length - 1.0;
}

}  // namespace

AgentOutput acc_follow(const AgentContext & ctx, const std::string & target, double target_speed, double aggressiveness)
{
  if (live_vehicle(ctx, target) < 0) {
    return hold_decel(ctx, "target '" + target + "' lost");
  }
  AgentOutput out;
  out.control.accel = clamp_accel(follow_accel(ctx, target_speed, AgentParams::from_aggressiveness(aggressiveness)), ctx.limits);
  return out;
}

double effective_trigger_gap(double trigger_gap, double aggressiveness)
{
  return trigger_gap * (1.0 - 0.8 * std::clamp(aggressiveness, 0.0, 1.0));
}

double cut_in_duration(double aggressiveness)
{
  return kLaneChangeDuration - 0.5 * kLaneChangeDuration * std::clamp(aggressiveness, 0.0, 1.0);
}

AgentOutput cut_in(
  const AgentContext & ctx, const std::string & victim, double trigger_gap, double aggressiveness,
  double target_speed)
{
  const int vi = live_vehicle(ctx, victim);
  if (vi < 0) {
    return hold_decel(ctx, "victim '" + victim + "' lost");
  }
  const auto & self = me(ctx);
  const auto & vic = ctx.world.vehicles[vi];
  const AgentParams p = AgentParams::from_aggressiveness(aggressiveness);
  AgentOutput out;
  out.control.accel = clamp_accel(follow_accel(ctx, target_speed, p), ctx.limits);
  if (self.changing_lane()) {
    out.control.target_lane_progress = std::min(1.0, self.lc_elapsed / self.lc_duration);
    return out;
  }
  if (self.pos.lane_id == vic.pos.lane_id) {
    out.control.target_lane_progress = 1.0;
    return out;
  }
  const Lane & lane = ctx.world.map->lane(self.pos.lane_id);
  LaneChange dir = LaneChange::Keep;
  if (lane.left == vic.pos.lane_id) {
    dir = LaneChange::BeginLeft;
  } else if (lane.right == vic.pos.lane_id) {
    dir = LaneChange::BeginRight;
  } else {
    out.failure = "victim is not on a neighbour lane";
    return out;
  }
  if (bumper_lead(ctx.world, ctx.self, vi) >= effective_trigger_gap(trigger_gap, aggressiveness)) {
    out.control.lane_change = dir;
    out.control.lane_change_duration = cut_in_duration(aggressiveness);
  }
  return out;
}

AgentOutput sudden_brake(const AgentContext & ctx, double decel)
{
  AgentOutput out;
  if (me(ctx).speed <= 0.0) {
    return out;
  }
  const double d = decel > 0.0 ? std::min(decel, ctx.limits.max_decel) : ctx.limits.max_decel;
  out.control.accel = -d;
  return out;
}

AgentOutput comfortable_stop(const AgentContext & ctx, double decel) { return sudden_brake(ctx, decel); }

AgentOutput idle_hold(const AgentContext & ctx) { return hold_decel(ctx, {}); }

AgentOutput route_follow(const AgentContext & ctx, double target_speed)
{
  AgentOutput out;
  out.control.accel = clamp_accel(follow_accel(ctx, target_speed, AgentParams{}), ctx.limits);
  return out;
}

AgentOutput run_red_light(const AgentContext & ctx, double target_speed)
{
  // Same as plain route following: no signal term and no yielding term.
  return route_follow(ctx, target_speed);
}

AgentOutput overtake(const AgentContext & ctx, const std::string & target, double target_speed)
{
  if (live_vehicle(ctx, target) < 0) {
    return hold_decel(ctx, "target '" + target + "' lost");
  }
  return route_follow(ctx, target_speed);
}

std::optional<double> cautious_stop_distance(const AgentContext & ctx, const CautiousParams & params)
{
  const WorldState & w = ctx.world;
  const LaneGraph & map = *w.map;
  const auto & self = me(ctx);
  if (map.is_connector(self.pos.lane_id)) {
    return std::nullopt;
  }
  const auto path = vehicle_path(w, ctx.self, 250.0);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const std::string & approach = path[i].lane;
    if (map.approach(approach) == nullptr) {
      continue;
    }
    const std::string & connector = path[i + 1].lane;
    const double d_line = path[i].base + map.lane(approach).length();
    const double stop_gap = d_line - 0.5 * self.size.length - params.stop_line_margin;
    const double v = self.speed;
    const bool can_stop_comfortably = stop_gap >= v * v / (2.0 * params.comfortable_stop_decel);
    const bool can_stop = stop_gap >= v * v / (2.0 * ctx.limits.max_decel);

    const bool red_now = signal_color_at(map, approach, w.t) == SignalColor::Red;
    const double arrival = d_line / std::max(v, 1.0);
    const bool red_at_arrival = signal_color_at(map, approach, w.t + arrival) == SignalColor::Red;
    if ((red_now && can_stop) || (red_at_arrival && can_stop_comfortably)) {
      return stop_gap;
    }

    // Yield to conflicting traffic that reaches the box first.
    const double my_arrival = d_line / std::max(v, 0.5);
    for (std::size_t j = 0; j < w.vehicles.size(); ++j) {
      const auto & o = w.vehicles[j];
      if (static_cast<int>(j) == ctx.self || !o.active) {
        continue;
      }
      double their_arrival = std::numeric_limits<double>::infinity();
      if (map.is_connector(o.pos.lane_id)) {
        if (map.connectors_conflict(o.pos.lane_id, connector)) {
          their_arrival = 0.0;
        }
      } else if (map.approach(o.pos.lane_id) != nullptr && !o.route.empty() &&
                 map.connectors_conflict(o.route.front(), connector)) {
        const double d = map.lane(o.pos.lane_id).length() - o.pos.s;
        const bool their_red = signal_color_at(map, o.pos.lane_id, w.t) == SignalColor::Red;
        const bool committed = d < o.speed * o.speed / (2.0 * params.comfortable_stop_decel) + o.speed;
        if (o.speed >= 0.5 && (!their_red || committed)) {
          their_arrival = d / o.speed;
        }
      }
      if (their_arrival > params.yield_horizon) {
        continue;
      }
      const bool they_first =
        their_arrival < my_arrival || (their_arrival == my_arrival && o.id < self.id);
      if (they_first && can_stop) {
        return stop_gap;
      }
    }
    break;
  }
  return std::nullopt;
}

AgentOutput cautious_planner(const AgentContext & ctx, double target_speed, const CautiousParams & params)
{
  const auto & self = me(ctx);
  const double v0 = std::min(target_speed, ctx.world.map->lane(self.pos.lane_id).speed_limit);
  double a = follow_accel(ctx, v0, params.follow);
  if (const auto stop = cautious_stop_distance(ctx, params)) {
    a = std::min(a, idm_accel(self.speed, v0, *stop, 0.0, params.follow));
  }
  AgentOutput out;
  out.control.accel = clamp_accel(a, ctx.limits);
  return out;
}

double required_decel(const AgentContext & ctx, const Leader & leader, double standoff)
{
  const auto & self = me(ctx);
  const auto & lead = ctx.world.vehicles[static_cast<std::size_t>(leader.index)];
  double need = 0.0;
  if (lead.accel < -0.5) {
    // leader comes to a stop: stop behind its stopping point
    const double room = leader.gap + leader.speed * leader.speed / (-2.0 * lead.accel) - standoff;
    need = self.speed * self.speed / (2.0 * std::max(room, 0.1));
  } else {
    const double dv = self.speed - leader.speed;
    need = dv * dv / (2.0 * std::max(leader.gap - standoff, 0.1));
  }
  return std::clamp(need, 0.0, ctx.limits.max_decel);
}

AgentOutput ego_defensive(const AgentContext & ctx, double target_speed, double reaction_headway)
{
  AgentOutput out = cautious_planner(ctx, target_speed);
  const auto & self = me(ctx);
  const double end_gap = road_end_gap(ctx);
  if (std::isfinite(end_gap)) {
    out.control.accel = std::min(
      out.control.accel, clamp_accel(idm_accel(self.speed, target_speed, end_gap, 0.0, AgentParams{}), ctx.limits));
  }
  if (const auto leader = find_leader(ctx.world, ctx.self)) {
    const bool closing = leader->speed < self.speed;
    if (closing && leader->gap < reaction_headway * self.speed) {
      out.control.accel = std::min(out.control.accel, -required_decel(ctx, *leader));
    }
  }
  return out;
}

}  // namespace critsim
