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

#include "critsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace critsim
{

std::string_view to_string(Role role)
{
  switch (role) {
    case Role::Ego: return "ego";
    case Role::Adversary: return "adversary";
    case Role::Background: return "background";
  }
  return "?";
}

int WorldState::find(const std::string & id) const
{
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    if (vehicles[i].id == id) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

std::vector<PathLane> vehicle_path(const WorldState & world, int self, double horizon)
{
  const auto & v = world.vehicles[self];
  std::vector<PathLane> path{{v.pos.lane_id, -v.pos.s}};
  double base = world.map->lane(v.pos.lane_id).length() - v.pos.s;
  for (const auto & lane : v.route) {
    if (base > horizon) {
      break;
    }
    path.push_back({lane, base});
    base += world.map->lane(lane).length();
  }
  return path;
}

namespace
{

bool lateral_neighbours(const LaneGraph & map, const std::string & a, const std::string & b)
{
  const Lane & la = map.lane(a);
  return la.left == b || la.right == b;
}

}  // namespace

std::optional<Leader> find_leader(const WorldState & world, int self, double horizon)
{
  const auto & me = world.vehicles[self];
  const LaneGraph & map = *world.map;
  std::vector<PathLane> path = vehicle_path(world, self, horizon);
  if (me.changing_lane()) {
    path.push_back({me.lc_source, -map.project_s(me.pos.lane_id, me.pos.s, me.lc_source)});
  }
  std::optional<Leader> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < world.vehicles.size(); ++j) {
    const auto & o = world.vehicles[j];
    if (static_cast<int>(j) == self || !o.active) {
      continue;
    }
    for (const auto & pl : path) {
      double d = std::numeric_limits<double>::infinity();
      if (o.pos.lane_id == pl.lane) {
        d = pl.base + o.pos.s;
      } else if (o.lc_source == pl.lane) {
        d = pl.base + map.project_s(o.pos.lane_id, o.pos.s, pl.lane);
      }
      if (d > 0.0 && d <= horizon && d < best_d) {
        best_d = d;
        best = Leader{static_cast<int>(j), d - 0.5 * (me.size.length + o.size.length), o.speed};
      }
    }
  }
  return best;
}

double bumper_lead(const WorldState & world, int a, int b)
{
  const auto & va = world.vehicles[a];
  const auto & vb = world.vehicles[b];
  const LaneGraph & map = *world.map;
  double offset = std::numeric_limits<double>::quiet_NaN();
  const std::string & la = va.pos.lane_id;
  const std::string & lb = vb.pos.lane_id;
  if (la == lb) {
    offset = va.pos.s - vb.pos.s;
  } else if (lateral_neighbours(map, la, lb) || va.lc_source == lb || vb.lc_source == la) {
    offset = map.project_s(la, va.pos.s, lb) - vb.pos.s;
  } else {
    for (const auto & pl : vehicle_path(world, b, 300.0)) {
      if (pl.lane == la) {
        offset = pl.base + va.pos.s;
        break;
      }
    }
    if (std::isnan(offset)) {
      for (const auto & pl : vehicle_path(world, a, 300.0)) {
        if (pl.lane == lb) {
          offset = -(pl.base + vb.pos.s);
          break;
        }
      }
    }
    if (std::isnan(offset)) {
      offset = dot(va.pose.position() - vb.pose.position(), heading_vector(vb.pose.heading));
    }
  }
  return offset - 0.5 * (va.size.length + vb.size.length);
}

Turn classify_turn(const Lane & lane)
{
  const double total = wrap_angle(lane.centerline.heading_at(lane.length()) - lane.centerline.heading_at(0.0));
  if (total > 0.35) return Turn::Left;
  if (total < -0.35) return Turn::Right;
  return Turn::Straight;
}

std::string choose_successor(const LaneGraph & map, const std::string & lane, Turn turn, std::uint64_t random_draw)
{
  const auto & succ = map.lane(lane).successors;
  if (succ.empty()) {
    return {};
  }
  if (turn == Turn::Random) {
    return succ[random_draw % succ.size()];
  }
  std::string straight;
  for (const auto & s : succ) {
    const Turn t = classify_turn(map.lane(s));
    if (t == turn) {
      return s;
    }
    if (t == Turn::Straight && straight.empty()) {
      straight = s;
    }
  }
  return straight.empty() ? succ.front() : straight;
}

}  // namespace critsim
