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

#include "critsim/sim.hpp"

#include "critsim/error.hpp"
#include "critsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace critsim
{

std::int64_t SimConfig::tick_count() const
{
  return static_cast<std::int64_t>(std::llround(duration / dt));
}

const VehicleRecord * TickRecord::vehicle(const std::string & id) const
{
  for (const auto & v : vehicles) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

const PairRecord * TickRecord::pair(const std::string & a, const std::string & b) const
{
  for (const auto & p : pairs) {
    if ((p.a == a && p.b == b) || (p.a == b && p.b == a)) return &p;
  }
  return nullptr;
}

double shortest_distance(const VehicleState & a, const VehicleState & b)
{
  return shortest_distance(a.box(), b.box());
}

std::vector<CollisionEvent> detect_collisions(const WorldState & world)
{
  std::vector<CollisionEvent> out;
  const auto & vs = world.vehicles;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (!vs[i].active) continue;
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      if (!vs[j].active) continue;
      if (boxes_overlap(vs[i].box(), vs[j].box())) {
        const Vec2 vi = heading_vector(vs[i].pose.heading) * vs[i].speed;
        const Vec2 vj = heading_vector(vs[j].pose.heading) * vs[j].speed;
        out.push_back({world.tick, vs[i].id, vs[j].id, norm(vi - vj)});
      }
    }
  }
  return out;
}

namespace
{

double smoothstep(double x)
{
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

std::optional<double> first_target_speed(const BehaviorNode & node)
{
  if (node.type == BehaviorNode::Type::Atomic) {
    const auto it = node.atomic.config.find("target_speed");
    if (it != node.atomic.config.end() && std::holds_alternative<double>(it->second)) {
      return std::get<double>(it->second);
    }
    return std::nullopt;
  }
  for (const auto & c : node.children) {
    if (auto v = first_target_speed(c)) return v;
  }
  return std::nullopt;
}

struct Command
{
  ControlTarget control;
  double delay{0.0};
  bool valid{false};
  std::optional<Turn> turn;
};

class Simulation
{
public:
  Simulation(const ScenarioSpec & spec, const MapLibrary & maps, const SimConfig & config)
  : spec_(spec), config_(config), map_(maps.get(spec.environment.map_id))
  {
    throw_first(validate_cross_references(spec, &maps), "scenario");
    world_.dt = config.dt;
    world_.friction = spec.environment.weather.friction_multiplier;
    world_.map = map_.get();
    limits_ = VehicleLimits{}.scaled(world_.friction);
    place_vehicles();
    std::vector<BehaviorEngine::Root> roots;
    for (const auto & a : spec.adversaries) {
      roots.push_back({a.id, a.behavior_root});
    }
    engine_ = std::make_unique<BehaviorEngine>(std::move(roots), config.dt);
    history_.resize(world_.vehicles.size());
  }

  SimTrace run()
  {
    SimTrace trace;
    trace.dt = config_.dt;
    trace.seed = spec_.seed;
    trace.map_id = spec_.environment.map_id;
    trace.scenario = serialize_scenario(spec_);
    for (const auto & a : spec_.adversaries) trace.adversaries.push_back(a.id);
    trace.notes = notes_;

    const std::int64_t n = config_.tick_count();
    trace.snapshots.push_back({0, engine_->snapshot_web()});
    for (std::int64_t k = 0; k < n; ++k) {
      world_.tick = k;
      world_.t = static_cast<double>(k) * config_.dt;
      for (auto & ev : detect_collisions(world_)) {
        const auto key = std::minmax(ev.a, ev.b);
        if (collided_.insert({key.first, key.second}).second) {
          vehicle(ev.a).crashed = true;
          vehicle(ev.b).crashed = true;
          if (!config_.halt_on_collision) exchange_momentum(world_.find(ev.a), world_.find(ev.b));
          trace.collisions.push_back(std::move(ev));
        }
      }
      trace.ticks.push_back(record());
      const auto events = tick_engine();
      trace.statuses.insert(trace.statuses.end(), events.begin(), events.end());
      if (k + 1 < n) {
        integrate();
      }
    }
    trace.snapshots.push_back({n - 1, engine_->snapshot_web()});
    trace.notes = notes_;
    return trace;
  }

private:
  VehicleState & vehicle(const std::string & id) { return world_.vehicles[world_.find(id)]; }

  void place_vehicles()
  {
    const LaneGraph & map = *map_;
    LanePosition ego_pos = find_ego_spawn(map, spec_.ego.placement, spec_.seed, config_.spawn);
    VehicleState ego;
    ego.id = kEgoId;
    ego.role = Role::Ego;
    ego.size = footprint_of(VehicleClass::Sedan);
    ego.pos = ego_pos;
    ego.speed = spec_.ego.target_speed;
    ego.turn = Turn::Straight;
    add_vehicle(std::move(ego), mass_of(VehicleClass::Sedan));

    for (const auto & a : spec_.adversaries) {
      const Footprint size = footprint_of(a.vehicle_class);
      LanePosition pos;
      try {
        pos = resolve_relative_placement(map, ego_pos, footprint_of(VehicleClass::Sedan), a.placement, size);
      } catch (const Error & e) {
        throw Error(ErrorKind::SpawnInfeasible, "adversary '" + a.id + "': " + e.what());
      }
      VehicleState v;
      v.id = a.id;
      v.role = Role::Adversary;
      v.size = size;
      v.pos = pos;
      v.speed = spec_.ego.target_speed;
      if (a.placement.relation == Relation::OppositeApproach) {
        v.speed = first_target_speed(a.behavior_root).value_or(spec_.ego.target_speed);
      }
      v.turn = Turn::Straight;
      v.pose = map.pose_at(v.pos);
      for (const auto & other : world_.vehicles) {
        if (boxes_overlap(v.box(), other.box())) {
          throw Error(ErrorKind::SpawnInfeasible, "adversary '" + a.id + "' overlaps '" + other.id + "'");
        }
      }
      add_vehicle(std::move(v), mass_of(a.vehicle_class));
    }
    place_background();
  }

  void add_vehicle(VehicleState v, double mass)
  {
    mass_.push_back(mass);
    impulse_.push_back(0.0);
    v.pose = map_->pose_at(v.pos);
    rngs_.push_back(Rng::substream(spec_.seed, "route/" + v.id));
    world_.vehicles.push_back(std::move(v));
    ensure_route(world_.vehicles.size() - 1);
  }

  bool on_scenario_lane(const std::string & lane) const
  {
    for (const auto & o : world_.vehicles) {
      if (o.active && o.role != Role::Background && (o.pos.lane_id == lane || o.lc_source == lane)) return true;
    }
    return false;
  }

  bool clear_of_others(const Pose & p, double clearance, double scenario_clearance = 0.0) const
  {
    for (const auto & o : world_.vehicles) {
      const double need = o.role == Role::Background ? clearance : std::max(clearance, scenario_clearance);
      if (o.active && norm(o.pose.position() - p.position()) < need) {
        return false;
      }
    }
    return true;
  }

  void place_background()
  {
    const int wanted = spec_.background.count;
    if (wanted <= 0) return;
    const LaneGraph & map = *map_;
    const Vec2 ego = world_.vehicles[0].pose.position();
    std::vector<LanePosition> candidates;
    std::vector<const Lane *> lanes;
    for (const auto & l : map.lanes()) lanes.push_back(&l);
    std::sort(lanes.begin(), lanes.end(), [](const Lane * a, const Lane * b) { return a->id < b->id; });
    for (const Lane * lane : lanes) {
      if (map.is_connector(lane->id)) continue;
      for (double s = 5.0; s <= lane->length() - 5.0; s += 5.0) {
        const Pose p = lane->centerline.pose_at(s);
        if (norm(p.position() - ego) <= spec_.background.spawn_radius) {
          candidates.push_back({lane->id, s, 0.0});
        }
      }
    }
    Rng rng = Rng::substream(spec_.seed, "background");
    int placed = 0;
    while (placed < wanted && !candidates.empty()) {
      const std::size_t pick = rng.index(candidates.size());
      const LanePosition pos = candidates[pick];
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
      const Pose p = map.pose_at(pos);
      if (on_scenario_lane(pos.lane_id)) continue;
      if (!clear_of_others(p, config_.background_clearance, config_.scenario_clearance)) continue;
      VehicleState v;
      v.id = "bg_" + std::to_string(placed + 1);
      v.role = Role::Background;
      v.size = footprint_of(VehicleClass::Sedan);
      v.pos = pos;
      v.turn = Turn::Random;
      const double factor = rng.uniform(0.7, 0.9);
      roamer_speed_[v.id] = map.lane(pos.lane_id).speed_limit * factor;
      v.speed = roamer_speed_[v.id];
      add_vehicle(std::move(v), mass_of(VehicleClass::Sedan));
      ++placed;
    }
    if (placed < wanted) {
      notes_.push_back(
        "background reduced from " + std::to_string(wanted) + " to " + std::to_string(placed) +
        " vehicles (no more free spawn points)");
    }
  }

  void ensure_route(std::size_t i, double horizon = 300.0)
  {
    auto & v = world_.vehicles[i];
    const LaneGraph & map = *map_;
    double remaining = map.lane(v.pos.lane_id).length() - v.pos.s;
    for (const auto & l : v.route) remaining += map.lane(l).length();
    while (remaining < horizon) {
      const std::string & last = v.route.empty() ? v.pos.lane_id : v.route.back();
      const std::string next = choose_successor(map, last, v.turn, rngs_[i].next());
      if (next.empty()) break;
      v.route.push_back(next);
      remaining += map.lane(next).length();
    }
  }

  void request_turn(std::size_t i, Turn turn)
  {
    auto & v = world_.vehicles[i];
    if (v.turn == turn) return;
    v.turn = turn;
    const LaneGraph & map = *map_;
    if (map.is_connector(v.pos.lane_id)) return;
    for (std::size_t r = 0; r < v.route.size(); ++r) {
      if (map.is_connector(v.route[r])) {
        v.route.resize(r);
        break;
      }
    }
    ensure_route(i);
  }

  // --- conditions -----------------------------------------------------------

  bool eval(const Condition & c, int owner, double elapsed) const
  {
    const auto & me = world_.vehicles[owner];
    const auto other = [&]() -> int {
      const int j = world_.find(c.vehicle);
      return (j >= 0 && world_.vehicles[j].active) ? j : -1;
    };
    switch (c.op) {
      case Condition::Op::SpeedBelow: return me.speed <= c.value;
      case Condition::Op::SameLaneAs: {
        const int j = other();
        return j >= 0 && !me.changing_lane() && me.pos.lane_id == world_.vehicles[j].pos.lane_id;
      }
      case Condition::Op::GapBelow: {
        const int j = other();
        return j >= 0 && shortest_distance(me, world_.vehicles[j]) < c.value;
      }
      case Condition::Op::LeadAbove: {
        const int j = other();
        return j >= 0 && bumper_lead(world_, owner, j) >= c.value;
      }
      case Condition::Op::PassedPosition:
        if (me.pos.lane_id == c.lane) return me.pos.s >= c.value;
        return std::find(me.visited.begin(), me.visited.end(), c.lane) != me.visited.end();
      case Condition::Op::Elapsed: return elapsed + 1e-9 >= c.value;
      case Condition::Op::And:
        return std::all_of(c.children.begin(), c.children.end(), [&](const Condition & ch) { return eval(ch, owner, elapsed); });
      case Condition::Op::Or:
        return std::any_of(c.children.begin(), c.children.end(), [&](const Condition & ch) { return eval(ch, owner, elapsed); });
      case Condition::Op::Not: return !eval(c.children.front(), owner, elapsed);
    }
    return false;
  }

  // --- control --------------------------------------------------------------

  AgentOutput run_agent(const AtomicBehavior & a, int self, Command & cmd)
  {
    const AgentContext ctx{world_, self, limits_};
    const ParamMap & cfg = a.config;
    const double speed = param_number(cfg, "target_speed", spec_.ego.target_speed);
    const double aggr = param_number(cfg, "aggressiveness", 0.0);
    cmd.delay = 0.0;
    if (a.agent == "acc") {
      cmd.delay = config_.acc_reaction_delay;
      return acc_follow(ctx, param_string(cfg, "target"), speed, aggr);
    }
    if (a.agent == "cut_in") {
      return cut_in(ctx, param_string(cfg, "victim"), param_number(cfg, "trigger_gap", 10.0), aggr, speed);
    }
    if (a.agent == "brake") {
      const double decel = param_string(cfg, "deceleration") == "max" ? 0.0 : param_number(cfg, "deceleration", a.kind == "StopVehicle" ? 3.0 : 0.0);
      return a.kind == "StopVehicle" ? comfortable_stop(ctx, decel) : sudden_brake(ctx, decel);
    }
    if (a.agent == "hold") return idle_hold(ctx);
    if (a.agent == "overtake") return overtake(ctx, param_string(cfg, "target"), speed);
    if (a.agent == "runner") return run_red_light(ctx, speed);
    if (a.agent == "route" || a.agent == "cautious") {
      const std::string turn = param_string(cfg, "turn", "straight");
      cmd.turn = turn == "left" ? Turn::Left : turn == "right" ? Turn::Right : Turn::Straight;
      if (a.agent == "cautious") {
        cmd.delay = config_.cautious_reaction_delay;
        return cautious_planner(ctx, speed);
      }
      return route_follow(ctx, speed);
    }
    AgentOutput out;
    out.failure = "no agent '" + a.agent + "'";
    return out;
  }

  std::vector<StatusEvent> tick_engine()
  {
    commands_.assign(world_.vehicles.size(), Command{});
    const auto leaf = [&](int, const BehaviorEngine::NodeState & node, double elapsed) -> LeafResult {
      const int self = world_.find(node.owner);
      if (self < 0 || !world_.vehicles[self].active) {
        return {BehaviorStatus::Failed, "vehicle '" + node.owner + "' despawned"};
      }
      const AtomicBehavior & a = *node.atomic;
      Command & cmd = commands_[self];
      const AgentOutput out = run_agent(a, self, cmd);
      cmd.control = out.control;
      cmd.valid = true;
      if (!out.failure.empty()) {
        return {BehaviorStatus::Failed, out.failure};
      }
      if (a.fail && eval(*a.fail, self, elapsed)) {
        return {BehaviorStatus::Failed, "fail condition"};
      }
      std::optional<Condition> success = a.success;
      if (!success) {
        const KindEntry * entry = BehaviorRegistry::builtin().find(a.kind);
        if (entry != nullptr && entry->default_success) success = entry->default_success(a.config);
      }
      if (success && eval(*success, self, elapsed)) {
        return {BehaviorStatus::Succeeded, ""};
      }
      return {};
    };
    auto events = engine_->tick(world_.tick, leaf);

    for (std::size_t i = 0; i < world_.vehicles.size(); ++i) {
      auto & v = world_.vehicles[i];
      Command & cmd = commands_[i];
      if (!v.active || cmd.valid) continue;
      const AgentContext ctx{world_, static_cast<int>(i), limits_};
      if (v.role == Role::Ego) {
        cmd.control = ego_defensive(ctx, spec_.ego.target_speed, config_.reaction_headway).control;
        cmd.delay = config_.ego_reaction_delay;
      } else if (v.role == Role::Background) {
        cmd.control = cautious_planner(ctx, roamer_speed_[v.id]).control;
        cmd.delay = config_.cautious_reaction_delay;
      } else {
        // Adversary whose behavior tree has finished: hand over to the
        // cautious planner at the lane speed limit.
        cmd.control = cautious_planner(ctx, map_->lane(v.pos.lane_id).speed_limit).control;
        cmd.delay = config_.cautious_reaction_delay;
      }
      cmd.valid = true;
    }
    return events;
  }

  // --- integration ----------------------------------------------------------

  void start_lane_change(VehicleState & v, LaneChange dir, double duration)
  {
    const Lane & lane = map_->lane(v.pos.lane_id);
    const std::string & target = dir == LaneChange::BeginLeft ? lane.left : lane.right;
    if (target.empty() || v.changing_lane()) return;
    const Projection proj = map_->lane(target).centerline.project(v.pose.position());
    v.lc_source = v.pos.lane_id;
    v.lc_elapsed = 0.0;
    v.lc_duration = duration;
    v.lc_offset0 = proj.lateral;
    v.pos = {target, proj.s, proj.lateral};
    v.route.clear();
  }

  // Perfectly inelastic impact: both keep the component of the common
  // velocity along their own heading.
  void exchange_momentum(std::size_t a, std::size_t b)
  {
    const auto & va = world_.vehicles[a];
    const auto & vb = world_.vehicles[b];
    const Vec2 da = heading_vector(va.pose.heading);
    const Vec2 db = heading_vector(vb.pose.heading);
    const Vec2 common = (da * (mass_[a] * va.speed) + db * (mass_[b] * vb.speed)) * (1.0 / (mass_[a] + mass_[b]));
    impulse_[a] += std::max(0.0, dot(common, da)) - va.speed;
    impulse_[b] += std::max(0.0, dot(common, db)) - vb.speed;
  }

  void integrate()
  {
    const double dt = config_.dt;
    for (std::size_t i = 0; i < world_.vehicles.size(); ++i) {
      auto & v = world_.vehicles[i];
      if (!v.active) continue;
      const Command & cmd = commands_[i];
      auto & hist = history_[i];
      hist.push_back(cmd.control.accel);
      if (v.crashed && config_.halt_on_collision) {
        v.accel = -v.speed / dt;
        v.speed = 0.0;
        continue;
      }
      if (cmd.turn) request_turn(i, *cmd.turn);
      if (cmd.control.lane_change != LaneChange::Keep) {
        start_lane_change(v, cmd.control.lane_change, cmd.control.lane_change_duration);
      }

      const auto lag = static_cast<std::int64_t>(std::llround(cmd.delay / dt));
      const auto idx = static_cast<std::int64_t>(hist.size()) - 1 - lag;
      const double a = idx >= 0 ? hist[static_cast<std::size_t>(idx)] : 0.0;
      double v_next = std::max(0.0, v.speed + impulse_[i] + a * dt);
      impulse_[i] = 0.0;
      if (v_next < 1e-9) v_next = 0.0;
      v.accel = (v_next - v.speed) / dt;
      v.speed = v_next;
      v.pos.s += v_next * dt;

      const double lateral_before = v.pos.lateral_offset;
      if (v.changing_lane()) {
        v.lc_elapsed += dt;
        const double p = v.lc_elapsed / v.lc_duration;
        if (p >= 1.0 - 1e-9) {
          v.pos.lateral_offset = 0.0;
          v.lc_source.clear();
        } else {
          v.pos.lateral_offset = v.lc_offset0 * (1.0 - smoothstep(p));
        }
      }
      const double lat_vel = (v.pos.lateral_offset - lateral_before) / dt;

      while (v.pos.s > map_->lane(v.pos.lane_id).length()) {
        ensure_route(i);
        if (v.route.empty()) {
          if (v.role == Role::Ego) {
            v.pos.s = map_->lane(v.pos.lane_id).length();
            v.speed = 0.0;
          } else {
            despawn(i);
          }
          break;
        }
        v.pos.s -= map_->lane(v.pos.lane_id).length();
        v.visited.push_back(v.pos.lane_id);
        v.pos.lane_id = v.route.front();
        v.route.erase(v.route.begin());
        if (v.changing_lane()) {
          // A lane change that spills over a lane boundary finishes on the
          // successor; the source lane no longer runs alongside.
          v.lc_source = v.visited.back();
        }
      }
      if (!v.active) continue;
      v.pose = map_->pose_at(v.pos);
      if (v.speed > 0.0) {
        v.pose.heading = wrap_angle(v.pose.heading + std::atan2(lat_vel, v.speed));
      }
      ensure_route(i);
    }
  }

  void despawn(std::size_t i)
  {
    auto & v = world_.vehicles[i];
    v.active = false;
    if (v.role != Role::Background) return;
    // Respawn somewhere free on the map.
    const LaneGraph & map = *map_;
    Rng rng = Rng::substream(spec_.seed, "respawn/" + v.id + "/" + std::to_string(world_.tick));
    std::vector<const Lane *> lanes;
    for (const auto & l : map.lanes()) {
      if (!map.is_connector(l.id)) lanes.push_back(&l);
    }
    std::sort(lanes.begin(), lanes.end(), [](const Lane * a, const Lane * b) { return a->id < b->id; });
    for (int attempt = 0; attempt < 50 && !lanes.empty(); ++attempt) {
      const Lane * lane = lanes[rng.index(lanes.size())];
      const double s = rng.uniform(0.0, 0.5 * lane->length());
      const Pose p = lane->centerline.pose_at(s);
      if (on_scenario_lane(lane->id)) continue;
      if (!clear_of_others(p, 40.0, config_.scenario_clearance)) continue;
      v.pos = {lane->id, s, 0.0};
      v.pose = p;
      v.route.clear();
      v.lc_source.clear();
      v.speed = roamer_speed_[v.id];
      v.accel = 0.0;
      v.active = true;
      history_[i].clear();
      notes_.push_back("tick " + std::to_string(world_.tick) + ": " + v.id + " respawned on " + lane->id);
      return;
    }
  }

  TickRecord record() const
  {
    TickRecord r;
    r.k = world_.tick;
    r.t = world_.t;
    for (const auto & v : world_.vehicles) {
      if (!v.active) continue;
      r.vehicles.push_back(
        {v.id, v.role, v.pose.x, v.pose.y, v.pose.heading, v.pos.lane_id, v.pos.s, v.pos.lateral_offset, v.speed,
         v.accel, v.size.length, v.size.width, v.changing_lane(), v.crashed});
    }
    const auto & vs = world_.vehicles;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      for (std::size_t j = i + 1; j < vs.size(); ++j) {
        if (!vs[i].active || !vs[j].active) continue;
        const bool ego_pair = vs[i].role == Role::Ego && vs[j].role == Role::Adversary;
        if (ego_pair || config_.all_pairs) {
          r.pairs.push_back({vs[i].id, vs[j].id, shortest_distance(vs[i], vs[j])});
        }
      }
    }
    for (const auto & in : map_->intersections()) {
      for (const auto & a : in.approaches) {
        r.signals.push_back({a.lane, signal_color_at(*map_, a.lane, world_.t)});
      }
    }
    return r;
  }

  const ScenarioSpec & spec_;
  SimConfig config_;
  std::shared_ptr<const LaneGraph> map_;
  WorldState world_;
  VehicleLimits limits_;
  std::unique_ptr<BehaviorEngine> engine_;
  std::vector<Rng> rngs_;
  std::vector<std::vector<double>> history_;
  std::vector<double> mass_;
  std::vector<double> impulse_;  // speed change from impacts, applied on the next step
  std::vector<Command> commands_;
  std::map<std::string, double> roamer_speed_;
  std::set<std::pair<std::string, std::string>> collided_;
  std::vector<std::string> notes_;
};

}  // namespace

SimTrace run_scenario(const ScenarioSpec & spec, const MapLibrary & maps, const SimConfig & config)
{
  if (!(config.duration > 0.0) || !(config.dt > 0.0)) {
    throw Error(ErrorKind::Range, "simulation duration and dt must be positive");
  }
  Simulation sim(spec, maps, config);
  return sim.run();
}

}  // namespace critsim
