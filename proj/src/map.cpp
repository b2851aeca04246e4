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

#include "critsim/map.hpp"

#include "critsim/error.hpp"
#include "critsim/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

namespace critsim
{

using nlohmann::json;

std::string_view to_string(SignalColor color) { return color == SignalColor::Red ? "red" : "green"; }

std::string_view to_string(RoadContext context)
{
  switch (context) {
    case RoadContext::StraightLane: return "straight-lane";
    case RoadContext::IntersectionApproach: return "intersection-approach";
    case RoadContext::Curve: return "curve";
  }
  return "?";
}

std::optional<RoadContext> road_context_from_string(std::string_view text)
{
  if (text == "straight-lane") return RoadContext::StraightLane;
  if (text == "intersection-approach") return RoadContext::IntersectionApproach;
  if (text == "curve") return RoadContext::Curve;
  return std::nullopt;
}

std::string_view to_string(Relation relation)
{
  switch (relation) {
    case Relation::Left: return "left";
    case Relation::Right: return "right";
    case Relation::Behind: return "behind";
    case Relation::Ahead: return "ahead";
    case Relation::OppositeApproach: return "opposite-approach";
  }
  return "?";
}

std::optional<Relation> relation_from_string(std::string_view text)
{
  if (text == "left") return Relation::Left;
  if (text == "right") return Relation::Right;
  if (text == "behind") return Relation::Behind;
  if (text == "ahead") return Relation::Ahead;
  if (text == "opposite-approach") return Relation::OppositeApproach;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Loading

namespace
{

[[noreturn]] void map_error(ErrorKind kind, const std::string & msg)
{
  throw Error(kind, "map: " + msg);
}

template <typename T>
T required(const json & obj, const char * key, const std::string & where)
{
  if (!obj.is_object() || !obj.contains(key)) {
    map_error(ErrorKind::Syntax, where + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception &) {
    map_error(ErrorKind::Syntax, where + ": field '" + key + "' has the wrong type");
  }
}

void reject_unknown(const json & obj, std::initializer_list<const char *> allowed, const std::string & where)
{
  for (const auto & [key, value] : obj.items()) {
    (void)value;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char * a) { return key == a; })) {
      map_error(ErrorKind::Syntax, where + ": unknown field '" + key + "'");
    }
  }
}

}  // namespace

LaneGraph LaneGraph::build(std::string id, std::vector<Lane> lanes, std::vector<Intersection> intersections)
{
  LaneGraph g;
  g.id_ = std::move(id);
  g.lanes_ = std::move(lanes);
  g.intersections_ = std::move(intersections);
  g.index();
  return g;
}

LaneGraph LaneGraph::from_json_text(const std::string & text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error & e) {
    map_error(ErrorKind::Syntax, std::string("parse error at byte ") + std::to_string(e.byte));
  }
  if (!doc.is_object()) {
    map_error(ErrorKind::Syntax, "document must be an object");
  }
  reject_unknown(
    doc, {"schema_version", "id", "description", "curve_radius", "lanes", "intersections"}, "map");
  if (required<int>(doc, "schema_version", "map") != 1) {
    map_error(ErrorKind::Range, "unsupported schema_version");
  }
  std::vector<Lane> lanes;
  for (const auto & lj : required<json>(doc, "lanes", "map")) {
    const std::string where = "lane";
    reject_unknown(lj, {"id", "centerline", "width", "speed_limit", "successors", "left", "right"}, where);
    Lane lane;
    lane.id = required<std::string>(lj, "id", where);
    std::vector<Vec2> pts;
    for (const auto & p : required<json>(lj, "centerline", lane.id)) {
      if (!p.is_array() || p.size() != 2) {
        map_error(ErrorKind::Syntax, lane.id + ": centerline points are [x, y] pairs");
      }
      pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (pts.size() < 2) {
      map_error(ErrorKind::Range, lane.id + ": centerline needs at least two points");
    }
    lane.centerline = Polyline(std::move(pts));
    lane.width = required<double>(lj, "width", lane.id);
    lane.speed_limit = required<double>(lj, "speed_limit", lane.id);
    lane.successors = required<std::vector<std::string>>(lj, "successors", lane.id);
    lane.left = lj.value("left", std::string{});
    lane.right = lj.value("right", std::string{});
    lanes.push_back(std::move(lane));
  }
  std::vector<Intersection> inters;
  if (doc.contains("intersections")) {
    for (const auto & ij : doc.at("intersections")) {
      reject_unknown(ij, {"id", "cycle", "approaches", "conflicts"}, "intersection");
      Intersection in;
      in.id = required<std::string>(ij, "id", "intersection");
      in.cycle = required<double>(ij, "cycle", in.id);
      for (const auto & aj : required<json>(ij, "approaches", in.id)) {
        reject_unknown(aj, {"lane", "green"}, in.id + " approach");
        SignalApproach a;
        a.lane = required<std::string>(aj, "lane", in.id);
        for (const auto & w : required<json>(aj, "green", a.lane)) {
          a.green.emplace_back(w.at(0).get<double>(), w.at(1).get<double>());
        }
        in.approaches.push_back(std::move(a));
      }
      for (const auto & c : required<json>(ij, "conflicts", in.id)) {
        in.conflicts.emplace_back(c.at(0).get<std::string>(), c.at(1).get<std::string>());
      }
      inters.push_back(std::move(in));
    }
  }
  LaneGraph g = build(required<std::string>(doc, "id", "map"), std::move(lanes), std::move(inters));
  g.description_ = doc.value("description", std::string{});
  if (doc.contains("curve_radius")) {
    g.curve_radius_ = doc.at("curve_radius").get<double>();
  }
  const auto problems = g.validate();
  if (!problems.empty()) {
    map_error(ErrorKind::Range, g.id_ + ": " + problems.front());
  }
  return g;
}

LaneGraph LaneGraph::from_file(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    map_error(ErrorKind::Reference, "cannot open " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void LaneGraph::index()
{
  lane_index_.clear();
  predecessors_.clear();
  approach_index_.clear();
  connector_index_.clear();
  for (std::size_t i = 0; i < lanes_.size(); ++i) {
    lane_index_[lanes_[i].id] = i;
    predecessors_[lanes_[i].id];
  }
  for (const auto & lane : lanes_) {
    for (const auto & s : lane.successors) {
      predecessors_[s].push_back(lane.id);
    }
  }
  for (auto & [id, preds] : predecessors_) {
    (void)id;
    std::sort(preds.begin(), preds.end());
  }
  for (std::size_t i = 0; i < intersections_.size(); ++i) {
    for (std::size_t j = 0; j < intersections_[i].approaches.size(); ++j) {
      const auto & lane_id = intersections_[i].approaches[j].lane;
      approach_index_[lane_id] = {i, j};
      if (const Lane * l = find_lane(lane_id)) {
        for (const auto & c : l->successors) {
          connector_index_[c] = i;
        }
      }
    }
  }
}

const Lane * LaneGraph::find_lane(const std::string & id) const
{
  const auto it = lane_index_.find(id);
  return it == lane_index_.end() ? nullptr : &lanes_[it->second];
}

const Lane & LaneGraph::lane(const std::string & id) const
{
  const Lane * l = find_lane(id);
  if (l == nullptr) {
    map_error(ErrorKind::Reference, id_ + ": unknown lane '" + id + "'");
  }
  return *l;
}

const std::vector<std::string> & LaneGraph::predecessors(const std::string & id) const
{
  static const std::vector<std::string> empty;
  const auto it = predecessors_.find(id);
  return it == predecessors_.end() ? empty : it->second;
}

const SignalApproach * LaneGraph::approach(const std::string & lane_id) const
{
  const auto it = approach_index_.find(lane_id);
  if (it == approach_index_.end()) {
    return nullptr;
  }
  return &intersections_[it->second.first].approaches[it->second.second];
}

const Intersection * LaneGraph::intersection_of_approach(const std::string & lane_id) const
{
  const auto it = approach_index_.find(lane_id);
  return it == approach_index_.end() ? nullptr : &intersections_[it->second.first];
}

const Intersection * LaneGraph::intersection_of_connector(const std::string & lane_id) const
{
  const auto it = connector_index_.find(lane_id);
  return it == connector_index_.end() ? nullptr : &intersections_[it->second];
}

bool LaneGraph::is_connector(const std::string & lane_id) const { return connector_index_.count(lane_id) != 0; }

bool LaneGraph::connectors_conflict(const std::string & a, const std::string & b) const
{
  const Intersection * in = intersection_of_connector(a);
  if (in == nullptr || in != intersection_of_connector(b)) {
    return false;
  }
  for (const auto & [x, y] : in->conflicts) {
    if ((x == a && y == b) || (x == b && y == a)) {
      return true;
    }
  }
  return false;
}

Pose LaneGraph::pose_at(const LanePosition & pos) const
{
  return lane(pos.lane_id).centerline.pose_at(pos.s, pos.lateral_offset);
}

double LaneGraph::project_s(const std::string & from_lane, double s, const std::string & to_lane) const
{
  if (from_lane == to_lane) {
    return s;
  }
  const Pose p = lane(from_lane).centerline.pose_at(s);
  return lane(to_lane).centerline.project(p.position()).s;
}

namespace
{

bool window_green(const std::vector<std::pair<double, double>> & green, double t)
{
  return std::any_of(green.begin(), green.end(), [t](const auto & w) { return t >= w.first && t < w.second; });
}

}  // namespace

std::vector<std::string> LaneGraph::validate() const
{
  std::vector<std::string> problems;
  std::set<std::string> seen;
  for (const auto & lane : lanes_) {
    if (!seen.insert(lane.id).second) {
      problems.push_back("duplicate lane id '" + lane.id + "'");
    }
    if (!(lane.width > 0.0)) {
      problems.push_back(lane.id + ": width must be positive");
    }
    if (!(lane.speed_limit > 0.0)) {
      problems.push_back(lane.id + ": speed_limit must be positive");
    }
    if (!lane.centerline.has_monotone_arc_length()) {
      problems.push_back(lane.id + ": centerline has repeated points");
    }
    if (!lane.centerline.is_simple()) {
      problems.push_back(lane.id + ": centerline self-intersects");
    }
    for (const auto & s : lane.successors) {
      if (find_lane(s) == nullptr) {
        problems.push_back(lane.id + ": successor '" + s + "' does not exist");
      }
    }
    for (const auto * side : {&lane.left, &lane.right}) {
      if (!side->empty() && find_lane(*side) == nullptr) {
        problems.push_back(lane.id + ": neighbour '" + *side + "' does not exist");
      }
    }
  }
  for (const auto & in : intersections_) {
    if (!(in.cycle > 0.0)) {
      problems.push_back(in.id + ": cycle must be positive");
    }
    for (const auto & a : in.approaches) {
      if (find_lane(a.lane) == nullptr) {
        problems.push_back(in.id + ": approach lane '" + a.lane + "' does not exist");
      }
      for (const auto & [lo, hi] : a.green) {
        if (!(lo >= 0.0 && hi > lo && hi <= in.cycle)) {
          problems.push_back(in.id + ": green window of '" + a.lane + "' outside the cycle");
        }
      }
    }
    for (const auto & [a, b] : in.conflicts) {
      const Lane * la = find_lane(a);
      const Lane * lb = find_lane(b);
      if (la == nullptr || lb == nullptr) {
        problems.push_back(in.id + ": conflict names unknown lane " + a + "/" + b);
        continue;
      }
      const double reach = 0.5 * (la->width + lb->width);
      if (!(polyline_distance(la->centerline, lb->centerline) < reach)) {
        problems.push_back(in.id + ": conflict " + a + "/" + b + " does not overlap geometrically");
      }
    }
    // Conflict safety of the signal program, swept at tick resolution.
    if (problems.empty()) {
      constexpr double dt = 0.05;
      const auto ticks = static_cast<long>(std::ceil(in.cycle / dt));
      for (std::size_t i = 0; i < in.approaches.size(); ++i) {
        for (std::size_t j = i + 1; j < in.approaches.size(); ++j) {
          const auto & ai = in.approaches[i];
          const auto & aj = in.approaches[j];
          bool conflicting = false;
          for (const auto & ci : lane(ai.lane).successors) {
            for (const auto & cj : lane(aj.lane).successors) {
              conflicting = conflicting || connectors_conflict(ci, cj);
            }
          }
          if (!conflicting) {
            continue;
          }
          for (long k = 0; k < ticks; ++k) {
            const double t = static_cast<double>(k) * dt;
            if (window_green(ai.green, t) && window_green(aj.green, t)) {
              problems.push_back(
                in.id + ": conflicting approaches " + ai.lane + " and " + aj.lane + " both green at t=" +
                std::to_string(t));
              break;
            }
          }
        }
      }
    }
  }
  return problems;
}

MapLibrary MapLibrary::load_directory(const std::filesystem::path & dir)
{
  MapLibrary lib;
  std::vector<std::filesystem::path> files;
  for (const auto & entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto & f : files) {
    lib.add(LaneGraph::from_file(f));
  }
  return lib;
}

void MapLibrary::add(LaneGraph map)
{
  auto id = map.id();
  maps_[id] = std::make_shared<const LaneGraph>(std::move(map));
}

std::shared_ptr<const LaneGraph> MapLibrary::get(const std::string & id) const
{
  const auto it = maps_.find(id);
  if (it == maps_.end()) {
    throw Error(ErrorKind::Reference, "unknown map '" + id + "'");
  }
  return it->second;
}

std::vector<std::string> MapLibrary::ids() const
{
  std::vector<std::string> out;
  for (const auto & [id, m] : maps_) {
    (void)m;
    out.push_back(id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Queries

SignalColor signal_color_at(const LaneGraph & map, const std::string & lane_id, double t)
{
  const SignalApproach * a = map.approach(lane_id);
  if (a == nullptr) {
    throw Error(ErrorKind::NotSignalized, "lane '" + lane_id + "' is not a signalised approach");
  }
  const double cycle = map.intersection_of_approach(lane_id)->cycle;
  double phase = std::fmod(t, cycle);
  if (phase < 0.0) {
    phase += cycle;
  }
  return window_green(a->green, phase) ? SignalColor::Green : SignalColor::Red;
}

std::vector<LanePosition> ego_spawn_candidates(
  const LaneGraph & map, const PlacementQuery & query, const SpawnConfig & config)
{
  std::vector<const Lane *> lanes;
  for (const auto & l : map.lanes()) {
    lanes.push_back(&l);
  }
  std::sort(lanes.begin(), lanes.end(), [](const Lane * a, const Lane * b) { return a->id < b->id; });

  std::vector<LanePosition> out;
  for (const Lane * lane : lanes) {
    if (map.is_connector(lane->id)) {
      continue;
    }
    if (query.require_left_neighbor && lane->left.empty()) {
      continue;
    }
    if (query.require_right_neighbor && lane->right.empty()) {
      continue;
    }
    const double len = lane->length();
    const auto & line = lane->centerline;
    switch (query.context) {
      case RoadContext::StraightLane: {
        const double hi = std::min(config.straight_max_s, len - config.min_room_ahead);
        for (double s = config.straight_min_s; s <= hi; s += config.grid_step) {
          if (line.turning_between(s - config.straight_half_window, s + config.straight_half_window) <=
              config.straight_max_turn) {
            out.push_back({lane->id, s, 0.0});
          }
        }
        break;
      }
      case RoadContext::Curve: {
        for (double s = config.curve_half_window; s <= len - config.min_room_ahead; s += config.grid_step) {
          if (line.turning_between(s - config.curve_half_window, s + config.curve_half_window) >=
              config.curve_min_turn) {
            out.push_back({lane->id, s, 0.0});
          }
        }
        break;
      }
      case RoadContext::IntersectionApproach: {
        if (map.approach(lane->id) == nullptr) {
          break;
        }
        if (query.green_on_arrival) {
          bool green = true;
          for (double t = 0.0; t <= config.green_horizon && green; t += 0.05) {
            green = signal_color_at(map, lane->id, t) == SignalColor::Green;
          }
          if (!green) {
            break;
          }
        }
        const double lo = std::max(0.0, len - config.approach_max);
        const double hi = len - config.approach_min;
        for (double s = lo; s <= hi + 1e-9; s += config.grid_step) {
          out.push_back({lane->id, s, 0.0});
        }
        break;
      }
    }
  }
  return out;
}

LanePosition find_ego_spawn(
  const LaneGraph & map, const PlacementQuery & query, std::uint64_t seed, const SpawnConfig & config)
{
  const auto candidates = ego_spawn_candidates(map, query, config);
  if (candidates.empty()) {
    throw Error(
      ErrorKind::NoMatch,
      "map '" + map.id() + "' has no spawn point for context " + std::string(to_string(query.context)));
  }
  Rng rng = Rng::substream(seed, "ego-spawn");
  return candidates[rng.index(candidates.size())];
}

std::vector<std::string> conflicting_approaches(const LaneGraph & map, const std::string & lane_id)
{
  const Intersection * in = map.intersection_of_approach(lane_id);
  if (in == nullptr) {
    return {};
  }
  const Lane & own = map.lane(lane_id);
  const double own_heading = own.centerline.heading_at(own.length());
  struct Candidate
  {
    bool from_left;
    std::string lane;
  };
  std::vector<Candidate> found;
  for (const auto & a : in->approaches) {
    if (a.lane == lane_id) {
      continue;
    }
    bool conflicting = false;
    for (const auto & c0 : own.successors) {
      for (const auto & c1 : map.lane(a.lane).successors) {
        conflicting = conflicting || map.connectors_conflict(c0, c1);
      }
    }
    if (!conflicting) {
      continue;
    }
    const Lane & other = map.lane(a.lane);
    const double h = other.centerline.heading_at(other.length());
    // Traffic entering from the left travels toward our right.
    const bool from_left = cross(heading_vector(own_heading), heading_vector(h)) < 0.0;
    found.push_back({from_left, a.lane});
  }
  std::sort(found.begin(), found.end(), [](const Candidate & x, const Candidate & y) {
    if (x.from_left != y.from_left) return x.from_left;
    return x.lane < y.lane;
  });
  std::vector<std::string> out;
  for (auto & c : found) {
    out.push_back(std::move(c.lane));
  }
  return out;
}

namespace
{

[[noreturn]] void unsatisfiable(const RelativePlacement & rel, const std::string & why)
{
  throw Error(
    ErrorKind::Unsatisfiable, "placement '" + std::string(to_string(rel.relation)) + "' unsatisfiable: " + why);
}

// Moves a position by ds along the lane graph, preferring the first
// successor/predecessor in id order. nullopt when the graph ends.
std::optional<LanePosition> shift_along(const LaneGraph & map, LanePosition pos, double ds)
{
  double s = pos.s + ds;
  std::string lane_id = pos.lane_id;
  for (int guard = 0; guard < 64; ++guard) {
    const Lane & lane = map.lane(lane_id);
    if (s < 0.0) {
      const auto & preds = map.predecessors(lane_id);
      if (preds.empty()) return std::nullopt;
      lane_id = preds.front();
      s += map.lane(lane_id).length();
      continue;
    }
    if (s > lane.length()) {
      if (lane.successors.empty()) return std::nullopt;
      s -= lane.length();
      lane_id = lane.successors.front();
      continue;
    }
    return LanePosition{lane_id, s, 0.0};
  }
  return std::nullopt;
}

}  // namespace

LanePosition resolve_relative_placement(
  const LaneGraph & map, const LanePosition & ego, const Footprint & ego_size,
  const RelativePlacement & rel, const Footprint & adversary_size)
{
  if (!(rel.gap >= 0.0)) {
    unsatisfiable(rel, "gap must be non-negative");
  }
  const Lane & ego_lane = map.lane(ego.lane_id);
  std::optional<LanePosition> result;
  switch (rel.relation) {
    case Relation::Behind:
      result = shift_along(map, ego, -rel.gap);
      if (!result) unsatisfiable(rel, "lane graph ends behind the ego");
      break;
    case Relation::Ahead:
      result = shift_along(map, ego, rel.gap);
      if (!result) unsatisfiable(rel, "lane graph ends ahead of the ego");
      break;
    case Relation::Left:
    case Relation::Right: {
      const std::string & side = rel.relation == Relation::Left ? ego_lane.left : ego_lane.right;
      if (side.empty()) {
        unsatisfiable(rel, "lane '" + ego.lane_id + "' has no such neighbour");
      }
      const LanePosition base{side, map.project_s(ego.lane_id, ego.s, side), 0.0};
      result = shift_along(map, base, -rel.gap);
      if (!result) unsatisfiable(rel, "neighbour lane too short");
      break;
    }
    case Relation::OppositeApproach: {
      const auto candidates = conflicting_approaches(map, ego.lane_id);
      if (candidates.empty()) {
        unsatisfiable(rel, "ego is not on a signalised approach with conflicting traffic");
      }
      const double ego_to_line = ego_lane.length() - ego.s;
      for (const auto & c : candidates) {
        const double len = map.lane(c).length();
        const double s = len - (ego_to_line + rel.gap);
        if (s >= 0.0) {
          result = LanePosition{c, s, 0.0};
          break;
        }
      }
      if (!result) unsatisfiable(rel, "conflicting approaches too short for the gap");
      break;
    }
  }
  const OrientedBox ego_box{map.pose_at(ego), ego_size};
  const OrientedBox adv_box{map.pose_at(*result), adversary_size};
  if (boxes_overlap(ego_box, adv_box)) {
    unsatisfiable(rel, "adversary footprint overlaps the ego");
  }
  return *result;
}

std::optional<double> distance_along_route(const LaneGraph & map, const LanePosition & a, const LanePosition & b)
{
  // Label-correcting search. A label (cost, s) on a lane means every point at
  // arc length >= s on that lane is reachable at cost + (point - s).
  struct Label
  {
    double cost;
    std::string lane;
    double s;
    bool operator>(const Label & o) const { return cost > o.cost; }
  };
  std::map<std::string, std::vector<std::pair<double, double>>> labels;
  auto dominated = [&](const std::string & lane, double cost, double s) {
    for (const auto & [c, ls] : labels[lane]) {
      if (ls <= s + 1e-12 && c + (s - ls) <= cost + 1e-12) {
        return true;
      }
    }
    return false;
  };
  std::priority_queue<Label, std::vector<Label>, std::greater<>> open;
  open.push({0.0, a.lane_id, a.s});
  std::optional<double> best;
  while (!open.empty()) {
    Label cur = open.top();
    open.pop();
    if (best && cur.cost >= *best) {
      break;
    }
    if (dominated(cur.lane, cur.cost, cur.s)) {
      continue;
    }
    labels[cur.lane].emplace_back(cur.cost, cur.s);
    const Lane & lane = map.lane(cur.lane);
    if (cur.lane == b.lane_id && b.s >= cur.s - 1e-9) {
      const double d = cur.cost + std::max(0.0, b.s - cur.s);
      if (!best || d < *best) best = d;
    }
    for (const auto & succ : lane.successors) {
      open.push({cur.cost + (lane.length() - cur.s), succ, 0.0});
    }
    for (const auto * side : {&lane.left, &lane.right}) {
      if (!side->empty()) {
        open.push({cur.cost, *side, map.project_s(cur.lane, cur.s, *side)});
      }
    }
  }
  return best;
}

}  // namespace critsim
