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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace critsim
{

enum class SignalColor
{
  Red,
  Green,
};

std::string_view to_string(SignalColor color);

struct Lane
{
  std::string id;
  Polyline centerline;
  double width{3.5};
  double speed_limit{13.9};
  std::vector<std::string> successors;
  std::string left;   // empty when there is no left neighbour
  std::string right;  // empty when there is no right neighbour

  double length() const { return centerline.length(); }
};

/// One signalised approach lane and its green windows within the cycle.
struct SignalApproach
{
  std::string lane;
  std::vector<std::pair<double, double>> green;
};

struct Intersection
{
  std::string id;
  double cycle{40.0};
  std::vector<SignalApproach> approaches;
  /// Connector lanes whose footprints overlap inside the box.
  std::vector<std::pair<std::string, std::string>> conflicts;
};

enum class RoadContext
{
  StraightLane,
  IntersectionApproach,
  Curve,
};

std::string_view to_string(RoadContext context);
std::optional<RoadContext> road_context_from_string(std::string_view text);

/// Road-context request for the ego spawn search.
struct PlacementQuery
{
  RoadContext context{RoadContext::StraightLane};
  bool require_left_neighbor{false};
  bool require_right_neighbor{false};
  /// Intersection approaches only: the approach must stay green over the
  /// configured arrival horizon starting at t = 0.
  bool green_on_arrival{false};

  friend bool operator==(const PlacementQuery &, const PlacementQuery &) = default;
};

enum class Relation
{
  Left,
  Right,
  Behind,
  Ahead,
  OppositeApproach,
};

std::string_view to_string(Relation relation);
std::optional<Relation> relation_from_string(std::string_view text);

/// Placement of an adversary relative to the ego.
///
/// `gap` is a centre-to-centre longitudinal offset in metres: behind/ahead
/// shift along the ego lane, left/right place the vehicle on the neighbour
/// lane `gap` metres behind the ego, and opposite-approach puts it `gap`
/// metres further from its stop line than the ego is from its own.
struct RelativePlacement
{
  Relation relation{Relation::Behind};
  double gap{0.0};

  friend bool operator==(const RelativePlacement &, const RelativePlacement &) = default;
};

struct LanePosition
{
  std::string lane_id;
  double s{0.0};
  double lateral_offset{0.0};

  friend bool operator==(const LanePosition &, const LanePosition &) = default;
};

/// Tunables of the spawn search.
struct SpawnConfig
{
  double approach_min{40.0};
  double approach_max{80.0};
  double straight_min_s{200.0};
  double straight_max_s{600.0};
  double straight_half_window{50.0};
  double straight_max_turn{1e-3};
  double curve_half_window{10.0};
  double curve_min_turn{0.02};
  double min_room_ahead{300.0};
  double green_horizon{10.0};
  double grid_step{1.0};
};

class LaneGraph
{
public:
  static LaneGraph from_json_text(const std::string & text);
  static LaneGraph from_file(const std::filesystem::path & path);
  /// Builds without validation; used by tests that construct broken maps.
  static LaneGraph build(std::string id, std::vector<Lane> lanes, std::vector<Intersection> intersections);

  const std::string & id() const { return id_; }
  const std::string & description() const { return description_; }
  std::optional<double> curve_radius() const { return curve_radius_; }

  const std::vector<Lane> & lanes() const { return lanes_; }
  const std::vector<Intersection> & intersections() const { return intersections_; }

  /// Throws Error(Reference) when the lane does not exist.
  const Lane & lane(const std::string & id) const;
  const Lane * find_lane(const std::string & id) const;
  const std::vector<std::string> & predecessors(const std::string & id) const;

  const SignalApproach * approach(const std::string & lane_id) const;
  const Intersection * intersection_of_approach(const std::string & lane_id) const;
  /// Intersection whose approach feeds this connector, if any.
  const Intersection * intersection_of_connector(const std::string & lane_id) const;
  bool is_connector(const std::string & lane_id) const;
  bool connectors_conflict(const std::string & a, const std::string & b) const;

  /// Every invariant violation found; empty when the map is well formed.
  std::vector<std::string> validate() const;

  Pose pose_at(const LanePosition & pos) const;
  /// Arc length on `to_lane` of the point at `s` on `from_lane`.
  double project_s(const std::string & from_lane, double s, const std::string & to_lane) const;

private:
  void index();

  std::string id_;
  std::string description_;
  std::optional<double> curve_radius_;
  std::vector<Lane> lanes_;
  std::vector<Intersection> intersections_;
  std::map<std::string, std::size_t> lane_index_;
  std::map<std::string, std::vector<std::string>> predecessors_;
  std::map<std::string, std::pair<std::size_t, std::size_t>> approach_index_;
  std::map<std::string, std::size_t> connector_index_;
};

/// Immutable set of loaded maps keyed by id; safe to share across threads.
class MapLibrary
{
public:
  static MapLibrary load_directory(const std::filesystem::path & dir);

  void add(LaneGraph map);
  bool contains(const std::string & id) const { return maps_.count(id) != 0; }
  /// Throws Error(Reference) for unknown ids.
  std::shared_ptr<const LaneGraph> get(const std::string & id) const;
  std::vector<std::string> ids() const;

private:
  std::map<std::string, std::shared_ptr<const LaneGraph>> maps_;
};

/// Seeded spawn search for the ego. Throws Error(NoMatch).
LanePosition find_ego_spawn(
  const LaneGraph & map, const PlacementQuery & query, std::uint64_t seed,
  const SpawnConfig & config = {});

/// All candidates the spawn search draws from, in deterministic order.
std::vector<LanePosition> ego_spawn_candidates(
  const LaneGraph & map, const PlacementQuery & query, const SpawnConfig & config = {});

/// Throws Error(Unsatisfiable).
LanePosition resolve_relative_placement(
  const LaneGraph & map, const LanePosition & ego, const Footprint & ego_size,
  const RelativePlacement & rel, const Footprint & adversary_size);

/// Shortest drivable arc length from a to b following successors and
/// neighbour lanes; nullopt when b is unreachable.
std::optional<double> distance_along_route(
  const LaneGraph & map, const LanePosition & a, const LanePosition & b);

/// Throws Error(NotSignalized) for lanes that are not signalised approaches.
SignalColor signal_color_at(const LaneGraph & map, const std::string & lane_id, double t);

/// Conflicting approach lanes of the intersection fed by `lane_id`, ordered
/// with approaches arriving from the left of `lane_id` first.
std::vector<std::string> conflicting_approaches(const LaneGraph & map, const std::string & lane_id);

}  // namespace critsim
