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

#include <array>
#include <cmath>
#include <vector>

namespace critsim
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double k) { return {a.x * k, a.y * k}; }
  friend Vec2 operator*(double k, Vec2 a) { return {a.x * k, a.y * k}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 heading_vector(double heading) { return {std::cos(heading), std::sin(heading)}; }

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

struct Pose
{
  double x{0.0};
  double y{0.0};
  double heading{0.0};

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose &, const Pose &) = default;
};

/// Vehicle footprint: length along the heading, width across it (metres).
struct Footprint
{
  double length{4.5};
  double width{1.9};

  friend bool operator==(const Footprint &, const Footprint &) = default;
};

/// Oriented rectangle centred on `pose`.
struct OrientedBox
{
  Pose pose;
  Footprint size;

  /// Corners in counter-clockwise order starting at front-left.
  std::array<Vec2, 4> corners() const;
};

/// Separating-axis overlap test. Touching boundaries count as overlap.
bool boxes_overlap(const OrientedBox & a, const OrientedBox & b);

/// Minimum Euclidean distance between the two rectangles; 0 iff they overlap.
double shortest_distance(const OrientedBox & a, const OrientedBox & b);

/// Smallest projected overlap over the four separating axes; <= 0 when the
/// boxes are separated. Used as the penetration depth of overlapping boxes.
double penetration_depth(const OrientedBox & a, const OrientedBox & b);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

struct Projection
{
  double s{0.0};        // arc length of the foot point
  double lateral{0.0};  // signed offset, positive to the left of travel
  double distance{0.0}; // unsigned distance to the polyline
};

/// Piecewise-linear centerline with cached cumulative arc length.
class Polyline
{
public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2> & points() const { return points_; }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  /// Pose at arc length s (clamped to [0, length]). Heading is the segment
  /// direction.
  Pose pose_at(double s) const;
  /// Pose at arc length s shifted sideways by `lateral` (left positive).
  Pose pose_at(double s, double lateral) const;
  double heading_at(double s) const;

  Projection project(Vec2 p) const;

  /// Absolute heading change accumulated over [s0, s1].
  double turning_between(double s0, double s1) const;

  /// True when no two non-adjacent segments intersect.
  bool is_simple() const;
  /// True when every segment has positive length.
  bool has_monotone_arc_length() const;

private:
  std::size_t segment_index(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

double polyline_distance(const Polyline & a, const Polyline & b);

}  // namespace critsim
