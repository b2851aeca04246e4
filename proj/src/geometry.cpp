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

#include "critsim/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace critsim
{

double wrap_angle(double a)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a <= 0.0) {
    a += two_pi;
  }
  return a - std::numbers::pi;
}

std::array<Vec2, 4> OrientedBox::corners() const
{
  const Vec2 c = pose.position();
  const Vec2 f = heading_vector(pose.heading) * (size.length * 0.5);
  const Vec2 l = Vec2{-std::sin(pose.heading), std::cos(pose.heading)} * (size.width * 0.5);
  return {c + f + l, c - f + l, c - f - l, c + f - l};
}

namespace
{

void project_onto(const std::array<Vec2, 4> & pts, Vec2 axis, double & lo, double & hi)
{
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const auto & p : pts) {
    const double v = dot(p, axis);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
}

// Minimum over the four candidate axes of the projected interval overlap.
double min_axis_overlap(const OrientedBox & a, const OrientedBox & b)
{
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes = {
    heading_vector(a.pose.heading), Vec2{-std::sin(a.pose.heading), std::cos(a.pose.heading)},
    heading_vector(b.pose.heading), Vec2{-std::sin(b.pose.heading), std::cos(b.pose.heading)}};
  double best = std::numeric_limits<double>::infinity();
  for (const auto & axis : axes) {
    double alo = 0.0;
    double ahi = 0.0;
    double blo = 0.0;
    double bhi = 0.0;
    project_onto(ca, axis, alo, ahi);
    project_onto(cb, axis, blo, bhi);
    best = std::min(best, std::min(ahi, bhi) - std::max(alo, blo));
  }
  return best;
}

}  // namespace

bool boxes_overlap(const OrientedBox & a, const OrientedBox & b)
{
  return min_axis_overlap(a, b) >= 0.0;
}

double penetration_depth(const OrientedBox & a, const OrientedBox & b)
{
  return min_axis_overlap(a, b);
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
  const Vec2 d = b - a;
  const double l2 = dot(d, d);
  double t = 0.0;
  if (l2 > 0.0) {
    t = std::clamp(dot(p - a, d) / l2, 0.0, 1.0);
  }
  return norm(p - (a + d * t));
}

double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1)
{
  const double o1 = cross(a1 - a0, b0 - a0);
  const double o2 = cross(a1 - a0, b1 - a0);
  const double o3 = cross(b1 - b0, a0 - b0);
  const double o4 = cross(b1 - b0, a1 - b0);
  if (((o1 < 0.0 && o2 > 0.0) || (o1 > 0.0 && o2 < 0.0)) &&
      ((o3 < 0.0 && o4 > 0.0) || (o3 > 0.0 && o4 < 0.0))) {
    return 0.0;
  }
  return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                   point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

double shortest_distance(const OrientedBox & a, const OrientedBox & b)
{
  if (boxes_overlap(a, b)) {
    return 0.0;
  }
  const auto ca = a.corners();
  const auto cb = b.corners();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      best = std::min(best, segment_distance(ca[i], ca[(i + 1) % 4], cb[j], cb[(j + 1) % 4]));
    }
  }
  return best;
}

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points))
{
  if (points_.size() < 2) {
    throw std::invalid_argument("polyline needs at least two points");
  }
  cumulative_.reserve(points_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    cumulative_.push_back(cumulative_.back() + norm(points_[i] - points_[i - 1]));
  }
}

std::size_t Polyline::segment_index(double s) const
{
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t idx = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  return std::min(idx, points_.size() - 2);
}

Pose Polyline::pose_at(double s) const
{
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_index(s);
  const Vec2 a = points_[i];
  const Vec2 b = points_[i + 1];
  const double seg = cumulative_[i + 1] - cumulative_[i];
  const double t = seg > 0.0 ? (s - cumulative_[i]) / seg : 0.0;
  const Vec2 p = a + (b - a) * t;
  return {p.x, p.y, std::atan2(b.y - a.y, b.x - a.x)};
}

Pose Polyline::pose_at(double s, double lateral) const
{
  Pose p = pose_at(s);
  p.x -= std::sin(p.heading) * lateral;
  p.y += std::cos(p.heading) * lateral;
  return p;
}

double Polyline::heading_at(double s) const { return pose_at(s).heading; }

Projection Polyline::project(Vec2 p) const
{
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec2 a = points_[i];
    const Vec2 d = points_[i + 1] - a;
    const double l2 = dot(d, d);
    const double t = l2 > 0.0 ? std::clamp(dot(p - a, d) / l2, 0.0, 1.0) : 0.0;
    const Vec2 foot = a + d * t;
    const double dist = norm(p - foot);
    if (dist < best.distance) {
      best.distance = dist;
      best.s = cumulative_[i] + t * std::sqrt(l2);
      best.lateral = l2 > 0.0 ? cross(d, p - a) / std::sqrt(l2) : 0.0;
    }
  }
  return best;
}

double Polyline::turning_between(double s0, double s1) const
{
  if (s1 < s0) {
    std::swap(s0, s1);
  }
  s0 = std::clamp(s0, 0.0, length());
  s1 = std::clamp(s1, 0.0, length());
  const std::size_t i0 = segment_index(s0);
  const std::size_t i1 = segment_index(s1);
  double total = 0.0;
  for (std::size_t i = i0; i < i1; ++i) {
    const Vec2 d0 = points_[i + 1] - points_[i];
    const Vec2 d1 = points_[i + 2] - points_[i + 1];
    total += std::abs(wrap_angle(std::atan2(d1.y, d1.x) - std::atan2(d0.y, d0.x)));
  }
  return total;
}

bool Polyline::is_simple() const
{
  const std::size_t n = points_.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 2; j + 1 < n; ++j) {
      if (segment_distance(points_[i], points_[i + 1], points_[j], points_[j + 1]) == 0.0) {
        return false;
      }
    }
  }
  return true;
}

bool Polyline::has_monotone_arc_length() const
{
  for (std::size_t i = 1; i < cumulative_.size(); ++i) {
    if (!(cumulative_[i] > cumulative_[i - 1])) {
      return false;
    }
  }
  return true;
}

double polyline_distance(const Polyline & a, const Polyline & b)
{
  double best = std::numeric_limits<double>::infinity();
  const auto & pa = a.points();
  const auto & pb = b.points();
  for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
    for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
      best = std::min(best, segment_distance(pa[i], pa[i + 1], pb[j], pb[j + 1]));
    }
  }
  return best;
}

}  // namespace critsim
