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
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace critsim;

namespace
{

OrientedBox box(double x, double y, double h, double l = 4.5, double w = 1.9) { return {{x, y, h}, {l, w}}; }

oracle::Rect rect(const OrientedBox & b)
{
  return {b.pose.x, b.pose.y, b.pose.heading, b.size.length, b.size.width};
}

OrientedBox random_box(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> pos(-6.0, 6.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> len(1.0, 8.0);
  std::uniform_real_distribution<double> wid(0.8, 2.5);
  return box(pos(rng), pos(rng), ang(rng), len(rng), wid(rng));
}

}  // namespace

TEST(Geometry, WrapAngle)
{
  EXPECT_NEAR(wrap_angle(3 * M_PI), M_PI, 1e-12);
  EXPECT_NEAR(wrap_angle(-M_PI), M_PI, 1e-12);
  EXPECT_NEAR(wrap_angle(0.5), 0.5, 1e-15);
  EXPECT_NEAR(wrap_angle(-0.5 - 4 * M_PI), -0.5, 1e-12);
}

TEST(Geometry, CornersCounterClockwiseFromFrontLeft)
{
  const auto c = box(0, 0, 0, 4, 2).corners();
  EXPECT_NEAR(c[0].x, 2, 1e-12);
  EXPECT_NEAR(c[0].y, 1, 1e-12);
  double area2 = 0;
  for (int i = 0; i < 4; ++i) area2 += cross(c[i], c[(i + 1) % 4]);
  EXPECT_NEAR(area2, 16.0, 1e-9);
}

TEST(Geometry, AxisAlignedDistance)
{
  EXPECT_DOUBLE_EQ(shortest_distance(box(0, 0, 0, 4, 2), box(10, 0, 0, 4, 2)), 6.0);
  EXPECT_DOUBLE_EQ(shortest_distance(box(0, 0, 0, 4, 2), box(0, 5, 0, 4, 2)), 3.0);
  EXPECT_NEAR(shortest_distance(box(0, 0, 0, 2, 2), box(4, 4, 0, 2, 2)), std::sqrt(8.0), 1e-12);
}

TEST(Geometry, TouchingCountsAsOverlap)
{
  EXPECT_TRUE(boxes_overlap(box(0, 0, 0, 4, 2), box(4, 0, 0, 4, 2)));
  EXPECT_EQ(shortest_distance(box(0, 0, 0, 4, 2), box(4, 0, 0, 4, 2)), 0.0);
  EXPECT_FALSE(boxes_overlap(box(0, 0, 0, 4, 2), box(4.001, 0, 0, 4, 2)));
}

TEST(Geometry, CrossShapedOverlapWithoutCornersInside)
{
  const auto a = box(0, 0, 0, 10, 1);
  const auto b = box(0, 0, M_PI / 2, 10, 1);
  EXPECT_TRUE(boxes_overlap(a, b));
  EXPECT_GT(penetration_depth(a, b), 0.0);
}

TEST(Geometry, PenetrationDepthSign)
{
  EXPECT_NEAR(penetration_depth(box(0, 0, 0, 4, 2), box(3, 0, 0, 4, 2)), 1.0, 1e-12);
  EXPECT_LE(penetration_depth(box(0, 0, 0, 4, 2), box(5, 0, 0, 4, 2)), 0.0);
}

TEST(Geometry, SegmentDistances)
{
  EXPECT_DOUBLE_EQ(point_segment_distance({0, 1}, {-1, 0}, {1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(point_segment_distance({3, 0}, {-1, 0}, {1, 0}), 2.0);
  EXPECT_DOUBLE_EQ(segment_distance({0, 0}, {1, 0}, {0, 2}, {1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(segment_distance({0, -1}, {0, 1}, {-1, 0}, {1, 0}), 0.0);
}

// property: distance agrees with an independent vertex-edge oracle and is
// symmetric and invariant under a rigid motion of both boxes
TEST(GeometryProperty, DistanceMatchesOracle)
{
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    const double d = shortest_distance(a, b);
    EXPECT_NEAR(d, oracle::rect_distance(rect(a), rect(b)), 1e-9);
    EXPECT_NEAR(d, shortest_distance(b, a), 1e-12);
    EXPECT_EQ(d == 0.0, boxes_overlap(a, b));
    const double th = 0.7;
    const auto move = [&](const OrientedBox & o) {
      const double x = std::cos(th) * o.pose.x - std::sin(th) * o.pose.y + 3.0;
      const double y = std::sin(th) * o.pose.x + std::cos(th) * o.pose.y - 2.0;
      return box(x, y, o.pose.heading + th, o.size.length, o.size.width);
    };
    EXPECT_NEAR(shortest_distance(move(a), move(b)), d, 1e-9);
  }
}

TEST(GeometryProperty, OverlapMatchesBoundarySampling)
{
  std::mt19937_64 rng(11);
  int disagreements = 0;
  for (int i = 0; i < 300; ++i) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    const auto [hit, deepest] = oracle::sampled_overlap(rect(a), rect(b), 0.01);
    const double gap = oracle::rect_distance(rect(a), rect(b));
    if ((hit && deepest < 1e-3) || (!hit && gap < 1e-3)) continue;
    disagreements += hit != boxes_overlap(a, b);
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(Polyline, ArcLengthAndPose)
{
  const Polyline p({{0, 0}, {10, 0}, {10, 10}});
  EXPECT_DOUBLE_EQ(p.length(), 20.0);
  const Pose q = p.pose_at(15.0);
  EXPECT_DOUBLE_EQ(q.x, 10.0);
  EXPECT_DOUBLE_EQ(q.y, 5.0);
  EXPECT_NEAR(q.heading, M_PI / 2, 1e-12);
  EXPECT_DOUBLE_EQ(p.pose_at(-3).x, 0.0);
  EXPECT_DOUBLE_EQ(p.pose_at(99).y, 10.0);
  const Pose l = p.pose_at(5.0, 1.0);
  EXPECT_DOUBLE_EQ(l.y, 1.0);
}

TEST(Polyline, Projection)
{
  const Polyline p({{0, 0}, {10, 0}});
  const auto pr = p.project({4, -2});
  EXPECT_DOUBLE_EQ(pr.s, 4.0);
  EXPECT_DOUBLE_EQ(pr.lateral, -2.0);
  EXPECT_DOUBLE_EQ(pr.distance, 2.0);
}

TEST(Polyline, TurningAndSimplicity)
{
  const Polyline bend({{0, 0}, {10, 0}, {10, 10}});
  EXPECT_NEAR(bend.turning_between(0, 20), M_PI / 2, 1e-12);
  EXPECT_NEAR(bend.turning_between(0, 9), 0.0, 1e-12);
  EXPECT_TRUE(bend.is_simple());
  EXPECT_FALSE(Polyline({{0, 0}, {10, 0}, {10, 5}, {5, -5}}).is_simple());
  EXPECT_TRUE(bend.has_monotone_arc_length());
  EXPECT_FALSE(Polyline({{0, 0}, {0, 0}, {1, 0}}).has_monotone_arc_length());
}

// property: pose_at followed by project recovers s on a smooth arc
TEST(PolylineProperty, ProjectInvertsPoseAt)
{
  std::vector<Vec2> pts;
  for (int i = 0; i <= 60; ++i) {
    const double a = i * M_PI / 120;
    pts.push_back({50 * std::sin(a), 50 - 50 * std::cos(a)});
  }
  const Polyline arc(pts);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> s(0.5, arc.length() - 0.5);
  for (int i = 0; i < 500; ++i) {
    const double si = s(rng);
    const Pose q = arc.pose_at(si);
    EXPECT_NEAR(arc.project(q.position()).s, si, 1e-6);
  }
}
