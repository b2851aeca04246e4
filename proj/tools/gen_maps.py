#!/usr/bin/env python3
# Copyright 2026 The critsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the bundled lane-graph maps under data/maps/.

The shipped JSON files are the source of truth for the simulator; this script
only exists so their geometry can be reproduced or tweaked.
"""

import argparse
import json
import math
import os

LANE_WIDTH = 3.5


def r4(v):
    return round(v, 4)


def pts(seq):
    return [[r4(x), r4(y)] for x, y in seq]


def lane(lane_id, centerline, speed_limit, successors=(), left=None, right=None):
    out = {
        "id": lane_id,
        "centerline": pts(centerline),
        "width": LANE_WIDTH,
        "speed_limit": speed_limit,
        "successors": list(successors),
    }
    if left:
        out["left"] = left
    if right:
        out["right"] = right
    return out


def highway():
    length = 3000.0
    lanes = []
    for k in range(3):
        y = k * LANE_WIDTH
        lanes.append(lane(
            f"hw_{k}", [(0.0, y), (length, y)], 30.0,
            left=f"hw_{k + 1}" if k < 2 else None,
            right=f"hw_{k - 1}" if k > 0 else None))
    return {"schema_version": 1, "id": "highway_3lane",
            "description": "straight three-lane one-way highway, 3 km",
            "lanes": lanes, "intersections": []}


def curve(radius):
    # Straight 300 m heading +x, a left quarter arc, then 800 m heading +y.
    # Lane 0 follows the reference radius; lane 1 sits on its left (inner side).
    lanes = []
    for k in range(2):
        off = k * LANE_WIDTH
        r = radius - off
        line = [(0.0, off)]
        line.append((300.0, off))
        cx, cy = 300.0, radius
        for deg in range(1, 91):
            a = math.radians(-90 + deg)
            line.append((cx + r * math.cos(a), cy + r * math.sin(a)))
        end_x = cx + r
        line.append((end_x, radius + 800.0))
        lanes.append(lane(
            f"cv_{k}", line, 20.0,
            left="cv_1" if k == 0 else None,
            right="cv_0" if k == 1 else None))
    return {"schema_version": 1, "id": "curve_2lane",
            "description": "two-lane one-way road with a constant-radius left curve",
            "curve_radius": radius, "lanes": lanes, "intersections": []}


def seg_point_dist(p, a, b):
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    l2 = dx * dx + dy * dy
    t = 0.0 if l2 == 0 else max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / l2))
    qx, qy = ax + t * dx, ay + t * dy
    return math.hypot(px - qx, py - qy)


def seg_seg_dist(a, b, c, d):
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return 0.0
    return min(seg_point_dist(a, c, d), seg_point_dist(b, c, d),
               seg_point_dist(c, a, b), seg_point_dist(d, a, b))


def polyline_dist(p, q):
    best = float("inf")
    for i in range(len(p) - 1):
        for j in range(len(q) - 1):
            best = min(best, seg_seg_dist(p[i], p[i + 1], q[j], q[j + 1]))
    return best


def intersection():
    half = 10.0
    approach_len = 150.0
    exit_len = 400.0
    offsets = {0: 5.25, 1: 1.75}
    # Travel heading into the box, keyed by the side the traffic comes from.
    dirs = {"s": (0.0, 1.0), "n": (0.0, -1.0), "w": (1.0, 0.0), "e": (-1.0, 0.0)}
    # Side a vehicle leaves toward when travelling along heading h.
    exit_side = {(0.0, 1.0): "n", (0.0, -1.0): "s", (1.0, 0.0): "e", (-1.0, 0.0): "w"}
    limit = 14.0
    lanes = []
    connectors = {}
    for side, h in dirs.items():
        r = (h[1], -h[0])
        out_side = exit_side[h]
        for k in (0, 1):
            off = offsets[k]
            start = (-h[0] * (half + approach_len) + r[0] * off,
                     -h[1] * (half + approach_len) + r[1] * off)
            stop = (-h[0] * half + r[0] * off, -h[1] * half + r[1] * off)
            succ = [f"{side}_thru_{k}"]
            if k == 0:
                succ.append(f"{side}_right")
            lanes.append(lane(f"{side}_in_{k}", [start, stop], limit, succ,
                              left=f"{side}_in_1" if k == 0 else None,
                              right=f"{side}_in_0" if k == 1 else None))
            # through connector
            exit_start = (h[0] * half + r[0] * off, h[1] * half + r[1] * off)
            thru = [stop, exit_start]
            lanes.append(lane(f"{side}_thru_{k}", thru, limit, [f"{out_side}_out_{k}"]))
            connectors[f"{side}_thru_{k}"] = (f"{side}_in_{k}", thru)
            # outgoing lane continuing along h
            exit_end = (h[0] * (half + exit_len) + r[0] * off,
                        h[1] * (half + exit_len) + r[1] * off)
            lanes.append(lane(f"{out_side}_out_{k}", [exit_start, exit_end], limit,
                              left=f"{out_side}_out_1" if k == 0 else None,
                              right=f"{out_side}_out_0" if k == 1 else None))
        # right turn from the outer lane into the outer lane heading r
        c = (r[0] * half - h[0] * half, r[1] * half - h[1] * half)
        rad = half - offsets[0]
        arc = []
        for i in range(0, 19):
            a = (math.pi / 2) * i / 18.0
            # start direction -r, end direction +h
            vx = -r[0] * math.cos(a) + h[0] * math.sin(a)
            vy = -r[1] * math.cos(a) + h[1] * math.sin(a)
            arc.append((c[0] + rad * vx, c[1] + rad * vy))
        turn_side = exit_side[r]
        lanes.append(lane(f"{side}_right", arc, limit, [f"{turn_side}_out_0"]))
        connectors[f"{side}_right"] = (f"{side}_in_0", arc)

    conflicts = []
    names = sorted(connectors)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            if connectors[a][0] == connectors[b][0]:
                continue
            if polyline_dist(connectors[a][1], connectors[b][1]) < LANE_WIDTH - 0.01:
                conflicts.append([a, b])

    approaches = []
    for side in ("e", "n", "s", "w"):
        green = [[0.0, 18.0]] if side in ("n", "s") else [[20.0, 38.0]]
        for k in (0, 1):
            approaches.append({"lane": f"{side}_in_{k}", "green": green})
    inter = {"id": "x_center", "cycle": 40.0, "approaches": approaches,
             "conflicts": conflicts}
    lanes.sort(key=lambda l: l["id"])
    return {"schema_version": 1, "id": "intersection_4way",
            "description": "signalised four-way crossroad, two lanes per approach",
            "lanes": lanes, "intersections": [inter]}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "maps"))
    ap.add_argument("--curve-radius", type=float, default=200.0)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for m in (highway(), curve(args.curve_radius), intersection()):
        with open(os.path.join(args.out, m["id"] + ".json"), "w") as f:
            json.dump(m, f, indent=2, sort_keys=True)
            f.write("\n")


if __name__ == "__main__":
    main()
