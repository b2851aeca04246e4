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


#include "critsim/error.hpp"
#include "critsim/sim.hpp"

#include <sstream>

namespace critsim
{

using nlohmann::json;

namespace
{

template <typename Enum, std::size_t N>
Enum enum_from(const std::string & text, const Enum (&values)[N], const char * what)
{
  for (Enum e : values) {
    if (to_string(e) == text) return e;
  }
  throw Error(ErrorKind::MalformedTrace, std::string("unknown ") + what + " '" + text + "'");
}

constexpr Role kRoles[] = {Role::Ego, Role::Adversary, Role::Background};
constexpr SignalColor kColors[] = {SignalColor::Red, SignalColor::Green};
constexpr BehaviorStatus kStatuses[] = {BehaviorStatus::Running, BehaviorStatus::Succeeded, BehaviorStatus::Failed};

json tick_json(const TickRecord & r)
{
  json vs = json::array();
  for (const auto & v : r.vehicles) {
    vs.push_back(
      {{"id", v.id}, {"role", to_string(v.role)}, {"x", v.x}, {"y", v.y}, {"heading", v.heading}, {"lane", v.lane},
       {"s", v.s}, {"lateral", v.lateral}, {"speed", v.speed}, {"accel", v.accel}, {"length", v.length},
       {"width", v.width}, {"changing_lane", v.changing_lane}, {"crashed", v.crashed}});
  }
  json ps = json::array();
  for (const auto & p : r.pairs) ps.push_back({{"a", p.a}, {"b", p.b}, {"d", p.delta}});
  json ss = json::array();
  for (const auto & s : r.signals) ss.push_back({{"lane", s.lane}, {"color", to_string(s.color)}});
  return {{"type", "tick"}, {"k", r.k}, {"t", r.t}, {"vehicles", vs}, {"pairs", ps}, {"signals", ss}};
}

TickRecord tick_from(const json & j)
{
  TickRecord r;
  r.k = j.at("k").get<std::int64_t>();
  r.t = j.at("t").get<double>();
  for (const auto & v : j.at("vehicles")) {
    VehicleRecord rec;
    rec.id = v.at("id").get<std::string>();
    rec.role = enum_from(v.at("role").get<std::string>(), kRoles, "role");
    rec.x = v.at("x").get<double>();
    rec.y = v.at("y").get<double>();
    rec.heading = v.at("heading").get<double>();
    rec.lane = v.at("lane").get<std::string>();
    rec.s = v.at("s").get<double>();
    rec.lateral = v.at("lateral").get<double>();
    rec.speed = v.at("speed").get<double>();
    rec.accel = v.at("accel").get<double>();
    rec.length = v.at("length").get<double>();
    rec.width = v.at("width").get<double>();
    rec.changing_lane = v.at("changing_lane").get<bool>();
    rec.crashed = v.at("crashed").get<bool>();
    r.vehicles.push_back(std::move(rec));
  }
  for (const auto & p : j.at("pairs")) {
    r.pairs.push_back({p.at("a").get<std::string>(), p.at("b").get<std::string>(), p.at("d").get<double>()});
  }
  for (const auto & s : j.at("signals")) {
    r.signals.push_back({s.at("lane").get<std::string>(), enum_from(s.at("color").get<std::string>(), kColors, "color")});
  }
  return r;
}

}  // namespace

std::string write_trace(const SimTrace & trace)
{
  std::ostringstream out;
  json header = {
    {"type", "header"}, {"format", "critsim-trace"}, {"version", 1}, {"dt", trace.dt},
    {"ticks", trace.ticks.size()}, {"seed", trace.seed}, {"map_id", trace.map_id},
    {"scenario", json::parse(trace.scenario.empty() ? "null" : trace.scenario)},
    {"adversaries", trace.adversaries}, {"notes", trace.notes}};
  out << header.dump() << '\n';
  std::size_t ci = 0;
  std::size_t si = 0;
  std::size_t ni = 0;
  std::size_t events = 0;
  for (const auto & tick : trace.ticks) {
    out << tick_json(tick).dump() << '\n';
    for (; ci < trace.collisions.size() && trace.collisions[ci].k <= tick.k; ++ci, ++events) {
      const auto & c = trace.collisions[ci];
      out << json{{"type", "collision"}, {"k", c.k}, {"a", c.a}, {"b", c.b}, {"relative_speed", c.relative_speed}}.dump()
          << '\n';
    }
    for (; si < trace.statuses.size() && trace.statuses[si].tick <= tick.k; ++si, ++events) {
      const auto & s = trace.statuses[si];
      out << json{{"type", "behavior_status"}, {"k", s.tick}, {"owner", s.owner}, {"path", s.path},
                  {"status", to_string(s.status)}, {"reason", s.reason}}
               .dump()
          << '\n';
    }
    for (; ni < trace.snapshots.size() && trace.snapshots[ni].k <= tick.k; ++ni, ++events) {
      out << json{{"type", "behavior_snapshot"}, {"k", trace.snapshots[ni].k}, {"web", trace.snapshots[ni].web}}.dump()
          << '\n';
    }
  }
  out << json{{"type", "footer"}, {"ticks", trace.ticks.size()}, {"events", events}}.dump() << '\n';
  return out.str();
}

SimTrace read_trace(const std::string & text)
{
  SimTrace trace;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  bool footer = false;
  std::size_t events = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fail = [&](const std::string & msg) {
      return Error(ErrorKind::MalformedTrace, "line " + std::to_string(line_no) + ": " + msg);
    };
    if (footer) throw fail("content after footer");
    try {
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (!header) {
        if (type != "header" || j.at("format") != "critsim-trace") throw fail("expected trace header");
        if (j.at("version").get<int>() != 1) throw fail("unsupported trace version");
        trace.dt = j.at("dt").get<double>();
        trace.seed = j.at("seed").get<std::uint64_t>();
        trace.map_id = j.at("map_id").get<std::string>();
        if (!j.at("scenario").is_null()) trace.scenario = j.at("scenario").dump(2) + "\n";
        trace.adversaries = j.at("adversaries").get<std::vector<std::string>>();
        if (j.contains("notes")) trace.notes = j.at("notes").get<std::vector<std::string>>();
        header = true;
      } else if (type == "tick") {
        TickRecord r = tick_from(j);
        const auto expected = static_cast<std::int64_t>(trace.ticks.size());
        if (r.k != expected) throw fail("tick " + std::to_string(r.k) + " out of order");
        trace.ticks.push_back(std::move(r));
      } else if (type == "collision") {
        trace.collisions.push_back(
          {j.at("k").get<std::int64_t>(), j.at("a").get<std::string>(), j.at("b").get<std::string>(),
           j.at("relative_speed").get<double>()});
        ++events;
      } else if (type == "behavior_status") {
        trace.statuses.push_back(
          {j.at("k").get<std::int64_t>(), j.at("owner").get<std::string>(), j.at("path").get<std::string>(),
           enum_from(j.at("status").get<std::string>(), kStatuses, "status"), j.at("reason").get<std::string>()});
        ++events;
      } else if (type == "behavior_snapshot") {
        trace.snapshots.push_back({j.at("k").get<std::int64_t>(), j.at("web")});
        ++events;
      } else if (type == "footer") {
        if (j.at("ticks").get<std::size_t>() != trace.ticks.size()) throw fail("footer tick count mismatch");
        if (j.at("events").get<std::size_t>() != events) throw fail("footer event count mismatch");
        footer = true;
      } else {
        throw fail("unknown record type '" + type + "'");
      }
    } catch (const json::exception & e) {
      throw fail(e.what());
    }
  }
  if (!header) throw Error(ErrorKind::MalformedTrace, "missing header");
  if (!footer) throw Error(ErrorKind::MalformedTrace, "line " + std::to_string(line_no) + ": missing footer (truncated trace)");
  return trace;
}

}  // namespace critsim
