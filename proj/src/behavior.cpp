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

#include "critsim/behavior.hpp"

#include "critsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace critsim
{

std::string_view to_string(Condition::Op op)
{
  switch (op) {
    case Condition::Op::SpeedBelow: return "speed_below";
    case Condition::Op::SameLaneAs: return "same_lane_as";
    case Condition::Op::GapBelow: return "gap_below";
    case Condition::Op::LeadAbove: return "lead_above";
    case Condition::Op::PassedPosition: return "passed_position";
    case Condition::Op::Elapsed: return "elapsed";
    case Condition::Op::And: return "and";
    case Condition::Op::Or: return "or";
    case Condition::Op::Not: return "not";
  }
  return "?";
}

std::optional<Condition::Op> condition_op_from_string(std::string_view text)
{
  for (auto op :
       {Condition::Op::SpeedBelow, Condition::Op::SameLaneAs, Condition::Op::GapBelow, Condition::Op::LeadAbove,
        Condition::Op::PassedPosition, Condition::Op::Elapsed, Condition::Op::And, Condition::Op::Or,
        Condition::Op::Not}) {
    if (to_string(op) == text) {
      return op;
    }
  }
  return std::nullopt;
}

std::string_view to_string(ConcurrentPolicy policy)
{
  return policy == ConcurrentPolicy::AllSucceed ? "all_succeed" : "any_succeeds";
}

std::string_view to_string(BehaviorNode::Type type)
{
  switch (type) {
    case BehaviorNode::Type::Atomic: return "atomic";
    case BehaviorNode::Type::Sequential: return "sequential";
    case BehaviorNode::Type::Concurrent: return "concurrent";
  }
  return "?";
}

std::string_view to_string(BehaviorStatus status)
{
  switch (status) {
    case BehaviorStatus::Running: return "running";
    case BehaviorStatus::Succeeded: return "succeeded";
    case BehaviorStatus::Failed: return "failed";
  }
  return "?";
}

BehaviorNode BehaviorNode::make_atomic(AtomicBehavior a)
{
  BehaviorNode n;
  n.type = Type::Atomic;
  n.atomic = std::move(a);
  return n;
}

BehaviorNode BehaviorNode::sequential(std::vector<BehaviorNode> children)
{
  BehaviorNode n;
  n.type = Type::Sequential;
  n.children = std::move(children);
  return n;
}

BehaviorNode BehaviorNode::concurrent(std::vector<BehaviorNode> children, ConcurrentPolicy policy)
{
  BehaviorNode n;
  n.type = Type::Concurrent;
  n.children = std::move(children);
  n.policy = policy;
  return n;
}

double param_number(const ParamMap & config, const std::string & key, double fallback)
{
  const auto it = config.find(key);
  if (it == config.end() || !std::holds_alternative<double>(it->second)) {
    return fallback;
  }
  return std::get<double>(it->second);
}

std::string param_string(const ParamMap & config, const std::string & key, const std::string & fallback)
{
  const auto it = config.find(key);
  if (it == config.end() || !std::holds_alternative<std::string>(it->second)) {
    return fallback;
  }
  return std::get<std::string>(it->second);
}

// ---------------------------------------------------------------------------
// Registry

void BehaviorRegistry::register_kind(KindEntry entry)
{
  if (entries_.count(entry.kind) != 0) {
    throw Error(ErrorKind::DuplicateKind, "behavior kind '" + entry.kind + "' is already registered");
  }
  if (entry.agents.empty()) {
    throw Error(ErrorKind::Range, "behavior kind '" + entry.kind + "' binds no agent");
  }
  auto key = entry.kind;
  entries_.emplace(std::move(key), std::move(entry));
}

const KindEntry * BehaviorRegistry::find(const std::string & kind) const
{
  const auto it = entries_.find(kind);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> BehaviorRegistry::kinds() const
{
  std::vector<std::string> out;
  for (const auto & [k, e] : entries_) {
    (void)e;
    out.push_back(k);
  }
  return out;
}

namespace
{

ParamSchema number(std::string name, double lo, double hi, std::string unit, bool required = true)
{
  ParamSchema p;
  p.name = std::move(name);
  p.type = ParamSchema::Type::Number;
  p.min = lo;
  p.max = hi;
  p.unit = std::move(unit);
  p.required = required;
  return p;
}

ParamSchema vehicle(std::string name)
{
  ParamSchema p;
  p.name = std::move(name);
  p.type = ParamSchema::Type::VehicleRef;
  return p;
}

BehaviorRegistry make_builtin()
{
  BehaviorRegistry r;
  const auto speed = [] { return number("target_speed", 0.5, 60.0, "m/s"); };
  const auto aggr = [] { return number("aggressiveness", 0.0, 1.0, ""); };

  r.register_kind(
    {"FollowVehicle", {vehicle("target"), speed(), aggr()}, {"acc"}, nullptr,
     "car-follow a vehicle at a target speed"});
  r.register_kind(
    {"StopVehicle", {number("deceleration", 0.5, 8.0, "m/s^2", false)}, {"brake"},
     [](const ParamMap &) { return std::optional<Condition>(Condition::speed_below(0.0)); },
     "brake comfortably to a standstill"});
  r.register_kind(
    {"CutIn", {vehicle("victim"), number("trigger_gap", 0.0, 100.0, "m"), aggr(), speed()}, {"cut_in"},
     [](const ParamMap & c) { return std::optional<Condition>(Condition::same_lane_as(param_string(c, "victim"))); },
     "pass the victim and change into its lane"});
  ParamSchema turn;
  turn.name = "turn";
  turn.type = ParamSchema::Type::Choice;
  turn.required = false;
  turn.choices = {"straight", "left", "right"};
  r.register_kind({"FollowRoute", {speed(), turn}, {"route", "cautious"}, nullptr, "drive along the lane graph"});
  r.register_kind(
    {"Overtake", {vehicle("target"), speed(), number("pass_margin", 0.0, 100.0, "m")}, {"overtake"},
     [](const ParamMap & c) {
       return std::optional<Condition>(
         Condition::lead_above(param_string(c, "target"), param_number(c, "pass_margin", 0.0)));
     },
     "pass a vehicle on the current lane"});
  r.register_kind(
    {"RunRedLight", {speed()}, {"runner"}, nullptr, "drive through the intersection ignoring signals"});
  ParamSchema decel;
  decel.name = "deceleration";
  decel.type = ParamSchema::Type::NumberOrMax;
  decel.min = 0.5;
  decel.max = 8.0;
  decel.unit = "m/s^2";
  r.register_kind(
    {"SuddenBrake", {decel}, {"brake"},
     [](const ParamMap &) { return std::optional<Condition>(Condition::speed_below(0.0)); },
     "brake hard to a standstill"});
  r.register_kind({"IdleHold", {}, {"hold"}, nullptr, "stand still"});
  return r;
}

void check_condition(
  const Condition & c, const std::set<std::string> & vehicles, const std::string & path,
  std::vector<Violation> & out)
{
  if (!std::isfinite(c.value)) {
    out.push_back({ErrorKind::Range, path, "threshold must be finite"});
  }
  switch (c.op) {
    case Condition::Op::SameLaneAs:
    case Condition::Op::GapBelow:
    case Condition::Op::LeadAbove:
      if (vehicles.count(c.vehicle) == 0) {
        out.push_back({ErrorKind::Reference, path, "unknown vehicle '" + c.vehicle + "'"});
      }
      break;
    case Condition::Op::PassedPosition:
      if (c.lane.empty()) {
        out.push_back({ErrorKind::Range, path, "passed_position needs a lane"});
      }
      break;
    case Condition::Op::SpeedBelow:
    case Condition::Op::Elapsed:
      if (c.value < 0.0) {
        out.push_back({ErrorKind::Range, path, "threshold must be non-negative"});
      }
      break;
    case Condition::Op::And:
    case Condition::Op::Or:
      if (c.children.empty()) {
        out.push_back({ErrorKind::Range, path, "empty composition"});
      }
      break;
    case Condition::Op::Not:
      if (c.children.size() != 1) {
        out.push_back({ErrorKind::Range, path, "not takes exactly one operand"});
      }
      break;
  }
  for (std::size_t i = 0; i < c.children.size(); ++i) {
    check_condition(c.children[i], vehicles, path + "/" + std::to_string(i), out);
  }
}

void collect_condition_refs(const Condition & c, std::set<std::string> & out)
{
  if (!c.vehicle.empty()) {
    out.insert(c.vehicle);
  }
  for (const auto & ch : c.children) {
    collect_condition_refs(ch, out);
  }
}

void collect_refs(const BehaviorNode & node, std::set<std::string> & out)
{
  if (node.type == BehaviorNode::Type::Atomic) {
    const auto * entry = BehaviorRegistry::builtin().find(node.atomic.kind);
    for (const auto & [key, value] : node.atomic.config) {
      bool is_ref = false;
      if (entry != nullptr) {
        for (const auto & p : entry->params) {
          is_ref = is_ref || (p.name == key && p.type == ParamSchema::Type::VehicleRef);
        }
      } else {
        is_ref = key == "target" || key == "victim";
      }
      if (is_ref && std::holds_alternative<std::string>(value)) {
        out.insert(std::get<std::string>(value));
      }
    }
    if (node.atomic.success) collect_condition_refs(*node.atomic.success, out);
    if (node.atomic.fail) collect_condition_refs(*node.atomic.fail, out);
  }
  for (const auto & ch : node.children) {
    collect_refs(ch, out);
  }
}

}  // namespace

const BehaviorRegistry & BehaviorRegistry::builtin()
{
  static const BehaviorRegistry registry = make_builtin();
  return registry;
}

std::vector<Violation> BehaviorRegistry::check_atomic(
  const AtomicBehavior & atomic, const std::vector<std::string> & vehicles, const std::string & path) const
{
  std::vector<Violation> out;
  const KindEntry * entry = find(atomic.kind);
  if (entry == nullptr) {
    out.push_back({ErrorKind::UnknownKind, path + "/kind", "unknown behavior kind '" + atomic.kind + "'"});
    return out;
  }
  if (std::find(entry->agents.begin(), entry->agents.end(), atomic.agent) == entry->agents.end()) {
    out.push_back({ErrorKind::Binding, path + "/agent", "agent '" + atomic.agent + "' cannot run " + atomic.kind});
  }
  const std::set<std::string> known(vehicles.begin(), vehicles.end());
  for (const auto & [key, value] : atomic.config) {
    (void)value;
    if (std::none_of(entry->params.begin(), entry->params.end(), [&](const ParamSchema & p) { return p.name == key; })) {
      out.push_back({ErrorKind::Range, path + "/config/" + key, "unknown parameter for " + atomic.kind});
    }
  }
  for (const auto & p : entry->params) {
    const std::string where = path + "/config/" + p.name;
    const auto it = atomic.config.find(p.name);
    if (it == atomic.config.end()) {
      if (p.required) {
        out.push_back({ErrorKind::Range, where, "missing"});
      }
      continue;
    }
    const ParamValue & v = it->second;
    switch (p.type) {
      case ParamSchema::Type::Number:
      case ParamSchema::Type::NumberOrMax: {
        if (std::holds_alternative<std::string>(v)) {
          if (p.type == ParamSchema::Type::NumberOrMax && std::get<std::string>(v) == "max") {
            break;
          }
          out.push_back({ErrorKind::Range, where, "expected a number"});
          break;
        }
        const double x = std::get<double>(v);
        if (!std::isfinite(x) || x < p.min || x > p.max) {
          std::ostringstream os;
          os << x << " outside [" << p.min << ", " << p.max << "]";
          out.push_back({ErrorKind::Range, where, os.str()});
        }
        break;
      }
      case ParamSchema::Type::VehicleRef:
        if (!std::holds_alternative<std::string>(v)) {
          out.push_back({ErrorKind::Range, where, "expected a vehicle id"});
        } else if (known.count(std::get<std::string>(v)) == 0) {
          out.push_back({ErrorKind::Reference, where, "unknown vehicle '" + std::get<std::string>(v) + "'"});
        }
        break;
      case ParamSchema::Type::Choice:
        if (!std::holds_alternative<std::string>(v) ||
            std::find(p.choices.begin(), p.choices.end(), std::get<std::string>(v)) == p.choices.end()) {
          out.push_back({ErrorKind::Range, where, "not one of the allowed choices"});
        }
        break;
    }
  }
  if (atomic.success) check_condition(*atomic.success, known, path + "/success", out);
  if (atomic.fail) check_condition(*atomic.fail, known, path + "/fail", out);
  if (atomic.timeout && !(*atomic.timeout > 0.0 && std::isfinite(*atomic.timeout))) {
    out.push_back({ErrorKind::Range, path + "/timeout", "must be positive"});
  }
  return out;
}

std::vector<std::string> referenced_vehicles(const BehaviorNode & node)
{
  std::set<std::string> refs;
  collect_refs(node, refs);
  return {refs.begin(), refs.end()};
}

std::vector<Violation> check_tree(
  const BehaviorNode & node, const BehaviorRegistry & registry, const std::vector<std::string> & vehicles,
  const std::string & path)
{
  std::vector<Violation> out;
  if (node.type == BehaviorNode::Type::Atomic) {
    if (!node.children.empty()) {
      out.push_back({ErrorKind::Range, path, "atomic node has children"});
    }
    auto a = registry.check_atomic(node.atomic, vehicles, path);
    out.insert(out.end(), a.begin(), a.end());
    return out;
  }
  if (node.children.empty()) {
    out.push_back({ErrorKind::Range, path, std::string(to_string(node.type)) + " node has no children"});
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    auto c = check_tree(node.children[i], registry, vehicles, path + "/children/" + std::to_string(i));
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

}  // namespace critsim
