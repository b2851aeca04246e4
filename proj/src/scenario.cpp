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

#include "critsim/scenario.hpp"

#include "critsim/codec.hpp"
#include "critsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace critsim
{

using nlohmann::json;

std::string_view to_string(VehicleClass c)
{
  switch (c) {
    case VehicleClass::Sedan: return "sedan";
    case VehicleClass::Van: return "van";
    case VehicleClass::Truck: return "truck";
  }
  return "?";
}

std::optional<VehicleClass> vehicle_class_from_string(std::string_view text)
{
  if (text == "sedan") return VehicleClass::Sedan;
  if (text == "van") return VehicleClass::Van;
  if (text == "truck") return VehicleClass::Truck;
  return std::nullopt;
}

Footprint footprint_of(VehicleClass c)
{
  switch (c) {
    case VehicleClass::Sedan: return {4.5, 1.9};
    case VehicleClass::Van: return {5.2, 2.0};
    case VehicleClass::Truck: return {8.0, 2.5};
  }
  return {};
}

double mass_of(VehicleClass c)
{
  switch (c) {
    case VehicleClass::Sedan: return 1500.0;
    case VehicleClass::Van: return 2200.0;
    case VehicleClass::Truck: return 9000.0;
  }
  return 1500.0;
}

std::string_view to_string(DensityProfile d)
{
  switch (d) {
    case DensityProfile::None: return "none";
    case DensityProfile::Sparse: return "sparse";
    case DensityProfile::Heavy: return "heavy";
  }
  return "?";
}

std::optional<DensityProfile> density_from_string(std::string_view text)
{
  if (text == "none") return DensityProfile::None;
  if (text == "sparse") return DensityProfile::Sparse;
  if (text == "heavy") return DensityProfile::Heavy;
  return std::nullopt;
}

std::string_view to_string(CriticalityBand b)
{
  switch (b) {
    case CriticalityBand::Safe: return "safe";
    case CriticalityBand::Moderate: return "moderate";
    case CriticalityBand::DangerousNoCollision: return "dangerous_no_collision";
    case CriticalityBand::CollisionExpected: return "collision_expected";
  }
  return "?";
}

std::optional<CriticalityBand> band_from_string(std::string_view text)
{
  if (text == "safe") return CriticalityBand::Safe;
  if (text == "moderate") return CriticalityBand::Moderate;
  if (text == "dangerous_no_collision") return CriticalityBand::DangerousNoCollision;
  if (text == "collision_expected") return CriticalityBand::CollisionExpected;
  return std::nullopt;
}

const AdversarySpec * ScenarioSpec::find_adversary(const std::string & id) const
{
  for (const auto & a : adversaries) {
    if (a.id == id) {
      return &a;
    }
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Encoding

json condition_to_json(const Condition & c)
{
  json j;
  j["op"] = std::string(to_string(c.op));
  switch (c.op) {
    case Condition::Op::SpeedBelow:
    case Condition::Op::Elapsed:
      j["value"] = c.value;
      break;
    case Condition::Op::SameLaneAs:
      j["vehicle"] = c.vehicle;
      break;
    case Condition::Op::GapBelow:
    case Condition::Op::LeadAbove:
      j["vehicle"] = c.vehicle;
      j["value"] = c.value;
      break;
    case Condition::Op::PassedPosition:
      j["lane"] = c.lane;
      j["value"] = c.value;
      break;
    case Condition::Op::And:
    case Condition::Op::Or:
    case Condition::Op::Not: {
      json arr = json::array();
      for (const auto & ch : c.children) {
        arr.push_back(condition_to_json(ch));
      }
      j["children"] = std::move(arr);
      break;
    }
  }
  return j;
}

json node_to_json(const BehaviorNode & node)
{
  json j;
  j["type"] = std::string(to_string(node.type));
  if (node.type == BehaviorNode::Type::Atomic) {
    const auto & a = node.atomic;
    j["kind"] = a.kind;
    j["agent"] = a.agent;
    json cfg = json::object();
    for (const auto & [k, v] : a.config) {
      if (std::holds_alternative<double>(v)) {
        cfg[k] = std::get<double>(v);
      } else {
        cfg[k] = std::get<std::string>(v);
      }
    }
    j["config"] = std::move(cfg);
    if (a.success) j["success"] = condition_to_json(*a.success);
    if (a.fail) j["fail"] = condition_to_json(*a.fail);
    if (a.timeout) j["timeout"] = *a.timeout;
    return j;
  }
  if (node.type == BehaviorNode::Type::Concurrent) {
    j["policy"] = std::string(to_string(node.policy));
  }
  json arr = json::array();
  for (const auto & ch : node.children) {
    arr.push_back(node_to_json(ch));
  }
  j["children"] = std::move(arr);
  return j;
}

json scenario_to_json(const ScenarioSpec & spec)
{
  json doc;
  doc["schema_version"] = spec.schema_version;
  doc["seed"] = spec.seed;
  const auto & w = spec.environment.weather;
  doc["environment"] = {
    {"map_id", spec.environment.map_id},
    {"weather",
     {{"precipitation", w.precipitation},
      {"fog_density", w.fog_density},
      {"time_of_day", w.time_of_day},
      {"friction_multiplier", w.friction_multiplier}}}};
  const auto & q = spec.ego.placement;
  doc["ego"] = {
    {"controller", spec.ego.controller},
    {"target_speed", spec.ego.target_speed},
    {"placement",
     {{"context", std::string(to_string(q.context))},
      {"require_left_neighbor", q.require_left_neighbor},
      {"require_right_neighbor", q.require_right_neighbor},
      {"green_on_arrival", q.green_on_arrival}}}};
  json advs = json::array();
  for (const auto & a : spec.adversaries) {
    advs.push_back(
      {{"id", a.id},
       {"vehicle_class", std::string(to_string(a.vehicle_class))},
       {"placement", {{"relation", std::string(to_string(a.placement.relation))}, {"gap", a.placement.gap}}},
       {"behavior", node_to_json(a.behavior_root)}});
  }
  doc["adversaries"] = std::move(advs);
  doc["background"] = {
    {"count", spec.background.count},
    {"spawn_radius", spec.background.spawn_radius},
    {"density_profile", std::string(to_string(spec.background.density_profile))}};
  doc["intent"] = {{"band", std::string(to_string(spec.intent.band))}, {"narrative", spec.intent.narrative}};
  return doc;
}

std::string serialize_scenario(const ScenarioSpec & spec) { return scenario_to_json(spec).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Decoding

namespace
{

[[noreturn]] void syntax(const std::string & path, const std::string & msg)
{
  throw Error(ErrorKind::Syntax, "scenario: " + path + ": " + msg);
}

void expect_object(const json & j, const std::string & path, std::initializer_list<const char *> allowed)
{
  if (!j.is_object()) {
    syntax(path, "expected an object");
  }
  for (const auto & [key, value] : j.items()) {
    (void)value;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char * a) { return key == a; })) {
      syntax(path + "/" + key, "unknown field");
    }
  }
}

const json & field(const json & j, const char * key, const std::string & path)
{
  if (!j.contains(key)) {
    syntax(path + "/" + key, "missing field");
  }
  return j.at(key);
}

double number_field(const json & j, const char * key, const std::string & path)
{
  const json & v = field(j, key, path);
  if (!v.is_number()) {
    syntax(path + "/" + key, "expected a number");
  }
  return v.get<double>();
}

std::string string_field(const json & j, const char * key, const std::string & path)
{
  const json & v = field(j, key, path);
  if (!v.is_string()) {
    syntax(path + "/" + key, "expected a string");
  }
  return v.get<std::string>();
}

bool bool_field(const json & j, const char * key, const std::string & path)
{
  const json & v = field(j, key, path);
  if (!v.is_boolean()) {
    syntax(path + "/" + key, "expected true or false");
  }
  return v.get<bool>();
}

const json & array_field(const json & j, const char * key, const std::string & path)
{
  const json & v = field(j, key, path);
  if (!v.is_array()) {
    syntax(path + "/" + key, "expected an array");
  }
  return v;
}

template <typename Enum, typename Parse>
Enum enum_field(const json & j, const char * key, const std::string & path, Parse parse)
{
  const std::string text = string_field(j, key, path);
  const std::optional<Enum> value = parse(text);
  if (!value) {
    syntax(path + "/" + key, "unrecognised value '" + text + "'");
  }
  return *value;
}

std::pair<int, int> line_column(const std::string & text, std::size_t byte)
{
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Condition condition_from_json(const json & j, const std::string & path)
{
  expect_object(j, path, {"op", "value", "vehicle", "lane", "children"});
  Condition c;
  c.op = enum_field<Condition::Op>(j, "op", path, condition_op_from_string);
  switch (c.op) {
    case Condition::Op::SpeedBelow:
    case Condition::Op::Elapsed:
      c.value = number_field(j, "value", path);
      break;
    case Condition::Op::SameLaneAs:
      c.vehicle = string_field(j, "vehicle", path);
      break;
    case Condition::Op::GapBelow:
    case Condition::Op::LeadAbove:
      c.vehicle = string_field(j, "vehicle", path);
      c.value = number_field(j, "value", path);
      break;
    case Condition::Op::PassedPosition:
      c.lane = string_field(j, "lane", path);
      c.value = number_field(j, "value", path);
      break;
    case Condition::Op::And:
    case Condition::Op::Or:
    case Condition::Op::Not: {
      const json & arr = array_field(j, "children", path);
      for (std::size_t i = 0; i < arr.size(); ++i) {
        c.children.push_back(condition_from_json(arr[i], path + "/children/" + std::to_string(i)));
      }
      break;
    }
  }
  return c;
}

BehaviorNode node_from_json(const json & j, const std::string & path)
{
  if (!j.is_object()) {
    syntax(path, "expected an object");
  }
  const std::string type = string_field(j, "type", path);
  if (type == "atomic") {
    expect_object(j, path, {"type", "kind", "agent", "config", "success", "fail", "timeout"});
    AtomicBehavior a;
    a.kind = string_field(j, "kind", path);
    a.agent = string_field(j, "agent", path);
    const json & cfg = field(j, "config", path);
    if (!cfg.is_object()) {
      syntax(path + "/config", "expected an object");
    }
    for (const auto & [k, v] : cfg.items()) {
      if (v.is_number()) {
        a.config[k] = v.get<double>();
      } else if (v.is_string()) {
        a.config[k] = v.get<std::string>();
      } else {
        syntax(path + "/config/" + k, "expected a number or a string");
      }
    }
    if (j.contains("success")) a.success = condition_from_json(j.at("success"), path + "/success");
    if (j.contains("fail")) a.fail = condition_from_json(j.at("fail"), path + "/fail");
    if (j.contains("timeout")) a.timeout = number_field(j, "timeout", path);
    return BehaviorNode::make_atomic(std::move(a));
  }
  std::vector<BehaviorNode> children;
  if (type == "sequential") {
    expect_object(j, path, {"type", "children"});
  } else if (type == "concurrent") {
    expect_object(j, path, {"type", "children", "policy"});
  } else {
    syntax(path + "/type", "unrecognised node type '" + type + "'");
  }
  const json & arr = array_field(j, "children", path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    children.push_back(node_from_json(arr[i], path + "/children/" + std::to_string(i)));
  }
  if (type == "sequential") {
    return BehaviorNode::sequential(std::move(children));
  }
  const std::string policy = string_field(j, "policy", path);
  if (policy != "all_succeed" && policy != "any_succeeds") {
    syntax(path + "/policy", "unrecognised policy '" + policy + "'");
  }
  return BehaviorNode::concurrent(
    std::move(children), policy == "all_succeed" ? ConcurrentPolicy::AllSucceed : ConcurrentPolicy::AnySucceeds);
}

WeatherConfig weather_from_json(const json & j, const std::string & path)
{
  expect_object(j, path, {"precipitation", "fog_density", "time_of_day", "friction_multiplier"});
  WeatherConfig w;
  w.precipitation = number_field(j, "precipitation", path);
  w.fog_density = number_field(j, "fog_density", path);
  w.time_of_day = number_field(j, "time_of_day", path);
  w.friction_multiplier = number_field(j, "friction_multiplier", path);
  return w;
}

ScenarioSpec scenario_from_json(const json & doc)
{
  const std::string root = "";
  expect_object(doc, "/", {"schema_version", "seed", "environment", "ego", "adversaries", "background", "intent"});
  ScenarioSpec spec;
  const json & version = field(doc, "schema_version", root);
  if (!version.is_number_integer()) {
    syntax("/schema_version", "expected an integer");
  }
  spec.schema_version = version.get<int>();
  if (spec.schema_version > kScenarioSchemaVersion || spec.schema_version < 1) {
    throw Error(
      ErrorKind::Range, "scenario: /schema_version: unsupported version " + std::to_string(spec.schema_version));
  }
  const json & seed = field(doc, "seed", root);
  if (!seed.is_number_unsigned()) {
    syntax("/seed", "expected a non-negative integer");
  }
  spec.seed = seed.get<std::uint64_t>();

  const json & env = field(doc, "environment", root);
  expect_object(env, "/environment", {"map_id", "weather"});
  spec.environment.map_id = string_field(env, "map_id", "/environment");
  if (env.contains("weather")) {
    spec.environment.weather = weather_from_json(env.at("weather"), "/environment/weather");
  }

  const json & ego = field(doc, "ego", root);
  expect_object(ego, "/ego", {"placement", "target_speed", "controller"});
  const json & q = field(ego, "placement", "/ego");
  expect_object(q, "/ego/placement", {"context", "require_left_neighbor", "require_right_neighbor", "green_on_arrival"});
  spec.ego.placement.context = enum_field<RoadContext>(q, "context", "/ego/placement", road_context_from_string);
  if (q.contains("require_left_neighbor"))
    spec.ego.placement.require_left_neighbor = bool_field(q, "require_left_neighbor", "/ego/placement");
  if (q.contains("require_right_neighbor"))
    spec.ego.placement.require_right_neighbor = bool_field(q, "require_right_neighbor", "/ego/placement");
  if (q.contains("green_on_arrival"))
    spec.ego.placement.green_on_arrival = bool_field(q, "green_on_arrival", "/ego/placement");
  spec.ego.target_speed = number_field(ego, "target_speed", "/ego");
  if (ego.contains("controller")) spec.ego.controller = string_field(ego, "controller", "/ego");

  if (doc.contains("adversaries")) {
    const json & advs = array_field(doc, "adversaries", root);
    for (std::size_t i = 0; i < advs.size(); ++i) {
      const std::string path = "/adversaries/" + std::to_string(i);
      const json & aj = advs[i];
      expect_object(aj, path, {"id", "vehicle_class", "placement", "behavior"});
      AdversarySpec a;
      a.id = string_field(aj, "id", path);
      a.vehicle_class = enum_field<VehicleClass>(aj, "vehicle_class", path, vehicle_class_from_string);
      const json & pj = field(aj, "placement", path);
      expect_object(pj, path + "/placement", {"relation", "gap"});
      a.placement.relation = enum_field<Relation>(pj, "relation", path + "/placement", relation_from_string);
      a.placement.gap = number_field(pj, "gap", path + "/placement");
      a.behavior_root = node_from_json(field(aj, "behavior", path), path + "/behavior");
      spec.adversaries.push_back(std::move(a));
    }
  }

  if (doc.contains("background")) {
    const json & bg = doc.at("background");
    expect_object(bg, "/background", {"count", "spawn_radius", "density_profile"});
    const json & count = field(bg, "count", "/background");
    if (!count.is_number_integer()) {
      syntax("/background/count", "expected an integer");
    }
    spec.background.count = count.get<int>();
    spec.background.spawn_radius = number_field(bg, "spawn_radius", "/background");
    spec.background.density_profile =
      enum_field<DensityProfile>(bg, "density_profile", "/background", density_from_string);
  }

  if (doc.contains("intent")) {
    const json & in = doc.at("intent");
    expect_object(in, "/intent", {"band", "narrative"});
    spec.intent.band = enum_field<CriticalityBand>(in, "band", "/intent", band_from_string);
    if (in.contains("narrative")) spec.intent.narrative = string_field(in, "narrative", "/intent");
  }
  return spec;
}

ScenarioSpec parse_scenario(const std::string & text, const MapLibrary * maps)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error & e) {
    const auto [line, col] = line_column(text, e.byte);
    throw Error(
      ErrorKind::Syntax,
      "scenario: syntax error at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  ScenarioSpec spec = scenario_from_json(doc);
  throw_first(validate_cross_references(spec, maps), "scenario");
  return spec;
}

ScenarioSpec load_scenario_file(const std::string & path, const MapLibrary * maps)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Reference, "cannot open scenario file " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), maps);
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Violation> validate_cross_references(const ScenarioSpec & spec, const MapLibrary * maps)
{
  std::vector<Violation> out;
  const auto range = [&](std::string path, std::string msg) {
    out.push_back({ErrorKind::Range, std::move(path), std::move(msg)});
  };
  const auto fraction = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };

  if (spec.schema_version != kScenarioSchemaVersion) {
    range("/schema_version", "unsupported version");
  }
  const auto & w = spec.environment.weather;
  if (!fraction(w.precipitation)) range("/environment/weather/precipitation", "must be in [0, 1]");
  if (!fraction(w.fog_density)) range("/environment/weather/fog_density", "must be in [0, 1]");
  if (!(w.time_of_day >= 0.0 && w.time_of_day < 24.0)) range("/environment/weather/time_of_day", "must be in [0, 24)");
  if (!(w.friction_multiplier > 0.0 && w.friction_multiplier <= 1.0))
    range("/environment/weather/friction_multiplier", "must be in (0, 1]");
  if (spec.environment.map_id.empty()) {
    range("/environment/map_id", "must not be empty");
  } else if (maps != nullptr && !maps->contains(spec.environment.map_id)) {
    out.push_back({ErrorKind::Reference, "/environment/map_id", "unknown map '" + spec.environment.map_id + "'"});
  }
  if (!(spec.ego.target_speed > 0.0 && std::isfinite(spec.ego.target_speed))) {
    range("/ego/target_speed", "must be positive");
  }
  if (spec.ego.controller != "defensive") {
    out.push_back({ErrorKind::Binding, "/ego/controller", "unknown ego controller '" + spec.ego.controller + "'"});
  }

  std::map<std::string, std::size_t> first_seen;
  std::vector<std::string> vehicles{kEgoId};
  for (std::size_t i = 0; i < spec.adversaries.size(); ++i) {
    const auto & a = spec.adversaries[i];
    const std::string path = "/adversaries/" + std::to_string(i);
    if (a.id.empty()) {
      range(path + "/id", "must not be empty");
    } else if (a.id == kEgoId) {
      out.push_back({ErrorKind::Reference, path + "/id", "'ego' is reserved"});
    } else if (const auto it = first_seen.find(a.id); it != first_seen.end()) {
      out.push_back(
        {ErrorKind::Reference, path + "/id",
         "duplicate adversary id '" + a.id + "' (also /adversaries/" + std::to_string(it->second) + "/id)"});
    } else {
      first_seen[a.id] = i;
      vehicles.push_back(a.id);
    }
  }
  for (std::size_t i = 0; i < spec.adversaries.size(); ++i) {
    const auto & a = spec.adversaries[i];
    const std::string path = "/adversaries/" + std::to_string(i);
    if (!(a.placement.gap >= 0.0 && std::isfinite(a.placement.gap))) {
      range(path + "/placement/gap", "must be non-negative");
    }
    auto tree = check_tree(a.behavior_root, BehaviorRegistry::builtin(), vehicles, path + "/behavior");
    out.insert(out.end(), tree.begin(), tree.end());
    auto own = check_ownership(a.behavior_root, path + "/behavior");
    out.insert(out.end(), own.begin(), own.end());
  }

  const auto & bg = spec.background;
  if (bg.count < 0) range("/background/count", "must be non-negative");
  if ((bg.count == 0) != (bg.density_profile == DensityProfile::None)) {
    range("/background/count", "count must be 0 exactly when density_profile is none");
  }
  if (!(bg.spawn_radius > 0.0 && std::isfinite(bg.spawn_radius))) range("/background/spawn_radius", "must be positive");
  return out;
}

}  // namespace critsim
