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


#include "critsim/codec.hpp"
#include "critsim/engine.hpp"
#include "critsim/error.hpp"
#include "critsim/pipeline.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace critsim
{

using nlohmann::json;

RemoteConfig RemoteConfig::from_json(const json & j)
{
  RemoteConfig c;
  static const std::set<std::string> known = {
    "base_url", "path", "model", "token", "temperature", "max_retries", "timeout_seconds", "prompt_dir"};
  for (const auto & [key, value] : j.items()) {
    if (known.count(key) == 0) throw Error(ErrorKind::Syntax, "backend config: unknown field '" + key + "'");
  }
  try {
    c.base_url = j.at("base_url").get<std::string>();
    c.model = j.value("model", std::string{});
    c.path = j.value("path", c.path);
    c.token = j.value("token", std::string{});
    c.temperature = j.value("temperature", c.temperature);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    c.prompt_dir = j.value("prompt_dir", std::string{});
  } catch (const json::exception & e) {
    throw Error(ErrorKind::Syntax, std::string("backend config: ") + e.what());
  }
  if (const char * token = std::getenv("CRITSIM_API_TOKEN"); token != nullptr && *token != '\0') c.token = token;
  if (c.max_retries < 0) throw Error(ErrorKind::Range, "backend config: max_retries must be >= 0");
  return c;
}

// --- schema validation ----------------------------------------------------------

namespace
{

bool type_matches(const json & v, const std::string & type)
{
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "number") return v.is_number();
  if (type == "integer") return v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
  if (type == "null") return v.is_null();
  return true;
}

}  // namespace

std::vector<Violation> validate_schema(const json & value, const json & schema, const std::string & path)
{
  std::vector<Violation> out;
  const std::string where = path.empty() ? "/" : path;
  const auto fail = [&](const std::string & msg) { out.push_back({ErrorKind::SchemaViolation, where, msg}); };
  if (schema.contains("type")) {
    const std::string type = schema["type"].get<std::string>();
    if (!type_matches(value, type)) {
      fail("expected " + type);
      return out;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto & e : schema["enum"]) found = found || e == value;
    if (!found) fail("value " + value.dump() + " not in " + schema["enum"].dump());
  }
  if (value.is_number()) {
    const double x = value.get<double>();
    if (!std::isfinite(x)) fail("not finite");
    if (schema.contains("minimum") && x < schema["minimum"].get<double>()) fail("below minimum " + schema["minimum"].dump());
    if (schema.contains("maximum") && x > schema["maximum"].get<double>()) fail("above maximum " + schema["maximum"].dump());
    if (schema.contains("exclusiveMinimum") && x <= schema["exclusiveMinimum"].get<double>()) {
      fail("must exceed " + schema["exclusiveMinimum"].dump());
    }
  }
  if (value.is_string() && schema.contains("minLength") &&
      value.get<std::string>().size() < schema["minLength"].get<std::size_t>()) {
    fail("string too short");
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto & r : schema["required"]) {
        if (!value.contains(r.get<std::string>())) fail("missing property '" + r.get<std::string>() + "'");
      }
    }
    const json props = schema.value("properties", json::object());
    const bool closed = schema.contains("additionalProperties") && schema["additionalProperties"].is_boolean() &&
      !schema["additionalProperties"].get<bool>();
    for (const auto & [key, v] : value.items()) {
      if (props.contains(key)) {
        auto sub = validate_schema(v, props[key], path + "/" + key);
        out.insert(out.end(), sub.begin(), sub.end());
      } else if (closed) {
        out.push_back({ErrorKind::SchemaViolation, path + "/" + key, "unexpected property"});
      } else if (schema.contains("additionalProperties") && schema["additionalProperties"].is_object()) {
        auto sub = validate_schema(v, schema["additionalProperties"], path + "/" + key);
        out.insert(out.end(), sub.begin(), sub.end());
      }
    }
  }
  if (value.is_array()) {
    if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>()) fail("too few items");
    if (schema.contains("maxItems") && value.size() > schema["maxItems"].get<std::size_t>()) fail("too many items");
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        auto sub = validate_schema(value[i], schema["items"], path + "/" + std::to_string(i));
        out.insert(out.end(), sub.begin(), sub.end());
      }
    }
  }
  return out;
}

const json & agent_schema(const std::string & agent)
{
  static const json boolean = {{"type", "boolean"}};
  static const json text = {{"type", "string"}, {"minLength", 1}};
  static const std::map<std::string, json> schemas = {
    {"interpreter",
     {{"type", "object"},
      {"additionalProperties", false},
      {"required", {"general_environment", "ego_context", "adversarial_plan", "background_plan", "band", "hints"}},
      {"properties",
       {{"general_environment", text},
        {"ego_context", text},
        {"adversarial_plan", text},
        {"background_plan", text},
        {"band", {{"type", "string"}, {"enum", {"safe", "moderate", "dangerous_no_collision", "collision_expected"}}}},
        {"hints",
         {{"type", "object"},
          {"additionalProperties", false},
          {"required", {"require_left_neighbor", "require_right_neighbor", "green_on_arrival"}},
          {"properties",
           {{"require_left_neighbor", boolean}, {"require_right_neighbor", boolean}, {"green_on_arrival", boolean}}}}},
        {"improvised", {{"type", "array"}, {"items", {{"type", "string"}}}}}}}}},
    {"weather_report",
     {{"type", "object"},
      {"additionalProperties", false},
      {"required", {"precipitation", "fog_density", "time_of_day", "friction_multiplier"}},
      {"properties",
       {{"precipitation", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}},
        {"fog_density", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}},
        {"time_of_day", {{"type", "number"}, {"minimum", 0}, {"maximum", 23.99}}},
        {"friction_multiplier", {{"type", "number"}, {"exclusiveMinimum", 0}, {"maximum", 1}}}}}}},
    {"ego_locator",
     {{"type", "object"},
      {"additionalProperties", false},
      {"required", {"map_id", "context", "target_speed"}},
      {"properties",
       {{"map_id", text},
        {"context", {{"type", "string"}, {"enum", {"straight-lane", "intersection-approach", "curve"}}}},
        {"target_speed", {{"type", "number"}, {"minimum", 1}, {"maximum", 40}}},
        {"require_left_neighbor", boolean},
        {"require_right_neighbor", boolean},
        {"green_on_arrival", boolean}}}}},
    {"adv_locator",
     {{"type", "object"},
      {"additionalProperties", false},
      {"required", {"adversaries"}},
      {"properties",
       {{"adversaries",
         {{"type", "array"},
          {"items",
           {{"type", "object"},
            {"additionalProperties", false},
            {"required", {"id", "vehicle_class", "relation", "gap"}},
            {"properties",
             {{"id", text},
              {"vehicle_class", {{"type", "string"}, {"enum", {"sedan", "van", "truck"}}}},
              {"relation", {{"type", "string"}, {"enum", {"left", "right", "behind", "ahead", "opposite-approach"}}}},
              {"gap", {{"type", "number"}, {"minimum", 0}, {"maximum", 200}}}}}}}}}}}}},
    {"action_generator",
     {{"type", "object"},
      {"additionalProperties", false},
      {"required", {"behaviors"}},
      {"properties", {{"behaviors", {{"type", "object"}, {"additionalProperties", {{"type", "object"}}}}}}}}},
    {"chaos_maker",
     {{"type", "object"},
      {"additionalProperties", false},
      {"required", {"density_profile", "count"}},
      {"properties",
       {{"density_profile", {{"type", "string"}, {"enum", {"none", "sparse", "heavy"}}}},
        {"count", {{"type", "integer"}, {"minimum", 0}, {"maximum", 50}}}}}}},
    {"refiner",
     {{"type", "object"},
      {"additionalProperties", false},
      {"required", {"scenario"}},
      {"properties", {{"scenario", {{"type", "object"}}}, {"rationale", {{"type", "string"}}}}}}},
  };
  const auto it = schemas.find(agent);
  if (it == schemas.end()) throw Error(ErrorKind::Reference, "no schema for agent '" + agent + "'");
  return it->second;
}

// --- transport ----------------------------------------------------------------------

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config))
{
  if (config_.base_url.empty()) throw Error(ErrorKind::Usage, "remote backend needs a base_url");
  if (config_.prompt_dir.empty()) config_.prompt_dir = CRITSIM_PROMPT_DIR;
}

std::string RemoteBackend::prompt(const std::string & agent) const
{
  const std::string path = config_.prompt_dir + "/" + agent + ".txt";
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Reference, "missing prompt template " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string RemoteBackend::chat(const std::string & system, const std::string & user)
{
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);
  const json body = {
    {"model", config_.model},
    {"temperature", config_.temperature},
    {"messages", {{{"role", "system"}, {"content", system}}, {{"role", "user"}, {"content", user}}}}};
  ++requests_;
  const auto res = client.Post(config_.path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::Backend, "cannot reach " + config_.base_url + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::Backend, "endpoint returned HTTP " + std::to_string(res->status));
  }
  try {
    const json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception & e) {
    throw Error(ErrorKind::Backend, std::string("unexpected completion format: ") + e.what());
  }
}

namespace
{

std::string strip_fences(const std::string & text)
{
  const auto open = text.find("```");
  if (open == std::string::npos) return text;
  const auto body = text.find('\n', open);
  const auto close = text.find("```", body == std::string::npos ? open + 3 : body);
  if (body == std::string::npos || close == std::string::npos) return text;
  return text.substr(body + 1, close - body - 1);
}

std::string describe(const std::vector<Violation> & vs)
{
  std::string out;
  for (const auto & v : vs) out += "- " + v.describe() + "\n";
  return out;
}

}  // namespace

json RemoteBackend::ask(
  const std::string & agent, const json & input, const std::function<std::vector<Violation>(const json &)> & extra_check)
{
  const std::string system = prompt(agent);
  const json & schema = agent_schema(agent);
  std::string user = input.dump(2);
  std::vector<Violation> last;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    const std::string content = chat(system, user);
    json reply;
    try {
      reply = json::parse(strip_fences(content));
      last = validate_schema(reply, schema);
    } catch (const json::parse_error & e) {
      last = {{ErrorKind::SchemaViolation, "/", std::string("reply is not JSON: ") + e.what()}};
    }
    if (last.empty() && extra_check) {
      try {
        last = extra_check(reply);
      } catch (const Error & e) {
        last = {{ErrorKind::SchemaViolation, "/", e.what()}};
      }
    }
    if (last.empty()) return reply;
    user = input.dump(2) + "\n\nYour previous reply was rejected:\n" + describe(last) +
      "Reply again with a single JSON object that follows the schema.";
  }
  throw Error(
    ErrorKind::SchemaViolation,
    agent + ": no valid reply after " + std::to_string(config_.max_retries + 1) + " attempts: " + last.front().describe());
}

// --- agents -------------------------------------------------------------------------

namespace
{

json plan_to_json(const AdversaryPlan & p)
{
  return {
    {"id", p.id},
    {"vehicle_class", std::string(to_string(p.vehicle_class))},
    {"relation", std::string(to_string(p.placement.relation))},
    {"gap", p.placement.gap}};
}

AdversaryPlan plan_from_json(const json & j)
{
  AdversaryPlan p;
  p.id = j.at("id").get<std::string>();
  p.vehicle_class = *vehicle_class_from_string(j.at("vehicle_class").get<std::string>());
  p.placement.relation = *relation_from_string(j.at("relation").get<std::string>());
  p.placement.gap = j.at("gap").get<double>();
  return p;
}

}  // namespace

ElaboratedDescription RemoteBackend::interpret(const std::string & description, const PipelineContext &)
{
  const json reply = ask("interpreter", {{"description", description}}, [](const json & r) {
    std::vector<Violation> out;
    for (const char * k : {"general_environment", "ego_context", "adversarial_plan", "background_plan"}) {
      if (r.at(k).get<std::string>().find_first_not_of(" \t\n") == std::string::npos) {
        out.push_back({ErrorKind::SchemaViolation, std::string("/") + k, "layer text is blank"});
      }
    }
    return out;
  });
  ElaboratedDescription d;
  d.general_environment = reply["general_environment"].get<std::string>();
  d.ego_context = reply["ego_context"].get<std::string>();
  d.adversarial_plan = reply["adversarial_plan"].get<std::string>();
  d.background_plan = reply["background_plan"].get<std::string>();
  d.band = *band_from_string(reply["band"].get<std::string>());
  d.hints.require_left_neighbor = reply["hints"]["require_left_neighbor"].get<bool>();
  d.hints.require_right_neighbor = reply["hints"]["require_right_neighbor"].get<bool>();
  d.hints.green_on_arrival = reply["hints"]["green_on_arrival"].get<bool>();
  if (reply.contains("improvised")) d.improvised = reply["improvised"].get<std::vector<std::string>>();
  return d;
}

WeatherConfig RemoteBackend::weather_report(const ElaboratedDescription & d, const PipelineContext &)
{
  const json reply = ask("weather_report", {{"general_environment", d.general_environment}});
  return weather_from_json(reply, "/weather");
}

EgoPlan RemoteBackend::locate_ego(const ElaboratedDescription & d, const PipelineContext & ctx)
{
  const json reply = ask(
    "ego_locator",
    {{"ego_context", d.ego_context}, {"hints", elaborated_to_json(d)["hints"]}, {"maps", ctx.maps.ids()}},
    [&](const json & r) {
      std::vector<Violation> out;
      if (!ctx.maps.contains(r["map_id"].get<std::string>())) {
        out.push_back({ErrorKind::SchemaViolation, "/map_id", "unknown map"});
      }
      return out;
    });
  EgoPlan plan;
  plan.map_id = reply["map_id"].get<std::string>();
  plan.placement.context = *road_context_from_string(reply["context"].get<std::string>());
  plan.placement.require_left_neighbor = reply.value("require_left_neighbor", d.hints.require_left_neighbor);
  plan.placement.require_right_neighbor = reply.value("require_right_neighbor", d.hints.require_right_neighbor);
  plan.placement.green_on_arrival = reply.value("green_on_arrival", false);
  plan.target_speed = reply["target_speed"].get<double>();
  return plan;
}

std::vector<AdversaryPlan> RemoteBackend::locate_adversaries(
  const ElaboratedDescription & d, const EgoPlan & ego, const PipelineContext &)
{
  const json reply = ask(
    "adv_locator",
    {{"adversarial_plan", d.adversarial_plan}, {"ego", {{"map_id", ego.map_id}, {"context", std::string(to_string(ego.placement.context))}}}},
    [](const json & r) {
      std::vector<Violation> out;
      std::set<std::string> ids;
      for (const auto & a : r["adversaries"]) {
        const std::string id = a["id"].get<std::string>();
        if (id == kEgoId || !ids.insert(id).second) {
          out.push_back({ErrorKind::SchemaViolation, "/adversaries", "duplicate or reserved id '" + id + "'"});
        }
      }
      return out;
    });
  std::vector<AdversaryPlan> out;
  for (const auto & a : reply["adversaries"]) out.push_back(plan_from_json(a));
  return out;
}

AdversaryPlan RemoteBackend::relocate_adversary(
  const ElaboratedDescription & d, const AdversaryPlan & plan, const std::vector<Relation> & tried,
  const std::string & reason, const PipelineContext &)
{
  if (static_cast<int>(tried.size()) > config_.max_retries) {
    throw Error(ErrorKind::Unsatisfiable, "adversary '" + plan.id + "' cannot be placed: " + reason);
  }
  json tried_json = json::array();
  for (Relation r : tried) tried_json.push_back(std::string(to_string(r)));
  const json reply = ask(
    "adv_locator",
    {{"adversarial_plan", d.adversarial_plan},
     {"relocate", plan_to_json(plan)},
     {"failed_relations", tried_json},
     {"error", reason}},
    [&](const json & r) {
      std::vector<Violation> out;
      if (r["adversaries"].size() != 1 || r["adversaries"][0]["id"] != plan.id) {
        out.push_back({ErrorKind::SchemaViolation, "/adversaries", "expected exactly the relocated adversary"});
      }
      return out;
    });
  return plan_from_json(reply["adversaries"][0]);
}

std::map<std::string, BehaviorNode> RemoteBackend::generate_actions(
  const ElaboratedDescription & d, const PlacedScene & scene, const PipelineContext &)
{
  json advs = json::array();
  std::vector<std::string> vehicles{kEgoId};
  for (const auto & a : scene.adversaries) {
    json entry = plan_to_json(a);
    const auto & pos = scene.adversary_positions.at(a.id);
    entry["lane"] = pos.lane_id;
    entry["lane_length"] = scene.map->lane(pos.lane_id).length();
    entry["speed_limit"] = scene.map->lane(pos.lane_id).speed_limit;
    advs.push_back(entry);
    vehicles.push_back(a.id);
  }
  json kinds = json::array();
  for (const auto & k : BehaviorRegistry::builtin().kinds()) {
    const KindEntry * e = BehaviorRegistry::builtin().find(k);
    kinds.push_back({{"kind", k}, {"agents", e->agents}, {"summary", e->summary}});
  }
  const json reply = ask(
    "action_generator",
    {{"adversarial_plan", d.adversarial_plan}, {"ego_target_speed", scene.ego.target_speed}, {"adversaries", advs}, {"kinds", kinds}},
    [&](const json & r) {
      std::vector<Violation> out;
      for (const auto & a : scene.adversaries) {
        if (!r["behaviors"].contains(a.id)) {
          out.push_back({ErrorKind::SchemaViolation, "/behaviors/" + a.id, "missing"});
          continue;
        }
        try {
          const BehaviorNode node = node_from_json(r["behaviors"][a.id], "/behaviors/" + a.id);
          auto v = check_tree(node, BehaviorRegistry::builtin(), vehicles, "/behaviors/" + a.id);
          auto o = check_ownership(node, "/behaviors/" + a.id);
          out.insert(out.end(), v.begin(), v.end());
          out.insert(out.end(), o.begin(), o.end());
        } catch (const Error & e) {
          out.push_back({ErrorKind::SchemaViolation, "/behaviors/" + a.id, e.what()});
        }
      }
      return out;
    });
  std::map<std::string, BehaviorNode> out;
  for (const auto & a : scene.adversaries) {
    out[a.id] = node_from_json(reply["behaviors"][a.id], "/behaviors/" + a.id);
  }
  return out;
}

BackgroundSpec RemoteBackend::make_chaos(const ElaboratedDescription & d, const PipelineContext &)
{
  const json reply = ask("chaos_maker", {{"background_plan", d.background_plan}}, [](const json & r) {
    std::vector<Violation> out;
    const bool none = r["density_profile"] == "none";
    if (none != (r["count"].get<int>() == 0)) {
      out.push_back({ErrorKind::SchemaViolation, "/count", "count must be 0 exactly when density_profile is none"});
    }
    return out;
  });
  BackgroundSpec b;
  b.density_profile = *density_from_string(reply["density_profile"].get<std::string>());
  b.count = reply["count"].get<int>();
  return b;
}

}  // namespace critsim
