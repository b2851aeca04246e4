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

#include "critsim/behavior.hpp"
#include "critsim/map.hpp"
#include "critsim/scenario.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace critsim
{

/// Structured requirements the interpreter derives alongside the texts.
struct LayerHints
{
  bool require_left_neighbor{false};
  bool require_right_neighbor{false};
  bool green_on_arrival{false};

  friend bool operator==(const LayerHints &, const LayerHints &) = default;
};

/// The description split into the four scenario layers.
struct ElaboratedDescription
{
  std::string general_environment;
  std::string ego_context;
  std::string adversarial_plan;
  std::string background_plan;
  CriticalityBand band{CriticalityBand::Moderate};
  LayerHints hints;
  std::vector<std::string> improvised;  // layer names filled with defaults

  friend bool operator==(const ElaboratedDescription &, const ElaboratedDescription &) = default;
};

struct EgoPlan
{
  std::string map_id;
  PlacementQuery placement;
  double target_speed{20.0};

  friend bool operator==(const EgoPlan &, const EgoPlan &) = default;
};

struct AdversaryPlan
{
  std::string id;
  VehicleClass vehicle_class{VehicleClass::Sedan};
  RelativePlacement placement;

  friend bool operator==(const AdversaryPlan &, const AdversaryPlan &) = default;
};

/// Everything the action generator may look at once vehicles are placed.
struct PlacedScene
{
  const LaneGraph * map{nullptr};
  EgoPlan ego;
  LanePosition ego_position;
  std::vector<AdversaryPlan> adversaries;
  std::map<std::string, LanePosition> adversary_positions;
};

/// One generation request: the seed drives every random choice.
struct PipelineContext
{
  const MapLibrary & maps;
  std::uint64_t seed{0};
};

/// The six generation agents. Implementations: TemplateBackend (keyword
/// rules, deterministic) and RemoteBackend (chat-completion endpoint).
class GenerationBackend
{
public:
  virtual ~GenerationBackend() = default;
  virtual std::string name() const = 0;

  virtual ElaboratedDescription interpret(const std::string & description, const PipelineContext & ctx) = 0;
  virtual WeatherConfig weather_report(const ElaboratedDescription & d, const PipelineContext & ctx) = 0;
  virtual EgoPlan locate_ego(const ElaboratedDescription & d, const PipelineContext & ctx) = 0;
  virtual std::vector<AdversaryPlan> locate_adversaries(
    const ElaboratedDescription & d, const EgoPlan & ego, const PipelineContext & ctx) = 0;
  /// Called when `plan` cannot be placed; `reason` is the placement error.
  /// Returns a replacement plan or throws the original error.
  virtual AdversaryPlan relocate_adversary(
    const ElaboratedDescription & d, const AdversaryPlan & plan, const std::vector<Relation> & tried,
    const std::string & reason, const PipelineContext & ctx) = 0;
  virtual std::map<std::string, BehaviorNode> generate_actions(
    const ElaboratedDescription & d, const PlacedScene & scene, const PipelineContext & ctx) = 0;
  virtual BackgroundSpec make_chaos(const ElaboratedDescription & d, const PipelineContext & ctx) = 0;
};

struct GenerationResult
{
  ScenarioSpec spec;
  ElaboratedDescription elaborated;
  std::vector<std::string> notes;
};

/// Text to validated scenario. Throws NoMatch (ego), Unsatisfiable (an
/// adversary that cannot be placed by any fallback), Backend and
/// SchemaViolation errors from remote backends, and validation errors.
GenerationResult generate_scenario(
  const std::string & description, GenerationBackend & backend, const PipelineContext & ctx);

// --- deterministic keyword engine ---------------------------------------------

/// Weather keyword table; the keyword appearing first in the text wins.
struct WeatherRule
{
  std::string keyword;
  WeatherConfig weather;
};
const std::vector<WeatherRule> & weather_rules();

/// Background counts per density profile.
int density_count(DensityProfile d);

/// Ego target speed used for each road context.
double ego_speed_for(RoadContext context);

/// Map id used for each road context.
std::string map_for(RoadContext context);

/// Relations tried, in order, when a placement is unsatisfiable.
const std::vector<Relation> & placement_fallback_order();

/// Jitter amplitudes applied by the template engine; zero disables.
struct JitterConfig
{
  double gap{0.15};      // relative
  double speed{0.05};    // relative
  double trigger{0.2};   // relative
  double timing{0.2};    // relative
};

class TemplateBackend : public GenerationBackend
{
public:
  explicit TemplateBackend(JitterConfig jitter = {}) : jitter_(jitter) {}

  std::string name() const override { return "template"; }
  ElaboratedDescription interpret(const std::string & description, const PipelineContext & ctx) override;
  WeatherConfig weather_report(const ElaboratedDescription & d, const PipelineContext & ctx) override;
  EgoPlan locate_ego(const ElaboratedDescription & d, const PipelineContext & ctx) override;
  std::vector<AdversaryPlan> locate_adversaries(
    const ElaboratedDescription & d, const EgoPlan & ego, const PipelineContext & ctx) override;
  AdversaryPlan relocate_adversary(
    const ElaboratedDescription & d, const AdversaryPlan & plan, const std::vector<Relation> & tried,
    const std::string & reason, const PipelineContext & ctx) override;
  std::map<std::string, BehaviorNode> generate_actions(
    const ElaboratedDescription & d, const PlacedScene & scene, const PipelineContext & ctx) override;
  BackgroundSpec make_chaos(const ElaboratedDescription & d, const PipelineContext & ctx) override;

private:
  double jitter(const PipelineContext & ctx, const std::string & key, double amplitude) const;

  JitterConfig jitter_;
};

/// A vehicle mention in an adversarial plan: "a truck", "a sedan", ...
struct Mention
{
  std::string id;
  VehicleClass vehicle_class{VehicleClass::Sedan};
  std::string text;  // span from the mention to the next one
};

std::vector<Mention> find_mentions(const std::string & plan);

// --- remote chat-completion backend -------------------------------------------

struct RemoteConfig
{
  std::string base_url;  // e.g. http://localhost:8000
  std::string path{"/v1/chat/completions"};
  std::string model;
  std::string token;  // bearer token; empty for none
  double temperature{0.0};
  int max_retries{3};
  int timeout_seconds{60};
  std::string prompt_dir;

  /// Reads a JSON config object; CRITSIM_API_TOKEN overrides the token.
  static RemoteConfig from_json(const nlohmann::json & j);
};

/// Minimal JSON-schema subset: type, properties, required,
/// additionalProperties (false), enum, minimum, maximum, items.
std::vector<Violation> validate_schema(const nlohmann::json & value, const nlohmann::json & schema, const std::string & path = "");

/// Output schema for each remote agent, keyed by agent name.
const nlohmann::json & agent_schema(const std::string & agent);

class RemoteBackend : public GenerationBackend
{
public:
  explicit RemoteBackend(RemoteConfig config);

  std::string name() const override { return "remote"; }
  ElaboratedDescription interpret(const std::string & description, const PipelineContext & ctx) override;
  WeatherConfig weather_report(const ElaboratedDescription & d, const PipelineContext & ctx) override;
  EgoPlan locate_ego(const ElaboratedDescription & d, const PipelineContext & ctx) override;
  std::vector<AdversaryPlan> locate_adversaries(
    const ElaboratedDescription & d, const EgoPlan & ego, const PipelineContext & ctx) override;
  AdversaryPlan relocate_adversary(
    const ElaboratedDescription & d, const AdversaryPlan & plan, const std::vector<Relation> & tried,
    const std::string & reason, const PipelineContext & ctx) override;
  std::map<std::string, BehaviorNode> generate_actions(
    const ElaboratedDescription & d, const PlacedScene & scene, const PipelineContext & ctx) override;
  BackgroundSpec make_chaos(const ElaboratedDescription & d, const PipelineContext & ctx) override;

  /// Sends one agent request and returns the schema-valid JSON reply.
  /// `extra_check` may add semantic violations; those also trigger a retry.
  nlohmann::json ask(
    const std::string & agent, const nlohmann::json & input,
    const std::function<std::vector<Violation>(const nlohmann::json &)> & extra_check = {});

  std::size_t requests() const { return requests_; }

private:
  std::string prompt(const std::string & agent) const;
  std::string chat(const std::string & system, const std::string & user);

  RemoteConfig config_;
  std::size_t requests_{0};
};

nlohmann::json elaborated_to_json(const ElaboratedDescription & d);

}  // namespace critsim
