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
#include "critsim/error.hpp"
#include "critsim/geometry.hpp"
#include "critsim/map.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace critsim
{

inline constexpr int kScenarioSchemaVersion = 1;

enum class VehicleClass
{
  Sedan,
  Van,
  Truck,
};

std::string_view to_string(VehicleClass c);
std::optional<VehicleClass> vehicle_class_from_string(std::string_view text);
Footprint footprint_of(VehicleClass c);
/// Curb mass in kg.
double mass_of(VehicleClass c);

enum class DensityProfile
{
  None,
  Sparse,
  Heavy,
};

std::string_view to_string(DensityProfile d);
std::optional<DensityProfile> density_from_string(std::string_view text);

enum class CriticalityBand
{
  Safe,
  Moderate,
  DangerousNoCollision,
  CollisionExpected,
};

std::string_view to_string(CriticalityBand b);
std::optional<CriticalityBand> band_from_string(std::string_view text);

struct WeatherConfig
{
  double precipitation{0.0};
  double fog_density{0.0};
  double time_of_day{12.0};
  double friction_multiplier{1.0};

  friend bool operator==(const WeatherConfig &, const WeatherConfig &) = default;
};

struct EnvironmentSpec
{
  std::string map_id;
  WeatherConfig weather;

  friend bool operator==(const EnvironmentSpec &, const EnvironmentSpec &) = default;
};

struct EgoSpec
{
  PlacementQuery placement;
  double target_speed{20.0};
  std::string controller{"defensive"};

  friend bool operator==(const EgoSpec &, const EgoSpec &) = default;
};

struct AdversarySpec
{
  std::string id;
  VehicleClass vehicle_class{VehicleClass::Sedan};
  RelativePlacement placement;
  BehaviorNode behavior_root;

  friend bool operator==(const AdversarySpec &, const AdversarySpec &) = default;
};

struct BackgroundSpec
{
  int count{0};
  double spawn_radius{150.0};
  DensityProfile density_profile{DensityProfile::None};

  friend bool operator==(const BackgroundSpec &, const BackgroundSpec &) = default;
};

struct IntentSpec
{
  CriticalityBand band{CriticalityBand::Moderate};
  std::string narrative;

  friend bool operator==(const IntentSpec &, const IntentSpec &) = default;
};

struct ScenarioSpec
{
  int schema_version{kScenarioSchemaVersion};
  std::uint64_t seed{0};
  EnvironmentSpec environment;
  EgoSpec ego;
  std::vector<AdversarySpec> adversaries;
  BackgroundSpec background;
  IntentSpec intent;

  const AdversarySpec * find_adversary(const std::string & id) const;
  friend bool operator==(const ScenarioSpec &, const ScenarioSpec &) = default;
};

/// Parses and validates a scenario document. Throws Error with kind Syntax
/// (with line and column), Reference, Range, UnknownKind or Binding.
ScenarioSpec parse_scenario(const std::string & text, const MapLibrary * maps = nullptr);

/// Canonical document: sorted keys, two-space indentation, trailing newline.
std::string serialize_scenario(const ScenarioSpec & spec);

/// Every invariant violation; empty iff the spec is valid. The map check is
/// skipped when `maps` is null.
std::vector<Violation> validate_cross_references(const ScenarioSpec & spec, const MapLibrary * maps = nullptr);

ScenarioSpec load_scenario_file(const std::string & path, const MapLibrary * maps = nullptr);

}  // namespace critsim
