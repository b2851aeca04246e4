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

#include "critsim/map.hpp"
#include "critsim/metrics.hpp"
#include "critsim/scenario.hpp"
#include "critsim/sim.hpp"

#include <json.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace critsim
{

class RemoteBackend;

struct AlignmentTarget
{
  bool collision_allowed{false};
  double lo{0.0};
  double hi{kInf};
};

/// Target ACT band per criticality band.
struct AlignmentConfig
{
  AlignmentTarget dangerous{false, 0.05, 0.5};
  AlignmentTarget moderate{false, 0.5, 2.0};
  AlignmentTarget safe{false, 2.0, kInf};
  AlignmentTarget collision_expected{true, 0.0, 0.05};

  const AlignmentTarget & for_band(CriticalityBand band) const;
};

enum class RefineDirection
{
  ReduceAggression,
  IncreaseAggression,
};

enum class ViolatedPredicate
{
  Collision,
  ActAbove,
  ActBelow,
};

std::string_view to_string(RefineDirection d);
std::string_view to_string(ViolatedPredicate p);

struct RefinementGoal
{
  RefineDirection direction{RefineDirection::ReduceAggression};
  ViolatedPredicate violated{ViolatedPredicate::Collision};
  /// Scales every knob step; 1 is a full step.
  double magnitude{1.0};
};

/// std::nullopt when aligned. A collision outranks the ACT band.
std::optional<RefinementGoal> check_alignment(const MetricsSummary & summary, const AlignmentTarget & target);

/// One field change; `path` is a JSON pointer into the scenario document.
struct Mutation
{
  std::string path;
  nlohmann::json before;
  nlohmann::json after;
};

/// Knob steps and bounds of the rule-based refiner.
struct KnobConfig
{
  double aggressiveness_step{0.2};
  double gap_factor{1.3};
  double gap_max{150.0};
  double trigger_factor{1.3};
  double trigger_min{2.0};
  double trigger_max{60.0};
  double speed_step{0.1};  // relative
  double speed_min{0.5};
  double speed_max{60.0};
};

/// Behavior kinds whose target speed is a refinement knob: the ones whose
/// speed sets how fast they close on the ego.
const std::set<std::string> & speed_knob_kinds();

/// Applies the goal to every knob that can still move in its direction:
/// aggressiveness, placement gaps (behind, ahead, opposite approach),
/// trigger gaps, adversary target speeds. Throws Error(KnobExhausted) when
/// nothing can move.
ScenarioSpec refine(
  const ScenarioSpec & spec, const RefinementGoal & goal, int episode, std::vector<Mutation> * log = nullptr,
  const KnobConfig & knobs = {});

/// Mutation strategy used by the loop.
class Refiner
{
public:
  virtual ~Refiner() = default;
  virtual ScenarioSpec refine(
    const ScenarioSpec & spec, const RefinementGoal & goal, const MetricsSummary & summary, int episode,
    std::vector<Mutation> & log) = 0;
};

class RuleRefiner : public Refiner
{
public:
  explicit RuleRefiner(KnobConfig knobs = {}) : knobs_(knobs) {}
  ScenarioSpec refine(
    const ScenarioSpec & spec, const RefinementGoal & goal, const MetricsSummary & summary, int episode,
    std::vector<Mutation> & log) override;

private:
  KnobConfig knobs_;
};

/// Asks the remote "refiner" agent for a revised scenario document.
class RemoteRefiner : public Refiner
{
public:
  RemoteRefiner(RemoteBackend & backend, const MapLibrary & maps) : backend_(backend), maps_(maps) {}
  ScenarioSpec refine(
    const ScenarioSpec & spec, const RefinementGoal & goal, const MetricsSummary & summary, int episode,
    std::vector<Mutation> & log) override;

private:
  RemoteBackend & backend_;
  const MapLibrary & maps_;
};

/// Field-level difference between two scenario documents.
std::vector<Mutation> diff_specs(const ScenarioSpec & before, const ScenarioSpec & after);

struct RefinementEpisodeLog
{
  int episode{0};
  RefinementGoal goal;
  std::vector<Mutation> mutations;
  MetricsSummary pre;
  MetricsSummary post;
};

struct RefineConfig
{
  int budget{5};
  SimConfig sim{};
  AlignmentConfig bands{};
};

struct RefineOutcome
{
  ScenarioSpec initial_spec;
  ScenarioSpec final_spec;
  MetricsSummary initial;
  MetricsSummary final;
  SimTrace initial_trace;
  SimTrace final_trace;
  std::vector<RefinementEpisodeLog> episodes;
  bool aligned{false};
  bool exhausted{false};
};

/// simulate -> evaluate -> check -> refine, at most `budget` refinements,
/// every episode on the scenario's own seed. Uses a RuleRefiner when
/// `refiner` is null.
RefineOutcome refine_until_aligned(
  const ScenarioSpec & spec, const MapLibrary & maps, const RefineConfig & config = {}, Refiner * refiner = nullptr);

nlohmann::json episode_to_json(const RefinementEpisodeLog & log);

}  // namespace critsim
