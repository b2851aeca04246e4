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


#include "critsim/refine.hpp"

#include "critsim/codec.hpp"
#include "critsim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace critsim
{

using nlohmann::json;

const AlignmentTarget & AlignmentConfig::for_band(CriticalityBand band) const
{
  switch (band) {
    case CriticalityBand::Safe: return safe;
    case CriticalityBand::Moderate: return moderate;
    case CriticalityBand::DangerousNoCollision: return dangerous;
    case CriticalityBand::CollisionExpected: return collision_expected;
  }
  return moderate;
}

std::string_view to_string(RefineDirection d)
{
  return d == RefineDirection::ReduceAggression ? "reduce_aggression" : "increase_aggression";
}

std::string_view to_string(ViolatedPredicate p)
{
  switch (p) {
    case ViolatedPredicate::Collision: return "collision";
    case ViolatedPredicate::ActAbove: return "act_above";
    case ViolatedPredicate::ActBelow: return "act_below";
  }
  return "collision";
}

std::optional<RefinementGoal> check_alignment(const MetricsSummary & summary, const AlignmentTarget & target)
{
  if (summary.collision.collided && !target.collision_allowed) {
    return RefinementGoal{RefineDirection::ReduceAggression, ViolatedPredicate::Collision, 1.0};
  }
  if (summary.min_act < target.lo) {
    return RefinementGoal{RefineDirection::ReduceAggression, ViolatedPredicate::ActBelow, 1.0};
  }
  if (summary.min_act > target.hi) {
    return RefinementGoal{RefineDirection::IncreaseAggression, ViolatedPredicate::ActAbove, 1.0};
  }
  return std::nullopt;
}

namespace
{

double tidy(double v) { return std::round(v * 1e6) / 1e6; }

class KnobWalker
{
public:
  KnobWalker(bool reduce, std::vector<Mutation> & log) : reduce_(reduce), log_(log) {}

  // Keeps the clamped proposal only if it moves in the goal's direction.
  void apply(double & value, double proposed, double lo, double hi, bool larger_is_safer, const std::string & path)
  {
    const double next = tidy(std::clamp(proposed, lo, hi));
    const bool safer = larger_is_safer ? next > value : next < value;
    const bool riskier = larger_is_safer ? next < value : next > value;
    if (reduce_ ? !safer : !riskier) return;
    log_.push_back({path, value, next});
    value = next;
  }

  bool reduce() const { return reduce_; }

private:
  bool reduce_;
  std::vector<Mutation> & log_;
};

void for_each_atomic(BehaviorNode & node, const std::string & path, const std::function<void(AtomicBehavior &, const std::string &)> & fn)
{
  if (node.type == BehaviorNode::Type::Atomic) {
    fn(node.atomic, path);
    return;
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    for_each_atomic(node.children[i], path + "/children/" + std::to_string(i), fn);
  }
}

void number_knob(
  AtomicBehavior & a, const std::string & path, const std::string & key,
  const std::function<void(double &, const std::string &)> & fn)
{
  auto it = a.config.find(key);
  if (it == a.config.end() || !std::holds_alternative<double>(it->second)) return;
  fn(std::get<double>(it->second), path + "/config/" + key);
}

}  // namespace

const std::set<std::string> & speed_knob_kinds()
{
  static const std::set<std::string> kinds = {"FollowVehicle", "CutIn", "RunRedLight"};
  return kinds;
}

ScenarioSpec refine(
  const ScenarioSpec & spec, const RefinementGoal & goal, int episode, std::vector<Mutation> * log,
  const KnobConfig & knobs)
{
  if (episode < 1) throw Error(ErrorKind::Range, "refinement episodes are numbered from 1");
  if (!(goal.magnitude > 0.0)) throw Error(ErrorKind::Range, "refinement magnitude must be positive");
  ScenarioSpec out = spec;
  std::vector<Mutation> local;
  KnobWalker walk(goal.direction == RefineDirection::ReduceAggression, local);
  const double m = goal.magnitude;
  const double sign = walk.reduce() ? 1.0 : -1.0;
  const double ego_length = footprint_of(VehicleClass::Sedan).length;

  const auto adversary_path = [](std::size_t i) { return "/adversaries/" + std::to_string(i); };

  // aggressiveness
  for (std::size_t i = 0; i < out.adversaries.size(); ++i) {
    for_each_atomic(out.adversaries[i].behavior_root, adversary_path(i) + "/behavior", [&](AtomicBehavior & a, const std::string & p) {
      number_knob(a, p, "aggressiveness", [&](double & v, const std::string & path) {
        walk.apply(v, v - sign * knobs.aggressiveness_step * m, 0.0, 1.0, false, path);
      });
    });
  }
  // placement gaps
  const double gap_scale = std::pow(knobs.gap_factor, m);
  for (std::size_t i = 0; i < out.adversaries.size(); ++i) {
    auto & a = out.adversaries[i];
    // a left/right offset is not a separation from the ego
    if (a.placement.relation == Relation::Left || a.placement.relation == Relation::Right) continue;
    double lo = 0.0;
    if (a.placement.relation == Relation::Behind || a.placement.relation == Relation::Ahead) {
      lo = (ego_length + footprint_of(a.vehicle_class).length) / 2.0 + 0.5;
    }
    const double proposed = walk.reduce() ? a.placement.gap * gap_scale : a.placement.gap / gap_scale;
    walk.apply(a.placement.gap, proposed, lo, std::max(knobs.gap_max, a.placement.gap), true, adversary_path(i) + "/placement/gap");
  }
  // trigger gaps
  const double trigger_scale = std::pow(knobs.trigger_factor, m);
  for (std::size_t i = 0; i < out.adversaries.size(); ++i) {
    for_each_atomic(out.adversaries[i].behavior_root, adversary_path(i) + "/behavior", [&](AtomicBehavior & a, const std::string & p) {
      number_knob(a, p, "trigger_gap", [&](double & v, const std::string & path) {
        walk.apply(v, walk.reduce() ? v * trigger_scale : v / trigger_scale, knobs.trigger_min, knobs.trigger_max, true, path);
      });
    });
  }
  // target speeds
  for (std::size_t i = 0; i < out.adversaries.size(); ++i) {
    for_each_atomic(out.adversaries[i].behavior_root, adversary_path(i) + "/behavior", [&](AtomicBehavior & a, const std::string & p) {
      if (!speed_knob_kinds().count(a.kind)) return;
      // a cut-in that settles slower than the victim is the harsher one
      const bool larger_is_safer = a.kind == "CutIn";
      const double dir = larger_is_safer ? -sign : sign;
      number_knob(a, p, "target_speed", [&](double & v, const std::string & path) {
        walk.apply(v, v * (1.0 - dir * knobs.speed_step * m), knobs.speed_min, knobs.speed_max, larger_is_safer, path);
      });
    });
  }

  if (local.empty()) {
    throw Error(
      ErrorKind::KnobExhausted, "episode " + std::to_string(episode) + ": every knob is at its bound for " +
                                  std::string(to_string(goal.direction)));
  }
  throw_first(validate_cross_references(out), "refined scenario");
  if (log != nullptr) log->insert(log->end(), local.begin(), local.end());
  return out;
}

ScenarioSpec RuleRefiner::refine(
  const ScenarioSpec & spec, const RefinementGoal & goal, const MetricsSummary &, int episode, std::vector<Mutation> & log)
{
  return critsim::refine(spec, goal, episode, &log, knobs_);
}

std::vector<Mutation> diff_specs(const ScenarioSpec & before, const ScenarioSpec & after)
{
  const json a = scenario_to_json(before);
  const json b = scenario_to_json(after);
  std::vector<Mutation> out;
  for (const auto & op : json::diff(a, b)) {
    const std::string path = op.at("path").get<std::string>();
    const json::json_pointer ptr(path);
    Mutation m;
    m.path = path;
    m.before = a.contains(ptr) ? a.at(ptr) : json();
    m.after = op.contains("value") ? op.at("value") : json();
    out.push_back(std::move(m));
  }
  return out;
}

ScenarioSpec RemoteRefiner::refine(
  const ScenarioSpec & spec, const RefinementGoal & goal, const MetricsSummary & summary, int episode,
  std::vector<Mutation> & log)
{
  const json input = {
    {"scenario", scenario_to_json(spec)},
    {"goal", {{"direction", to_string(goal.direction)}, {"violated", to_string(goal.violated)}, {"magnitude", goal.magnitude}}},
    {"metrics", metrics_to_json(summary)},
    {"episode", episode}};
  const json reply = backend_.ask("refiner", input, [&](const json & r) {
    try {
      const ScenarioSpec s = scenario_from_json(r.at("scenario"));
      return validate_cross_references(s, &maps_);
    } catch (const Error & e) {
      return std::vector<Violation>{{e.kind(), "/scenario", e.what()}};
    }
  });
  ScenarioSpec out = scenario_from_json(reply.at("scenario"));
  out.seed = spec.seed;
  auto changes = diff_specs(spec, out);
  if (changes.empty()) {
    throw Error(ErrorKind::KnobExhausted, "episode " + std::to_string(episode) + ": the refiner returned the scenario unchanged");
  }
  log.insert(log.end(), changes.begin(), changes.end());
  return out;
}

RefineOutcome refine_until_aligned(const ScenarioSpec & spec, const MapLibrary & maps, const RefineConfig & config, Refiner * refiner)
{
  if (config.budget < 0) throw Error(ErrorKind::Range, "refinement budget must be non-negative");
  RuleRefiner rules;
  Refiner & r = refiner != nullptr ? *refiner : rules;
  const AlignmentTarget & target = config.bands.for_band(spec.intent.band);

  RefineOutcome out;
  out.initial_spec = spec;
  out.final_spec = spec;
  out.initial_trace = run_scenario(spec, maps, config.sim);
  out.final_trace = out.initial_trace;
  out.initial = evaluate(out.initial_trace);
  out.final = out.initial;

  double magnitude = 1.0;
  std::optional<RefineDirection> previous;
  for (int episode = 1; episode <= config.budget; ++episode) {
    auto goal = check_alignment(out.final, target);
    if (!goal) break;
    if (previous && *previous != goal->direction) magnitude /= 2.0;
    goal->magnitude = magnitude;
    RefinementEpisodeLog entry;
    entry.episode = episode;
    entry.goal = *goal;
    entry.pre = out.final;
    ScenarioSpec next;
    try {
      next = r.refine(out.final_spec, *goal, out.final, episode, entry.mutations);
    } catch (const Error & e) {
      if (e.kind() != ErrorKind::KnobExhausted) throw;
      out.exhausted = true;
      break;
    }
    SimTrace trace = run_scenario(next, maps, config.sim);
    entry.post = evaluate(trace);
    out.final_spec = std::move(next);
    out.final_trace = std::move(trace);
    out.final = entry.post;
    out.episodes.push_back(std::move(entry));
    previous = goal->direction;
  }
  out.aligned = !check_alignment(out.final, target).has_value();
  return out;
}

json episode_to_json(const RefinementEpisodeLog & log)
{
  json mutations = json::array();
  for (const auto & m : log.mutations) {
    mutations.push_back({{"path", m.path}, {"before", m.before}, {"after", m.after}});
  }
  return {
    {"episode", log.episode},
    {"goal",
     {{"direction", to_string(log.goal.direction)},
      {"violated", to_string(log.goal.violated)},
      {"magnitude", log.goal.magnitude}}},
    {"mutations", mutations},
    {"pre", metrics_to_json(log.pre)},
    {"post", metrics_to_json(log.post)}};
}

}  // namespace critsim
