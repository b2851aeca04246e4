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

#include "critsim/error.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace critsim
{

inline constexpr const char * kEgoId = "ego";

/// Predicate over the world, evaluated for the vehicle that owns the
/// behavior carrying it.
struct Condition
{
  enum class Op
  {
    SpeedBelow,      // owner speed <= value
    SameLaneAs,      // owner settled in the lane of `vehicle`
    GapBelow,        // shortest distance to `vehicle` < value
    LeadAbove,       // owner bumper lead over `vehicle` >= value
    PassedPosition,  // owner reached arc length `value` on `lane`
    Elapsed,         // node-local time >= value
    And,
    Or,
    Not,
  };

  Op op{Op::Elapsed};
  double value{0.0};
  std::string vehicle;
  std::string lane;
  std::vector<Condition> children;

  static Condition speed_below(double v) { return {Op::SpeedBelow, v, {}, {}, {}}; }
  static Condition same_lane_as(std::string id) { return {Op::SameLaneAs, 0.0, std::move(id), {}, {}}; }
  static Condition gap_below(std::string id, double d) { return {Op::GapBelow, d, std::move(id), {}, {}}; }
  static Condition lead_above(std::string id, double d) { return {Op::LeadAbove, d, std::move(id), {}, {}}; }
  static Condition passed_position(std::string lane_id, double s) { return {Op::PassedPosition, s, {}, std::move(lane_id), {}}; }
  static Condition elapsed(double t) { return {Op::Elapsed, t, {}, {}, {}}; }
  static Condition all_of(std::vector<Condition> c) { return {Op::And, 0.0, {}, {}, std::move(c)}; }
  static Condition any_of(std::vector<Condition> c) { return {Op::Or, 0.0, {}, {}, std::move(c)}; }
  static Condition negate(Condition c) { return {Op::Not, 0.0, {}, {}, {std::move(c)}}; }

  friend bool operator==(const Condition &, const Condition &) = default;
};

std::string_view to_string(Condition::Op op);
std::optional<Condition::Op> condition_op_from_string(std::string_view text);

using ParamValue = std::variant<double, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

struct AtomicBehavior
{
  std::string kind;
  std::string agent;
  ParamMap config;
  std::optional<Condition> success;
  std::optional<Condition> fail;
  std::optional<double> timeout;

  friend bool operator==(const AtomicBehavior &, const AtomicBehavior &) = default;
};

enum class ConcurrentPolicy
{
  AllSucceed,
  AnySucceeds,
};

std::string_view to_string(ConcurrentPolicy policy);

struct BehaviorNode
{
  enum class Type
  {
    Atomic,
    Sequential,
    Concurrent,
  };

  Type type{Type::Atomic};
  AtomicBehavior atomic;  // Atomic only
  std::vector<BehaviorNode> children;
  ConcurrentPolicy policy{ConcurrentPolicy::AllSucceed};

  static BehaviorNode make_atomic(AtomicBehavior a);
  static BehaviorNode sequential(std::vector<BehaviorNode> children);
  static BehaviorNode concurrent(std::vector<BehaviorNode> children, ConcurrentPolicy policy);

  friend bool operator==(const BehaviorNode &, const BehaviorNode &) = default;
};

std::string_view to_string(BehaviorNode::Type type);

enum class BehaviorStatus
{
  Running,
  Succeeded,
  Failed,
};

std::string_view to_string(BehaviorStatus status);
inline bool is_terminal(BehaviorStatus s) { return s != BehaviorStatus::Running; }

// ---------------------------------------------------------------------------
// Registry of behavior kinds

struct ParamSchema
{
  enum class Type
  {
    Number,       // finite number within [min, max]
    VehicleRef,   // "ego" or an adversary id
    Choice,       // one of `choices`
    NumberOrMax,  // number within [min, max] or the keyword "max"
  };

  std::string name;
  Type type{Type::Number};
  bool required{true};
  double min{0.0};
  double max{0.0};
  std::vector<std::string> choices;
  std::string unit;
};

struct KindEntry
{
  std::string kind;
  std::vector<ParamSchema> params;
  /// Agents this kind may bind; the first one is the default.
  std::vector<std::string> agents;
  /// Success condition applied when the behavior declares none.
  std::function<std::optional<Condition>(const ParamMap &)> default_success;
  std::string summary;
};

class BehaviorRegistry
{
public:
  /// Throws Error(DuplicateKind).
  void register_kind(KindEntry entry);
  const KindEntry * find(const std::string & kind) const;
  std::vector<std::string> kinds() const;

  /// Registry holding the eight built-in kinds.
  static const BehaviorRegistry & builtin();

  /// Problems with one atomic behavior's kind, agent and config, each
  /// prefixed with `path`. `vehicles` lists every resolvable vehicle id.
  std::vector<Violation> check_atomic(
    const AtomicBehavior & atomic, const std::vector<std::string> & vehicles, const std::string & path) const;

private:
  std::map<std::string, KindEntry> entries_;
};

/// Numeric config value or `fallback` when absent or not numeric.
double param_number(const ParamMap & config, const std::string & key, double fallback);
std::string param_string(const ParamMap & config, const std::string & key, const std::string & fallback = {});

/// Vehicle ids referenced anywhere in the tree (configs and conditions).
std::vector<std::string> referenced_vehicles(const BehaviorNode & node);

/// Problems with a tree's structure, kinds, configs and references.
std::vector<Violation> check_tree(
  const BehaviorNode & node, const BehaviorRegistry & registry, const std::vector<std::string> & vehicles,
  const std::string & path);

}  // namespace critsim
