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

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace critsim
{

/// Result of ticking one atomic behavior.
struct LeafResult
{
  BehaviorStatus status{BehaviorStatus::Running};
  std::string reason;
};

struct StatusEvent
{
  std::int64_t tick{0};
  std::string owner;
  std::string path;
  BehaviorStatus status{BehaviorStatus::Running};
  std::string reason;
};

/// Flattened runtime copy of a set of behavior trees, one root per owner.
///
/// The engine handles composition, activation bookkeeping and timeouts; the
/// leaf callback supplies control and evaluates the atomic's fail and
/// success conditions (in that order).
class BehaviorEngine
{
public:
  struct Root
  {
    std::string owner;
    BehaviorNode tree;
  };

  struct NodeState
  {
    int parent{-1};
    std::vector<int> children;
    BehaviorNode::Type type{BehaviorNode::Type::Atomic};
    ConcurrentPolicy policy{ConcurrentPolicy::AllSucceed};
    const AtomicBehavior * atomic{nullptr};
    std::string owner;
    std::string path;
    BehaviorStatus status{BehaviorStatus::Running};
    std::string reason;
    std::int64_t activated{-1};  // tick of the first tick, -1 before
    std::int64_t finished{-1};   // tick the status became terminal
    std::int64_t ticks{0};       // how many times the node was ticked
  };

  /// `elapsed` is node-local time in seconds at this tick (0 on the first).
  using LeafTicker = std::function<LeafResult(int node, const NodeState & state, double elapsed)>;

  /// Throws Error(OwnershipConflict) when two concurrently active subtrees
  /// could control the same vehicle.
  BehaviorEngine(std::vector<Root> roots, double dt);

  BehaviorEngine(const BehaviorEngine &) = delete;
  BehaviorEngine & operator=(const BehaviorEngine &) = delete;

  /// Ticks every root that is still running. Returns the status events
  /// (terminal transitions) produced at this tick.
  std::vector<StatusEvent> tick(std::int64_t tick_index, const LeafTicker & leaf);

  std::size_t root_count() const { return roots_.size(); }
  const std::string & root_owner(std::size_t i) const { return roots_[i].owner; }
  BehaviorStatus root_status(std::size_t i) const { return nodes_[root_nodes_[i]].status; }
  const std::vector<NodeState> & nodes() const { return nodes_; }
  double dt() const { return dt_; }

  /// Structure, configs and per-node status of the whole web.
  nlohmann::json snapshot_web() const;

private:
  int flatten(const BehaviorNode & node, int parent, const std::string & owner, const std::string & path);
  BehaviorStatus tick_node(int id, std::int64_t tick_index, const LeafTicker & leaf, std::vector<StatusEvent> & events);
  void finish(int id, BehaviorStatus status, std::string reason, std::int64_t tick_index, std::vector<StatusEvent> & events);
  nlohmann::json node_json(int id) const;

  std::vector<Root> roots_;
  std::vector<int> root_nodes_;
  std::vector<NodeState> nodes_;
  double dt_;
};

/// Ownership check for one tree whose atomics all control `owner`.
std::vector<Violation> check_ownership(const BehaviorNode & tree, const std::string & path);

}  // namespace critsim
