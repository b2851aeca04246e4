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

#include "critsim/engine.hpp"

#include "critsim/codec.hpp"
#include "critsim/error.hpp"

#include <set>

namespace critsim
{

namespace
{

// Atomics of registered kinds bind a driving agent and steer their owner.
// Unregistered kinds (scripted test leaves) steer nothing.
bool controls_owner(const BehaviorNode & node)
{
  if (node.type == BehaviorNode::Type::Atomic) {
    return BehaviorRegistry::builtin().find(node.atomic.kind) != nullptr;
  }
  for (const auto & c : node.children) {
    if (controls_owner(c)) {
      return true;
    }
  }
  return false;
}

void ownership(const BehaviorNode & node, const std::string & path, std::vector<Violation> & out)
{
  if (node.type == BehaviorNode::Type::Concurrent) {
    std::vector<std::size_t> controlling;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (controls_owner(node.children[i])) {
        controlling.push_back(i);
      }
    }
    if (controlling.size() >= 2) {
      out.push_back(
        {ErrorKind::OwnershipConflict, path,
         "children " + std::to_string(controlling[0]) + " and " + std::to_string(controlling[1]) +
           " both control the same vehicle"});
    }
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    ownership(node.children[i], path + "/children/" + std::to_string(i), out);
  }
}

}  // namespace

std::vector<Violation> check_ownership(const BehaviorNode & tree, const std::string & path)
{
  std::vector<Violation> out;
  ownership(tree, path, out);
  return out;
}

BehaviorEngine::BehaviorEngine(std::vector<Root> roots, double dt) : roots_(std::move(roots)), dt_(dt)
{
  std::set<std::string> owners;
  std::vector<Violation> problems;
  for (const auto & r : roots_) {
    if (!owners.insert(r.owner).second) {
      problems.push_back({ErrorKind::OwnershipConflict, r.owner, "vehicle has more than one behavior root"});
    }
    auto v = check_ownership(r.tree, r.owner);
    problems.insert(problems.end(), v.begin(), v.end());
  }
  throw_first(problems, "behavior web");
  for (const auto & r : roots_) {
    root_nodes_.push_back(flatten(r.tree, -1, r.owner, r.owner));
  }
}

int BehaviorEngine::flatten(const BehaviorNode & node, int parent, const std::string & owner, const std::string & path)
{
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  nodes_[id].parent = parent;
  nodes_[id].type = node.type;
  nodes_[id].policy = node.policy;
  nodes_[id].owner = owner;
  nodes_[id].path = path;
  if (node.type == BehaviorNode::Type::Atomic) {
    nodes_[id].atomic = &node.atomic;
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    const int child = flatten(node.children[i], id, owner, path + "/" + std::to_string(i));
    nodes_[id].children.push_back(child);
  }
  return id;
}

void BehaviorEngine::finish(
  int id, BehaviorStatus status, std::string reason, std::int64_t tick_index, std::vector<StatusEvent> & events)
{
  auto & n = nodes_[id];
  n.status = status;
  n.reason = std::move(reason);
  n.finished = tick_index;
  events.push_back({tick_index, n.owner, n.path, status, n.reason});
}

std::vector<StatusEvent> BehaviorEngine::tick(std::int64_t tick_index, const LeafTicker & leaf)
{
  std::vector<StatusEvent> events;
  for (const int root : root_nodes_) {
    if (!is_terminal(nodes_[root].status)) {
      tick_node(root, tick_index, leaf, events);
    }
  }
  return events;
}

BehaviorStatus BehaviorEngine::tick_node(
  int id, std::int64_t tick_index, const LeafTicker & leaf, std::vector<StatusEvent> & events)
{
  {
    auto & n = nodes_[id];
    if (is_terminal(n.status)) {
      return n.status;
    }
    if (n.activated < 0) {
      n.activated = tick_index;
    }
    ++n.ticks;
  }

  switch (nodes_[id].type) {
    case BehaviorNode::Type::Atomic: {
      const double elapsed = static_cast<double>(tick_index - nodes_[id].activated) * dt_;
      LeafResult r = leaf(id, nodes_[id], elapsed);
      const auto * a = nodes_[id].atomic;
      if (r.status == BehaviorStatus::Running && a->timeout && elapsed + 1e-9 >= *a->timeout) {
        r = {BehaviorStatus::Failed, "timeout"};
      }
      if (is_terminal(r.status)) {
        finish(id, r.status, std::move(r.reason), tick_index, events);
      }
      return nodes_[id].status;
    }
    case BehaviorNode::Type::Sequential: {
      const auto children = nodes_[id].children;
      for (std::size_t i = 0; i < children.size(); ++i) {
        const BehaviorStatus s = nodes_[children[i]].status;
        if (s == BehaviorStatus::Succeeded) {
          continue;
        }
        const BehaviorStatus r = tick_node(children[i], tick_index, leaf, events);
        if (r == BehaviorStatus::Failed) {
          finish(id, BehaviorStatus::Failed, "child " + std::to_string(i) + " failed", tick_index, events);
        } else if (r == BehaviorStatus::Succeeded && i + 1 == children.size()) {
          finish(id, BehaviorStatus::Succeeded, "", tick_index, events);
        }
        return nodes_[id].status;
      }
      finish(id, BehaviorStatus::Succeeded, "", tick_index, events);
      return nodes_[id].status;
    }
    case BehaviorNode::Type::Concurrent: {
      const auto children = nodes_[id].children;
      for (const int c : children) {
        if (!is_terminal(nodes_[c].status)) {
          tick_node(c, tick_index, leaf, events);
        }
      }
      std::size_t succeeded = 0;
      std::size_t failed = 0;
      for (const int c : children) {
        succeeded += nodes_[c].status == BehaviorStatus::Succeeded ? 1 : 0;
        failed += nodes_[c].status == BehaviorStatus::Failed ? 1 : 0;
      }
      if (nodes_[id].policy == ConcurrentPolicy::AllSucceed) {
        if (failed > 0) {
          finish(id, BehaviorStatus::Failed, "a child failed", tick_index, events);
        } else if (succeeded == children.size()) {
          finish(id, BehaviorStatus::Succeeded, "", tick_index, events);
        }
      } else {
        if (succeeded > 0) {
          finish(id, BehaviorStatus::Succeeded, "", tick_index, events);
        } else if (failed == children.size()) {
          finish(id, BehaviorStatus::Failed, "all children failed", tick_index, events);
        }
      }
      return nodes_[id].status;
    }
  }
  return nodes_[id].status;
}

nlohmann::json BehaviorEngine::node_json(int id) const
{
  const auto & n = nodes_[id];
  nlohmann::json j;
  j["type"] = std::string(to_string(n.type));
  j["path"] = n.path;
  j["status"] = std::string(to_string(n.status));
  if (!n.reason.empty()) j["reason"] = n.reason;
  j["activated"] = n.activated;
  j["finished"] = n.finished;
  if (n.type == BehaviorNode::Type::Atomic) {
    const auto full = node_to_json(BehaviorNode::make_atomic(*n.atomic));
    for (const auto & [k, v] : full.items()) {
      if (k != "type") j[k] = v;
    }
    return j;
  }
  if (n.type == BehaviorNode::Type::Concurrent) {
    j["policy"] = std::string(to_string(n.policy));
  }
  j["children"] = nlohmann::json::array();
  for (const int c : n.children) {
    j["children"].push_back(node_json(c));
  }
  return j;
}

nlohmann::json BehaviorEngine::snapshot_web() const
{
  nlohmann::json roots = nlohmann::json::array();
  for (std::size_t i = 0; i < roots_.size(); ++i) {
    roots.push_back({{"owner", roots_[i].owner}, {"tree", node_json(root_nodes_[i])}});
  }
  return {{"type", "web"}, {"roots", roots}};
}

}  // namespace critsim
