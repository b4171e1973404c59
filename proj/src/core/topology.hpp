// Copyright 2026 The RobustComm Authors.
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

#ifndef ROBUSTCOMM_CORE_TOPOLOGY_HPP_
#define ROBUSTCOMM_CORE_TOPOLOGY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace robustcomm {

// Node ids are opaque strings in scenario files; internally every node is an
// index into Network::nodes. Index order follows the scenario's node list.
using NodeId = int;

struct Network {
  std::vector<std::string> nodes;               // id strings, index = NodeId
  std::vector<std::pair<NodeId, NodeId>> edges;  // unordered pairs, a < b
  NodeId sender = -1;
  NodeId receiver = -1;

  int size() const { return static_cast<int>(nodes.size()); }
  const std::string& name(NodeId v) const { return nodes[v]; }
  std::optional<NodeId> find(const std::string& name) const;
  bool adjacent(NodeId a, NodeId b) const;
  std::vector<NodeId> neighbors(NodeId v) const;

  // Throws std::invalid_argument on any structural defect: dangling edge,
  // self loop, duplicate edge, S == R, or a direct S-R link.
  void validate() const;
};

// Convenience builder from id strings; validates.
Network make_network(std::vector<std::string> nodes,
                     const std::vector<std::pair<std::string, std::string>>& edges,
                     const std::string& sender, const std::string& receiver);

// Two vertex-disjoint sender->receiver paths plus assigned protocol roles.
// The front of each path is the node acting as sender for this run, the back
// the node acting as receiver. In the base circle those are the network's S
// and R; re-rooted copies (other roles on the same cycle) are built with
// circle_from_cycle.
struct Circle {
  std::vector<NodeId> left;
  std::vector<NodeId> right;

  NodeId role_sender() const { return left.front(); }
  NodeId role_receiver() const { return left.back(); }
  int n_circle() const {
    return static_cast<int>(left.size() + right.size()) - 2;
  }
  // Cycle order: left path then right interiors reversed.
  std::vector<NodeId> cycle() const;
  bool contains(NodeId v) const;

  // Checks path endpoints, interior disjointness, K,K' >= 1 and (against net,
  // if given) that consecutive pairs are edges. Throws on violation.
  void validate(const Network* net) const;
};

enum class Side : std::uint8_t { kLeft, kRight, kSender, kReceiver };

struct CircleRole {
  NodeId pred;
  NodeId succ;
  Side side;
};

// Shortest pair of vertex-disjoint S-R paths, minimizing the total node
// count; absent if none. Feasibility and the minimal size come from
// unit-capacity successive shortest paths on the node-split graph; among all
// minimal pairs the lexicographically smallest (left, right) node-id-sequence
// pair is returned, left before right.
std::optional<Circle> two_disjoint_paths(const Network& net);

// Role instances for p on the circle. Interiors get one instance; the role
// sender and role receiver get two, one per orientation (for the receiver:
// (pred=i_K, succ=j_K') and (pred=j_K', succ=i_K)). Throws std::domain_error
// if p is not on the circle.
std::vector<CircleRole> circle_roles(const Circle& circle, NodeId p);

// Some interior node separating S from R, smallest id string first; absent
// when two disjoint paths exist.
std::optional<NodeId> find_cut_vertex(const Network& net);

// Builds a circle on an existing cycle with new sender/receiver roles. Left
// path runs forward along the cycle from new sender to new receiver, right
// path backward.
Circle circle_from_cycle(const std::vector<NodeId>& cycle, NodeId role_s,
                         NodeId role_r);

// Degenerate "circle" that reuses one path as both sides; never produced by
// two_disjoint_paths. Exists so the cut-network necessity demo can force the
// protocol onto a single path.
Circle forced_single_path_circle(const std::vector<NodeId>& path);

}  // namespace robustcomm

#endif  // ROBUSTCOMM_CORE_TOPOLOGY_HPP_
