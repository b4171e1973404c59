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

#include "core/topology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>

namespace robustcomm {

std::optional<NodeId> Network::find(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (nodes[i] == name) return i;
  return std::nullopt;
}

bool Network::adjacent(NodeId a, NodeId b) const {
  if (a > b) std::swap(a, b);
  for (const auto& e : edges)
    if (e.first == a && e.second == b) return true;
  return false;
}

std::vector<NodeId> Network::neighbors(NodeId v) const {
  std::vector<NodeId> out;
  for (const auto& e : edges) {
    if (e.first == v) out.push_back(e.second);
    if (e.second == v) out.push_back(e.first);
  }
  std::sort(out.begin(), out.end(),
            [&](NodeId a, NodeId b) { return nodes[a] < nodes[b]; });
  return out;
}

void Network::validate() const {
  if (sender < 0 || sender >= size() || receiver < 0 || receiver >= size())
    throw std::invalid_argument("sender or receiver not a network node");
  if (sender == receiver)
    throw std::invalid_argument("sender and receiver must be distinct");
  std::set<std::string> seen;
  for (const auto& n : nodes)
    if (!seen.insert(n).second)
      throw std::invalid_argument("duplicate node id: " + n);
  std::set<std::pair<NodeId, NodeId>> eseen;
  for (const auto& e : edges) {
    if (e.first < 0 || e.first >= size() || e.second < 0 || e.second >= size())
      throw std::invalid_argument("dangling edge");
    if (e.first == e.second) throw std::invalid_argument("self loop");
    auto key = std::minmax(e.first, e.second);
    if (!eseen.insert(key).second)
      throw std::invalid_argument("duplicate edge");
  }
  if (adjacent(sender, receiver))
    throw std::invalid_argument(
        "sender and receiver must not be directly connected");
}

Network make_network(
    std::vector<std::string> nodes,
    const std::vector<std::pair<std::string, std::string>>& edges,
    const std::string& sender, const std::string& receiver) {
  Network net;
  net.nodes = std::move(nodes);
  for (const auto& e : edges) {
    auto a = net.find(e.first);
    auto b = net.find(e.second);
    if (!a || !b) throw std::invalid_argument("dangling edge: " + e.first +
                                              "-" + e.second);
    net.edges.emplace_back(std::min(*a, *b), std::max(*a, *b));
  }
  auto s = net.find(sender);
  auto r = net.find(receiver);
  if (!s || !r) throw std::invalid_argument("sender/receiver not in node set");
  net.sender = *s;
  net.receiver = *r;
  net.validate();
  return net;
}

std::vector<NodeId> Circle::cycle() const {
  std::vector<NodeId> out(left);
  for (std::size_t i = right.size() - 2; i >= 1; --i) out.push_back(right[i]);
  return out;
}

bool Circle::contains(NodeId v) const {
  return std::find(left.begin(), left.end(), v) != left.end() ||
         std::find(right.begin(), right.end(), v) != right.end();
}

void Circle::validate(const Network* net) const {
  if (left.size() < 3 || right.size() < 3)
    throw std::invalid_argument("each circle path needs an interior node");
  if (left.front() != right.front() || left.back() != right.back())
    throw std::invalid_argument("circle paths must share endpoints");
  if (left.front() == left.back())
    throw std::invalid_argument("circle endpoints must differ");
  std::set<NodeId> seen;
  for (std::size_t i = 1; i + 1 < left.size(); ++i)
    if (!seen.insert(left[i]).second)
      throw std::invalid_argument("repeated interior on circle");
  for (std::size_t i = 1; i + 1 < right.size(); ++i)
    if (!seen.insert(right[i]).second)
      throw std::invalid_argument("circle interiors not disjoint");
  if (seen.count(left.front()) || seen.count(left.back()))
    throw std::invalid_argument("endpoint repeated as interior");
  if (net) {
    for (const auto* path : {&left, &right})
      for (std::size_t i = 0; i + 1 < path->size(); ++i)
        if (!net->adjacent((*path)[i], (*path)[i + 1]))
          throw std::invalid_argument("circle path uses a missing edge");
  }
  if (n_circle() < 4) throw std::invalid_argument("circle too small");
}

namespace {

// Node-split digraph for Menger-style unit-capacity flow. Interior nodes get
// a capacity-1 internal arc; arcs carry cost 1 when they enter an interior
// node so that total flow cost counts interior nodes used.
struct SplitGraph {
  struct Arc {
    int to;
    int cap;
    int cost;
    int rev;
  };
  std::vector<std::vector<Arc>> adj;

  void add(int u, int v, int cap, int cost) {
    adj[u].push_back({v, cap, cost, static_cast<int>(adj[v].size())});
    adj[v].push_back({u, 0, -cost, static_cast<int>(adj[u].size()) - 1});
  }
};

constexpr int kInf = std::numeric_limits<int>::max() / 4;

// Min-cost successive-shortest-path; returns cost per augmentation or absent
// when the flow value is infeasible. Bellman-Ford handles the negative
// residual arcs; graphs here are desk scale.
std::optional<std::vector<int>> min_cost_flow(SplitGraph& g, int s, int t,
                                              int flow) {
  std::vector<int> costs;
  int n = static_cast<int>(g.adj.size());
  for (int f = 0; f < flow; ++f) {
    std::vector<int> dist(n, kInf), pv(n, -1), pe(n, -1);
    dist[s] = 0;
    bool changed = true;
    for (int it = 0; it < n && changed; ++it) {
      changed = false;
      for (int u = 0; u < n; ++u) {
        if (dist[u] == kInf) continue;
        for (int i = 0; i < static_cast<int>(g.adj[u].size()); ++i) {
          const auto& a = g.adj[u][i];
          if (a.cap > 0 && dist[u] + a.cost < dist[a.to]) {
            dist[a.to] = dist[u] + a.cost;
            pv[a.to] = u;
            pe[a.to] = i;
            changed = true;
          }
        }
      }
    }
    if (dist[t] == kInf) return std::nullopt;
    for (int v = t; v != s; v = pv[v]) {
      auto& a = g.adj[pv[v]][pe[v]];
      a.cap -= 1;
      g.adj[v][a.rev].cap += 1;
    }
    costs.push_back(dist[t]);
  }
  return costs;
}

// Interior count of the shortest S-R path avoiding `blocked`; absent if
// disconnected.
std::optional<int> shortest_partner(const Network& net,
                                    const std::vector<char>& blocked) {
  std::vector<int> dist(net.size(), -1);
  std::deque<NodeId> q;
  dist[net.sender] = 0;
  q.push_back(net.sender);
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop_front();
    for (NodeId v : net.neighbors(u)) {
      if (dist[v] >= 0 || blocked[v]) continue;
      dist[v] = dist[u] + 1;
      if (v == net.receiver) return dist[v] - 1;
      q.push_back(v);
    }
  }
  return std::nullopt;
}

// Lexicographically smallest S-R path (by node-id strings) that leaves a
// disjoint partner of exactly `total - own` interiors. Depth-first in sorted
// order; first complete hit is the minimum.
bool lex_left_search(const Network& net, std::vector<char>& used,
                     std::vector<NodeId>& path, int total,
                     std::vector<NodeId>& out) {
  NodeId cur = path.back();
  if (cur == net.receiver) {
    int own = static_cast<int>(path.size()) - 2;
    std::vector<char> blocked(used);
    blocked[net.sender] = blocked[net.receiver] = 0;
    auto partner = shortest_partner(net, blocked);
    if (partner && own + *partner == total) {
      out = path;
      return true;
    }
    return false;
  }
  if (static_cast<int>(path.size()) - 1 > total - 1) return false;
  for (NodeId v : net.neighbors(cur)) {
    if (v == net.sender) continue;
    if (v != net.receiver && used[v]) continue;
    if (v == net.receiver) {
      path.push_back(v);
      if (lex_left_search(net, used, path, total, out)) return true;
      path.pop_back();
      continue;
    }
    used[v] = 1;
    path.push_back(v);
    if (lex_left_search(net, used, path, total, out)) return true;
    path.pop_back();
    used[v] = 0;
  }
  return false;
}

// Lexicographically smallest shortest path avoiding `blocked`: greedy by
// BFS distance from the receiver.
std::vector<NodeId> lex_shortest_path(const Network& net,
                                      const std::vector<char>& blocked) {
  std::vector<int> dist(net.size(), -1);
  std::deque<NodeId> q;
  dist[net.receiver] = 0;
  q.push_back(net.receiver);
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop_front();
    for (NodeId v : net.neighbors(u)) {
      if (dist[v] >= 0 || (blocked[v] && v != net.sender)) continue;
      dist[v] = dist[u] + 1;
      q.push_back(v);
    }
  }
  std::vector<NodeId> path{net.sender};
  NodeId cur = net.sender;
  while (cur != net.receiver) {
    NodeId best = -1;
    for (NodeId v : net.neighbors(cur)) {
      if (blocked[v] && v != net.receiver) continue;
      if (dist[v] == dist[cur] - 1) {
        best = v;
        break;  // neighbors come sorted
      }
    }
    path.push_back(best);
    cur = best;
  }
  return path;
}

}  // namespace

std::optional<Circle> two_disjoint_paths(const Network& net) {
  net.validate();
  int n = net.size();
  SplitGraph g;
  g.adj.resize(2 * n);
  auto in = [](NodeId v) { return 2 * v; };
  auto out = [](NodeId v) { return 2 * v + 1; };
  for (NodeId v = 0; v < n; ++v) {
    bool terminal = (v == net.sender || v == net.receiver);
    g.add(in(v), out(v), terminal ? 2 : 1, terminal ? 0 : 1);
  }
  for (const auto& e : net.edges) {
    g.add(out(e.first), in(e.second), 1, 0);
    g.add(out(e.second), in(e.first), 1, 0);
  }
  auto costs = min_cost_flow(g, out(net.sender), in(net.receiver), 2);
  if (!costs) return std::nullopt;
  int total = (*costs)[0] + (*costs)[1];  // interior nodes over both paths

  // Canonical pair: smallest left sequence over all minimal pairs, then
  // smallest partner.
  std::vector<char> used(n, 0);
  used[net.sender] = used[net.receiver] = 1;
  std::vector<NodeId> path{net.sender}, leftp;
  if (!lex_left_search(net, used, path, total, leftp))
    return std::nullopt;  // unreachable once flow succeeded
  std::vector<char> blocked(n, 0);
  for (std::size_t i = 1; i + 1 < leftp.size(); ++i) blocked[leftp[i]] = 1;
  blocked[net.sender] = 1;
  Circle c;
  c.left = leftp;
  c.right = lex_shortest_path(net, blocked);
  c.validate(&net);
  return c;
}

std::vector<CircleRole> circle_roles(const Circle& circle, NodeId p) {
  const auto& L = circle.left;
  const auto& R = circle.right;
  if (p == circle.role_sender())
    return {{R[1], L[1], Side::kSender}, {L[1], R[1], Side::kSender}};
  if (p == circle.role_receiver()) {
    NodeId ik = L[L.size() - 2], jk = R[R.size() - 2];
    return {{ik, jk, Side::kReceiver}, {jk, ik, Side::kReceiver}};
  }
  for (std::size_t i = 1; i + 1 < L.size(); ++i)
    if (L[i] == p) return {{L[i - 1], L[i + 1], Side::kLeft}};
  for (std::size_t i = 1; i + 1 < R.size(); ++i)
    if (R[i] == p) return {{R[i - 1], R[i + 1], Side::kRight}};
  throw std::domain_error("node not on circle");
}

std::optional<NodeId> find_cut_vertex(const Network& net) {
  net.validate();
  std::vector<NodeId> order;
  for (NodeId v = 0; v < net.size(); ++v)
    if (v != net.sender && v != net.receiver) order.push_back(v);
  std::sort(order.begin(), order.end(),
            [&](NodeId a, NodeId b) { return net.nodes[a] < net.nodes[b]; });
  for (NodeId v : order) {
    std::vector<char> blocked(net.size(), 0);
    blocked[v] = 1;
    if (!shortest_partner(net, blocked)) return v;
  }
  return std::nullopt;
}

Circle circle_from_cycle(const std::vector<NodeId>& cycle, NodeId role_s,
                         NodeId role_r) {
  int n = static_cast<int>(cycle.size());
  int a = -1, b = -1;
  for (int i = 0; i < n; ++i) {
    if (cycle[i] == role_s) a = i;
    if (cycle[i] == role_r) b = i;
  }
  if (a < 0 || b < 0 || a == b)
    throw std::domain_error("roles must be distinct cycle nodes");
  Circle c;
  for (int i = a;; i = (i + 1) % n) {
    c.left.push_back(cycle[i]);
    if (i == b) break;
  }
  for (int i = a;; i = (i - 1 + n) % n) {
    c.right.push_back(cycle[i]);
    if (i == b) break;
  }
  c.validate(nullptr);
  return c;
}

Circle forced_single_path_circle(const std::vector<NodeId>& path) {
  if (path.size() < 3)
    throw std::invalid_argument("forced path needs an interior node");
  Circle c;
  c.left = path;
  c.right = path;
  return c;
}

}  // namespace robustcomm
