/*
 * Copyright 2025-2026 The wimesh Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <limits>
#include <queue>
#include <set>

#include "doctest.h"
#include "wimesh/routing.hpp"
#include "wimesh/topology.hpp"

using namespace wimesh;

// Brute-force Dijkstra over the hybrid graph, independent of the tree.
static std::vector<double> brute_dist(const Topology& t, SwitchId src,
                                      double wireless_weight) {
  const int n = t.n_switches();
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& l : t.links) {
    adj[l.a].push_back({l.b, 1.0});
    adj[l.b].push_back({l.a, 1.0});
  }
  for (SwitchId a : t.wi_set)
    for (SwitchId b : t.wi_set)
      if (a != b) adj[a].push_back({b, wireless_weight});
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[src] = 0;
  pq.push({0, src});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (auto [v, w] : adj[u])
      if (d + w < dist[v]) {
        dist[v] = d + w;
        pq.push({d + w, v});
      }
  }
  return dist;
}

static int walk_hops(const ForwardingTable& ft, SwitchId s, SwitchId d) {
  int hops = 0;
  std::set<SwitchId> seen;
  while (s != d) {
    REQUIRE(seen.insert(s).second);  // no switch repeats: cycle-free
    Hop h = ft.next_hop(s, d);
    REQUIRE(h.next != s);
    s = h.next;
    ++hops;
    REQUIRE(hops <= 1000);
  }
  return hops;
}

TEST_CASE("2x2 mesh tree has 3 edges and distance(0,3) == 2") {
  Topology t = build_mesh(2, 2, 4.0);
  ForwardingTable ft = build_forwarding(t, 1.0, 7);
  int tree_edges = 0;
  for (int s = 0; s < 4; ++s)
    tree_edges += static_cast<int>(ft.tree_neighbors(s).size());
  CHECK(tree_edges == 2 * 3);
  CHECK(ft.distance(0, 3) == 2);
  CHECK(walk_hops(ft, 0, 3) == 2);
}

TEST_CASE("next_hop to self is the local port") {
  Topology t = build_mesh(4, 4, 8.0);
  ForwardingTable ft = build_forwarding(t, 1.0, 9);
  for (int s = 0; s < 16; ++s) CHECK(ft.next_hop(s, s).port == Port::Local);
}

TEST_CASE("WI pairs are one wireless hop apart in the 8x8 overlay") {
  Topology t = partition_and_place_wis(build_mesh(8, 8, 20.0), 8);
  ForwardingTable ft = build_forwarding(t, 1.0, 3);
  // Tree distance between any two WI switches equals the brute shortest
  // path, which is 1 via the clique.
  auto d0 = brute_dist(t, t.wi_set.front(), 1.0);
  CHECK(d0[t.wi_set.back()] == doctest::Approx(1.0));
}

// Single-tree routing guarantees shortest paths from the Dijkstra start
// node; paths between other pairs follow the tree and can exceed the graph
// distance. Both facts are checked against the brute-force oracle, for any
// start seed.
TEST_CASE("tree paths are shortest from the start node, never shorter "
          "than the metric elsewhere") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
    Topology t = partition_and_place_wis(build_mesh(4, 4, 8.0), 8);
    ForwardingTable ft = build_forwarding(t, 1.0, seed);
    auto from_root = brute_dist(t, ft.root(), 1.0);
    for (int d = 0; d < 16; ++d)
      CHECK(walk_hops(ft, ft.root(), d) == doctest::Approx(from_root[d]));
    for (int s = 0; s < 16; ++s) {
      auto bf = brute_dist(t, s, 1.0);
      for (int d = 0; d < 16; ++d)
        CHECK(walk_hops(ft, s, d) >= bf[d] - 1e-9);
    }
  }
}

TEST_CASE("routes from a non-WI switch to a far subnet reach the WI first") {
  Topology t = partition_and_place_wis(build_mesh(8, 8, 20.0), 8);
  ForwardingTable ft = build_forwarding(t, 1.0, 5);
  int wireless_routes = 0;
  for (int s = 0; s < 64 && wireless_routes == 0; ++s) {
    if (t.is_wi(s)) continue;
    for (int d = 0; d < 64; ++d) {
      if (t.subnet_of[d] == t.subnet_of[s]) continue;
      SwitchId cur = s;
      while (cur != d) {
        Hop h = ft.next_hop(cur, d);
        if (h.port == Port::Wireless) {
          CHECK(t.is_wi(cur));  // wireless hops start at WIs only
          ++wireless_routes;
          break;
        }
        cur = h.next;
      }
      if (wireless_routes > 0) break;
    }
  }
  CHECK(wireless_routes > 0);
}

TEST_CASE("tree adjacency forms a spanning tree") {
  Topology t = partition_and_place_wis(build_mesh(8, 8, 20.0), 8);
  ForwardingTable ft = build_forwarding(t, 1.0, 17);
  int edge_endpoints = 0;
  for (int s = 0; s < 64; ++s)
    edge_endpoints += static_cast<int>(ft.tree_neighbors(s).size());
  CHECK(edge_endpoints == 2 * 63);  // n-1 edges, each listed twice
}

TEST_CASE("broadcast child sets cover the tree exactly once") {
  Topology t = partition_and_place_wis(build_mesh(4, 4, 8.0), 4);
  ForwardingTable ft = build_forwarding(t, 1.0, 23);
  // Flood from every source using neighbour-precise hops; every switch must
  // be visited exactly once.
  for (int src = 0; src < 16; ++src) {
    std::vector<int> visits(16, 0);
    std::vector<std::pair<SwitchId, SwitchId>> frontier;  // (node, from)
    frontier.push_back({src, -1});
    while (!frontier.empty()) {
      auto [node, from] = frontier.back();
      frontier.pop_back();
      visits[node] += 1;
      for (const Hop& h : ft.broadcast_hops_excluding(node, from))
        frontier.push_back({h.next, node});
    }
    for (int s = 0; s < 16; ++s) CHECK(visits[s] == 1);
  }
}

TEST_CASE("broadcast_ports excludes the arrival port and adds local") {
  Topology t = build_mesh(3, 3, 6.0);
  ForwardingTable ft = build_forwarding(t, 1.0, 2);
  // A tree leaf forwards an incoming broadcast only to its core.
  for (int s = 0; s < 9; ++s) {
    if (ft.tree_neighbors(s).size() != 1) continue;
    Port arrival = ft.tree_neighbors(s)[0].port;
    auto ports = ft.broadcast_ports(s, arrival);
    REQUIRE(ports.size() == 1);
    CHECK(ports[0] == Port::Local);
  }
  // Injection at the root fans out to every tree port, local excluded.
  SwitchId root = ft.root();
  auto ports = ft.broadcast_ports(root, Port::Local);
  CHECK(ports.size() == ft.tree_neighbors(root).size());
  for (Port p : ports) CHECK(p != Port::Local);
}

TEST_CASE("disconnected topology is rejected") {
  Topology t = build_mesh(2, 2, 4.0);
  t.links.clear();
  CHECK_THROWS_AS(build_forwarding(t, 1.0, 1), ConfigError);
}

TEST_CASE("forwarding dump has a row per pair") {
  Topology t = build_mesh(2, 2, 4.0);
  ForwardingTable ft = build_forwarding(t, 1.0, 1);
  std::string csv = ft.dump_csv();
  size_t rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == 1 + 16);  // header + 4x4 pairs
}
