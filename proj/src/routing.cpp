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

#include "wimesh/routing.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

namespace wimesh {

const char* port_name(Port p) {
  switch (p) {
    case Port::Local: return "local";
    case Port::North: return "north";
    case Port::South: return "south";
    case Port::East: return "east";
    case Port::West: return "west";
    case Port::Wireless: return "wireless";
  }
  return "?";
}

namespace {

// Port at `from` leading to the cardinal neighbour `to`.
Port wired_port_between(const Topology& t, SwitchId from, SwitchId to) {
  int dr = t.row_of(to) - t.row_of(from);
  int dc = t.col_of(to) - t.col_of(from);
  if (dr == -1 && dc == 0) return Port::North;
  if (dr == 1 && dc == 0) return Port::South;
  if (dr == 0 && dc == 1) return Port::East;
  if (dr == 0 && dc == -1) return Port::West;
  throw ProtocolError("switches are not cardinal neighbours");
}

struct Edge {
  SwitchId to;
  double weight;
  bool wireless;
};

}  // namespace

bool ForwardingTable::wireless_tree_edge(SwitchId a, SwitchId b) const {
  for (const Hop& h : tree_adj_[a])
    if (h.port == Port::Wireless && h.next == b) return true;
  return false;
}

std::vector<Port> ForwardingTable::broadcast_ports(SwitchId here,
                                                   Port arrival) const {
  std::vector<Port> out;
  bool wireless_added = false;
  for (const Hop& h : tree_adj_[here]) {
    if (h.port == arrival) continue;
    if (h.port == Port::Wireless) {
      if (!wireless_added) out.push_back(Port::Wireless);
      wireless_added = true;
    } else {
      out.push_back(h.port);
    }
  }
  if (arrival != Port::Local) out.push_back(Port::Local);
  return out;
}

std::vector<Hop> ForwardingTable::broadcast_hops_excluding(
    SwitchId here, SwitchId from_neighbor) const {
  std::vector<Hop> out;
  for (const Hop& h : tree_adj_[here])
    if (h.next != from_neighbor) out.push_back(h);
  return out;
}

std::vector<SwitchId> ForwardingTable::wireless_tree_peers(
    SwitchId here) const {
  std::vector<SwitchId> peers;
  for (const Hop& h : tree_adj_[here])
    if (h.port == Port::Wireless) peers.push_back(h.next);
  return peers;
}

std::string ForwardingTable::dump_csv() const {
  std::ostringstream os;
  os << "switch,dest,port,next\n";
  for (int s = 0; s < n_; ++s)
    for (int d = 0; d < n_; ++d) {
      Hop h = next_hop(s, d);
      os << s << "," << d << "," << port_name(h.port) << "," << h.next
         << "\n";
    }
  return os.str();
}

ForwardingTable build_forwarding(const Topology& t,
                                 double wireless_hop_weight,
                                 std::uint64_t seed) {
  const int n = t.n_switches();
  std::vector<std::vector<Edge>> adj(n);
  for (const auto& l : t.links) {
    adj[l.a].push_back({l.b, 1.0, false});
    adj[l.b].push_back({l.a, 1.0, false});
  }
  for (size_t i = 0; i < t.wi_set.size(); ++i)
    for (size_t j = 0; j < t.wi_set.size(); ++j)
      if (i != j)
        adj[t.wi_set[i]].push_back(
            {t.wi_set[j], wireless_hop_weight, true});
  for (auto& v : adj)
    std::sort(v.begin(), v.end(),
              [](const Edge& a, const Edge& b) { return a.to < b.to; });

  std::mt19937_64 rng(splitmix64(seed ^ 0x726f757465ull));
  SwitchId root = static_cast<SwitchId>(rng() % n);

  // Dijkstra with deterministic tie-breaks: pop order (dist, node id),
  // prefer the lower-id parent on equal path cost.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  std::vector<SwitchId> parent(n, -1);
  std::vector<bool> parent_wireless(n, false);
  using Item = std::pair<double, SwitchId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[root] = 0.0;
  pq.push({0.0, root});
  std::vector<bool> done(n, false);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = true;
    for (const Edge& e : adj[u]) {
      double nd = d + e.weight;
      if (nd < dist[e.to] ||
          (nd == dist[e.to] && parent[e.to] != -1 && u < parent[e.to])) {
        dist[e.to] = nd;
        parent[e.to] = u;
        parent_wireless[e.to] = e.wireless;
        pq.push({nd, e.to});
      }
    }
  }
  for (int s = 0; s < n; ++s)
    if (dist[s] == kInf) throw ConfigError("topology is not connected");

  ForwardingTable ft;
  ft.n_ = n;
  ft.root_ = root;
  ft.tree_adj_.assign(n, {});
  auto port_for = [&](SwitchId from, SwitchId to, bool wireless) {
    return wireless ? Port::Wireless : wired_port_between(t, from, to);
  };
  std::vector<std::vector<SwitchId>> children(n);
  for (int s = 0; s < n; ++s) {
    if (parent[s] < 0) continue;
    ft.tree_adj_[s].push_back(
        {port_for(s, parent[s], parent_wireless[s]), parent[s]});
    ft.tree_adj_[parent[s]].push_back(
        {port_for(parent[s], s, parent_wireless[s]), s});
    children[parent[s]].push_back(s);
  }
  for (auto& v : ft.tree_adj_)
    std::sort(v.begin(), v.end(),
              [](const Hop& a, const Hop& b) { return a.next < b.next; });

  // For each destination, walk the tree rooted at that destination: the next
  // hop from s toward d is s's parent in that orientation.
  ft.table_.assign(static_cast<size_t>(n) * n, Hop{});
  ft.dist_.assign(static_cast<size_t>(n) * n, 0);
  std::vector<SwitchId> stack;
  for (int d = 0; d < n; ++d) {
    ft.table_[static_cast<size_t>(d) * n + d] = {Port::Local, d};
    stack.assign(1, d);
    std::vector<bool> seen(n, false);
    seen[d] = true;
    while (!stack.empty()) {
      SwitchId u = stack.back();
      stack.pop_back();
      for (const Hop& h : ft.tree_adj_[u]) {
        if (seen[h.next]) continue;
        seen[h.next] = true;
        // From h.next, the hop toward d goes back to u.
        Port back = Port::Local;
        for (const Hop& r : ft.tree_adj_[h.next])
          if (r.next == u) back = r.port;
        ft.table_[static_cast<size_t>(h.next) * n + d] = {back, u};
        ft.dist_[static_cast<size_t>(h.next) * n + d] =
            ft.dist_[static_cast<size_t>(u) * n + d] + 1;
        stack.push_back(h.next);
      }
    }
  }
  return ft;
}

}  // namespace wimesh
